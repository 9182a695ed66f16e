// Copyright 2026 The uccmc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Trotterized UCC ansatz, energy/gradient evaluation and L-BFGS minimisation.
//
// Two interchangeable evaluators implement the same objective:
//   GadgetEvaluator  applies Pauli gadgets to a 2^n complex state vector.
//   SectorEvaluator  applies the equivalent plane rotations to real amplitudes
//                    on the determinants reachable from the reference.
// Both give the gradient by reverse-mode (adjoint) differentiation.

#include <Eigen/Sparse>
#include <algorithm>
#include <concepts>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "uccmc/errors.hpp"
#include "uccmc/fock_space.hpp"
#include "uccmc/lbfgs.hpp"
#include "uccmc/qubit_map.hpp"
#include "uccmc/sector.hpp"
#include "uccmc/simulator.hpp"

namespace uccmc {

struct AnsatzSpec {
  Determinant reference;
  int n_qubits = 0;
  std::vector<Excitor> excitors;
  std::vector<double> init_params;
  std::string ordering_tag = "singles-doubles";

  /// Throws DomainError on duplicates, size mismatch or excitors that do not
  /// act on the reference.
  void validate() const {
    if (init_params.size() != excitors.size()) throw DomainError("init_params length does not match excitors");
    if (n_qubits < 1 || n_qubits > 64) throw DomainError("register size out of range");
    std::set<std::string> seen;
    for (const auto& e : excitors) {
      if (!seen.insert(e.key()).second) throw DomainError("duplicate excitor " + e.key());
      if ((e.from_mask() | e.to_mask()) >> n_qubits) throw DomainError("excitor outside register: " + e.key());
      if (!apply_excitor(reference, e)) throw DomainError("excitor does not act on the reference: " + e.key());
    }
    for (double v : init_params)
      if (!std::isfinite(v)) throw DomainError("non-finite initial amplitude");
  }
};

/// Default ansatz: every excitor, singles then doubles, zero initial amplitudes.
inline AnsatzSpec make_ansatz(const Determinant& reference, int n_qubits, std::vector<Excitor> excitors) {
  AnsatzSpec spec;
  spec.reference = reference;
  spec.n_qubits = n_qubits;
  std::stable_sort(excitors.begin(), excitors.end(),
                   [](const Excitor& a, const Excitor& b) { return a.level() < b.level(); });
  spec.excitors = std::move(excitors);
  spec.init_params.assign(spec.excitors.size(), 0.0);
  spec.validate();
  return spec;
}

/// New order: position i holds old element permutation[i].
inline AnsatzSpec reorder_ansatz(const AnsatzSpec& spec, const std::vector<std::size_t>& permutation) {
  const std::size_t n = spec.excitors.size();
  if (permutation.size() != n) throw DomainError("permutation has the wrong length");
  std::vector<char> used(n, 0);
  for (auto p : permutation) {
    if (p >= n || used[p]) throw DomainError("not a permutation");
    used[p] = 1;
  }
  AnsatzSpec out = spec;
  bool identity = true;
  for (std::size_t i = 0; i < n; ++i) {
    out.excitors[i] = spec.excitors[permutation[i]];
    out.init_params[i] = spec.init_params[permutation[i]];
    identity = identity && permutation[i] == i;
  }
  if (!identity) out.ordering_tag = "permuted";
  return out;
}

inline AnsatzSpec reversed_ansatz(const AnsatzSpec& spec) {
  std::vector<std::size_t> perm(spec.excitors.size());
  std::iota(perm.rbegin(), perm.rend(), 0);
  AnsatzSpec out = reorder_ansatz(spec, perm);
  out.ordering_tag = "reversed";
  return out;
}

template <class E>
concept Evaluator = requires(E& e, const std::vector<double>& x, std::vector<double>& g) {
  { e.energy_and_gradient(x, g) } -> std::convertible_to<double>;
  { e.energy(x) } -> std::convertible_to<double>;
};

/// State-vector evaluator: gadgets on 2^n complex amplitudes.
class GadgetEvaluator {
 public:
  GadgetEvaluator(const AnsatzSpec& spec, const QubitOperator& h) : spec_(spec), h_(h) {
    spec_.validate();
    if (h.n_qubits() != spec.n_qubits) throw DomainError("Hamiltonian register does not match the ansatz");
    if (!h.is_hermitian()) throw DomainError("Hamiltonian is not Hermitian");
    for (const auto& e : spec_.excitors) {
      const QubitOperator g = jw_excitation(e, spec_.n_qubits);
      generators_.emplace_back(g);
      std::vector<std::pair<PauliString, double>> w;
      for (const auto& [p, c] : g.terms()) w.emplace_back(p, c.imag());
      strings_.push_back(std::move(w));
    }
  }

  StateVector state(const std::vector<double>& params) const {
    check(params);
    StateVector s(spec_.n_qubits, spec_.reference.occ);
    for (std::size_t k = 0; k < params.size(); ++k) apply_factor(s, k, params[k]);
    return s;
  }

  double energy(const std::vector<double>& params) const {
    const StateVector s = state(params);
    std::vector<cplx> hs(s.dim());
    h_.apply(s.amps(), hs);
    cplx e{};
    for (std::size_t b = 0; b < hs.size(); ++b) e += std::conj(s[b]) * hs[b];
    return e.real();
  }

  double energy_and_gradient(const std::vector<double>& params, std::vector<double>& grad) const {
    StateVector psi = state(params);
    std::vector<cplx> lam(psi.dim());
    h_.apply(psi.amps(), lam);
    cplx e{};
    for (std::size_t b = 0; b < lam.size(); ++b) e += std::conj(psi[b]) * lam[b];
    StateVector lambda(spec_.n_qubits, std::move(lam));
    grad.assign(params.size(), 0.0);
    std::vector<cplx> gpsi(psi.dim());
    for (std::size_t k = params.size(); k-- > 0;) {
      std::fill(gpsi.begin(), gpsi.end(), cplx{});
      generators_[k].apply(psi.amps(), gpsi);
      cplx acc{};
      for (std::size_t b = 0; b < gpsi.size(); ++b) acc += std::conj(lambda[b]) * gpsi[b];
      grad[k] = 2.0 * acc.real();
      apply_factor(psi, k, -params[k]);
      apply_factor(lambda, k, -params[k]);
    }
    return e.real();
  }

  const AnsatzSpec& spec() const noexcept { return spec_; }

 private:
  void check(const std::vector<double>& params) const {
    if (params.size() != spec_.excitors.size()) throw DomainError("parameter count does not match the ansatz");
  }
  void apply_factor(StateVector& s, std::size_t k, double t) const {
    for (const auto& [p, w] : strings_[k]) apply_gadget(s, p, -2.0 * t * w);
  }

  AnsatzSpec spec_;
  CompiledOperator h_;
  std::vector<CompiledOperator> generators_;
  std::vector<std::vector<std::pair<PauliString, double>>> strings_;
};

/// Sector evaluator: real plane rotations on the determinants reachable from
/// the reference; the Hamiltonian is either Slater-Condon or a projected
/// qubit operator.
class SectorEvaluator {
 public:
  SectorEvaluator(const AnsatzSpec& spec, const IntegralTable& active)
      : spec_(checked(spec)), space_(spec.reference, spec.excitors), h_(space_.hamiltonian(active)) {}
  SectorEvaluator(const AnsatzSpec& spec, const QubitOperator& h)
      : spec_(checked(spec)), space_(spec.reference, spec.excitors), h_(space_.hamiltonian(h)) {
    if (h.n_qubits() != spec.n_qubits) throw DomainError("Hamiltonian register does not match the ansatz");
    if (!h.is_hermitian()) throw DomainError("Hamiltonian is not Hermitian");
  }

  const SectorSpace& space() const noexcept { return space_; }
  const AnsatzSpec& spec() const noexcept { return spec_; }

  Eigen::VectorXd state(const std::vector<double>& params) const { return space_.state(params); }

  double energy(const std::vector<double>& params) const {
    const Eigen::VectorXd v = state(params);
    return v.dot(h_ * v);
  }

  double energy_and_gradient(const std::vector<double>& params, std::vector<double>& grad) const {
    Eigen::VectorXd psi = state(params);
    Eigen::VectorXd lambda = h_ * psi;
    const double e = psi.dot(lambda);
    grad.assign(params.size(), 0.0);
    for (std::size_t k = params.size(); k-- > 0;) {
      grad[k] = 2.0 * space_.generator_element(k, lambda, psi);
      space_.rotate(k, -params[k], psi);
      space_.rotate(k, -params[k], lambda);
    }
    return e;
  }

  /// Lowest eigenvalue of H restricted to the reachable determinants; a lower
  /// bound for every energy of this ansatz.
  double subspace_ground_energy() const {
    return lowest_eigenpair(Eigen::SparseMatrix<double>(h_)).first;
  }

 private:
  static const AnsatzSpec& checked(const AnsatzSpec& s) {
    s.validate();
    return s;
  }
  AnsatzSpec spec_;
  SectorSpace space_;
  Eigen::SparseMatrix<double, Eigen::RowMajor> h_;
};

struct VqeResult {
  double energy = 0.0;
  std::vector<double> params;
  int iterations = 0;
  double grad_norm = 0.0;
  int evaluations = 0;
  bool converged = false;
  std::vector<double> trace;  // energy at every evaluation
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, VqeResult best) : Error(what), best_(std::move(best)) {}
  const VqeResult& best() const noexcept { return best_; }

 private:
  VqeResult best_;
};

struct VqeOptions {
  double tol = 1e-8;
  int max_iterations = 10000;
};

/// L-BFGS from spec.init_params; throws ConvergenceError with the best point
/// when the gradient tolerance is not reached.
template <Evaluator E>
VqeResult minimize(const E& evaluator, const std::vector<double>& init, const VqeOptions& opt = {}) {
  if (!(opt.tol > 0.0)) throw DomainError("tolerance must be positive");
  VqeResult out;
  LbfgsOptions lo;
  lo.grad_tol = opt.tol;
  lo.max_iterations = opt.max_iterations;
  auto fn = [&](const std::vector<double>& x, std::vector<double>& g) {
    const double e = evaluator.energy_and_gradient(x, g);
    out.trace.push_back(e);
    return e;
  };
  const LbfgsResult r = lbfgs_minimize(fn, init, lo);
  out.energy = r.f;
  out.params = r.x;
  out.iterations = r.iterations;
  out.grad_norm = r.grad_inf;
  out.evaluations = r.evaluations;
  out.converged = r.converged;
  if (!r.converged) throw ConvergenceError("VQE did not converge: " + r.message, out);
  return out;
}

template <Evaluator E>
VqeResult minimize(const E& evaluator, const VqeOptions& opt = {}) {
  return minimize(evaluator, evaluator.spec().init_params, opt);
}

/// Sector-backed minimisation with a qubit Hamiltonian.
inline VqeResult minimize(const AnsatzSpec& spec, const QubitOperator& h, double tol = 1e-8) {
  VqeOptions opt;
  opt.tol = tol;
  return minimize(SectorEvaluator(spec, h), opt);
}

inline StateVector prepare_state(const AnsatzSpec& spec, const std::vector<double>& params) {
  return GadgetEvaluator(spec, QubitOperator::identity(spec.n_qubits)).state(params);
}

inline std::pair<double, std::vector<double>> energy_and_gradient(const AnsatzSpec& spec,
                                                                  const std::vector<double>& params,
                                                                  const QubitOperator& h) {
  std::vector<double> g;
  const double e = GadgetEvaluator(spec, h).energy_and_gradient(params, g);
  return {e, std::move(g)};
}

}  // namespace uccmc
