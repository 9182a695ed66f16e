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

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <complex>
#include <unordered_map>
#include <vector>

#include "uccmc/errors.hpp"
#include "uccmc/fock_space.hpp"
#include "uccmc/integrals.hpp"
#include "uccmc/qubit_map.hpp"

namespace uccmc {

/// Dense register of 2^n complex amplitudes; basis index b has qubit q in bit q.
class StateVector {
 public:
  static constexpr int kMaxQubits = 24;

  explicit StateVector(int n_qubits, Bits basis = 0) : n_(n_qubits) {
    if (n_qubits < 1 || n_qubits > kMaxQubits) throw DomainError("register size out of range");
    if (basis >> n_qubits) throw DomainError("basis state outside the register");
    amps_.assign(std::size_t{1} << n_qubits, cplx{});
    amps_[basis] = 1.0;
  }
  StateVector(int n_qubits, std::vector<cplx> amps) : n_(n_qubits), amps_(std::move(amps)) {
    if (n_qubits < 1 || n_qubits > kMaxQubits || amps_.size() != (std::size_t{1} << n_qubits)) {
      throw DomainError("amplitude vector does not match the register size");
    }
  }

  int n_qubits() const noexcept { return n_; }
  std::size_t dim() const noexcept { return amps_.size(); }
  const std::vector<cplx>& amps() const noexcept { return amps_; }
  std::vector<cplx>& amps() noexcept { return amps_; }
  cplx operator[](std::size_t b) const { return amps_[b]; }

  double norm() const {
    double s = 0.0;
    for (const auto& a : amps_) s += std::norm(a);
    return std::sqrt(s);
  }
  cplx inner(const StateVector& o) const {
    check(o);
    cplx s{};
    for (std::size_t b = 0; b < amps_.size(); ++b) s += std::conj(amps_[b]) * o.amps_[b];
    return s;
  }
  void check(const StateVector& o) const {
    if (o.n_ != n_) throw DomainError("register size mismatch");
  }

 private:
  int n_;
  std::vector<cplx> amps_;
};

/// s <- exp(-i angle/2 P) s.
inline void apply_gadget(StateVector& s, const PauliString& p, double angle) {
  if (((p.x | p.z) >> s.n_qubits()) != 0) throw DomainError("Pauli string does not fit the register");
  const double c = std::cos(0.5 * angle), sn = std::sin(0.5 * angle);
  auto& a = s.amps();
  const std::size_t dim = a.size();
  if (p.x == 0) {
    // Diagonal: P|b> = +-|b>.
    const cplx plus(c, -sn), minus(c, sn);
    for (std::size_t b = 0; b < dim; ++b) a[b] *= (std::popcount(b & p.z) & 1) ? minus : plus;
    return;
  }
  const Bits high = Bits{1} << (63 - std::countl_zero(p.x));
  const cplx mis(0.0, -sn);
  for (std::size_t b = 0; b < dim; ++b) {
    if (b & high) continue;
    const std::size_t bp = b ^ p.x;
    const cplx ab = a[b], abp = a[bp];
    // P|b> = phase(b)|bp>, P|bp> = phase(bp)|b>.
    a[b] = c * ab + mis * p.phase(bp) * abp;
    a[bp] = c * abp + mis * p.phase(b) * ab;
  }
}

inline StateVector apply_gadget(const StateVector& s, const Gadget& g) {
  StateVector out = s;
  apply_gadget(out, g.pauli, g.angle);
  return out;
}

/// Operator terms grouped by X mask so that one pass over the register handles
/// all strings sharing a bit-flip pattern.
class CompiledOperator {
 public:
  explicit CompiledOperator(const QubitOperator& op) : n_(op.n_qubits()) {
    std::map<Bits, std::size_t> index;
    for (const auto& [p, c] : op.terms()) {
      auto [it, inserted] = index.emplace(p.x, groups_.size());
      if (inserted) groups_.push_back({p.x, {}});
      groups_[it->second].terms.push_back({p.z, c * ipow(p.n_y())});
    }
  }
  int n_qubits() const noexcept { return n_; }

  /// out += O in.
  void apply(const std::vector<cplx>& in, std::vector<cplx>& out) const {
    const std::size_t dim = in.size();
    for (const auto& g : groups_)
      for (std::size_t b = 0; b < dim; ++b) {
        if (in[b] == cplx{}) continue;
        cplx f{};
        for (const auto& [z, c] : g.terms) f += (std::popcount(b & z) & 1) ? -c : c;
        out[b ^ g.x] += f * in[b];
      }
  }

 private:
  struct Group {
    Bits x;
    std::vector<std::pair<Bits, cplx>> terms;
  };
  int n_;
  std::vector<Group> groups_;
};

inline StateVector apply_operator(const QubitOperator& op, const StateVector& s) {
  if (op.n_qubits() != s.n_qubits()) throw DomainError("register size mismatch");
  std::vector<cplx> out(s.dim());
  CompiledOperator(op).apply(s.amps(), out);
  return StateVector(s.n_qubits(), std::move(out));
}

/// <s|op|s> for a Hermitian operator.
inline double expectation(const StateVector& s, const QubitOperator& op) {
  if (!op.is_hermitian()) throw DomainError("expectation requires a Hermitian operator");
  const cplx v = s.inner(apply_operator(op, s));
  if (std::abs(v.imag()) > 1e-10 * std::max(1.0, std::abs(v.real()))) {
    throw DomainError("expectation value has an imaginary part");
  }
  return v.real();
}

inline Eigen::MatrixXcd dense_matrix(const QubitOperator& op) {
  if (op.n_qubits() > 14) throw DomainError("dense matrix limited to 14 qubits");
  const std::size_t dim = std::size_t{1} << op.n_qubits();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& [p, c] : op.terms())
    for (std::size_t b = 0; b < dim; ++b) m(b ^ p.x, b) += c * p.phase(b);
  return m;
}

/// Slater-Condon Hamiltonian over a list of determinants.
inline Eigen::SparseMatrix<double> ci_matrix(const IntegralTable& t, const std::vector<Determinant>& dets) {
  std::vector<Eigen::Triplet<double>> trip;
  for (std::size_t i = 0; i < dets.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      if (std::popcount(dets[i].occ ^ dets[j].occ) > 4) continue;
      const double v = slater_condon(t, dets[i], dets[j]);
      if (v == 0.0) continue;
      trip.emplace_back(i, j, v);
      if (i != j) trip.emplace_back(j, i, v);
    }
  Eigen::SparseMatrix<double> h(dets.size(), dets.size());
  h.setFromTriplets(trip.begin(), trip.end());
  return h;
}

/// Lowest eigenpair of a real symmetric sparse matrix: dense solver for small
/// dimensions, Davidson with a diagonal preconditioner otherwise.
inline std::pair<double, Eigen::VectorXd> lowest_eigenpair(const Eigen::SparseMatrix<double>& h,
                                                           double tol = 1e-10, int max_iter = 500) {
  const Eigen::Index n = h.rows();
  if (n == 0) throw DomainError("empty matrix");
  if (n <= 400) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(h)};
    return {es.eigenvalues()(0), es.eigenvectors().col(0)};
  }
  const Eigen::VectorXd diag = h.diagonal();
  Eigen::Index start;
  diag.minCoeff(&start);
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(n, 1);
  v(start, 0) = 1.0;
  Eigen::MatrixXd hv = h * v;
  double theta = 0.0;
  Eigen::VectorXd x;
  const int max_space = 40;
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::MatrixXd small = v.transpose() * hv;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(small);
    theta = es.eigenvalues()(0);
    const Eigen::VectorXd y = es.eigenvectors().col(0);
    x = v * y;
    Eigen::VectorXd r = hv * y - theta * x;
    if (r.norm() < tol) return {theta, x};
    for (Eigen::Index k = 0; k < n; ++k) {
      const double d = theta - diag(k);
      r(k) /= std::abs(d) > 1e-8 ? d : 1e-8;
    }
    if (v.cols() >= max_space) {
      v = x.normalized();
      hv = h * v;
    }
    for (int pass = 0; pass < 2; ++pass) r -= v * (v.transpose() * r);
    const double rn = r.norm();
    if (rn < 1e-14) return {theta, x};
    v.conservativeResize(Eigen::NoChange, v.cols() + 1);
    v.col(v.cols() - 1) = r / rn;
    hv.conservativeResize(Eigen::NoChange, hv.cols() + 1);
    hv.col(hv.cols() - 1) = h * v.col(v.cols() - 1);
  }
  throw DomainError("Davidson did not converge");
}

/// Ground-state energy of the Hamiltonian restricted to determinants with the
/// given electron count, 2*M_s and spatial irrep (irrep < 0: any irrep).
inline double fci_oracle(const IntegralTable& t, int n_elec, int ms2, int irrep) {
  if ((n_elec + ms2) % 2 != 0 || std::abs(ms2) > n_elec) throw DomainError("inconsistent NELEC/MS2");
  const int na = (n_elec + ms2) / 2, nb = (n_elec - ms2) / 2;
  const auto dets = sector_determinants(t.n_orb(), na, nb, irrep, t.orb_sym());
  if (dets.empty()) throw DomainError("empty symmetry sector");
  return lowest_eigenpair(ci_matrix(t, dets)).first;
}

/// Sector of the table's own Aufbau reference.
inline double fci_oracle(const IntegralTable& t) {
  return fci_oracle(t, t.n_elec(), t.ms2(), determinant_irrep(aufbau_reference(t), t.orb_sym()));
}

}  // namespace uccmc
