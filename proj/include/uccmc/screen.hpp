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

// Amplitude screening of the UCCSD ansatz and circuit cost accounting.

#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "uccmc/errors.hpp"
#include "uccmc/fock_space.hpp"
#include "uccmc/qmc.hpp"
#include "uccmc/qubit_map.hpp"
#include "uccmc/vqe.hpp"

namespace uccmc {

using KeptList = std::vector<std::pair<Excitor, double>>;

/// Excitors with |t| > threshold, in canonical order, carrying t as the
/// starting value.
inline KeptList screen(const std::map<Excitor, double>& amplitudes, double threshold) {
  if (!(threshold > 0.0)) throw DomainError("screening threshold must be positive");
  KeptList kept;
  for (const auto& [e, t] : amplitudes)
    if (std::abs(t) > threshold) kept.emplace_back(e, t);
  return kept;
}

/// Amplitudes laid out in ansatz order; excitors missing from the map get 0.
inline std::vector<double> parameters_from_map(const std::vector<Excitor>& order,
                                               const std::map<Excitor, double>& amplitudes) {
  std::vector<double> out;
  out.reserve(order.size());
  for (const auto& e : order) {
    auto it = amplitudes.find(e);
    out.push_back(it == amplitudes.end() ? 0.0 : it->second);
  }
  return out;
}

/// Ansatz energy at the block-averaged amplitudes. The energy is quadratic
/// about its minimum, so averaging per-block energies is biased upwards; the
/// jackknife over leave-one-block-out averages removes the leading bias and
/// gives the error bar.
template <Evaluator E>
WindowEstimate variational_estimate(const E& evaluator, const std::vector<AmplitudeSnapshot>& blocks) {
  if (blocks.empty()) throw DomainError("no snapshots");
  const auto& order = evaluator.spec().excitors;
  const std::size_t n = blocks.size();
  std::vector<std::vector<double>> p;
  std::vector<double> sum(order.size(), 0.0);
  for (const auto& b : blocks) {
    p.push_back(parameters_from_map(order, b.t));
    for (std::size_t k = 0; k < order.size(); ++k) sum[k] += p.back()[k];
  }
  std::vector<double> mean(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) mean[k] = sum[k] / n;
  WindowEstimate est;
  est.blocks = static_cast<int>(n);
  est.mean = evaluator.energy(mean);
  if (n < 2) return est;
  std::vector<double> loo(n);
  double loo_mean = 0.0;
  for (std::size_t b = 0; b < n; ++b) {
    std::vector<double> x(order.size());
    for (std::size_t k = 0; k < order.size(); ++k) x[k] = (sum[k] - p[b][k]) / (n - 1);
    loo[b] = evaluator.energy(x);
    loo_mean += loo[b] / n;
  }
  double var = 0.0;
  for (double e : loo) var += (e - loo_mean) * (e - loo_mean);
  est.error = std::sqrt(var * (n - 1) / n);
  est.mean = n * est.mean - (n - 1) * loo_mean;
  return est;
}

/// 100 (E_HF - E_screened) / (E_HF - E_full).
inline double pct_ecorr(double screened_e, double full_e, double hf_e) {
  if (hf_e == full_e) throw DomainError("no correlation energy: full energy equals the reference energy");
  return 100.0 * (hf_e - screened_e) / (hf_e - full_e);
}

struct DepthRecord {
  long cnots = 0;
  long gadgets = 0;
  long parameters = 0;
};

/// CNOT count of the gadget circuit without cancellation between gadgets: a
/// weight-k Pauli gadget costs a ladder of k-1 CNOTs on each side.
inline DepthRecord depth_estimate(const std::vector<Excitor>& kept, int n_qubits) {
  DepthRecord d;
  for (const auto& e : kept) {
    ++d.parameters;
    for (const auto& g : pauli_gadget_sequence(e, 1.0, n_qubits)) {
      ++d.gadgets;
      d.cnots += 2L * (g.pauli.weight() - 1);
    }
  }
  return d;
}

inline DepthRecord depth_estimate(const KeptList& kept, int n_qubits) {
  std::vector<Excitor> ex;
  for (const auto& [e, t] : kept) ex.push_back(e);
  return depth_estimate(ex, n_qubits);
}

struct ScreenReport {
  std::string source;  // "tpuccmc" or "mp2"
  double threshold = 0.0;
  KeptList kept;
  std::vector<double> optimized;  // final VQE amplitudes of the kept excitors
  int hilbert_size = 0;           // excitors plus the reference determinant
  double energy = 0.0;
  double full_energy = 0.0;
  double hf_energy = 0.0;
  double pct_ecorr = 0.0;
  DepthRecord depth;
  DepthRecord full_depth;
  int vqe_iterations = 0;
  bool evaluated = false;  // energies filled in by screened_vqe
};

/// Kept set and circuit cost at `threshold`, without the VQE step.
inline ScreenReport screen_plan(const AnsatzSpec& full, const std::map<Excitor, double>& amplitudes, double threshold,
                                const std::string& source) {
  ScreenReport r;
  r.source = source;
  r.threshold = threshold;
  r.kept = screen(amplitudes, threshold);
  r.hilbert_size = static_cast<int>(full.excitors.size()) + 1;
  std::map<Excitor, double> kept_map(r.kept.begin(), r.kept.end());
  std::vector<Excitor> ordered;
  for (const auto& e : full.excitors)
    if (kept_map.count(e)) ordered.push_back(e);
  if (ordered.size() != r.kept.size()) throw DomainError("screened excitor outside the full ansatz");
  r.depth = depth_estimate(ordered, full.n_qubits);
  r.full_depth = depth_estimate(full.excitors, full.n_qubits);
  return r;
}

/// Screens at `threshold`, re-optimises every kept amplitude from its
/// screened value and compares with the full-ansatz energy.
inline ScreenReport screened_vqe(const IntegralTable& active, const AnsatzSpec& full,
                                 const std::map<Excitor, double>& amplitudes, double threshold, double full_energy,
                                 const std::string& source, const VqeOptions& opt = {}) {
  ScreenReport r = screen_plan(full, amplitudes, threshold, source);
  r.evaluated = true;
  r.hf_energy = diagonal_energy(active, full.reference);
  r.full_energy = full_energy;
  AnsatzSpec spec;
  spec.reference = full.reference;
  spec.n_qubits = full.n_qubits;
  spec.ordering_tag = full.ordering_tag;
  // Keep the order of the full ansatz.
  std::map<Excitor, double> kept_map(r.kept.begin(), r.kept.end());
  for (const auto& e : full.excitors) {
    auto it = kept_map.find(e);
    if (it == kept_map.end()) continue;
    spec.excitors.push_back(e);
    spec.init_params.push_back(it->second);
  }
  if (spec.excitors.empty()) {
    r.energy = r.hf_energy;
  } else {
    const VqeResult v = minimize(SectorEvaluator(spec, active), opt);
    r.energy = v.energy;
    r.vqe_iterations = v.iterations;
    // Report optimised values in the order of `kept`.
    std::map<Excitor, double> opt_map;
    for (std::size_t k = 0; k < spec.excitors.size(); ++k) opt_map[spec.excitors[k]] = v.params[k];
    for (const auto& [e, t] : r.kept) r.optimized.push_back(opt_map.at(e));
  }
  r.pct_ecorr = pct_ecorr(r.energy, full_energy, r.hf_energy);
  return r;
}

}  // namespace uccmc
