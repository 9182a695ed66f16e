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

// Real-amplitude representation of trotterized UCC states on the determinants
// reachable from a reference through a fixed excitor set.
//
// Each factor exp(t (tau - tau+)) acts on pairs (a, b) with tau|a> = s|b> as the
// plane rotation
//   c_a <- cos t c_a - s sin t c_b,   c_b <- s sin t c_a + cos t c_b,
// and leaves every other determinant alone. In the Jordan-Wigner basis the
// same rotation is produced by the commuting Pauli gadgets of the excitor, so
// both representations give identical amplitudes.

#include <Eigen/Sparse>
#include <cmath>
#include <deque>
#include <unordered_map>
#include <vector>

#include "uccmc/errors.hpp"
#include "uccmc/fock_space.hpp"
#include "uccmc/integrals.hpp"
#include "uccmc/qubit_map.hpp"
#include "uccmc/simulator.hpp"

namespace uccmc {

class SectorSpace {
 public:
  struct Pair {
    int a;
    int b;
    double sign;
  };

  SectorSpace(const Determinant& reference, const std::vector<Excitor>& excitors)
      : reference_(reference), excitors_(excitors) {
    add(reference);
    // Breadth-first closure under every tau and tau+.
    for (std::size_t head = 0; head < dets_.size(); ++head) {
      const Determinant d = dets_[head];
      for (const auto& e : excitors_) {
        for (bool dagger : {false, true}) {
          if (auto r = apply_excitor(d, e, dagger)) add(r->det);
        }
      }
    }
    pairs_.resize(excitors_.size());
    for (std::size_t k = 0; k < excitors_.size(); ++k)
      for (std::size_t i = 0; i < dets_.size(); ++i)
        if (auto r = apply_excitor(dets_[i], excitors_[k])) {
          pairs_[k].push_back({static_cast<int>(i), index_.at(r->det.occ), static_cast<double>(r->sign)});
        }
  }

  std::size_t dim() const noexcept { return dets_.size(); }
  std::size_t n_excitors() const noexcept { return excitors_.size(); }
  const std::vector<Determinant>& determinants() const noexcept { return dets_; }
  const std::vector<Excitor>& excitors() const noexcept { return excitors_; }
  const Determinant& reference() const noexcept { return reference_; }
  const std::vector<Pair>& pairs(std::size_t k) const { return pairs_.at(k); }
  /// Position of a determinant, or -1.
  int find(const Determinant& d) const {
    auto it = index_.find(d.occ);
    return it == index_.end() ? -1 : it->second;
  }

  Eigen::VectorXd reference_vector() const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dim());
    v(0) = 1.0;
    return v;
  }

  /// v <- exp(t (tau_k - tau_k+)) v.
  void rotate(std::size_t k, double t, Eigen::VectorXd& v) const {
    const double c = std::cos(t), s = std::sin(t);
    for (const auto& p : pairs_[k]) {
      const double va = v(p.a), vb = v(p.b);
      v(p.a) = c * va - p.sign * s * vb;
      v(p.b) = p.sign * s * va + c * vb;
    }
  }

  /// <u| (tau_k - tau_k+) |v>.
  double generator_element(std::size_t k, const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
    double acc = 0.0;
    for (const auto& p : pairs_[k]) acc += p.sign * (u(p.b) * v(p.a) - u(p.a) * v(p.b));
    return acc;
  }

  /// prod_k exp(t_k (tau_k - tau_k+)) |reference>, rightmost factor k = 0.
  Eigen::VectorXd state(const std::vector<double>& params) const {
    if (params.size() != excitors_.size()) throw DomainError("parameter count does not match the ansatz");
    Eigen::VectorXd v = reference_vector();
    for (std::size_t k = 0; k < params.size(); ++k) rotate(k, params[k], v);
    return v;
  }

  Eigen::SparseMatrix<double, Eigen::RowMajor> hamiltonian(const IntegralTable& t) const {
    return ci_matrix(t, dets_);
  }

  /// The qubit operator projected onto the sector determinants.
  Eigen::SparseMatrix<double, Eigen::RowMajor> hamiltonian(const QubitOperator& op) const {
    std::vector<Eigen::Triplet<double>> trip;
    std::unordered_map<std::uint64_t, double> row;
    for (std::size_t j = 0; j < dets_.size(); ++j) {
      row.clear();
      for (const auto& [p, c] : op.terms()) {
        const Bits target = dets_[j].occ ^ p.x;
        if (!index_.count(target)) continue;
        row[target] += (c * p.phase(dets_[j].occ)).real();
      }
      for (const auto& [target, v] : row)
        if (v != 0.0) trip.emplace_back(index_.at(target), static_cast<int>(j), v);
    }
    Eigen::SparseMatrix<double, Eigen::RowMajor> h(dim(), dim());
    h.setFromTriplets(trip.begin(), trip.end());
    return h;
  }

 private:
  void add(const Determinant& d) {
    if (index_.emplace(d.occ, static_cast<int>(dets_.size())).second) dets_.push_back(d);
  }

  Determinant reference_;
  std::vector<Excitor> excitors_;
  std::vector<Determinant> dets_;
  std::unordered_map<Bits, int> index_;
  std::vector<std::vector<Pair>> pairs_;
};

}  // namespace uccmc
