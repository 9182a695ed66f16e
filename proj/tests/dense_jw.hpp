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

// Reference Jordan-Wigner matrices built from single-qubit factors, used as an
// oracle independent of the library's Pauli algebra.

#include <Eigen/Dense>
#include <array>
#include <random>

#include "uccmc/uccmc.hpp"

namespace uccmc::testing {

/// Tensor product of 2x2 factors; qubit k is bit k of the basis index.
inline Eigen::MatrixXd kron_chain(const std::vector<Eigen::Matrix2d>& factors) {
  const int n = static_cast<int>(factors.size());
  const std::size_t dim = std::size_t{1} << n;
  Eigen::MatrixXd m(dim, dim);
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c) {
      double v = 1.0;
      for (int k = 0; k < n && v != 0.0; ++k) v *= factors[k]((r >> k) & 1, (c >> k) & 1);
      m(r, c) = v;
    }
  return m;
}

/// a_j = Z_0 ... Z_{j-1} |0><1|_j.
inline Eigen::MatrixXd annihilator(int n, int j) {
  Eigen::Matrix2d z, lower, id;
  z << 1, 0, 0, -1;
  lower << 0, 1, 0, 0;
  id.setIdentity();
  std::vector<Eigen::Matrix2d> f(n, id);
  for (int k = 0; k < j; ++k) f[k] = z;
  f[j] = lower;
  return kron_chain(f);
}

inline Eigen::MatrixXd creator(int n, int j) { return annihilator(n, j).transpose(); }

/// tau = a+_b a+_a a_j a_i for from {i, j}, to {a, b}; singles a+_a a_i.
inline Eigen::MatrixXd excitor_matrix(const Excitor& e, int n) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(std::size_t{1} << n, std::size_t{1} << n);
  for (int p : e.from()) m = annihilator(n, p) * m;
  for (int p : e.to()) m = creator(n, p) * m;
  return m;
}

/// Second-quantised Hamiltonian of the table over 2*n_orb spin orbitals.
inline Eigen::MatrixXd hamiltonian_matrix(const IntegralTable& t) {
  const int n = 2 * t.n_orb();
  const std::size_t dim = std::size_t{1} << n;
  std::vector<Eigen::MatrixXd> a, c;
  for (int p = 0; p < n; ++p) {
    a.push_back(annihilator(n, p));
    c.push_back(creator(n, p));
  }
  Eigen::MatrixXd h = t.e_core() * Eigen::MatrixXd::Identity(dim, dim);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      if (p % 2 == q % 2) h += t.h(p / 2, q / 2) * c[p] * a[q];
  // 1/2 sum <pq|rs> a+_p a+_q a_s a_r with <pq|rs> = (pr|qs).
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) {
          if (p % 2 != r % 2 || q % 2 != s % 2) continue;
          const double v = t.eri(p / 2, r / 2, q / 2, s / 2);
          if (v == 0.0) continue;
          h += 0.5 * v * c[p] * c[q] * a[s] * a[r];
        }
  return h;
}

/// Table with reproducible pseudo-random integrals of full permutational symmetry.
inline IntegralTable random_table(int n_orb, int n_elec, int ms2, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  IntegralTable t(n_orb, n_elec, ms2);
  t.set_e_core(u(rng));
  for (int p = 0; p < n_orb; ++p)
    for (int q = 0; q <= p; ++q) t.set_h(p, q, u(rng) - (p == q ? 1.0 : 0.0));
  for (int p = 0; p < n_orb; ++p)
    for (int q = 0; q <= p; ++q)
      for (int r = 0; r < n_orb; ++r)
        for (int s = 0; s <= r; ++s) {
          if (p * (p + 1) / 2 + q < r * (r + 1) / 2 + s) continue;
          t.set_eri(p, q, r, s, 0.2 * u(rng) + (p == q && r == s ? 0.5 : 0.0));
        }
  return t;
}

}  // namespace uccmc::testing
