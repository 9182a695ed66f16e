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

#include <gtest/gtest.h>

#include "common.hpp"
#include "dense_jw.hpp"

using namespace uccmc;
using namespace uccmc::testing;

namespace {

/// Dense matrix of a single Pauli string from 2x2 factors.
Eigen::MatrixXcd pauli_matrix(const PauliString& p, int n) {
  const std::size_t dim = std::size_t{1} << n;
  Eigen::Matrix2cd id, x, y, z;
  id << 1, 0, 0, 1;
  x << 0, 1, 1, 0;
  y << 0, cplx(0, -1), cplx(0, 1), 0;
  z << 1, 0, 0, -1;
  Eigen::MatrixXcd m(dim, dim);
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c) {
      cplx v = 1.0;
      for (int k = 0; k < n; ++k) {
        const char a = p.axis(k);
        const Eigen::Matrix2cd& f = a == 'X' ? x : a == 'Y' ? y : a == 'Z' ? z : id;
        v *= f((r >> k) & 1, (c >> k) & 1);
      }
      m(r, c) = v;
    }
  return m;
}

std::vector<PauliString> all_strings(int n) {
  std::vector<PauliString> out;
  for (Bits x = 0; x < (Bits{1} << n); ++x)
    for (Bits z = 0; z < (Bits{1} << n); ++z) out.push_back({x, z});
  return out;
}

double max_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST(PauliString, TextRoundTrip) {
  const auto p = PauliString::from_string("XZIY");
  EXPECT_EQ(p.to_string(4), "XZIY");
  EXPECT_EQ(p.label(), "X0 Z1 Y3");
  EXPECT_EQ(p.weight(), 3);
  EXPECT_EQ(p.n_y(), 1);
  EXPECT_THROW(PauliString::from_string("XQ"), DomainError);
}

TEST(PauliString, ActionMatchesDenseMatrix) {
  for (const auto& p : all_strings(3)) {
    const auto m = pauli_matrix(p, 3);
    for (Bits b = 0; b < 8; ++b) EXPECT_LT(std::abs(m(b ^ p.x, b) - p.phase(b)), 1e-15);
  }
}

TEST(PauliString, ProductAndCommutationMatchDenseMatrices) {
  const auto strings = all_strings(2);
  for (const auto& a : strings)
    for (const auto& b : strings) {
      const auto [phase, c] = multiply(a, b);
      const Eigen::MatrixXcd ab = pauli_matrix(a, 2) * pauli_matrix(b, 2);
      EXPECT_LT(max_diff(ab, phase * pauli_matrix(c, 2)), 1e-15);
      const Eigen::MatrixXcd ba = pauli_matrix(b, 2) * pauli_matrix(a, 2);
      EXPECT_EQ(commute(a, b), max_diff(ab, ba) < 1e-15);
    }
}

TEST(QubitOperator, AlgebraAndHermiticity) {
  QubitOperator a(2), b(2);
  a.add(PauliString::from_string("XI"), 1.0);
  b.add(PauliString::from_string("YI"), 1.0);
  const auto ab = a * b;
  EXPECT_EQ(ab.size(), 1u);
  EXPECT_LT(std::abs(ab.coeff(PauliString::from_string("ZI")) - cplx(0, 1)), 1e-15);
  EXPECT_FALSE(ab.is_hermitian());
  EXPECT_TRUE((a + b).is_hermitian());
  EXPECT_EQ((a - a).prune().size(), 0u);
  EXPECT_THROW(a + QubitOperator(3), DomainError);
}

TEST(Ladder, MatchesDenseOracle) {
  for (int n = 1; n <= 5; ++n)
    for (int j = 0; j < n; ++j) {
      EXPECT_LT(max_diff(dense_matrix(ladder(n, j, false)), annihilator(n, j).cast<cplx>()), 1e-15);
      EXPECT_LT(max_diff(dense_matrix(ladder(n, j, true)), creator(n, j).cast<cplx>()), 1e-15);
    }
}

TEST(Ladder, CanonicalAnticommutation) {
  for (int n = 1; n <= 6; ++n)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const auto ai = ladder(n, i, false), aj = ladder(n, j, false);
        const auto cj = ladder(n, j, true);
        const auto anti = (ai * cj + cj * ai).prune();
        if (i == j) {
          ASSERT_EQ(anti.size(), 1u);
          EXPECT_LT(std::abs(anti.coeff(PauliString{}) - 1.0), 1e-15);
        } else {
          EXPECT_EQ(anti.size(), 0u);
        }
        EXPECT_EQ((ai * aj + aj * ai).prune().size(), 0u);
      }
}

TEST(Ladder, NumberOperatorIsHalfIdentityMinusZ) {
  for (int j = 0; j < 4; ++j) {
    const auto n = number_operator(4, j);
    EXPECT_EQ(n.size(), 2u);
    EXPECT_LT(std::abs(n.coeff(PauliString{}) - 0.5), 1e-15);
    EXPECT_LT(std::abs(n.coeff(PauliString{0, bit(j)}) + 0.5), 1e-15);
  }
}

TEST(Excitation, TermCountsWeightsAndCommutation) {
  const auto single = jw_excitation(Excitor::single(0, 1), 2);
  EXPECT_EQ(single.size(), 2u);
  const auto dbl = jw_excitation(Excitor::pair(0, 1, 2, 3), 4);
  EXPECT_EQ(dbl.size(), 8u);
  for (const auto* op : {&single, &dbl}) {
    for (const auto& [p, c] : op->terms()) {
      EXPECT_EQ(c.real(), 0.0);
      EXPECT_DOUBLE_EQ(std::abs(c.imag()), op == &single ? 0.5 : 0.125);
      for (const auto& [q, d] : op->terms()) EXPECT_TRUE(commute(p, q));
    }
    const auto sum = (*op + op->adjoint()).prune();
    EXPECT_EQ(sum.size(), 0u);
  }
}

TEST(Excitation, ZChainBetweenIndices) {
  const auto op = jw_excitation(Excitor::single(0, 3), 4);
  ASSERT_EQ(op.size(), 2u);
  for (const auto& [p, c] : op.terms()) {
    EXPECT_EQ(p.weight(), 4);
    EXPECT_EQ(p.axis(1), 'Z');
    EXPECT_EQ(p.axis(2), 'Z');
  }
  EXPECT_LT(std::abs(op.coeff(PauliString::from_string("XZZY")) - cplx(0, -0.5)), 1e-15);
  EXPECT_LT(std::abs(op.coeff(PauliString::from_string("YZZX")) - cplx(0, 0.5)), 1e-15);
}

TEST(Excitation, MatchesDenseOracle) {
  const int n = 5;
  for (const auto& e : {Excitor::single(0, 3), Excitor::single(1, 4), Excitor::pair(0, 1, 2, 3),
                        Excitor::pair(0, 2, 1, 4), Excitor::pair(1, 3, 0, 4)}) {
    const Eigen::MatrixXd tau = excitor_matrix(e, n);
    const Eigen::MatrixXd g = tau - tau.transpose();
    EXPECT_LT(max_diff(dense_matrix(jw_excitation(e, n)), g.cast<cplx>()), 1e-15) << e.key();
  }
  EXPECT_THROW(jw_excitation(Excitor::single(0, 5), 5), DomainError);
}

TEST(Gadgets, CountsAndAngles) {
  EXPECT_EQ(pauli_gadget_sequence(Excitor::single(0, 2), 0.3, 4).size(), 2u);
  const auto g = pauli_gadget_sequence(Excitor::pair(0, 1, 2, 3), 0.3, 4);
  ASSERT_EQ(g.size(), 8u);
  for (const auto& x : g) EXPECT_DOUBLE_EQ(std::abs(x.angle), 2 * 0.3 * 0.125);
}

TEST(Hamiltonian, MatchesDenseOracleAndSlaterCondon) {
  const auto t = read_fcidump(fixture("h2_0.74.FCIDUMP"));
  const auto h = jw_hamiltonian(t);
  EXPECT_TRUE(h.is_hermitian());
  const Eigen::MatrixXcd m = dense_matrix(h);
  EXPECT_LT(max_diff(m, hamiltonian_matrix(t).cast<cplx>()), 1e-12);
  for (Bits x = 0; x < 16; ++x)
    for (Bits y = 0; y < 16; ++y)
      if (std::popcount(x) == std::popcount(y))
        EXPECT_NEAR(m(x, y).real(), slater_condon(t, Determinant{x}, Determinant{y}), 1e-12);
}

TEST(Hamiltonian, RandomIntegralsSixQubits) {
  const auto t = random_table(3, 2, 0, 11);
  EXPECT_LT(max_diff(dense_matrix(jw_hamiltonian(t)), hamiltonian_matrix(t).cast<cplx>()), 1e-12);
}

TEST(Hamiltonian, FrozenCoreMatchesPrefrozenTable) {
  const auto full = read_fcidump(fixture("lih_1.595.FCIDUMP"));
  const auto eff = read_fcidump(fixture("lih_1.595_fc_eff.FCIDUMP"));
  const auto a = jw_hamiltonian(full, 1), b = jw_hamiltonian(eff);
  EXPECT_EQ(a.n_qubits(), 10);
  EXPECT_LT((a - b).prune(1e-9).size(), 1u);
}
