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

// Jordan-Wigner encoding. Qubit q is spin orbital q; a+_j = Z_0..Z_{j-1} (X_j - iY_j)/2.

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "uccmc/errors.hpp"
#include "uccmc/fock_space.hpp"
#include "uccmc/integrals.hpp"

namespace uccmc {

using cplx = std::complex<double>;

/// i^k for integer k.
inline cplx ipow(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1, 0};
    case 1: return {0, 1};
    case 2: return {-1, 0};
    default: return {0, -1};
  }
}

/// Pauli string stored as X and Z masks: P = i^{|x&z|} X^x Z^z, so a qubit with
/// both bits set carries Y.
struct PauliString {
  Bits x = 0;
  Bits z = 0;

  static PauliString from_string(const std::string& axes) {
    PauliString p;
    for (std::size_t q = 0; q < axes.size(); ++q) {
      switch (axes[q]) {
        case 'I': break;
        case 'X': p.x |= bit(static_cast<int>(q)); break;
        case 'Z': p.z |= bit(static_cast<int>(q)); break;
        case 'Y':
          p.x |= bit(static_cast<int>(q));
          p.z |= bit(static_cast<int>(q));
          break;
        default: throw DomainError(std::string("invalid Pauli letter '") + axes[q] + "'");
      }
    }
    return p;
  }

  char axis(int q) const {
    const bool bx = (x >> q) & 1U, bz = (z >> q) & 1U;
    return bx ? (bz ? 'Y' : 'X') : (bz ? 'Z' : 'I');
  }
  std::string to_string(int n_qubits) const {
    std::string s(n_qubits, 'I');
    for (int q = 0; q < n_qubits; ++q) s[q] = axis(q);
    return s;
  }
  /// Compact form such as "Y0 Z1 X2"; "I" for the identity.
  std::string label() const {
    std::string s;
    for (Bits m = x | z; m; m &= m - 1) {
      const int q = std::countr_zero(m);
      if (!s.empty()) s += ' ';
      s += axis(q) + std::to_string(q);
    }
    return s.empty() ? "I" : s;
  }
  int weight() const noexcept { return std::popcount(x | z); }
  int n_y() const noexcept { return std::popcount(x & z); }
  bool is_identity() const noexcept { return (x | z) == 0; }

  /// P|b> = phase(b) |b ^ x>.
  cplx phase(Bits b) const { return ipow(n_y() + 2 * (std::popcount(b & z) & 1)); }

  friend bool operator==(const PauliString&, const PauliString&) = default;
  friend auto operator<=>(const PauliString&, const PauliString&) = default;
};

inline bool commute(const PauliString& a, const PauliString& b) {
  return (std::popcount((a.x & b.z) ^ (a.z & b.x)) & 1) == 0;
}

/// a*b = phase * c.
inline std::pair<cplx, PauliString> multiply(const PauliString& a, const PauliString& b) {
  PauliString c{a.x ^ b.x, a.z ^ b.z};
  const int k = a.n_y() + b.n_y() - c.n_y() + 2 * (std::popcount(a.z & b.x) & 1);
  return {ipow(k), c};
}

/// Weighted sum of Pauli strings on a fixed register size.
class QubitOperator {
 public:
  static constexpr double kPrune = 1e-12;

  explicit QubitOperator(int n_qubits = 0) : n_qubits_(n_qubits) {
    if (n_qubits < 0 || n_qubits > 64) throw DomainError("register size out of range");
  }
  static QubitOperator identity(int n_qubits, cplx c = 1.0) {
    QubitOperator op(n_qubits);
    op.add(PauliString{}, c);
    return op;
  }

  int n_qubits() const noexcept { return n_qubits_; }
  const std::map<PauliString, cplx>& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }

  void add(const PauliString& p, cplx c) {
    if (n_qubits_ < 64 && ((p.x | p.z) >> n_qubits_) != 0) {
      throw DomainError("Pauli string acts outside the register");
    }
    terms_[p] += c;
  }
  cplx coeff(const PauliString& p) const {
    auto it = terms_.find(p);
    return it == terms_.end() ? cplx{} : it->second;
  }
  /// Drops terms with |c| below the threshold.
  QubitOperator& prune(double tol = kPrune) {
    std::erase_if(terms_, [tol](const auto& kv) { return std::abs(kv.second) < tol; });
    return *this;
  }

  QubitOperator& operator+=(const QubitOperator& o) {
    check_size(o);
    for (const auto& [p, c] : o.terms_) terms_[p] += c;
    return prune();
  }
  QubitOperator& operator-=(const QubitOperator& o) { return *this += o * cplx(-1.0); }
  QubitOperator& operator*=(cplx s) {
    for (auto& [p, c] : terms_) c *= s;
    return prune();
  }
  friend QubitOperator operator+(QubitOperator a, const QubitOperator& b) { return a += b; }
  friend QubitOperator operator-(QubitOperator a, const QubitOperator& b) { return a -= b; }
  friend QubitOperator operator*(QubitOperator a, cplx s) { return a *= s; }
  friend QubitOperator operator*(cplx s, QubitOperator a) { return a *= s; }
  friend QubitOperator operator*(const QubitOperator& a, const QubitOperator& b) {
    a.check_size(b);
    QubitOperator out(a.n_qubits_);
    for (const auto& [pa, ca] : a.terms_)
      for (const auto& [pb, cb] : b.terms_) {
        const auto [ph, pc] = multiply(pa, pb);
        out.terms_[pc] += ph * ca * cb;
      }
    return out.prune();
  }

  QubitOperator adjoint() const {
    QubitOperator out(n_qubits_);
    for (const auto& [p, c] : terms_) out.terms_[p] = std::conj(c);
    return out;
  }
  bool is_hermitian(double tol = 1e-10) const {
    for (const auto& [p, c] : terms_)
      if (std::abs(c.imag()) > tol) return false;
    return true;
  }

 private:
  void check_size(const QubitOperator& o) const {
    if (o.n_qubits_ != n_qubits_) throw DomainError("register size mismatch");
  }
  int n_qubits_;
  std::map<PauliString, cplx> terms_;
};

/// a+_j (create = true) or a_j.
inline QubitOperator ladder(int n_qubits, int j, bool create) {
  if (j < 0 || j >= n_qubits) throw DomainError("ladder operator index out of range");
  QubitOperator op(n_qubits);
  const Bits chain = bit(j) - 1;
  op.add(PauliString{bit(j), chain}, 0.5);
  op.add(PauliString{bit(j), chain | bit(j)}, create ? cplx(0, -0.5) : cplx(0, 0.5));
  return op;
}

inline QubitOperator number_operator(int n_qubits, int j) {
  return ladder(n_qubits, j, true) * ladder(n_qubits, j, false);
}

/// Molecular Hamiltonian over 2*n_orb qubits of the active space that remains
/// after freezing the lowest `frozen` orbitals.
inline QubitOperator jw_hamiltonian(const IntegralTable& table, int frozen = 0) {
  const IntegralTable t = freeze_core(table, frozen);
  const int n = 2 * t.n_orb();
  std::vector<QubitOperator> cre, ann;
  for (int p = 0; p < n; ++p) {
    cre.push_back(ladder(n, p, true));
    ann.push_back(ladder(n, p, false));
  }
  QubitOperator h = QubitOperator::identity(n, t.e_core());
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      const double v = h_spin(t, p, q);
      if (v != 0.0) h += cre[p] * ann[q] * cplx(v);
    }
  // 1/2 sum <pq|rs> a+_p a+_q a_s a_r, restricted to p<q, r<s with the
  // antisymmetrised element: sum_{p<q,r<s} <pq||rs> a+_p a+_q a_s a_r.
  std::vector<QubitOperator> sr(n * n);
  for (int r = 0; r < n; ++r)
    for (int s = r + 1; s < n; ++s) sr[r * n + s] = ann[s] * ann[r];
  for (int p = 0; p < n; ++p)
    for (int q = p + 1; q < n; ++q) {
      const QubitOperator pq = cre[p] * cre[q];
      for (int r = 0; r < n; ++r)
        for (int s = r + 1; s < n; ++s) {
          const double v = antisym(t, p, q, r, s);
          if (std::abs(v) < 1e-14) continue;
          h += pq * sr[r * n + s] * cplx(v);
        }
    }
  return h.prune();
}

/// tau - tau+ for the excitor, with tau ordered as in apply_excitor.
inline QubitOperator jw_excitation(const Excitor& e, int n_qubits) {
  if (e.level() < 1 || e.level() > 2) throw DomainError("only single and double excitors are supported");
  for (int p : e.from())
    if (p >= n_qubits) throw DomainError("excitor index outside the register");
  for (int p : e.to())
    if (p >= n_qubits) throw DomainError("excitor index outside the register");
  QubitOperator tau = QubitOperator::identity(n_qubits);
  // Rightmost factor acts first: annihilate from[0], from[1], ..., then create to[0], to[1], ...
  for (int p : e.from()) tau = ladder(n_qubits, p, false) * tau;
  for (int p : e.to()) tau = ladder(n_qubits, p, true) * tau;
  return (tau - tau.adjoint()).prune();
}

/// exp(-i angle/2 P).
struct Gadget {
  PauliString pauli;
  double angle = 0.0;
};

/// Commuting rotations whose product is exp(t (tau - tau+)); with
/// tau - tau+ = sum_k i w_k P_k each angle is -2 t w_k. Strings are emitted in
/// ascending (x, z) mask order.
inline std::vector<Gadget> pauli_gadget_sequence(const Excitor& e, double t, int n_qubits) {
  std::vector<Gadget> out;
  for (const auto& [p, c] : jw_excitation(e, n_qubits).terms()) out.push_back({p, -2.0 * t * c.imag()});
  return out;
}

}  // namespace uccmc
