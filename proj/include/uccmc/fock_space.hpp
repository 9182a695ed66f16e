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

// Determinants, excitors and Slater-Condon matrix elements.
//
// Spin orbital 2p+s holds spatial orbital p with spin s (alpha = 0). A
// determinant is the bitstring of occupied spin orbitals and stands for
// a+_{p1} a+_{p2} ... a+_{pk} |vac> with p1 < p2 < ... < pk, which is exactly
// the Jordan-Wigner computational basis state with the same bits set.

#include <algorithm>
#include <bit>
#include <compare>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "uccmc/errors.hpp"
#include "uccmc/integrals.hpp"

namespace uccmc {

using Bits = std::uint64_t;

inline constexpr Bits bit(int p) { return Bits{1} << p; }
inline constexpr int spatial(int so) { return so >> 1; }
inline constexpr int spin(int so) { return so & 1; }

struct Determinant {
  Bits occ = 0;

  bool occupied(int p) const noexcept { return (occ >> p) & 1U; }
  int count() const noexcept { return std::popcount(occ); }
  /// Number of set bits of given spin.
  int count_spin(int s) const noexcept {
    constexpr Bits kAlpha = 0x5555555555555555ULL;
    return std::popcount(occ & (s == 0 ? kAlpha : ~kAlpha));
  }
  std::vector<int> occupied_list() const {
    std::vector<int> out;
    for (Bits b = occ; b; b &= b - 1) out.push_back(std::countr_zero(b));
    return out;
  }
  std::string to_string(int n_so) const {
    std::string s(n_so, '0');
    for (int p = 0; p < n_so; ++p) s[p] = occupied(p) ? '1' : '0';
    return s;
  }
  friend bool operator==(const Determinant&, const Determinant&) = default;
  friend auto operator<=>(const Determinant&, const Determinant&) = default;
};

/// Determinant from an occupation string such as "1100" (character k is spin orbital k).
inline Determinant determinant_from_string(const std::string& s) {
  Determinant d;
  for (std::size_t p = 0; p < s.size(); ++p) {
    if (s[p] == '1') d.occ |= bit(static_cast<int>(p));
    else if (s[p] != '0') throw DomainError("occupation string may only contain 0 and 1");
  }
  return d;
}

/// Aufbau determinant: the n_alpha lowest alpha and n_beta lowest beta spatial
/// orbitals are occupied, so for ms2 > 0 the excess alpha electrons sit in the
/// lowest orbitals not already doubly occupied.
inline Determinant aufbau_reference(int n_orb, int n_elec, int ms2) {
  if ((n_elec + ms2) % 2 != 0 || ms2 < 0 || ms2 > n_elec) {
    throw DomainError("inconsistent NELEC/MS2");
  }
  const int na = (n_elec + ms2) / 2;
  const int nb = (n_elec - ms2) / 2;
  if (na > n_orb) throw DomainError("more alpha electrons than orbitals");
  Determinant d;
  for (int p = 0; p < na; ++p) d.occ |= bit(2 * p);
  for (int p = 0; p < nb; ++p) d.occ |= bit(2 * p + 1);
  return d;
}

inline Determinant aufbau_reference(const IntegralTable& t) {
  return aufbau_reference(t.n_orb(), t.n_elec(), t.ms2());
}

/// A particle-conserving excitation operator tau from `from` (occupied in the
/// reference) to `to` (virtual).
///
/// Operator convention: for from = {i < j}, to = {a < b}
///   tau = a+_b a+_a a_j a_i,
/// i.e. the annihilators act first in ascending order, then the creators in
/// ascending order. Singles are tau = a+_a a_i.
class Excitor {
 public:
  Excitor() = default;
  Excitor(std::vector<int> from, std::vector<int> to) : from_(std::move(from)), to_(std::move(to)) {
    if (from_.size() != to_.size() || from_.empty()) {
      throw DomainError("excitor needs equally many (>0) occupied and virtual indices");
    }
    for (const auto* v : {&from_, &to_}) {
      for (std::size_t k = 0; k < v->size(); ++k) {
        if ((*v)[k] < 0 || (*v)[k] >= 64) throw DomainError("spin-orbital index out of range");
        if (k > 0 && (*v)[k] <= (*v)[k - 1]) throw DomainError("excitor indices must be strictly sorted");
      }
    }
    for (int p : from_) from_mask_ |= bit(p);
    for (int p : to_) to_mask_ |= bit(p);
    if (from_mask_ & to_mask_) throw DomainError("excitor occupied and virtual sets overlap");
  }
  Excitor(std::initializer_list<int> from, std::initializer_list<int> to)
      : Excitor(std::vector<int>(from), std::vector<int>(to)) {}

  static Excitor single(int i, int a) { return Excitor({i}, {a}); }
  static Excitor pair(int i, int j, int a, int b) { return Excitor({i, j}, {a, b}); }

  int level() const noexcept { return static_cast<int>(from_.size()); }
  const std::vector<int>& from() const noexcept { return from_; }
  const std::vector<int>& to() const noexcept { return to_; }
  Bits from_mask() const noexcept { return from_mask_; }
  Bits to_mask() const noexcept { return to_mask_; }

  /// "i,j:a,b"
  std::string key() const {
    std::ostringstream s;
    for (std::size_t k = 0; k < from_.size(); ++k) s << (k ? "," : "") << from_[k];
    s << ':';
    for (std::size_t k = 0; k < to_.size(); ++k) s << (k ? "," : "") << to_[k];
    return s.str();
  }

  /// Canonical order: by level, then occupied indices, then virtual indices.
  friend std::strong_ordering operator<=>(const Excitor& x, const Excitor& y) {
    if (auto c = x.level() <=> y.level(); c != 0) return c;
    if (auto c = x.from_ <=> y.from_; c != 0) return c;
    return x.to_ <=> y.to_;
  }
  friend bool operator==(const Excitor& x, const Excitor& y) {
    return x.from_ == y.from_ && x.to_ == y.to_;
  }

 private:
  std::vector<int> from_;
  std::vector<int> to_;
  Bits from_mask_ = 0;
  Bits to_mask_ = 0;
};

inline Excitor excitor_from_key(const std::string& key) {
  const auto colon = key.find(':');
  if (colon == std::string::npos) throw DomainError("excitor key needs ':' : " + key);
  auto split = [&](const std::string& s) {
    std::vector<int> out;
    std::istringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ',')) {
      try {
        out.push_back(std::stoi(tok));
      } catch (const std::exception&) {
        throw DomainError("bad excitor key: " + key);
      }
    }
    return out;
  };
  return Excitor(split(key.substr(0, colon)), split(key.substr(colon + 1)));
}

namespace detail {

/// Fermionic phase of a ladder operator on orbital p: (-1)^(occupied below p).
inline int ladder_sign(Bits occ, int p) {
  return (std::popcount(occ & (bit(p) - 1)) & 1) ? -1 : 1;
}

}  // namespace detail

/// Result of applying an excitor: the new determinant and the fermionic sign.
struct Applied {
  Determinant det;
  int sign = 1;
};

/// tau|d> (dagger = false) or tau+|d> (dagger = true). std::nullopt when the
/// operator annihilates the determinant.
inline std::optional<Applied> apply_excitor(const Determinant& d, const Excitor& e, bool dagger = false) {
  const Bits remove = dagger ? e.to_mask() : e.from_mask();
  const Bits add = dagger ? e.from_mask() : e.to_mask();
  if ((d.occ & remove) != remove || (d.occ & add) != 0) return std::nullopt;
  Bits occ = d.occ;
  int sign = 1;
  // tau+ = a+_i a+_j a_a a_b for from={i<j}, to={a<b}: annihilate `to`
  // descending, then create `from` descending.
  const auto& ann = dagger ? e.to() : e.from();
  const auto& cre = dagger ? e.from() : e.to();
  auto step = [&](int p) {
    sign *= detail::ladder_sign(occ, p);
    occ ^= bit(p);
  };
  if (dagger) {
    for (auto it = ann.rbegin(); it != ann.rend(); ++it) step(*it);
    for (auto it = cre.rbegin(); it != cre.rend(); ++it) step(*it);
  } else {
    for (int p : ann) step(p);
    for (int p : cre) step(p);
  }
  return Applied{Determinant{occ}, sign};
}

/// Antisymmetrised spin-orbital integral <pq||rs> in physicists' notation.
inline double antisym(const IntegralTable& t, int p, int q, int r, int s) {
  double v = 0.0;
  if (spin(p) == spin(r) && spin(q) == spin(s)) {
    v += t.eri(spatial(p), spatial(r), spatial(q), spatial(s));
  }
  if (spin(p) == spin(s) && spin(q) == spin(r)) {
    v -= t.eri(spatial(p), spatial(s), spatial(q), spatial(r));
  }
  return v;
}

inline double h_spin(const IntegralTable& t, int p, int q) {
  return spin(p) == spin(q) ? t.h(spatial(p), spatial(q)) : 0.0;
}

/// <d|H|d> including the core energy.
inline double diagonal_energy(const IntegralTable& t, const Determinant& d) {
  const auto occ = d.occupied_list();
  double e = t.e_core();
  for (std::size_t a = 0; a < occ.size(); ++a) {
    e += h_spin(t, occ[a], occ[a]);
    for (std::size_t b = 0; b < a; ++b) e += antisym(t, occ[a], occ[b], occ[a], occ[b]);
  }
  return e;
}

/// <d1|H|d2> by the Slater-Condon rules.
inline double slater_condon(const IntegralTable& t, const Determinant& d1, const Determinant& d2) {
  if (d1.count() != d2.count()) {
    throw DomainError("Slater-Condon: determinants have different particle numbers");
  }
  const Bits diff = d1.occ ^ d2.occ;
  const int n_diff = std::popcount(diff) / 2;
  if (n_diff == 0) return diagonal_energy(t, d1);
  if (n_diff > 2) return 0.0;
  const Bits holes = d2.occ & diff;      // occupied in d2 only
  const Bits particles = d1.occ & diff;  // occupied in d1 only
  if (n_diff == 1) {
    const int i = std::countr_zero(holes);
    const int a = std::countr_zero(particles);
    const auto moved = apply_excitor(d2, Excitor::single(i, a));
    double v = h_spin(t, a, i);
    for (Bits b = d2.occ & ~bit(i); b; b &= b - 1) {
      const int j = std::countr_zero(b);
      v += antisym(t, a, j, i, j);
    }
    return moved->sign * v;
  }
  const int i = std::countr_zero(holes);
  const int j = std::countr_zero(holes & (holes - 1));
  const int a = std::countr_zero(particles);
  const int b = std::countr_zero(particles & (particles - 1));
  // tau = a+_b a+_a a_j a_i = -a+_a a+_b a_j a_i, and <ab|H a+_a a+_b a_j a_i|..> = <ab||ij>.
  const auto moved = apply_excitor(d2, Excitor::pair(i, j, a, b));
  return -moved->sign * antisym(t, a, b, i, j);
}

inline int excitor_irrep(const Excitor& e, const std::vector<int>& orb_sym) {
  int sym = 0;
  for (int p : e.from()) sym ^= orb_sym.at(spatial(p));
  for (int p : e.to()) sym ^= orb_sym.at(spatial(p));
  return sym;
}

inline bool conserves_ms(const Excitor& e) {
  int balance = 0;
  for (int p : e.from()) balance += spin(p) ? -1 : 1;
  for (int p : e.to()) balance -= spin(p) ? -1 : 1;
  return balance == 0;
}

/// Keeps excitors whose irrep product is totally symmetric (and that conserve
/// M_s when asked). Irrep labels combine by XOR.
inline std::vector<Excitor> symmetry_filter(const std::vector<Excitor>& excitors,
                                            const std::vector<int>& orb_sym, bool ms_conserving) {
  std::vector<Excitor> out;
  for (const auto& e : excitors) {
    if (excitor_irrep(e, orb_sym) != 0) continue;
    if (ms_conserving && !conserves_ms(e)) continue;
    out.push_back(e);
  }
  return out;
}

/// All spin- and symmetry-allowed singles and doubles out of `reference`,
/// skipping the lowest `frozen` spatial orbitals. Singles come first, each
/// block in ascending index order.
inline std::vector<Excitor> enumerate_uccsd(const Determinant& reference, const std::vector<int>& orb_sym,
                                            int frozen = 0) {
  const int n_so = 2 * static_cast<int>(orb_sym.size());
  std::vector<int> occ, vir;
  for (int p = 2 * frozen; p < n_so; ++p) (reference.occupied(p) ? occ : vir).push_back(p);
  std::vector<Excitor> out;
  auto sym = [&](int p) { return orb_sym[spatial(p)]; };
  for (int i : occ)
    for (int a : vir)
      if (spin(i) == spin(a) && sym(i) == sym(a)) out.push_back(Excitor::single(i, a));
  for (std::size_t x = 0; x < occ.size(); ++x)
    for (std::size_t y = x + 1; y < occ.size(); ++y)
      for (std::size_t u = 0; u < vir.size(); ++u)
        for (std::size_t w = u + 1; w < vir.size(); ++w) {
          const int i = occ[x], j = occ[y], a = vir[u], b = vir[w];
          if (spin(i) + spin(j) != spin(a) + spin(b)) continue;
          if ((sym(i) ^ sym(j) ^ sym(a) ^ sym(b)) != 0) continue;
          out.push_back(Excitor::pair(i, j, a, b));
        }
  return out;
}

/// Irrep of a determinant: XOR of the labels of all occupied spin orbitals.
inline int determinant_irrep(const Determinant& d, const std::vector<int>& orb_sym) {
  int sym = 0;
  for (Bits b = d.occ; b; b &= b - 1) sym ^= orb_sym.at(spatial(std::countr_zero(b)));
  return sym;
}

/// Every determinant with the given alpha/beta counts and irrep, ascending.
/// Pass irrep < 0 to skip the spatial-symmetry restriction.
inline std::vector<Determinant> sector_determinants(int n_orb, int n_alpha, int n_beta, int irrep,
                                                    const std::vector<int>& orb_sym) {
  auto combos = [n_orb](int k) {
    std::vector<Bits> out;
    if (k < 0 || k > n_orb) return out;
    if (k == 0) return std::vector<Bits>{0};
    // Gosper's hack over n_orb bits.
    Bits v = (Bits{1} << k) - 1;
    const Bits limit = Bits{1} << n_orb;
    while (v < limit) {
      out.push_back(v);
      const Bits c = v & (~v + 1);
      const Bits r = v + c;
      v = (((r ^ v) >> 2) / c) | r;
    }
    return out;
  };
  auto spread = [](Bits spatial_bits, int s) {
    Bits out = 0;
    for (Bits b = spatial_bits; b; b &= b - 1) out |= bit(2 * std::countr_zero(b) + s);
    return out;
  };
  std::vector<Determinant> out;
  for (Bits a : combos(n_alpha))
    for (Bits b : combos(n_beta)) {
      Determinant d{spread(a, 0) | spread(b, 1)};
      if (irrep >= 0 && determinant_irrep(d, orb_sym) != irrep) continue;
      out.push_back(d);
    }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace uccmc

template <>
struct std::hash<uccmc::Determinant> {
  std::size_t operator()(const uccmc::Determinant& d) const noexcept {
    return std::hash<uccmc::Bits>{}(d.occ * 0x9E3779B97F4A7C15ULL);
  }
};
