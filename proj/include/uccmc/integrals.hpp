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

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "uccmc/errors.hpp"

namespace uccmc {

/// Molecular-orbital integrals in chemists' notation.
///
/// All indices are 0-based spatial orbital indices (the FCIDUMP file is
/// 1-based). Two-electron integrals are stored densely with the full 8-fold
/// permutational symmetry filled in, so every lookup is O(1) and any
/// symmetry-equivalent key returns the same value.
class IntegralTable {
 public:
  static constexpr int kMaxOrbitals = 32;
  static constexpr double kDuplicateTolerance = 1e-10;

  IntegralTable() = default;
  IntegralTable(int n_orb, int n_elec, int ms2)
      : n_orb_(n_orb), n_elec_(n_elec), ms2_(ms2) {
    if (n_orb <= 0 || n_orb > kMaxOrbitals) {
      throw DomainError("NORB must be in [1, " + std::to_string(kMaxOrbitals) + "], got " +
                        std::to_string(n_orb));
    }
    orb_sym_.assign(n_orb, 0);
    const auto n2 = static_cast<std::size_t>(n_orb) * n_orb;
    h_.assign(n2, 0.0);
    h_set_.assign(n2, 0);
    eri_.assign(n2 * n2, 0.0);
    eri_set_.assign(n2 * n2, 0);
  }

  int n_orb() const noexcept { return n_orb_; }
  int n_elec() const noexcept { return n_elec_; }
  int ms2() const noexcept { return ms2_; }
  int n_alpha() const noexcept { return (n_elec_ + ms2_) / 2; }
  int n_beta() const noexcept { return (n_elec_ - ms2_) / 2; }
  double e_core() const noexcept { return e_core_; }
  const std::vector<int>& orb_sym() const noexcept { return orb_sym_; }

  double h(int p, int q) const { return h_[pair(p, q)]; }
  double eri(int p, int q, int r, int s) const { return eri_[quad(p, q, r, s)]; }

  void set_orb_sym(std::vector<int> sym) {
    if (static_cast<int>(sym.size()) != n_orb_) {
      throw ConsistencyError("ORBSYM has " + std::to_string(sym.size()) + " entries, NORB is " +
                             std::to_string(n_orb_));
    }
    orb_sym_ = std::move(sym);
  }

  void set_e_core(double v) { e_core_ = v; }

  /// Stores h(p,q) = h(q,p). Throws ConsistencyError when a different value was
  /// already stored for the same symmetric key.
  void set_h(int p, int q, double v) {
    check_index(p), check_index(q);
    assign(h_, h_set_, pair(p, q), v, "h", {p, q, -1, -1});
    assign(h_, h_set_, pair(q, p), v, "h", {q, p, -1, -1});
  }

  /// Stores (pq|rs) under all eight equivalent keys.
  void set_eri(int p, int q, int r, int s, double v) {
    check_index(p), check_index(q), check_index(r), check_index(s);
    const std::array<std::array<int, 4>, 8> keys{{{p, q, r, s},
                                                  {q, p, r, s},
                                                  {p, q, s, r},
                                                  {q, p, s, r},
                                                  {r, s, p, q},
                                                  {s, r, p, q},
                                                  {r, s, q, p},
                                                  {s, r, q, p}}};
    for (const auto& k : keys) {
      assign(eri_, eri_set_, quad(k[0], k[1], k[2], k[3]), v, "eri", k);
    }
  }

  bool is_set_eri(int p, int q, int r, int s) const { return eri_set_[quad(p, q, r, s)] != 0; }
  bool is_set_h(int p, int q) const { return h_set_[pair(p, q)] != 0; }

 private:
  std::size_t pair(int p, int q) const {
    return static_cast<std::size_t>(p) * n_orb_ + q;
  }
  std::size_t quad(int p, int q, int r, int s) const {
    return pair(p, q) * n_orb_ * n_orb_ + pair(r, s);
  }
  void check_index(int p) const {
    if (p < 0 || p >= n_orb_) {
      throw IndexError("orbital index " + std::to_string(p + 1) + " outside 1.." +
                       std::to_string(n_orb_));
    }
  }
  static void assign(std::vector<double>& data, std::vector<char>& set, std::size_t at, double v,
                     const char* what, const std::array<int, 4>& key) {
    if (set[at] && std::abs(data[at] - v) > kDuplicateTolerance) {
      std::ostringstream msg;
      msg << "conflicting duplicate " << what << " integral (";
      for (int k : key) {
        if (k >= 0) msg << ' ' << k + 1;
      }
      msg << " ): " << data[at] << " vs " << v;
      throw ConsistencyError(msg.str());
    }
    data[at] = v;
    set[at] = 1;
  }

  int n_orb_ = 0;
  int n_elec_ = 0;
  int ms2_ = 0;
  double e_core_ = 0.0;
  std::vector<int> orb_sym_;
  std::vector<double> h_;
  std::vector<char> h_set_;
  std::vector<double> eri_;
  std::vector<char> eri_set_;
};

namespace detail {

inline std::string upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

/// Fortran-style reals: 1.0D-01 is accepted as 1.0E-01.
inline bool parse_real(std::string tok, double& out) {
  for (auto& c : tok) {
    if (c == 'D' || c == 'd') c = 'E';
  }
  try {
    std::size_t used = 0;
    out = std::stod(tok, &used);
    return used == tok.size();
  } catch (const std::exception&) {
    return false;
  }
}

inline bool parse_int(const std::string& tok, long& out) {
  try {
    std::size_t used = 0;
    out = std::stol(tok, &used);
    return used == tok.size();
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace detail

/// Reads an FCIDUMP stream.
///
/// Body lines are `value p q r s`: r=s=0 is a one-electron integral, all four
/// zero is the core energy, and `value p 0 0 0` (orbital energy lines written
/// by some programs) is ignored.
inline IntegralTable parse_fcidump(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::string header;
  bool started = false;
  bool ended = false;
  std::size_t header_line = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string up = detail::upper(line);
    if (!started) {
      if (up.find_first_not_of(" \t\r") == std::string::npos) continue;
      const auto pos = up.find("&FCI");
      if (pos == std::string::npos) {
        throw ParseError(line_no, "expected '&FCI' namelist header");
      }
      started = true;
      header_line = line_no;
      header += up.substr(pos + 4) + ' ';
    } else {
      header += up + ' ';
    }
    auto end = header.find("&END");
    if (end == std::string::npos) end = header.find('/');
    if (end != std::string::npos) {
      header.resize(end);
      ended = true;
      break;
    }
  }
  if (!started) throw ParseError(line_no, "empty input");
  if (!ended) throw ParseError(line_no, "namelist header not terminated by &END or /");

  for (auto& c : header) {
    if (c == ',' || c == '\t' || c == '\r') c = ' ';
  }
  // Split KEY=VALUE tokens; bare values continue the previous key (ORBSYM lists).
  std::istringstream hs(header);
  std::string tok;
  std::string key;
  long norb = -1, nelec = -1, ms2 = 0;
  std::vector<int> orbsym;
  auto take = [&](const std::string& k, const std::string& v) {
    if (v.empty()) return;
    long value = 0;
    if (!detail::parse_int(v, value)) {
      throw ParseError(header_line, "non-integer value '" + v + "' for " + k);
    }
    if (k == "NORB") norb = value;
    else if (k == "NELEC") nelec = value;
    else if (k == "MS2") ms2 = value;
    else if (k == "ORBSYM") orbsym.push_back(static_cast<int>(value));
  };
  while (hs >> tok) {
    const auto eq = tok.find('=');
    if (eq != std::string::npos) {
      key = tok.substr(0, eq);
      take(key, tok.substr(eq + 1));
    } else if (!key.empty()) {
      take(key, tok);
    }
  }
  if (norb <= 0) throw ParseError(header_line, "missing or invalid NORB");
  if (nelec < 0) throw ParseError(header_line, "missing or invalid NELEC");

  IntegralTable table(static_cast<int>(norb), static_cast<int>(nelec), static_cast<int>(ms2));
  if (!orbsym.empty()) {
    if (static_cast<long>(orbsym.size()) != norb) {
      throw ParseError(header_line, "ORBSYM has " + std::to_string(orbsym.size()) +
                                        " entries, expected " + std::to_string(norb));
    }
    for (auto& s : orbsym) {
      if (s < 1 || s > 8) throw ParseError(header_line, "ORBSYM label outside 1..8");
      s -= 1;
    }
    table.set_orb_sym(orbsym);
  }

  bool core_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string vtok;
    if (!(ls >> vtok)) continue;
    double value = 0.0;
    if (!detail::parse_real(vtok, value)) {
      throw ParseError(line_no, "cannot parse integral value '" + vtok + "'");
    }
    std::array<long, 4> idx{};
    for (auto& i : idx) {
      std::string itok;
      if (!(ls >> itok) || !detail::parse_int(itok, i)) {
        throw ParseError(line_no, "expected four integer indices");
      }
      if (i < 0 || i > norb) {
        throw IndexError("line " + std::to_string(line_no) + ": orbital index " +
                         std::to_string(i) + " outside 0.." + std::to_string(norb));
      }
    }
    const auto [p, q, r, s] = idx;
    if (p == 0 && q == 0 && r == 0 && s == 0) {
      if (core_seen && std::abs(table.e_core() - value) > IntegralTable::kDuplicateTolerance) {
        throw ConsistencyError("line " + std::to_string(line_no) + ": conflicting core energy");
      }
      table.set_e_core(value);
      core_seen = true;
    } else if (r == 0 && s == 0) {
      if (q == 0) continue;
      if (p == 0) throw IndexError("line " + std::to_string(line_no) + ": zero index in h(p,q)");
      table.set_h(static_cast<int>(p - 1), static_cast<int>(q - 1), value);
    } else {
      if (p == 0 || q == 0 || r == 0 || s == 0) {
        throw IndexError("line " + std::to_string(line_no) + ": zero index in (pq|rs)");
      }
      table.set_eri(static_cast<int>(p - 1), static_cast<int>(q - 1), static_cast<int>(r - 1),
                    static_cast<int>(s - 1), value);
    }
  }
  return table;
}

inline IntegralTable parse_fcidump_text(const std::string& text) {
  std::istringstream in(text);
  return parse_fcidump(in);
}

inline IntegralTable read_fcidump(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open FCIDUMP file: " + path);
  return parse_fcidump(in);
}

/// Writes one line per canonical key (p>=q, r>=s, pq>=rs) with a nonzero value.
inline void write_fcidump(std::ostream& out, const IntegralTable& t, double zero_tol = 0.0) {
  const int n = t.n_orb();
  out << " &FCI NORB=" << n << ",NELEC=" << t.n_elec() << ",MS2=" << t.ms2() << ",\n  ORBSYM=";
  for (int p = 0; p < n; ++p) out << t.orb_sym()[p] + 1 << ',';
  out << "\n  ISYM=1,\n &END\n";
  char buf[96];
  auto emit = [&](double v, int p, int q, int r, int s) {
    std::snprintf(buf, sizeof buf, "%24.16e %4d %4d %4d %4d\n", v, p, q, r, s);
    out << buf;
  };
  for (int p = 0; p < n; ++p)
    for (int q = 0; q <= p; ++q)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s <= r; ++s) {
          if (r * (r + 1) / 2 + s > p * (p + 1) / 2 + q) continue;
          const double v = t.eri(p, q, r, s);
          if (std::abs(v) > zero_tol || (zero_tol == 0.0 && t.is_set_eri(p, q, r, s))) {
            emit(v, p + 1, q + 1, r + 1, s + 1);
          }
        }
  for (int p = 0; p < n; ++p)
    for (int q = 0; q <= p; ++q) {
      const double v = t.h(p, q);
      if (std::abs(v) > zero_tol || (zero_tol == 0.0 && t.is_set_h(p, q))) emit(v, p + 1, q + 1, 0, 0);
    }
  emit(t.e_core(), 0, 0, 0, 0);
}

/// Folds the lowest `n_frozen` doubly occupied orbitals into an effective
/// one-electron operator and core energy; the result describes the active
/// orbitals only, re-indexed from 0.
inline IntegralTable freeze_core(const IntegralTable& t, int n_frozen) {
  if (n_frozen == 0) return t;
  if (n_frozen < 0 || n_frozen >= t.n_orb() || n_frozen > t.n_beta() || 2 * n_frozen >= t.n_elec()) {
    throw DomainError("cannot freeze " + std::to_string(n_frozen) + " orbitals of a " +
                      std::to_string(t.n_elec()) + "-electron table");
  }
  const int n = t.n_orb() - n_frozen;
  IntegralTable out(n, t.n_elec() - 2 * n_frozen, t.ms2());
  out.set_orb_sym(std::vector<int>(t.orb_sym().begin() + n_frozen, t.orb_sym().end()));
  double e = t.e_core();
  for (int c = 0; c < n_frozen; ++c) {
    e += 2.0 * t.h(c, c);
    for (int d = 0; d < n_frozen; ++d) e += 2.0 * t.eri(c, c, d, d) - t.eri(c, d, d, c);
  }
  out.set_e_core(e);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q <= p; ++q) {
      double v = t.h(p + n_frozen, q + n_frozen);
      for (int c = 0; c < n_frozen; ++c) {
        v += 2.0 * t.eri(p + n_frozen, q + n_frozen, c, c) - t.eri(p + n_frozen, c, c, q + n_frozen);
      }
      out.set_h(p, q, v);
    }
  for (int p = 0; p < n; ++p)
    for (int q = 0; q <= p; ++q)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s <= r; ++s) {
          if (r * (r + 1) / 2 + s > p * (p + 1) / 2 + q) continue;
          out.set_eri(p, q, r, s, t.eri(p + n_frozen, q + n_frozen, r + n_frozen, s + n_frozen));
        }
  return out;
}

/// Per-spin-orbital Fock diagonals, spin orbital 2p+s (alpha s=0, beta s=1).
struct OrbitalEnergies {
  std::vector<double> eps;
};

/// Fock diagonals of the Aufbau reference (n_alpha lowest alpha, n_beta lowest
/// beta spatial orbitals occupied). For canonical RHF orbitals these are the
/// orbital energies; for ROHF orbitals they are the alpha/beta Fock diagonals.
inline OrbitalEnergies orbital_energies(const IntegralTable& t) {
  if (t.n_elec() > 2 * t.n_orb()) {
    throw DomainError("NELEC=" + std::to_string(t.n_elec()) + " exceeds 2*NORB=" +
                      std::to_string(2 * t.n_orb()));
  }
  if ((t.n_elec() + t.ms2()) % 2 != 0 || t.n_beta() < 0 || t.n_alpha() > t.n_orb()) {
    throw DomainError("NELEC and MS2 are inconsistent");
  }
  const int n = t.n_orb();
  OrbitalEnergies out;
  out.eps.assign(2 * n, 0.0);
  const std::array<int, 2> n_occ{t.n_alpha(), t.n_beta()};
  for (int p = 0; p < n; ++p) {
    for (int sigma = 0; sigma < 2; ++sigma) {
      double v = t.h(p, p);
      for (int tau = 0; tau < 2; ++tau) {
        for (int i = 0; i < n_occ[tau]; ++i) {
          v += t.eri(p, p, i, i);
          if (tau == sigma) v -= t.eri(p, i, i, p);
        }
      }
      out.eps[2 * p + sigma] = v;
    }
  }
  return out;
}

}  // namespace uccmc
