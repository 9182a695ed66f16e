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

#include <cmath>
#include <map>
#include <string>

#include "uccmc/errors.hpp"
#include "uccmc/fock_space.hpp"
#include "uccmc/integrals.hpp"

namespace uccmc {

using AmplitudeMap = std::map<Excitor, double>;

/// First-order doubles amplitudes in the excitor convention of this library,
/// i.e. the coefficient of tau|D0> rather than of the textbook
/// a+_a a+_b a_j a_i|D0>. Singles are present with amplitude zero.
///
/// Denominators are the Fock diagonals of the Aufbau reference; for ROHF
/// orbitals these are the alpha and beta Fock diagonals, without
/// semicanonicalisation.
inline AmplitudeMap mp2_amplitudes(const IntegralTable& t, int frozen = 0) {
  const auto eps = orbital_energies(t).eps;
  const Determinant ref = aufbau_reference(t);
  AmplitudeMap out;
  for (const auto& e : enumerate_uccsd(ref, t.orb_sym(), frozen)) {
    if (e.level() == 1) {
      out.emplace(e, 0.0);
      continue;
    }
    const int i = e.from()[0], j = e.from()[1], a = e.to()[0], b = e.to()[1];
    const double denom = eps[i] + eps[j] - eps[a] - eps[b];
    if (std::abs(denom) <= 1e-8) {
      throw DegeneracyError("vanishing MP2 denominator for excitor " + e.key());
    }
    const auto moved = apply_excitor(ref, e);
    out.emplace(e, moved->sign * slater_condon(t, moved->det, ref) / denom);
  }
  return out;
}

/// Second-order energy sum_D |<D|H|D0>|^2 / (E_0 - E_D) over the doubles of mp2_amplitudes.
inline double mp2_energy(const IntegralTable& t, const AmplitudeMap& amps) {
  const Determinant ref = aufbau_reference(t);
  double e = 0.0;
  for (const auto& [ex, amp] : amps) {
    if (ex.level() != 2) continue;
    const auto moved = apply_excitor(ref, ex);
    e += amp * moved->sign * slater_condon(t, ref, moved->det);
  }
  return e;
}

}  // namespace uccmc
