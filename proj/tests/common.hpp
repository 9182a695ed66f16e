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

#include <fstream>
#include <string>

#include "json.hpp"
#include "uccmc/uccmc.hpp"

namespace uccmc::testing {

inline std::string fixture(const std::string& name) { return std::string(UCCMC_FIXTURES) + "/" + name; }

inline nlohmann::json sidecar(const std::string& system) {
  std::ifstream in(fixture(system + ".json"));
  return nlohmann::json::parse(in);
}

/// Fixture system with its sidecar frozen-core count applied.
struct Loaded {
  IntegralTable full;
  IntegralTable active;
  Determinant reference;
  AnsatzSpec spec;
  nlohmann::json meta;
};

inline Loaded load(const std::string& system) {
  Loaded l;
  l.meta = sidecar(system);
  l.full = read_fcidump(fixture(system + ".FCIDUMP"));
  l.active = freeze_core(l.full, l.meta.at("frozen").get<int>());
  l.reference = aufbau_reference(l.active);
  l.spec = make_ansatz(l.reference, 2 * l.active.n_orb(), enumerate_uccsd(l.reference, l.active.orb_sym()));
  return l;
}

}  // namespace uccmc::testing
