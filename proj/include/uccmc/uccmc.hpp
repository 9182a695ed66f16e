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

#include "uccmc/errors.hpp"
#include "uccmc/integrals.hpp"
#include "uccmc/fock_space.hpp"
#include "uccmc/mp2.hpp"
#include "uccmc/qubit_map.hpp"
#include "uccmc/simulator.hpp"
#include "uccmc/lbfgs.hpp"
#include "uccmc/sector.hpp"
#include "uccmc/vqe.hpp"
#include "uccmc/qmc.hpp"
#include "uccmc/screen.hpp"
#include "uccmc/run_config.hpp"
#include "uccmc/io.hpp"
