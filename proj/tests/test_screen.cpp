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

#include <random>

#include "common.hpp"

using namespace uccmc;
using namespace uccmc::testing;

namespace {

std::map<Excitor, double> vqe_amplitudes(const Loaded& l, const VqeResult& r) {
  std::map<Excitor, double> m;
  for (std::size_t k = 0; k < l.spec.excitors.size(); ++k) m[l.spec.excitors[k]] = r.params[k];
  return m;
}

}  // namespace

TEST(Screen, StrictMagnitudeThreshold) {
  const std::map<Excitor, double> amps{{Excitor::single(0, 2), 0.1},
                                       {Excitor::single(1, 3), -0.2},
                                       {Excitor::pair(0, 1, 2, 3), 0.05}};
  const auto kept = screen(amps, 0.1);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept[0].first, Excitor::single(1, 3));
  EXPECT_DOUBLE_EQ(kept[0].second, -0.2);
  EXPECT_EQ(screen(amps, 0.01).size(), 3u);
  EXPECT_THROW(screen(amps, 0.0), DomainError);
  EXPECT_THROW(screen(amps, -1.0), DomainError);
  const auto again = screen(std::map<Excitor, double>(kept.begin(), kept.end()), 0.1);
  EXPECT_EQ(again, kept);
}

TEST(Screen, ParametersFromMap) {
  const std::vector<Excitor> order{Excitor::single(0, 2), Excitor::pair(0, 1, 2, 3)};
  const auto p = parameters_from_map(order, {{Excitor::pair(0, 1, 2, 3), 0.3}});
  EXPECT_EQ(p, (std::vector<double>{0.0, 0.3}));
}

TEST(Screen, PercentCorrelation) {
  EXPECT_DOUBLE_EQ(pct_ecorr(-2.0, -2.0, -1.0), 100.0);
  EXPECT_DOUBLE_EQ(pct_ecorr(-1.0, -2.0, -1.0), 0.0);
  EXPECT_DOUBLE_EQ(pct_ecorr(-1.5, -2.0, -1.0), 50.0);
  EXPECT_THROW(pct_ecorr(-1.0, -1.0, -1.0), DomainError);
}

TEST(Depth, CnotCounts) {
  EXPECT_EQ(depth_estimate(std::vector<Excitor>{}, 4).cnots, 0);
  const auto s = depth_estimate(std::vector<Excitor>{Excitor::single(0, 1)}, 2);
  EXPECT_EQ(s.gadgets, 2);
  EXPECT_EQ(s.cnots, 4);
  EXPECT_EQ(s.parameters, 1);
  // Eight weight-4 strings.
  const auto d = depth_estimate(std::vector<Excitor>{Excitor::pair(0, 1, 2, 3)}, 4);
  EXPECT_EQ(d.gadgets, 8);
  EXPECT_EQ(d.cnots, 48);
  // Z-chain through qubits 1 and 2 adds weight.
  EXPECT_EQ(depth_estimate(std::vector<Excitor>{Excitor::single(0, 3)}, 4).cnots, 2 * 2 * 3);
}

TEST(ScreenPlan, SizesWithoutVqe) {
  const auto l = load("lih_1.395");
  std::map<Excitor, double> amps;
  for (std::size_t k = 0; k < l.spec.excitors.size(); ++k) amps[l.spec.excitors[k]] = k % 2 ? 0.05 : 0.005;
  const auto r = screen_plan(l.spec, amps, 0.01, "mp2");
  EXPECT_FALSE(r.evaluated);
  EXPECT_EQ(r.hilbert_size, static_cast<int>(l.spec.excitors.size()) + 1);
  EXPECT_EQ(r.kept.size(), l.spec.excitors.size() / 2);
  EXPECT_LT(r.depth.cnots, r.full_depth.cnots);
  EXPECT_EQ(r.full_depth.parameters, static_cast<long>(l.spec.excitors.size()));
  amps[Excitor::pair(0, 1, 20, 21)] = 0.5;
  EXPECT_THROW(screen_plan(l.spec, amps, 0.01, "mp2"), DomainError);
}

TEST(ScreenedVqe, NestedThresholdsAreMonotoneAndBounded) {
  const auto l = load("lih_1.395");
  const auto full = minimize(SectorEvaluator(l.spec, l.active));
  const auto amps = vqe_amplitudes(l, full);
  const double fci = fci_oracle(l.active);
  double previous = diagonal_energy(l.active, l.reference);
  std::size_t previous_kept = 0;
  for (double th : {0.1, 0.01, 0.001, 1e-6}) {
    const auto r = screened_vqe(l.active, l.spec, amps, th, full.energy, "vqe");
    EXPECT_TRUE(r.evaluated);
    EXPECT_GE(r.kept.size(), previous_kept);
    EXPECT_LE(r.energy, previous + 1e-10) << th;
    EXPECT_GE(r.energy, full.energy - 1e-10) << th;
    EXPECT_GE(r.energy, fci - 1e-10) << th;
    EXPECT_LE(r.pct_ecorr, 100.0 + 1e-6);
    EXPECT_EQ(r.optimized.size(), r.kept.size());
    previous = r.energy;
    previous_kept = r.kept.size();
  }
  const auto all = screened_vqe(l.active, l.spec, amps, 1e-12, full.energy, "vqe");
  EXPECT_NEAR(all.pct_ecorr, 100.0, 1e-5);
}

TEST(ScreenedVqe, NothingKeptGivesReferenceEnergy) {
  const auto l = load("lih_1.595_fc_eff");
  const auto full = minimize(SectorEvaluator(l.spec, l.active));
  const auto r = screened_vqe(l.active, l.spec, vqe_amplitudes(l, full), 10.0, full.energy, "vqe");
  EXPECT_TRUE(r.kept.empty());
  EXPECT_DOUBLE_EQ(r.energy, r.hf_energy);
  EXPECT_DOUBLE_EQ(r.pct_ecorr, 0.0);
  EXPECT_EQ(r.depth.cnots, 0);
}

TEST(VariationalEstimate, BlockMeanAndError) {
  const auto l = load("lih_1.595_fc_eff");
  const SectorEvaluator ev(l.spec, l.active);
  const auto full = minimize(ev);
  AmplitudeSnapshot s;
  s.t = vqe_amplitudes(l, full);
  const auto same = variational_estimate(ev, {s, s, s});
  EXPECT_NEAR(same.mean, full.energy, 1e-12);
  EXPECT_NEAR(same.error, 0.0, 1e-12);
  EXPECT_EQ(same.blocks, 3);
  AmplitudeSnapshot zero;
  // Two blocks: leave-one-out energies are E(t) and E_HF.
  const auto two = variational_estimate(ev, {s, zero});
  const double hf = diagonal_energy(l.active, l.reference);
  std::vector<double> half = full.params;
  for (double& x : half) x *= 0.5;
  EXPECT_NEAR(two.mean, 2 * ev.energy(half) - 0.5 * (hf + full.energy), 1e-12);
  EXPECT_NEAR(two.error, 0.5 * (hf - full.energy), 1e-12);
  // Gaussian block noise about the optimum: the jackknife mean is unbiased
  // while the mean of per-block energies is not.
  std::mt19937_64 rng(31);
  std::normal_distribution<double> noise(0.0, 2e-3);
  const int trials = 400;
  double jk = 0.0, jk2 = 0.0, naive = 0.0;
  for (int k = 0; k < trials; ++k) {
    std::vector<AmplitudeSnapshot> blocks(10, s);
    double block_mean = 0.0;
    for (auto& b : blocks) {
      for (auto& [e, t] : b.t) t += noise(rng);
      block_mean += ev.energy(parameters_from_map(l.spec.excitors, b.t)) / blocks.size();
    }
    const double d = variational_estimate(ev, blocks).mean - full.energy;
    jk += d / trials;
    jk2 += d * d / trials;
    naive += (block_mean - full.energy) / trials;
  }
  const double se = std::sqrt((jk2 - jk * jk) / trials);
  EXPECT_LT(std::abs(jk), 3 * se);
  EXPECT_GT(naive, 10 * se);
  EXPECT_THROW(variational_estimate(ev, {}), DomainError);
}
