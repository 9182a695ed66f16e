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

#include <cmath>
#include <map>
#include <random>

#include "common.hpp"
#include "qmc_oracle.hpp"

using namespace uccmc;
using namespace uccmc::testing;

namespace {

// Four spin orbitals, two electrons: reference, one single and the double.
struct Toy {
  IntegralTable t = random_table(2, 2, 0, 7);
  Determinant ref = aufbau_reference(t);
  ExcitorSpace space{ref, {Excitor::single(0, 2), Excitor::pair(0, 1, 2, 3)}};
  Eigen::MatrixXd h = hamiltonian_matrix(t);
};

// Four spin orbitals with both singles and the double.
ExcitorSpace h2_like_space(const Determinant& ref) {
  return ExcitorSpace(ref, {Excitor::single(0, 2), Excitor::single(1, 3), Excitor::pair(0, 1, 2, 3)});
}

WalkerEnsemble ensemble(double n_ref, std::map<int, double> pops, double shift = 0.0) {
  WalkerEnsemble w;
  w.n_ref = n_ref;
  w.pops = std::move(pops);
  w.shift = shift;
  return w;
}

std::string cluster_key(const Cluster& c) {
  std::string k;
  for (std::size_t i = 0; i < c.slots.size(); ++i) k += std::to_string(c.slots[i]) + (c.dagger[i] ? "d," : ",");
  return k;
}

// Mean one-step change per slot over `trials` propagations of the same state.
void check_step_expectation(QmcMode mode, int trials) {
  Toy toy;
  QmcConfig cfg;
  cfg.mode = mode;
  cfg.dtau = 0.01;
  cfg.samples_per_step = 1;
  cfg.seed = 99;
  QmcEngine engine(toy.t, toy.space, cfg);
  const WalkerEnsemble w0 = ensemble(1000.0, {{0, 150.0}, {1, -250.0}}, 0.3);
  Eigen::VectorXd psi = mode == QmcMode::tpUCCMC
                            ? dense_tpucc(toy.space, w0, 4)
                            : dense_cluster_expansion(toy.space, w0, 4, cfg.max_cluster_size, mode == QmcMode::pUCCMC);
  const auto expected = expected_step(toy.space, toy.h, psi, engine.reference_energy(), w0.shift, cfg.dtau);
  std::map<int, double> sum, sum2;
  for (int k = 0; k < trials; ++k) {
    WalkerEnsemble w = w0;
    engine.propagate(w);
    for (const auto& [slot, e] : expected) {
      const double d = (slot == ExcitorSpace::kRef ? w.n_ref : w.amplitude(slot) * w.n_ref) -
                       (slot == ExcitorSpace::kRef ? w0.n_ref : w0.pops.at(slot));
      sum[slot] += d;
      sum2[slot] += d * d;
    }
  }
  for (const auto& [slot, e] : expected) {
    const double mean = sum[slot] / trials;
    const double sigma = std::sqrt((sum2[slot] / trials - mean * mean) / trials);
    EXPECT_LT(std::abs(mean - e), 3.0 * sigma) << to_string(mode) << " slot " << slot << " mean " << mean
                                               << " expected " << e;
  }
}

}  // namespace

TEST(QmcConfig, Validation) {
  QmcConfig c;
  EXPECT_NO_THROW(c.validate());
  c.dtau = 0.0;
  EXPECT_THROW(c.validate(), DomainError);
  c = {};
  c.max_cluster_size = 1;
  EXPECT_THROW(c.validate(), DomainError);
  c = {};
  c.snapshot_window = 4;
  c.snapshot_blocks = 5;
  EXPECT_THROW(c.validate(), DomainError);
  c = {};
  c.ordering = "random";
  EXPECT_THROW(c.validate(), DomainError);
  EXPECT_EQ(parse_mode("tpuccmc"), QmcMode::tpUCCMC);
  EXPECT_EQ(parse_mode("CCMC"), QmcMode::CCMC);
  EXPECT_THROW(parse_mode("dmc"), DomainError);
}

TEST(ExcitorSpace, SlotsAndErrors) {
  Toy toy;
  EXPECT_EQ(toy.space.size(), 2u);
  EXPECT_EQ(*toy.space.slot_of(toy.ref), ExcitorSpace::kRef);
  EXPECT_EQ(*toy.space.slot_of(toy.space.det(1)), 1);
  EXPECT_FALSE(toy.space.slot_of(Determinant{0b1010}).has_value());
  EXPECT_THROW(ExcitorSpace(toy.ref, {Excitor::single(2, 0)}), DomainError);
  EXPECT_THROW(ExcitorSpace(toy.ref, {Excitor::single(0, 2), Excitor::single(0, 2)}), DomainError);
  const auto l = load("lih_1.595_fc_eff");
  const auto full = ExcitorSpace::full_sector(l.active, l.reference);
  const auto dets = sector_determinants(l.active.n_orb(), l.reference.count_spin(0), l.reference.count_spin(1),
                                        determinant_irrep(l.reference, l.active.orb_sym()), l.active.orb_sym());
  EXPECT_EQ(full.size() + 1, dets.size());
}

TEST(ClusterSelection, ProbabilitiesSumToOne) {
  const auto ref = aufbau_reference(2, 2, 0);
  const auto w = ensemble(100.0, {{0, 3.0}, {1, -5.0}, {2, 12.0}});
  for (QmcMode mode : {QmcMode::CCMC, QmcMode::pUCCMC}) {
    QmcConfig cfg;
    cfg.mode = mode;
    double total = 0.0;
    for (const auto& c : enumerate_clusters(w, cfg)) total += c.p_sel;
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
  double s = 0.0;
  for (int k = 0; k <= 4; ++k) s += cluster_size_probability(k, 4);
  EXPECT_DOUBLE_EQ(s, 1.0);
}

TEST(ClusterSelection, EmpiricalFrequenciesMatchEnumeration) {
  const auto w = ensemble(100.0, {{0, 3.0}, {1, -5.0}, {2, 12.0}});
  QmcConfig cfg;
  cfg.mode = QmcMode::pUCCMC;
  cfg.max_cluster_size = 3;
  std::map<std::string, double> p;
  for (const auto& c : enumerate_clusters(w, cfg)) p[cluster_key(c)] += c.p_sel;
  std::mt19937_64 rng(5);
  const int n = 400000;
  std::map<std::string, int> count;
  for (int k = 0; k < n; ++k) {
    const Cluster c = select_cluster(w, cfg, rng);
    EXPECT_NEAR(c.p_sel, p.at(cluster_key(c)), 1e-15);
    ++count[cluster_key(c)];
  }
  for (const auto& [key, prob] : p) {
    const double sigma = std::sqrt(n * prob * (1 - prob));
    EXPECT_LT(std::abs(count[key] - n * prob), 5.0 * sigma + 1.0) << key;
  }
}

TEST(ClusterExpansion, EnumerationMatchesDenseExponential) {
  const auto ref = aufbau_reference(2, 2, 0);
  const ExcitorSpace space = h2_like_space(ref);
  const auto w = ensemble(50.0, {{0, 4.0}, {1, -6.0}, {2, 9.0}});
  for (QmcMode mode : {QmcMode::CCMC, QmcMode::pUCCMC}) {
    QmcConfig cfg;
    cfg.mode = mode;
    Eigen::VectorXd c = Eigen::VectorXd::Zero(16);
    for (const auto& cl : enumerate_clusters(w, cfg))
      if (const auto r = collapse_cluster(space, cl)) c(static_cast<Eigen::Index>(r->det.occ)) += r->sign * cl.weight * cl.p_sel;
    const Eigen::VectorXd dense = dense_cluster_expansion(space, w, 4, cfg.max_cluster_size, mode == QmcMode::pUCCMC);
    EXPECT_LT((c - dense).cwiseAbs().maxCoeff(), 1e-12) << to_string(mode);
  }
  // CCMC doubles coefficient: t_d plus the product of the two singles.
  QmcConfig cfg;
  cfg.mode = QmcMode::CCMC;
  const Eigen::VectorXd dense = dense_cluster_expansion(space, w, 4, 4, false);
  const double td = 9.0 / 50.0, ta = 4.0 / 50.0, tb = -6.0 / 50.0;
  const Eigen::MatrixXd sa = excitor_matrix(Excitor::single(0, 2), 4), sb = excitor_matrix(Excitor::single(1, 3), 4);
  const Eigen::MatrixXd d = excitor_matrix(Excitor::pair(0, 1, 2, 3), 4);
  const Eigen::VectorXd r0 = dense_reference(ref, 4);
  const Eigen::VectorXd closed = 50.0 * (td * d * r0 + ta * tb * sb * sa * r0);
  EXPECT_NEAR(dense(0b1100), closed(0b1100), 1e-12);
}

TEST(TpuccPaths, ExhaustiveEnumerationMatchesDenseAnsatz) {
  const auto t = random_table(3, 4, 0, 11);
  const auto ref = aufbau_reference(t);
  const auto ex = enumerate_uccsd(ref, std::vector<int>(3, 0));
  const ExcitorSpace space(ref, ex);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-40.0, 40.0);
  WalkerEnsemble w = ensemble(100.0, {});
  for (std::size_t k = 0; k < ex.size(); ++k) w.pops[static_cast<int>(k)] = u(rng);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(64);
  double p_total = 0.0;
  for (const auto& p : enumerate_tpucc_paths(space, w)) {
    c(static_cast<Eigen::Index>(p.det.occ)) += p.probability * p.amp;
    p_total += p.probability;
  }
  EXPECT_NEAR(p_total, 1.0, 1e-12);
  EXPECT_LT((c - dense_tpucc(space, w, 6)).cwiseAbs().maxCoeff(), 1e-12);
  // Library rotation state in the same order.
  const SectorSpace sector(ref, ex);
  std::vector<double> amps;
  for (const auto& [slot, n] : w.pops) amps.push_back(n / w.n_ref);
  const Eigen::VectorXd s = tpucc_state(sector, amps);
  for (std::size_t i = 0; i < sector.dim(); ++i)
    EXPECT_NEAR(w.n_ref * s(i), c(static_cast<Eigen::Index>(sector.determinants()[i].occ)), 1e-12);
}

TEST(Propagation, ExactStepExpectationMatchesDenseUpdate) {
  Toy toy;
  QmcConfig cfg;
  cfg.dtau = 0.01;
  QmcEngine engine(toy.t, toy.space, cfg);
  const WalkerEnsemble w0 = ensemble(1000.0, {{0, 150.0}, {1, -250.0}}, 0.3);
  const auto expected =
      expected_step(toy.space, toy.h, dense_tpucc(toy.space, w0, 4), engine.reference_energy(), w0.shift, cfg.dtau);
  // Each walk dies on its own slot and spawns to every neighbour with weight p_gen.
  std::map<int, double> exact;
  for (const auto& p : enumerate_tpucc_paths(toy.space, w0)) {
    if (const auto slot = toy.space.slot_of(p.det)) {
      exact[*slot] += p.probability * toy.space.sign(*slot) * engine.death_step(p.det, p.amp, w0.shift);
    }
    for (const auto& [d, v] : engine.connections(p.det)) {
      const int slot = *toy.space.slot_of(d);
      exact[slot] += p.probability * toy.space.sign(slot) * -cfg.dtau * v * p.amp;
    }
  }
  for (const auto& [slot, e] : expected) EXPECT_NEAR(exact[slot], e, 1e-12) << slot;
}

TEST(Propagation, OneStepExpectationTpUccmc) { check_step_expectation(QmcMode::tpUCCMC, 200000); }
TEST(Propagation, OneStepExpectationPuccmc) { check_step_expectation(QmcMode::pUCCMC, 200000); }
TEST(Propagation, OneStepExpectationCcmc) { check_step_expectation(QmcMode::CCMC, 200000); }

TEST(Propagation, AnnihilationRoundsSmallEntriesWithoutBias) {
  Toy toy;
  QmcConfig cfg;
  cfg.spawn_cutoff = 0.01;
  QmcEngine engine(toy.t, toy.space, cfg);
  double sum = 0.0;
  const int n = 100000;
  for (int k = 0; k < n; ++k) {
    WalkerEnsemble w = ensemble(10.0, {{0, 0.004}, {1, 0.5}});
    engine.annihilate(w);
    EXPECT_DOUBLE_EQ(w.pops.at(1), 0.5);
    if (w.pops.count(0)) {
      EXPECT_DOUBLE_EQ(w.pops.at(0), 0.01);
      sum += 0.01;
    }
  }
  const double sigma = 0.01 * std::sqrt(0.4 * 0.6 / n);
  EXPECT_NEAR(sum / n, 0.004, 4 * sigma);
  WalkerEnsemble w = ensemble(10.0, {{0, 0.0}});
  engine.annihilate(w);
  EXPECT_TRUE(w.pops.empty());
}

TEST(Propagation, ShiftUpdate) {
  QmcConfig cfg;
  cfg.zeta = 0.1;
  cfg.dtau = 0.01;
  cfg.shift_period = 5;
  EXPECT_DOUBLE_EQ(QmcEngine::update_shift(0.2, 100.0, 100.0, cfg), 0.2);
  EXPECT_NEAR(QmcEngine::update_shift(0.0, 110.0, 100.0, cfg), -0.1 / 0.05 * std::log(1.1), 1e-15);
  EXPECT_GT(QmcEngine::update_shift(0.0, 90.0, 100.0, cfg), 0.0);
  EXPECT_THROW(QmcEngine::update_shift(0.0, 0.0, 100.0, cfg), PopulationCollapseError);
}

TEST(Propagation, ZeroReferenceRaises) {
  Toy toy;
  QmcConfig cfg;
  QmcEngine engine(toy.t, toy.space, cfg);
  EXPECT_THROW(engine.draw_samples(ensemble(0.0, {{0, 1.0}})), PopulationCollapseError);
}

TEST(Run, SameSeedSameTraceAndZeroSteps) {
  const auto l = load("lih_1.595_fc_eff");
  QmcConfig cfg;
  cfg.dtau = 0.01;
  cfg.n_steps = 200;
  cfg.initial_ref = 50;
  cfg.seed = 4;
  auto run = [&](const QmcConfig& c) { return QmcEngine(l.active, ExcitorSpace(l.reference, l.spec.excitors), c).run(); };
  const auto a = run(cfg), b = run(cfg);
  ASSERT_EQ(a.trace.size(), 200u);
  for (std::size_t k = 0; k < a.trace.size(); ++k) {
    EXPECT_EQ(a.trace[k].n_w, b.trace[k].n_w);
    EXPECT_EQ(a.trace[k].num, b.trace[k].num);
  }
  auto other = cfg;
  other.seed = 5;
  EXPECT_NE(run(other).trace.back().num, a.trace.back().num);
  auto none = cfg;
  none.n_steps = 0;
  const auto z = run(none);
  EXPECT_TRUE(z.trace.empty());
  EXPECT_TRUE(z.snapshot.t.empty());
  EXPECT_TRUE(z.block_snapshots.empty());
}

TEST(Run, BlockSnapshotsAverageToSnapshot) {
  const auto l = load("lih_1.595_fc_eff");
  QmcConfig cfg;
  cfg.dtau = 0.01;
  cfg.n_steps = 300;
  cfg.initial_ref = 50;
  cfg.snapshot_window = 100;
  cfg.snapshot_blocks = 4;
  const auto r = QmcEngine(l.active, ExcitorSpace(l.reference, l.spec.excitors), cfg).run();
  ASSERT_EQ(r.block_snapshots.size(), 4u);
  for (const auto& [e, t] : r.snapshot.t) {
    double m = 0.0;
    for (const auto& b : r.block_snapshots) {
      auto it = b.t.find(e);
      if (it != b.t.end()) m += it->second;
    }
    EXPECT_NEAR(m / 4, t, 1e-12);
  }
}

TEST(Run, H2ProjectedEnergyIsExact) {
  const auto l = load("h2_0.74");
  QmcConfig cfg;
  cfg.dtau = 0.01;
  cfg.n_steps = 4000;
  cfg.initial_ref = 200;
  cfg.seed = 8;
  QmcEngine engine(l.active, ExcitorSpace(l.reference, l.spec.excitors), cfg);
  const auto r = engine.run();
  const auto est = projected_energy(r.trace, 2001);
  const double fci = l.meta.at("e_fci").get<double>();
  EXPECT_LT(std::abs(est.mean + engine.reference_energy() - fci), 5 * est.error + 1e-6);
  const auto ps = solve_projective(l.active, l.reference, l.spec.excitors, ProjectiveAnsatz::tpUCC);
  EXPECT_NEAR(ps.energy, fci, 1e-10);
}

TEST(Run, ShiftAverageAgreesWithProjectedEnergy) {
  const auto l = load("lih_1.595_fc_eff");
  QmcConfig cfg;
  cfg.dtau = 0.01;
  cfg.n_steps = 6000;
  cfg.initial_ref = 100;
  cfg.target_pop = 300;
  cfg.seed = 12;
  const auto r = QmcEngine(l.active, ExcitorSpace(l.reference, l.spec.excitors), cfg).run();
  const auto ep = projected_energy(r.trace, 3001);
  const auto sh = shift_average(r.trace, 3001);
  EXPECT_NE(r.trace.back().shift, 0.0);
  EXPECT_LT(std::abs(ep.mean - sh.mean), 4 * std::hypot(ep.error, sh.error) + 1e-4);
}

TEST(Estimators, Errors) {
  EXPECT_THROW(projected_energy({}, 1), DomainError);
  EXPECT_THROW(shift_average({}, 1), DomainError);
  std::vector<TraceRow> rows{{1, 0.01, 1, 1, 0, 0.5, 0.0}};
  EXPECT_THROW(projected_energy(rows, 1), DomainError);
}
