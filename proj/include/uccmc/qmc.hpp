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

// Walker dynamics for FCIQMC, CCMC, projective UCC (pUCCMC) and trotterized
// projective UCC (tpUCCMC).
//
// Populations live on excitor slots; slot i stands for amplitude
// t_i = N_i / N_0 where N_0 is the reference population. Each step draws
// samples (D, A) whose expectation is the wavefunction coefficient <D|Psi> in
// population units, then every sample
//   - dies on its own slot:   dN = -dtau (H_DD - E_ref - S) A
//   - spawns to one neighbour: dN = -dtau H_jD A / p_gen
//   - feeds the projected-energy numerator (D != D0) or denominator (D == D0).
// Excitor slot i with tau_i|D0> = s_i|D_i> receives s_i times the change in
// the coefficient of |D_i>.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "uccmc/errors.hpp"
#include "uccmc/fock_space.hpp"
#include "uccmc/integrals.hpp"
#include "uccmc/sector.hpp"

namespace uccmc {

enum class QmcMode { FCIQMC, CCMC, pUCCMC, tpUCCMC };

inline std::string to_string(QmcMode m) {
  switch (m) {
    case QmcMode::FCIQMC: return "fciqmc";
    case QmcMode::CCMC: return "ccmc";
    case QmcMode::pUCCMC: return "puccmc";
    default: return "tpuccmc";
  }
}

inline QmcMode parse_mode(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "fciqmc") return QmcMode::FCIQMC;
  if (s == "ccmc") return QmcMode::CCMC;
  if (s == "puccmc") return QmcMode::pUCCMC;
  if (s == "tpuccmc") return QmcMode::tpUCCMC;
  throw DomainError("unknown QMC mode '" + s + "'");
}

struct QmcConfig {
  QmcMode mode = QmcMode::tpUCCMC;
  double dtau = 1e-3;
  double target_pop = 5e3;
  double zeta = 0.05;
  int shift_period = 10;
  int max_cluster_size = 4;
  std::uint64_t seed = 20200101;
  std::string ordering = "singles-doubles";  // or "reversed"
  double initial_ref = 100.0;
  double spawn_cutoff = 1e-2;
  bool integer_walkers = false;
  long samples_per_step = 0;  // 0: ceil(|N_0| + N_ex)
  long n_steps = 50000;
  int snapshot_window = 1;  // steps averaged into the amplitude snapshot
  int snapshot_blocks = 1;  // equal blocks of the window kept as separate snapshots

  void validate() const {
    if (!(dtau > 0.0)) throw DomainError("dtau must be positive");
    if (!(zeta > 0.0 && zeta <= 1.0)) throw DomainError("zeta must lie in (0, 1]");
    if (shift_period < 1) throw DomainError("shift_period must be at least 1");
    if (max_cluster_size < 2) throw DomainError("max_cluster_size must be at least the truncation level 2");
    if (!(target_pop > 0.0)) throw DomainError("target_pop must be positive");
    if (!(initial_ref > 0.0)) throw DomainError("initial_ref must be positive");
    if (!(spawn_cutoff > 0.0)) throw DomainError("spawn_cutoff must be positive");
    if (samples_per_step < 0) throw DomainError("samples_per_step must be non-negative");
    if (n_steps < 0) throw DomainError("n_steps must be non-negative");
    if (snapshot_window < 1) throw DomainError("snapshot_window must be at least 1");
    if (snapshot_blocks < 1 || snapshot_blocks > snapshot_window) {
      throw DomainError("snapshot_blocks must lie in [1, snapshot_window]");
    }
    if (ordering != "singles-doubles" && ordering != "reversed") {
      throw DomainError("ordering must be 'singles-doubles' or 'reversed'");
    }
  }
};

/// Reference plus ordered excitors, with the determinant each one reaches.
class ExcitorSpace {
 public:
  static constexpr int kRef = -1;

  ExcitorSpace(const Determinant& reference, std::vector<Excitor> excitors)
      : reference_(reference), excitors_(std::move(excitors)) {
    index_.emplace(reference.occ, kRef);
    for (std::size_t i = 0; i < excitors_.size(); ++i) {
      const auto r = apply_excitor(reference_, excitors_[i]);
      if (!r) throw DomainError("excitor " + excitors_[i].key() + " does not act on the reference");
      if (!index_.emplace(r->det.occ, static_cast<int>(i)).second) {
        throw DomainError("duplicate excitor " + excitors_[i].key());
      }
      dets_.push_back(r->det);
      signs_.push_back(r->sign);
    }
  }

  /// Every determinant of the reference's particle-number, M_s and irrep
  /// sector, each written as an excitor from the reference.
  static ExcitorSpace full_sector(const IntegralTable& t, const Determinant& reference) {
    const int na = reference.count_spin(0), nb = reference.count_spin(1);
    const int irrep = determinant_irrep(reference, t.orb_sym());
    std::vector<Excitor> ex;
    for (const auto& d : sector_determinants(t.n_orb(), na, nb, irrep, t.orb_sym())) {
      if (d == reference) continue;
      std::vector<int> from, to;
      for (Bits b = reference.occ & ~d.occ; b; b &= b - 1) from.push_back(std::countr_zero(b));
      for (Bits b = d.occ & ~reference.occ; b; b &= b - 1) to.push_back(std::countr_zero(b));
      ex.emplace_back(from, to);
    }
    std::stable_sort(ex.begin(), ex.end());
    return ExcitorSpace(reference, std::move(ex));
  }

  std::size_t size() const noexcept { return excitors_.size(); }
  const Determinant& reference() const noexcept { return reference_; }
  const std::vector<Excitor>& excitors() const noexcept { return excitors_; }
  const Excitor& excitor(int slot) const { return excitors_.at(slot); }
  const Determinant& det(int slot) const { return slot == kRef ? reference_ : dets_.at(slot); }
  /// s_i in tau_i|D0> = s_i|D_i>; +1 for the reference.
  int sign(int slot) const { return slot == kRef ? 1 : signs_.at(slot); }
  /// Slot of a determinant: kRef, an excitor index, or nullopt.
  std::optional<int> slot_of(const Determinant& d) const {
    auto it = index_.find(d.occ);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

 private:
  Determinant reference_;
  std::vector<Excitor> excitors_;
  std::vector<Determinant> dets_;
  std::vector<int> signs_;
  std::unordered_map<Bits, int> index_;
};

struct WalkerEnsemble {
  std::map<int, double> pops;  // slot -> N_i, no zero entries
  double n_ref = 0.0;
  double shift = 0.0;  // relative to the reference energy
  double tau = 0.0;
  double ref_projection = 0.0;

  double n_ex() const {
    double s = 0.0;
    for (const auto& [k, v] : pops) s += std::abs(v);
    return s;
  }
  double total() const { return n_ex() + std::abs(n_ref); }
  double amplitude(int slot) const {
    auto it = pops.find(slot);
    return it == pops.end() || n_ref == 0.0 ? 0.0 : it->second / n_ref;
  }
};

/// One ordered cluster of excitor slots; dagger[k] marks a de-excitation.
struct Cluster {
  std::vector<int> slots;
  std::vector<char> dagger;
  double p_sel = 1.0;
  /// Population-unit amplitude divided by p_sel, before fermionic signs.
  double weight = 0.0;
};

struct Sample {
  Determinant det;
  double amp = 0.0;  // population units, already divided by the selection probability
};

struct Spawn {
  Determinant det;
  double amount = 0.0;
};

/// Uniform double in [0, 1) from the top 53 bits, identical on every platform.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// p(s): 1/2^(s+1) below the truncation, the remaining tail at s = s_max.
inline double cluster_size_probability(int s, int s_max) {
  if (s < 0 || s > s_max) return 0.0;
  return s < s_max ? std::ldexp(1.0, -(s + 1)) : std::ldexp(1.0, -s_max);
}

/// Exact wavefunction coefficient of the ordered cluster: product of signed
/// amplitudes over s!, times N_0. De-excitors contribute -t.
inline double cluster_amplitude(const WalkerEnsemble& w, const Cluster& c) {
  double a = w.n_ref;
  for (std::size_t k = 0; k < c.slots.size(); ++k) {
    a *= w.amplitude(c.slots[k]) * (c.dagger[k] ? -1.0 : 1.0) / static_cast<double>(k + 1);
  }
  return a;
}

/// Ordered selection with replacement: size s ~ p(s), then each position
/// proportional to |N_i|, and in pUCCMC every position after the first is a
/// de-excitation with probability 1/2. CCMC and pUCCMC only.
inline Cluster select_cluster(const WalkerEnsemble& w, const QmcConfig& cfg, std::mt19937_64& rng) {
  Cluster c;
  const double n_ex = w.n_ex();
  if (n_ex == 0.0) {
    c.p_sel = 1.0;
    c.weight = w.n_ref;
    return c;
  }
  const int s_max = cfg.max_cluster_size;
  double u = uniform01(rng);
  int s = 0;
  while (s < s_max && u >= cluster_size_probability(s, s_max)) {
    u -= cluster_size_probability(s, s_max);
    ++s;
  }
  c.p_sel = cluster_size_probability(s, s_max);
  for (int k = 0; k < s; ++k) {
    double target = uniform01(rng) * n_ex;
    int chosen = w.pops.rbegin()->first;
    for (const auto& [slot, n] : w.pops) {
      target -= std::abs(n);
      if (target < 0.0) {
        chosen = slot;
        break;
      }
    }
    c.slots.push_back(chosen);
    c.p_sel *= std::abs(w.pops.at(chosen)) / n_ex;
    bool dag = false;
    if (cfg.mode == QmcMode::pUCCMC && k > 0) {
      dag = uniform01(rng) < 0.5;
      c.p_sel *= 0.5;
    }
    c.dagger.push_back(dag ? 1 : 0);
  }
  c.weight = cluster_amplitude(w, c) / c.p_sel;
  return c;
}

/// Applies the cluster to the reference, first slot first. Returns the
/// determinant and the fermionic sign, or nullopt if the product vanishes.
inline std::optional<Applied> collapse_cluster(const ExcitorSpace& space, const Cluster& c) {
  Applied cur{space.reference(), 1};
  for (std::size_t k = 0; k < c.slots.size(); ++k) {
    const auto r = apply_excitor(cur.det, space.excitor(c.slots[k]), c.dagger[k] != 0);
    if (!r) return std::nullopt;
    cur.det = r->det;
    cur.sign *= r->sign;
  }
  return cur;
}

/// Every ordered cluster the selector can return, with its probability.
inline std::vector<Cluster> enumerate_clusters(const WalkerEnsemble& w, const QmcConfig& cfg) {
  std::vector<Cluster> out;
  const double n_ex = w.n_ex();
  if (n_ex == 0.0) {
    Cluster c;
    c.weight = w.n_ref;
    out.push_back(c);
    return out;
  }
  const int s_max = cfg.max_cluster_size;
  std::vector<int> slots;
  for (const auto& [k, v] : w.pops) slots.push_back(k);
  // Frontier entries carry the product of per-position probabilities.
  std::vector<Cluster> frontier{Cluster{}};
  for (int s = 0; s <= s_max; ++s) {
    std::vector<Cluster> next;
    for (auto& c : frontier) {
      Cluster done = c;
      done.p_sel = cluster_size_probability(s, s_max) * c.p_sel;
      done.weight = cluster_amplitude(w, done) / done.p_sel;
      out.push_back(done);
      if (s == s_max) continue;
      for (int slot : slots) {
        const double p = std::abs(w.pops.at(slot)) / n_ex;
        const bool two = cfg.mode == QmcMode::pUCCMC && s > 0;
        for (int dag = 0; dag <= (two ? 1 : 0); ++dag) {
          Cluster n = c;
          n.slots.push_back(slot);
          n.dagger.push_back(static_cast<char>(dag));
          n.p_sel = c.p_sel * p * (two ? 0.5 : 1.0);
          next.push_back(std::move(n));
        }
      }
    }
    frontier = std::move(next);
  }
  return out;
}

/// Per-excitor factors for one tpUCCMC walk: sin t, cos t and p_excit.
struct TrotterFactor {
  int slot;
  double sin_t;
  double cos_t;
  double p_excit;
};

inline std::vector<TrotterFactor> trotter_factors(const WalkerEnsemble& w) {
  std::vector<TrotterFactor> out;
  for (const auto& [slot, n] : w.pops) {
    const double t = n / w.n_ref;
    const double s = std::sin(t), c = std::cos(t);
    out.push_back({slot, s, c, std::abs(s) / (std::abs(s) + std::abs(c))});
  }
  return out;
}

/// Walks the full ordered product once, starting from the reference with
/// amplitude N_0. Applicable factors are applied with probability p_excit
/// (amplitude times +-sin t / p_excit) or skipped (cos t / (1 - p_excit)).
inline Sample sample_tpucc(const ExcitorSpace& space, const std::vector<TrotterFactor>& factors, double n_ref,
                           std::mt19937_64& rng) {
  Sample s{space.reference(), n_ref};
  for (const auto& f : factors) {
    const Excitor& e = space.excitor(f.slot);
    bool dagger;
    const Bits occ = s.det.occ;
    if ((occ & e.from_mask()) == e.from_mask() && (occ & e.to_mask()) == 0) {
      dagger = false;
    } else if ((occ & e.to_mask()) == e.to_mask() && (occ & e.from_mask()) == 0) {
      dagger = true;
    } else {
      continue;
    }
    if (f.p_excit > 0.0 && uniform01(rng) < f.p_excit) {
      const auto r = apply_excitor(s.det, e, dagger);
      s.det = r->det;
      s.amp *= r->sign * (dagger ? -f.sin_t : f.sin_t) / f.p_excit;
    } else {
      s.amp *= f.cos_t / (1.0 - f.p_excit);
    }
  }
  return s;
}

/// All tpUCCMC walks with their probabilities; amp is the sampled value, so
/// sum over paths of probability * amp reproduces <D|Psi>.
struct PathTerm {
  Determinant det;
  double amp;
  double probability;
};

inline std::vector<PathTerm> enumerate_tpucc_paths(const ExcitorSpace& space, const WalkerEnsemble& w) {
  std::vector<PathTerm> paths{{space.reference(), w.n_ref, 1.0}};
  for (const auto& f : trotter_factors(w)) {
    const Excitor& e = space.excitor(f.slot);
    std::vector<PathTerm> next;
    for (const auto& p : paths) {
      std::optional<Applied> r = apply_excitor(p.det, e, false);
      bool dagger = false;
      if (!r) {
        r = apply_excitor(p.det, e, true);
        dagger = true;
      }
      if (!r) {
        next.push_back(p);
        continue;
      }
      if (f.p_excit > 0.0) {
        next.push_back({r->det, p.amp * r->sign * (dagger ? -f.sin_t : f.sin_t) / f.p_excit,
                        p.probability * f.p_excit});
      }
      if (f.p_excit < 1.0) {
        next.push_back({p.det, p.amp * f.cos_t / (1.0 - f.p_excit), p.probability * (1.0 - f.p_excit)});
      }
    }
    paths = std::move(next);
  }
  return paths;
}

/// Row of the per-step trace.
struct TraceRow {
  long step;
  double tau;
  double n_w;
  double n_0;
  double shift;
  double num;  // sum of H_0D A over samples with D != D0
  double den;  // sum of A over samples with D == D0
};

struct AmplitudeSnapshot {
  std::map<Excitor, double> t;
  double at_tau = 0.0;
  double n_ref_proj = 0.0;  // normaliser used
};

struct QmcRun {
  std::vector<TraceRow> trace;
  AmplitudeSnapshot snapshot;
  std::vector<AmplitudeSnapshot> block_snapshots;  // one per block of the window
  WalkerEnsemble final_state;
  double e_ref = 0.0;
};

class QmcEngine {
 public:
  QmcEngine(const IntegralTable& t, ExcitorSpace space, QmcConfig cfg)
      : table_(t), space_(std::move(space)), cfg_(std::move(cfg)), rng_(cfg_.seed) {
    cfg_.validate();
    e_ref_ = diagonal_energy(table_, space_.reference());
  }

  const ExcitorSpace& space() const noexcept { return space_; }
  const QmcConfig& config() const noexcept { return cfg_; }
  double reference_energy() const noexcept { return e_ref_; }
  std::mt19937_64& rng() noexcept { return rng_; }

  WalkerEnsemble initial_state() const {
    WalkerEnsemble w;
    w.n_ref = cfg_.initial_ref;
    return w;
  }

  /// Samples of the current wavefunction for one step. FCIQMC visits every
  /// occupied slot once; the coupled-cluster modes draw clusters.
  std::vector<Sample> draw_samples(const WalkerEnsemble& w) {
    std::vector<Sample> out;
    if (cfg_.mode == QmcMode::FCIQMC) {
      out.push_back({space_.reference(), w.n_ref});
      for (const auto& [slot, n] : w.pops) out.push_back({space_.det(slot), space_.sign(slot) * n});
      return out;
    }
    if (w.n_ref == 0.0) throw PopulationCollapseError("reference population is zero");
    const long n_s = cfg_.samples_per_step > 0
                         ? cfg_.samples_per_step
                         : std::max<long>(1, static_cast<long>(std::ceil(std::abs(w.n_ref) + w.n_ex())));
    const double inv = 1.0 / static_cast<double>(n_s);
    out.reserve(n_s);
    if (cfg_.mode == QmcMode::tpUCCMC) {
      const auto factors = trotter_factors(w);
      for (long k = 0; k < n_s; ++k) {
        Sample s = sample_tpucc(space_, factors, w.n_ref, rng_);
        s.amp *= inv;
        out.push_back(s);
      }
      return out;
    }
    for (long k = 0; k < n_s; ++k) {
      const Cluster c = select_cluster(w, cfg_, rng_);
      if (const auto r = collapse_cluster(space_, c)) out.push_back({r->det, r->sign * c.weight * inv});
    }
    return out;
  }

  /// One spawning attempt from (d, amp) onto a uniformly chosen connected
  /// determinant of the space.
  std::vector<Spawn> spawn_step(const Determinant& d, double amp) {
    const auto& conn = connections(d);
    if (conn.empty() || amp == 0.0) return {};
    const std::size_t k = std::min(conn.size() - 1, static_cast<std::size_t>(uniform01(rng_) * conn.size()));
    const double p_gen = 1.0 / static_cast<double>(conn.size());
    const double v = round_spawn(-cfg_.dtau * conn[k].second * amp / p_gen);
    if (v == 0.0) return {};
    return {Spawn{conn[k].first, v}};
  }

  /// Change of the coefficient of d from death: -dtau (H_dd - E_ref - S) amp.
  double death_step(const Determinant& d, double amp, double shift) {
    const double v = -cfg_.dtau * (diagonal(d) - e_ref_ - shift) * amp;
    return cfg_.integer_walkers ? round_integer(v) : v;
  }

  /// Merges spawned and dying contributions per slot, drops zeros and
  /// stochastically rounds entries below the cutoff.
  void annihilate(WalkerEnsemble& w) {
    for (auto it = w.pops.begin(); it != w.pops.end();) {
      it->second = round_population(it->second);
      it = it->second == 0.0 ? w.pops.erase(it) : std::next(it);
    }
  }

  /// One step without shift control or trace bookkeeping; returns (num, den).
  std::pair<double, double> propagate(WalkerEnsemble& w) {
    const auto samples = draw_samples(w);
    std::map<int, double> delta;
    double num = 0.0, den = 0.0;
    for (const auto& s : samples) {
      if (s.amp == 0.0) continue;
      const auto slot = space_.slot_of(s.det);
      if (slot) {
        delta[*slot] += space_.sign(*slot) * death_step(s.det, s.amp, w.shift);
        if (*slot == ExcitorSpace::kRef) den += s.amp;
      }
      if (!slot || *slot != ExcitorSpace::kRef) num += h0(s.det) * s.amp;
      for (const auto& sp : spawn_step(s.det, s.amp)) {
        const int target = *space_.slot_of(sp.det);
        delta[target] += space_.sign(target) * sp.amount;
      }
    }
    for (const auto& [slot, dn] : delta) {
      if (slot == ExcitorSpace::kRef) {
        w.n_ref += dn;
      } else {
        w.pops[slot] += dn;
      }
    }
    annihilate(w);
    if (cfg_.integer_walkers) w.n_ref = std::round(w.n_ref);
    w.tau += cfg_.dtau;
    w.ref_projection = den;
    return {num, den};
  }

  /// Runs n_steps (cfg.n_steps when negative) from the initial state.
  QmcRun run(long n_steps = -1) {
    if (n_steps < 0) n_steps = cfg_.n_steps;
    QmcRun out;
    out.e_ref = e_ref_;
    WalkerEnsemble w = initial_state();
    bool variable = false;
    double n_w_prev = w.total();
    const long window = std::min<long>(cfg_.snapshot_window, n_steps);
    const long window_start = n_steps - window;
    const long blocks = std::min<long>(cfg_.snapshot_blocks, std::max<long>(window, 1));
    std::vector<std::map<int, double>> block_sum(blocks);
    std::vector<long> block_count(blocks, 0);
    for (long step = 1; step <= n_steps; ++step) {
      const auto [num, den] = propagate(w);
      const double n_w = w.total();
      if (n_w == 0.0) throw PopulationCollapseError("walker population died out at step " + std::to_string(step));
      if (w.n_ref == 0.0) throw PopulationCollapseError("reference population died out at step " + std::to_string(step));
      if (!variable && n_w > cfg_.target_pop) {
        variable = true;
        n_w_prev = n_w;
      } else if (variable && step % cfg_.shift_period == 0) {
        w.shift = update_shift(w.shift, n_w, n_w_prev, cfg_);
        n_w_prev = n_w;
      }
      out.trace.push_back({step, w.tau, n_w, w.n_ref, w.shift, num, den});
      if (step > window_start) {
        const long b = (step - window_start - 1) * blocks / window;
        for (const auto& [slot, n] : w.pops) block_sum[b][slot] += n / w.n_ref;
        ++block_count[b];
      }
    }
    out.final_state = w;
    auto make = [&](const std::map<int, double>& sum, long count) {
      AmplitudeSnapshot s;
      s.at_tau = w.tau;
      s.n_ref_proj = w.n_ref;
      for (const auto& [slot, v] : sum) {
        const double t = v / static_cast<double>(count);
        if (t != 0.0) s.t.emplace(space_.excitor(slot), t);
      }
      return s;
    };
    if (n_steps == 0) {
      out.snapshot = make({}, 1);
      return out;
    }
    std::map<int, double> total;
    long total_count = 0;
    for (long b = 0; b < blocks; ++b) {
      out.block_snapshots.push_back(make(block_sum[b], block_count[b]));
      for (const auto& [slot, v] : block_sum[b]) total[slot] += v;
      total_count += block_count[b];
    }
    out.snapshot = make(total, total_count);
    return out;
  }

  /// S <- S - zeta/(A dtau) ln(N_w / N_w_prev).
  static double update_shift(double shift, double n_w, double n_w_prev, const QmcConfig& cfg) {
    if (n_w <= 0.0 || n_w_prev <= 0.0) throw PopulationCollapseError("zero walker population in shift update");
    return shift - cfg.zeta / (cfg.shift_period * cfg.dtau) * std::log(n_w / n_w_prev);
  }

  double diagonal(const Determinant& d) {
    auto it = diag_.find(d.occ);
    if (it != diag_.end()) return it->second;
    const double v = diagonal_energy(table_, d);
    diag_.emplace(d.occ, v);
    return v;
  }

  /// <D0|H|d>.
  double h0(const Determinant& d) {
    if (std::popcount(d.occ ^ space_.reference().occ) > 4) return 0.0;
    auto it = h0_.find(d.occ);
    if (it != h0_.end()) return it->second;
    const double v = slater_condon(table_, space_.reference(), d);
    h0_.emplace(d.occ, v);
    return v;
  }

  /// Determinants of the space (reference included) with a nonzero
  /// Hamiltonian element to d, with the element.
  const std::vector<std::pair<Determinant, double>>& connections(const Determinant& d) {
    auto it = conn_.find(d.occ);
    if (it != conn_.end()) return it->second;
    std::vector<std::pair<Determinant, double>> list;
    auto consider = [&](const Determinant& target) {
      const int diff = std::popcount(target.occ ^ d.occ);
      if (diff == 0 || diff > 4) return;
      const double v = slater_condon(table_, target, d);
      if (std::abs(v) > 1e-14) list.emplace_back(target, v);
    };
    consider(space_.reference());
    for (std::size_t k = 0; k < space_.size(); ++k) consider(space_.det(static_cast<int>(k)));
    return conn_.emplace(d.occ, std::move(list)).first->second;
  }

 private:
  double round_integer(double v) {
    const double a = std::abs(v), f = std::floor(a);
    const double r = f + (uniform01(rng_) < a - f ? 1.0 : 0.0);
    return std::copysign(r, v);
  }
  double round_to_cutoff(double v) {
    const double a = std::abs(v);
    if (a >= cfg_.spawn_cutoff || a == 0.0) return v;
    return uniform01(rng_) < a / cfg_.spawn_cutoff ? std::copysign(cfg_.spawn_cutoff, v) : 0.0;
  }
  double round_spawn(double v) { return cfg_.integer_walkers ? round_integer(v) : round_to_cutoff(v); }
  double round_population(double v) {
    if (cfg_.integer_walkers) return std::round(v);
    return round_to_cutoff(v);
  }

  const IntegralTable& table_;
  ExcitorSpace space_;
  QmcConfig cfg_;
  std::mt19937_64 rng_;
  double e_ref_ = 0.0;
  std::unordered_map<Bits, double> diag_;
  std::unordered_map<Bits, double> h0_;
  std::unordered_map<Bits, std::vector<std::pair<Determinant, double>>> conn_;
};

/// Windowed projected-energy estimate: ratio of summed numerator and
/// denominator, error from the spread of per-block ratios.
struct WindowEstimate {
  double mean = 0.0;
  double error = 0.0;
  int blocks = 0;
};

inline WindowEstimate projected_energy(const std::vector<TraceRow>& trace, long first_step, int n_blocks = 20) {
  std::vector<const TraceRow*> rows;
  for (const auto& r : trace)
    if (r.step >= first_step) rows.push_back(&r);
  if (rows.empty()) throw DomainError("empty estimator window");
  double num = 0.0, den = 0.0;
  for (const auto* r : rows) {
    num += r->num;
    den += r->den;
  }
  WindowEstimate est;
  if (den == 0.0) throw DomainError("projected energy undefined: zero reference projection");
  est.mean = num / den;
  n_blocks = std::max(2, std::min<int>(n_blocks, static_cast<int>(rows.size())));
  const std::size_t per = rows.size() / n_blocks;
  std::vector<double> ratios;
  for (int b = 0; b < n_blocks; ++b) {
    double bn = 0.0, bd = 0.0;
    for (std::size_t k = b * per; k < (b + 1) * per; ++k) {
      bn += rows[k]->num;
      bd += rows[k]->den;
    }
    if (bd != 0.0) ratios.push_back(bn / bd);
  }
  est.blocks = static_cast<int>(ratios.size());
  if (ratios.size() >= 2) {
    double m = 0.0;
    for (double r : ratios) m += r;
    m /= ratios.size();
    double v = 0.0;
    for (double r : ratios) v += (r - m) * (r - m);
    est.error = std::sqrt(v / (ratios.size() - 1) / ratios.size());
  }
  return est;
}

/// Mean shift over the window with the same blocking error.
inline WindowEstimate shift_average(const std::vector<TraceRow>& trace, long first_step, int n_blocks = 20) {
  std::vector<double> v;
  for (const auto& r : trace)
    if (r.step >= first_step) v.push_back(r.shift);
  if (v.empty()) throw DomainError("empty estimator window");
  WindowEstimate est;
  for (double x : v) est.mean += x;
  est.mean /= v.size();
  n_blocks = std::max(2, std::min<int>(n_blocks, static_cast<int>(v.size())));
  const std::size_t per = v.size() / n_blocks;
  std::vector<double> means;
  for (int b = 0; b < n_blocks; ++b) {
    double s = 0.0;
    for (std::size_t k = b * per; k < (b + 1) * per; ++k) s += v[k];
    means.push_back(s / per);
  }
  double m = 0.0;
  for (double x : means) m += x;
  m /= means.size();
  double var = 0.0;
  for (double x : means) var += (x - m) * (x - m);
  est.error = std::sqrt(var / (means.size() - 1) / means.size());
  est.blocks = static_cast<int>(means.size());
  return est;
}

/// Deterministic projective solution: t_i <- t_i - step * s_i <D_i|H - E|Psi>/<D0|Psi>
/// until the residual falls below tol. `wavefunction` maps amplitudes (in
/// space order) to the coefficients over `sector`.
struct ProjectiveSolution {
  std::vector<double> t;
  double energy = 0.0;  // E_proj, absolute
  double residual = 0.0;
  int iterations = 0;
};

/// Trotterized (tpUCC) state via plane rotations in space order.
inline Eigen::VectorXd tpucc_state(const SectorSpace& sector, const std::vector<double>& t) {
  return sector.state(t);
}

/// Exponential exp(T - T+)|D0> truncated at order s_max (s_max < 0: converged series).
inline Eigen::VectorXd pucc_state(const SectorSpace& sector, const std::vector<double>& t, int s_max = -1) {
  auto apply_gen = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(v.size());
    for (std::size_t k = 0; k < t.size(); ++k)
      for (const auto& p : sector.pairs(k)) {
        out(p.b) += t[k] * p.sign * v(p.a);
        out(p.a) -= t[k] * p.sign * v(p.b);
      }
    return out;
  };
  Eigen::VectorXd term = sector.reference_vector();
  Eigen::VectorXd sum = term;
  const int limit = s_max < 0 ? 200 : s_max;
  for (int s = 1; s <= limit; ++s) {
    term = apply_gen(term) / static_cast<double>(s);
    sum += term;
    if (s_max < 0 && term.norm() < 1e-17 * sum.norm()) break;
  }
  return sum;
}

enum class ProjectiveAnsatz { tpUCC, pUCC };

inline ProjectiveSolution solve_projective(const IntegralTable& t, const Determinant& reference,
                                           const std::vector<Excitor>& excitors, ProjectiveAnsatz ansatz,
                                           int s_max = -1, double step = 0.05, double tol = 1e-12,
                                           int max_iter = 200000) {
  const SectorSpace sector(reference, excitors);
  const auto h = sector.hamiltonian(t);
  std::vector<int> rows, signs;
  for (const auto& e : excitors) {
    const auto r = apply_excitor(reference, e);
    rows.push_back(sector.find(r->det));
    signs.push_back(r->sign);
  }
  ProjectiveSolution sol;
  sol.t.assign(excitors.size(), 0.0);
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd psi =
        ansatz == ProjectiveAnsatz::tpUCC ? tpucc_state(sector, sol.t) : pucc_state(sector, sol.t, s_max);
    const Eigen::VectorXd hpsi = h * psi;
    const double c0 = psi(0);
    sol.energy = hpsi(0) / c0;
    double res = 0.0;
    std::vector<double> r(excitors.size());
    for (std::size_t k = 0; k < excitors.size(); ++k) {
      r[k] = signs[k] * (hpsi(rows[k]) - sol.energy * psi(rows[k])) / c0;
      res = std::max(res, std::abs(r[k]));
    }
    sol.residual = res;
    sol.iterations = it;
    if (res < tol) return sol;
    for (std::size_t k = 0; k < excitors.size(); ++k) sol.t[k] -= step * r[k];
  }
  throw DomainError("projective equations did not converge");
}

}  // namespace uccmc
