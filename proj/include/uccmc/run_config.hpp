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

// Driver configuration: a flat key = value text format, one entry per line,
// '#' starts a comment. Every key can also be given on the command line.

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <functional>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "uccmc/errors.hpp"
#include "uccmc/qmc.hpp"
#include "uccmc/vqe.hpp"

namespace uccmc {

struct RunConfig {
  std::string fcidump;
  int frozen = 0;
  QmcConfig qmc;
  VqeOptions vqe;
  std::vector<double> thresholds{0.1, 0.01, 0.001};
  std::string source = "tpuccmc";  // tpuccmc, mp2, both or none
  std::string amplitudes;          // optional amplitude JSON used instead of a fresh run
  double equilibration = 0.5;      // fraction of the trace discarded by the estimators
  int estimator_blocks = 20;
  std::vector<std::string> geometries;
  int jobs = 1;
  std::string output_dir = "uccmc-out";

  std::vector<std::string> sources() const {
    if (source == "both") return {"tpuccmc", "mp2"};
    if (source == "none") return {};
    return {source};
  }

  /// Sorts thresholds descending and checks ranges. Input paths are checked
  /// where they are opened (require_file).
  void validate() {
    qmc.validate();
    if (frozen < 0) throw DomainError("frozen must be non-negative");
    if (!(vqe.tol > 0.0)) throw DomainError("vqe_tol must be positive");
    if (vqe.max_iterations < 1) throw DomainError("vqe_max_iterations must be at least 1");
    if (source != "tpuccmc" && source != "mp2" && source != "both" && source != "none") {
      throw DomainError("source must be tpuccmc, mp2, both or none");
    }
    for (double t : thresholds)
      if (!(t > 0.0)) throw DomainError("thresholds must be positive");
    std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
    if (!(equilibration >= 0.0 && equilibration < 1.0)) throw DomainError("equilibration must lie in [0, 1)");
    if (estimator_blocks < 1) throw DomainError("estimator_blocks must be at least 1");
    if (jobs < 1) throw DomainError("jobs must be at least 1");
  }
};

/// Thrown for a missing input file; the message is the path.
class MissingFileError : public Error {
 public:
  explicit MissingFileError(const std::string& path) : Error("no such file: " + path), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

inline void require_file(const std::string& path) {
  if (path.empty()) throw DomainError("no FCIDUMP given");
  if (!std::filesystem::is_regular_file(path)) throw MissingFileError(path);
}

namespace config_detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T>
T number(const std::string& key, const std::string& v) {
  T out{};
  const auto* end = v.data() + v.size();
  const auto r = std::from_chars(v.data(), end, out);
  if (r.ec != std::errc() || r.ptr != end) throw DomainError("bad value for " + key + ": '" + v + "'");
  return out;
}

inline bool boolean(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw DomainError("bad value for " + key + ": '" + v + "'");
}

/// Shortest text that reads back to the same double.
inline std::string real(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + real(v[i]);
  return out;
}

inline std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i];
  return out;
}

struct Key {
  const char* name;
  const char* help;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

inline const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      {"fcidump", "integral file", [](RunConfig& c, const std::string& v) { c.fcidump = v; },
       [](const RunConfig& c) { return c.fcidump; }},
      {"frozen", "number of frozen core spatial orbitals",
       [](RunConfig& c, const std::string& v) { c.frozen = number<int>("frozen", v); },
       [](const RunConfig& c) { return std::to_string(c.frozen); }},
      {"mode", "fciqmc, ccmc, puccmc or tpuccmc",
       [](RunConfig& c, const std::string& v) { c.qmc.mode = parse_mode(v); },
       [](const RunConfig& c) { return to_string(c.qmc.mode); }},
      {"dtau", "QMC time step", [](RunConfig& c, const std::string& v) { c.qmc.dtau = number<double>("dtau", v); },
       [](const RunConfig& c) { return real(c.qmc.dtau); }},
      {"target_pop", "population at which the shift starts to vary",
       [](RunConfig& c, const std::string& v) { c.qmc.target_pop = number<double>("target_pop", v); },
       [](const RunConfig& c) { return real(c.qmc.target_pop); }},
      {"zeta", "shift damping", [](RunConfig& c, const std::string& v) { c.qmc.zeta = number<double>("zeta", v); },
       [](const RunConfig& c) { return real(c.qmc.zeta); }},
      {"shift_period", "steps between shift updates",
       [](RunConfig& c, const std::string& v) { c.qmc.shift_period = number<int>("shift_period", v); },
       [](const RunConfig& c) { return std::to_string(c.qmc.shift_period); }},
      {"max_cluster_size", "cluster size truncation for ccmc and puccmc",
       [](RunConfig& c, const std::string& v) { c.qmc.max_cluster_size = number<int>("max_cluster_size", v); },
       [](const RunConfig& c) { return std::to_string(c.qmc.max_cluster_size); }},
      {"seed", "random seed",
       [](RunConfig& c, const std::string& v) { c.qmc.seed = number<std::uint64_t>("seed", v); },
       [](const RunConfig& c) { return std::to_string(c.qmc.seed); }},
      {"ordering", "excitor order: singles-doubles or reversed",
       [](RunConfig& c, const std::string& v) { c.qmc.ordering = v; },
       [](const RunConfig& c) { return c.qmc.ordering; }},
      {"initial_ref", "initial reference population",
       [](RunConfig& c, const std::string& v) { c.qmc.initial_ref = number<double>("initial_ref", v); },
       [](const RunConfig& c) { return real(c.qmc.initial_ref); }},
      {"spawn_cutoff", "stochastic rounding cutoff for real weights",
       [](RunConfig& c, const std::string& v) { c.qmc.spawn_cutoff = number<double>("spawn_cutoff", v); },
       [](const RunConfig& c) { return real(c.qmc.spawn_cutoff); }},
      {"integer_walkers", "round populations to integers",
       [](RunConfig& c, const std::string& v) { c.qmc.integer_walkers = boolean("integer_walkers", v); },
       [](const RunConfig& c) { return std::string(c.qmc.integer_walkers ? "true" : "false"); }},
      {"samples_per_step", "cluster samples per step, 0 for |N_0| + N_ex",
       [](RunConfig& c, const std::string& v) { c.qmc.samples_per_step = number<long>("samples_per_step", v); },
       [](const RunConfig& c) { return std::to_string(c.qmc.samples_per_step); }},
      {"n_steps", "QMC steps", [](RunConfig& c, const std::string& v) { c.qmc.n_steps = number<long>("n_steps", v); },
       [](const RunConfig& c) { return std::to_string(c.qmc.n_steps); }},
      {"snapshot_window", "final steps averaged into the snapshot",
       [](RunConfig& c, const std::string& v) { c.qmc.snapshot_window = number<int>("snapshot_window", v); },
       [](const RunConfig& c) { return std::to_string(c.qmc.snapshot_window); }},
      {"snapshot_blocks", "blocks of the snapshot window for error bars",
       [](RunConfig& c, const std::string& v) { c.qmc.snapshot_blocks = number<int>("snapshot_blocks", v); },
       [](const RunConfig& c) { return std::to_string(c.qmc.snapshot_blocks); }},
      {"equilibration", "fraction of the trace discarded by the estimators",
       [](RunConfig& c, const std::string& v) { c.equilibration = number<double>("equilibration", v); },
       [](const RunConfig& c) { return real(c.equilibration); }},
      {"estimator_blocks", "blocks for the estimator error bars",
       [](RunConfig& c, const std::string& v) { c.estimator_blocks = number<int>("estimator_blocks", v); },
       [](const RunConfig& c) { return std::to_string(c.estimator_blocks); }},
      {"vqe_tol", "gradient infinity-norm tolerance",
       [](RunConfig& c, const std::string& v) { c.vqe.tol = number<double>("vqe_tol", v); },
       [](const RunConfig& c) { return real(c.vqe.tol); }},
      {"vqe_max_iterations", "L-BFGS iteration limit",
       [](RunConfig& c, const std::string& v) { c.vqe.max_iterations = number<int>("vqe_max_iterations", v); },
       [](const RunConfig& c) { return std::to_string(c.vqe.max_iterations); }},
      {"thresholds", "comma-separated screening thresholds",
       [](RunConfig& c, const std::string& v) {
         c.thresholds.clear();
         for (const auto& s : split(v)) c.thresholds.push_back(number<double>("thresholds", s));
       },
       [](const RunConfig& c) { return join(c.thresholds); }},
      {"source", "screening amplitudes: tpuccmc, mp2, both or none",
       [](RunConfig& c, const std::string& v) { c.source = v; }, [](const RunConfig& c) { return c.source; }},
      {"amplitudes", "amplitude JSON to screen instead of a fresh run",
       [](RunConfig& c, const std::string& v) { c.amplitudes = v; },
       [](const RunConfig& c) { return c.amplitudes; }},
      {"geometries", "comma-separated FCIDUMP files for scan",
       [](RunConfig& c, const std::string& v) { c.geometries = split(v); },
       [](const RunConfig& c) { return join(c.geometries); }},
      {"jobs", "scan worker threads", [](RunConfig& c, const std::string& v) { c.jobs = number<int>("jobs", v); },
       [](const RunConfig& c) { return std::to_string(c.jobs); }},
      {"output_dir", "output directory", [](RunConfig& c, const std::string& v) { c.output_dir = v; },
       [](const RunConfig& c) { return c.output_dir; }},
  };
  return table;
}

}  // namespace config_detail

inline std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& k : config_detail::keys()) out.push_back(k.name);
  return out;
}

inline std::string config_help(const std::string& key) {
  for (const auto& k : config_detail::keys())
    if (key == k.name) return k.help;
  throw DomainError("unknown config key '" + key + "'");
}

inline void set_config_value(RunConfig& c, const std::string& key, const std::string& value) {
  for (const auto& k : config_detail::keys()) {
    if (key == k.name) {
      k.set(c, config_detail::trim(value));
      return;
    }
  }
  throw DomainError("unknown config key '" + key + "'");
}

inline std::string get_config_value(const RunConfig& c, const std::string& key) {
  for (const auto& k : config_detail::keys())
    if (key == k.name) return k.get(c);
  throw DomainError("unknown config key '" + key + "'");
}

/// Applies every key = value line of `in` on top of `c`.
inline void parse_config(std::istream& in, RunConfig& c) {
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = config_detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(n, "expected key = value");
    try {
      set_config_value(c, config_detail::trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const DomainError& e) {
      throw ParseError(n, e.what());
    }
  }
}

/// Every key with its value, in the format parse_config reads.
inline std::string format_config(const RunConfig& c) {
  std::string out;
  for (const auto& k : config_detail::keys()) out += std::string(k.name) + " = " + k.get(c) + "  # " + k.help + "\n";
  return out;
}

}  // namespace uccmc
