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

// JSON and CSV readers/writers for snapshots, traces and reports.

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "uccmc/errors.hpp"
#include "uccmc/fock_space.hpp"
#include "uccmc/qmc.hpp"
#include "uccmc/run_config.hpp"
#include "uccmc/screen.hpp"
#include "uccmc/vqe.hpp"

namespace uccmc::io {

using nlohmann::json;

inline json amplitudes_to_json(const std::map<Excitor, double>& amps) {
  json j = json::object();
  for (const auto& [e, t] : amps) j[e.key()] = t;
  return j;
}

inline std::map<Excitor, double> amplitudes_from_json(const json& j) {
  std::map<Excitor, double> out;
  for (const auto& [k, v] : j.items()) out.emplace(excitor_from_key(k), v.get<double>());
  return out;
}

inline json to_json(const AmplitudeSnapshot& s) {
  return {{"at_tau", s.at_tau}, {"n_ref_proj", s.n_ref_proj}, {"amplitudes", amplitudes_to_json(s.t)}};
}

inline AmplitudeSnapshot snapshot_from_json(const json& j) {
  AmplitudeSnapshot s;
  s.at_tau = j.at("at_tau").get<double>();
  s.n_ref_proj = j.at("n_ref_proj").get<double>();
  s.t = amplitudes_from_json(j.at("amplitudes"));
  return s;
}

inline std::string format_double(double v) { return config_detail::real(v); }

inline void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace) {
  out << "step,tau,n_w,n_0,shift,proj_num,proj_den\n";
  for (const auto& r : trace) {
    out << r.step << ',' << format_double(r.tau) << ',' << format_double(r.n_w) << ',' << format_double(r.n_0) << ','
        << format_double(r.shift) << ',' << format_double(r.num) << ',' << format_double(r.den) << '\n';
  }
}

inline std::vector<TraceRow> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("step,", 0) != 0) throw ParseError(1, "missing trace header");
  std::vector<TraceRow> out;
  std::size_t n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    std::istringstream s(line);
    TraceRow r{};
    char c1, c2, c3, c4, c5, c6;
    if (!(s >> r.step >> c1 >> r.tau >> c2 >> r.n_w >> c3 >> r.n_0 >> c4 >> r.shift >> c5 >> r.num >> c6 >> r.den)) {
      throw ParseError(n, "malformed trace row");
    }
    out.push_back(r);
  }
  return out;
}

inline json to_json(const DepthRecord& d) {
  return {{"cnots", d.cnots}, {"gadgets", d.gadgets}, {"parameters", d.parameters}};
}

inline DepthRecord depth_from_json(const json& j) {
  return {j.at("cnots").get<long>(), j.at("gadgets").get<long>(), j.at("parameters").get<long>()};
}

inline json to_json(const ScreenReport& r) {
  json kept = json::array();
  for (std::size_t k = 0; k < r.kept.size(); ++k) {
    json e = {{"excitor", r.kept[k].first.key()}, {"initial", r.kept[k].second}};
    if (k < r.optimized.size()) e["optimized"] = r.optimized[k];
    kept.push_back(e);
  }
  json j = {{"source", r.source},
            {"threshold", r.threshold},
            {"hilbert_size", r.hilbert_size},
            {"n_kept", r.kept.size()},
            {"depth", to_json(r.depth)},
            {"full_depth", to_json(r.full_depth)},
            {"kept", kept}};
  if (r.evaluated) {
    j["energy"] = r.energy;
    j["full_energy"] = r.full_energy;
    j["hf_energy"] = r.hf_energy;
    j["pct_ecorr"] = r.pct_ecorr;
    j["vqe_iterations"] = r.vqe_iterations;
  }
  return j;
}

inline ScreenReport screen_report_from_json(const json& j) {
  ScreenReport r;
  r.source = j.at("source").get<std::string>();
  r.threshold = j.at("threshold").get<double>();
  r.hilbert_size = j.at("hilbert_size").get<int>();
  r.depth = depth_from_json(j.at("depth"));
  r.full_depth = depth_from_json(j.at("full_depth"));
  r.evaluated = j.contains("energy");
  if (r.evaluated) {
    r.energy = j.at("energy").get<double>();
    r.full_energy = j.at("full_energy").get<double>();
    r.hf_energy = j.at("hf_energy").get<double>();
    r.pct_ecorr = j.at("pct_ecorr").get<double>();
    r.vqe_iterations = j.at("vqe_iterations").get<int>();
  }
  for (const auto& e : j.at("kept")) {
    r.kept.emplace_back(excitor_from_key(e.at("excitor").get<std::string>()), e.at("initial").get<double>());
    if (e.contains("optimized")) r.optimized.push_back(e.at("optimized").get<double>());
  }
  if (j.at("n_kept").get<std::size_t>() != r.kept.size()) throw ConsistencyError("n_kept does not match kept list");
  return r;
}

inline json to_json(const VqeResult& r, const AnsatzSpec& spec) {
  json params = json::object();
  for (std::size_t k = 0; k < spec.excitors.size() && k < r.params.size(); ++k) params[spec.excitors[k].key()] = r.params[k];
  json order = json::array();
  for (const auto& e : spec.excitors) order.push_back(e.key());
  return {{"energy", r.energy},         {"iterations", r.iterations}, {"grad_norm", r.grad_norm},
          {"evaluations", r.evaluations}, {"converged", r.converged},   {"ordering", spec.ordering_tag},
          {"order", order},               {"params", params}};
}

inline VqeResult vqe_result_from_json(const json& j) {
  VqeResult r;
  r.energy = j.at("energy").get<double>();
  r.iterations = j.at("iterations").get<int>();
  r.grad_norm = j.at("grad_norm").get<double>();
  r.evaluations = j.at("evaluations").get<int>();
  r.converged = j.at("converged").get<bool>();
  const auto& params = j.at("params");
  for (const auto& key : j.at("order")) r.params.push_back(params.at(key.get<std::string>()).get<double>());
  return r;
}

inline void write_energy_trace_csv(std::ostream& out, const std::vector<double>& trace) {
  out << "evaluation,energy\n";
  for (std::size_t k = 0; k < trace.size(); ++k) out << k + 1 << ',' << format_double(trace[k]) << '\n';
}

inline std::vector<double> read_energy_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "evaluation,energy") throw ParseError(1, "missing energy trace header");
  std::vector<double> out;
  std::size_t n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ParseError(n, "malformed energy trace row");
    out.push_back(std::stod(line.substr(comma + 1)));
  }
  return out;
}

/// One row per (source, threshold): the columns of the screening tables.
inline void write_screen_csv(std::ostream& out, const std::vector<ScreenReport>& reports, const std::string& label = "") {
  out << "label,source,threshold,hilbert_size,n_kept,energy,full_energy,hf_energy,pct_ecorr,cnots,full_cnots\n";
  for (const auto& r : reports) {
    out << label << ',' << r.source << ',' << format_double(r.threshold) << ',' << r.hilbert_size << ','
        << r.kept.size() << ',';
    if (r.evaluated) {
      out << format_double(r.energy) << ',' << format_double(r.full_energy) << ',' << format_double(r.hf_energy) << ','
          << format_double(r.pct_ecorr);
    } else {
      out << ",,,";
    }
    out << ',' << r.depth.cnots << ',' << r.full_depth.cnots << '\n';
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(0, path + ": " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write " + path);
  out << text;
}

}  // namespace uccmc::io
