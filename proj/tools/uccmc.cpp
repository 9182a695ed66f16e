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

// uccmc command-line driver.
//
// Exit codes: 0 success, 1 convergence failure, 2 input error.

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "uccmc/uccmc.hpp"

namespace fs = std::filesystem;
using namespace uccmc;
using io::json;

namespace {

std::mutex log_mutex;

void log(const std::string& msg) {
  std::lock_guard<std::mutex> lock(log_mutex);
  std::cerr << msg << '\n';
}

std::string fmt(double v, const char* spec = "%.10f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string threshold_tag(double t) { return fmt(t, "%g"); }

/// Integrals, active space, reference and the ordered full ansatz.
struct System {
  IntegralTable full;
  IntegralTable active;
  Determinant reference;
  AnsatzSpec spec;
};

System load_system(const RunConfig& cfg) {
  require_file(cfg.fcidump);
  System s;
  s.full = read_fcidump(cfg.fcidump);
  s.active = freeze_core(s.full, cfg.frozen);
  s.reference = aufbau_reference(s.active);
  s.spec = make_ansatz(s.reference, 2 * s.active.n_orb(), enumerate_uccsd(s.reference, s.active.orb_sym()));
  if (cfg.qmc.ordering == "reversed") s.spec = reversed_ansatz(s.spec);
  return s;
}

fs::path prepare_dir(const RunConfig& cfg) {
  fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& p, const std::string& text) { io::write_text_file(p.string(), text); }

void write_json(const fs::path& p, const json& j) { write(p, j.dump(2) + "\n"); }

// ---- parse ----

json parse_summary(const RunConfig& cfg, const System& s) {
  json orb_sym = s.full.orb_sym();
  return {{"fcidump", cfg.fcidump},
          {"n_orb", s.full.n_orb()},
          {"n_elec", s.full.n_elec()},
          {"ms2", s.full.ms2()},
          {"e_core", s.full.e_core()},
          {"orb_sym", orb_sym},
          {"frozen", cfg.frozen},
          {"active_n_orb", s.active.n_orb()},
          {"active_n_elec", s.active.n_elec()},
          {"n_qubits", s.spec.n_qubits},
          {"reference", s.reference.to_string(s.spec.n_qubits)},
          {"e_hf", diagonal_energy(s.active, s.reference)},
          {"n_excitors", s.spec.excitors.size()},
          {"hilbert_size", s.spec.excitors.size() + 1},
          {"orbital_energies", orbital_energies(s.active).eps}};
}

int cmd_parse(const RunConfig& cfg) {
  const System s = load_system(cfg);
  const json j = parse_summary(cfg, s);
  write_json(prepare_dir(cfg) / "summary.json", j);
  std::cout << j.dump(2) << '\n';
  return 0;
}

// ---- mp2 ----

json run_mp2(const System& s) {
  const auto amps = mp2_amplitudes(s.active, 0);
  return {{"source", "mp2"}, {"energy_corr", mp2_energy(s.active, amps)}, {"amplitudes", io::amplitudes_to_json(amps)}};
}

int cmd_mp2(const RunConfig& cfg) {
  const System s = load_system(cfg);
  const json j = run_mp2(s);
  write_json(prepare_dir(cfg) / "mp2.json", j);
  std::cout << "mp2 correlation energy " << fmt(j["energy_corr"].get<double>()) << '\n';
  return 0;
}

// ---- qmc ----

struct QmcOutput {
  QmcRun run;
  json summary;
};

QmcOutput run_qmc(const RunConfig& cfg, const System& s, const fs::path& dir) {
  QmcEngine engine(s.active, ExcitorSpace(s.reference, s.spec.excitors), cfg.qmc);
  QmcOutput out{engine.run(), json::object()};
  {
    std::ofstream trace(dir / "qmc_trace.csv");
    io::write_trace_csv(trace, out.run.trace);
  }
  json snap = io::to_json(out.run.snapshot);
  snap["source"] = "tpuccmc";
  snap["mode"] = to_string(cfg.qmc.mode);
  write_json(dir / "qmc_snapshot.json", snap);
  json blocks = json::array();
  for (const auto& b : out.run.block_snapshots) blocks.push_back(io::to_json(b));
  write_json(dir / "qmc_blocks.json", blocks);

  json& sum = out.summary;
  sum["mode"] = to_string(cfg.qmc.mode);
  sum["n_steps"] = out.run.trace.size();
  sum["e_ref"] = out.run.e_ref;
  sum["seed"] = cfg.qmc.seed;
  if (!out.run.trace.empty()) {
    const long first = static_cast<long>(cfg.equilibration * out.run.trace.size()) + 1;
    try {
      const auto ep = projected_energy(out.run.trace, first, cfg.estimator_blocks);
      sum["e_proj"] = out.run.e_ref + ep.mean;
      sum["e_proj_error"] = ep.error;
    } catch (const DomainError& e) {
      sum["e_proj_undefined"] = e.what();
    }
    const auto sh = shift_average(out.run.trace, first, cfg.estimator_blocks);
    sum["shift"] = out.run.e_ref + sh.mean;
    sum["shift_error"] = sh.error;
    const auto& last = out.run.trace.back();
    sum["final_n_w"] = last.n_w;
    sum["final_n_0"] = last.n_0;
  }
  if (!out.run.block_snapshots.empty()) {
    const SectorEvaluator ev(s.spec, s.active);
    const auto ev_est = variational_estimate(ev, out.run.block_snapshots);
    sum["e_var"] = ev_est.mean;
    sum["e_var_error"] = ev_est.error;
    sum["e_var_snapshot"] = ev.energy(parameters_from_map(s.spec.excitors, out.run.snapshot.t));
  }
  int counts[3] = {0, 0, 0};
  for (const auto& [e, t] : out.run.snapshot.t)
    for (int k = 0; k < 3; ++k)
      if (std::abs(t) > std::pow(10.0, -1 - k)) ++counts[k];
  sum["counts_above_0.1_0.01_0.001"] = {counts[0], counts[1], counts[2]};
  write_json(dir / "qmc_summary.json", sum);
  return out;
}

int cmd_qmc(const RunConfig& cfg) {
  const System s = load_system(cfg);
  const auto out = run_qmc(cfg, s, prepare_dir(cfg));
  std::cout << out.summary.dump(2) << '\n';
  return 0;
}

// ---- screening sources ----

/// Screening amplitude maps by source label.
std::map<std::string, std::map<Excitor, double>> screening_amplitudes(const RunConfig& cfg, const System& s,
                                                                     const fs::path& dir) {
  std::map<std::string, std::map<Excitor, double>> out;
  if (!cfg.amplitudes.empty()) {
    require_file(cfg.amplitudes);
    const json j = io::read_json_file(cfg.amplitudes);
    const std::string label = j.contains("source") ? j["source"].get<std::string>() : "file";
    out[label] = io::amplitudes_from_json(j.at("amplitudes"));
    return out;
  }
  for (const auto& src : cfg.sources()) {
    if (src == "mp2") {
      const json j = run_mp2(s);
      write_json(dir / "mp2.json", j);
      out["mp2"] = io::amplitudes_from_json(j["amplitudes"]);
    } else {
      log("running " + to_string(cfg.qmc.mode) + " for " + cfg.fcidump);
      out["tpuccmc"] = run_qmc(cfg, s, dir).run.snapshot.t;
    }
  }
  return out;
}

// ---- screen ----

int cmd_screen(const RunConfig& cfg) {
  const System s = load_system(cfg);
  const fs::path dir = prepare_dir(cfg);
  std::vector<ScreenReport> plans;
  for (const auto& [src, amps] : screening_amplitudes(cfg, s, dir)) {
    for (double th : cfg.thresholds) {
      plans.push_back(screen_plan(s.spec, amps, th, src));
      write_json(dir / ("plan_" + src + "_" + threshold_tag(th) + ".json"), io::to_json(plans.back()));
    }
  }
  std::ostringstream csv;
  io::write_screen_csv(csv, plans, fs::path(cfg.fcidump).stem().string());
  write(dir / "plan.csv", csv.str());
  std::cout << csv.str();
  return 0;
}

// ---- vqe ----

struct VqeOutput {
  VqeResult full;
  bool converged = true;
  std::vector<ScreenReport> reports;
  double e_hf = 0.0;
};

VqeOutput run_vqe(const RunConfig& cfg, const System& s, const fs::path& dir) {
  VqeOutput out;
  out.e_hf = diagonal_energy(s.active, s.reference);
  const SectorEvaluator ev(s.spec, s.active);
  try {
    out.full = minimize(ev, cfg.vqe);
  } catch (const ConvergenceError& e) {
    out.full = e.best();
    out.converged = false;
    log(std::string("warning: ") + e.what());
  }
  write_json(dir / "vqe.json", io::to_json(out.full, s.spec));
  {
    std::ofstream trace(dir / "vqe_trace.csv");
    io::write_energy_trace_csv(trace, out.full.trace);
  }
  if (!out.converged) return out;
  for (const auto& [src, amps] : screening_amplitudes(cfg, s, dir)) {
    for (double th : cfg.thresholds) {
      out.reports.push_back(screened_vqe(s.active, s.spec, amps, th, out.full.energy, src, cfg.vqe));
      write_json(dir / ("screen_" + src + "_" + threshold_tag(th) + ".json"), io::to_json(out.reports.back()));
    }
  }
  std::ostringstream csv;
  io::write_screen_csv(csv, out.reports, fs::path(cfg.fcidump).stem().string());
  write(dir / "screen.csv", csv.str());
  return out;
}

int cmd_vqe(const RunConfig& cfg) {
  const System s = load_system(cfg);
  const auto out = run_vqe(cfg, s, prepare_dir(cfg));
  std::cout << "E_HF  " << fmt(out.e_hf) << "\nE_VQE " << fmt(out.full.energy) << "  iterations "
            << out.full.iterations << (out.converged ? "" : "  (not converged)") << '\n';
  for (const auto& r : out.reports) {
    std::cout << r.source << " t>" << threshold_tag(r.threshold) << "  kept " << r.kept.size() << "/"
              << r.hilbert_size - 1 << "  E " << fmt(r.energy) << "  %Ecorr " << fmt(r.pct_ecorr, "%.2f")
              << "  CNOT " << r.depth.cnots << "/" << r.full_depth.cnots << '\n';
  }
  return out.converged ? 0 : 1;
}

// ---- scan ----

/// Geometry coordinate for plots: the sidecar's "r" if present, else its
/// first numeric geometry value, else the entry index.
double scan_coordinate(const std::string& fcidump, std::size_t index) {
  fs::path side(fcidump);
  side.replace_extension(".json");
  if (fs::is_regular_file(side)) {
    const json j = io::read_json_file(side.string());
    if (j.contains("geometry")) {
      const auto& g = j["geometry"];
      if (g.contains("r")) return g["r"].get<double>();
      for (const auto& [k, v] : g.items())
        if (v.is_number()) return v.get<double>();
    }
  }
  return static_cast<double>(index);
}

struct ScanEntry {
  std::string label;
  double x = 0.0;
  double e_hf = 0.0;
  double e_full = 0.0;
  double e_fci = 0.0;
  bool converged = false;
  std::vector<ScreenReport> reports;
  std::string error;
};

int cmd_scan(const RunConfig& cfg) {
  if (cfg.geometries.empty()) throw DomainError("scan needs at least one geometry (set geometries)");
  for (const auto& g : cfg.geometries) require_file(g);
  const fs::path dir = prepare_dir(cfg);
  std::vector<ScanEntry> entries(cfg.geometries.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> input_error{false};
  auto worker = [&]() {
    for (std::size_t i = next++; i < entries.size(); i = next++) {
      RunConfig c = cfg;
      c.fcidump = cfg.geometries[i];
      c.qmc.seed = cfg.qmc.seed + i;
      ScanEntry& e = entries[i];
      e.label = fs::path(c.fcidump).stem().string();
      c.output_dir = (dir / e.label).string();
      try {
        e.x = scan_coordinate(c.fcidump, i);
        const System s = load_system(c);
        const auto out = run_vqe(c, s, prepare_dir(c));
        e.e_hf = out.e_hf;
        e.e_full = out.full.energy;
        e.e_fci = fci_oracle(s.active);
        e.converged = out.converged;
        e.reports = out.reports;
        log("finished " + e.label);
      } catch (const Error& ex) {
        e.error = ex.what();
        if (!dynamic_cast<const PopulationCollapseError*>(&ex)) input_error = true;
        log("error in " + e.label + ": " + ex.what());
      }
    }
  };
  std::vector<std::thread> pool;
  for (int k = 1; k < std::min<int>(cfg.jobs, static_cast<int>(entries.size())); ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::ostringstream scan, grid;
  scan << "label,x,e_hf,e_vqe,e_fci,converged\n";
  grid << "label,source,threshold,hilbert_size,n_kept,energy,full_energy,hf_energy,pct_ecorr,cnots,full_cnots\n";
  std::map<std::string, std::ostringstream> curves;
  for (const auto& e : entries) {
    if (!e.error.empty()) continue;
    scan << e.label << ',' << io::format_double(e.x) << ',' << io::format_double(e.e_hf) << ','
         << io::format_double(e.e_full) << ',' << io::format_double(e.e_fci) << ',' << (e.converged ? 1 : 0) << '\n';
    std::ostringstream rows;
    io::write_screen_csv(rows, e.reports, e.label);
    const std::string body = rows.str();
    grid << body.substr(body.find('\n') + 1);
    curves["energy_hf"] << io::format_double(e.x) << ' ' << io::format_double(e.e_hf) << '\n';
    curves["energy_vqe"] << io::format_double(e.x) << ' ' << io::format_double(e.e_full) << '\n';
    curves["energy_fci"] << io::format_double(e.x) << ' ' << io::format_double(e.e_fci) << '\n';
    for (const auto& r : e.reports) {
      const std::string tag = r.source + "_" + threshold_tag(r.threshold);
      curves["energy_" + tag] << io::format_double(e.x) << ' ' << io::format_double(r.energy) << '\n';
      curves["count_" + tag] << io::format_double(e.x) << ' ' << r.kept.size() << '\n';
      curves["pct_" + e.label + "_" + r.source] << io::format_double(r.threshold) << ' '
                                                 << io::format_double(r.pct_ecorr) << '\n';
    }
  }
  write(dir / "scan.csv", scan.str());
  write(dir / "scan_screen.csv", grid.str());
  fs::create_directories(dir / "plots");
  for (const auto& [name, body] : curves) write(dir / "plots" / (name + ".dat"), body.str());
  std::cout << scan.str();

  int code = 0;
  for (const auto& e : entries)
    if (!e.error.empty() || !e.converged) code = 1;
  if (input_error) code = 2;
  return code;
}

// ---- report ----

int cmd_report(const RunConfig& cfg, const std::string& dir_arg) {
  const fs::path dir(dir_arg.empty() ? cfg.output_dir : dir_arg);
  if (!fs::is_directory(dir)) throw MissingFileError(dir.string());
  std::map<std::string, std::vector<ScreenReport>> by_label;
  std::map<std::string, json> vqe;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    const std::string label = entry.path().parent_path().filename().string();
    if (name.rfind("screen_", 0) == 0 && entry.path().extension() == ".json") {
      by_label[label].push_back(io::screen_report_from_json(io::read_json_file(entry.path().string())));
    } else if (name == "vqe.json") {
      vqe[label] = io::read_json_file(entry.path().string());
    }
  }
  if (by_label.empty() && vqe.empty()) throw DomainError("no reports found under " + dir.string());
  std::ostringstream csv;
  csv << "label,source,threshold,hilbert_size,n_kept,energy,full_energy,hf_energy,pct_ecorr,cnots,full_cnots\n";
  for (auto& [label, reports] : by_label) {
    std::sort(reports.begin(), reports.end(), [](const ScreenReport& a, const ScreenReport& b) {
      return a.source != b.source ? a.source < b.source : a.threshold > b.threshold;
    });
    std::ostringstream rows;
    io::write_screen_csv(rows, reports, label);
    const std::string body = rows.str();
    csv << body.substr(body.find('\n') + 1);
  }
  write(dir / "report.csv", csv.str());
  for (const auto& [label, j] : vqe) {
    std::cout << label << ": E_VQE " << fmt(j["energy"].get<double>()) << "  iterations " << j["iterations"]
              << (j["converged"].get<bool>() ? "" : "  (not converged)") << '\n';
  }
  std::cout << csv.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"uccmc: unitary coupled cluster Monte Carlo screening for VQE"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  app.add_option("-c,--config", config_path, "key = value configuration file");
  std::map<std::string, std::string> overrides;
  for (const auto& key : config_keys()) {
    std::string flag = key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    app.add_option_function<std::string>(
        "--" + flag, [&overrides, key](const std::string& v) { overrides[key] = v; }, config_help(key));
  }
  std::string report_dir;
  app.add_subcommand("parse", "read an FCIDUMP and print its summary");
  app.add_subcommand("mp2", "MP2 amplitudes of the active space");
  app.add_subcommand("qmc", "run the Monte Carlo engine; write trace and amplitude snapshot");
  app.add_subcommand("screen", "screen amplitudes at each threshold and count CNOTs");
  app.add_subcommand("vqe", "full VQE plus screened VQE for every source and threshold");
  app.add_subcommand("scan", "vqe over the geometries list with aggregate tables and plot data");
  app.add_subcommand("report", "collect screening reports under a directory")
      ->add_option("dir", report_dir, "directory to scan (default: output_dir)");
  app.add_subcommand("defaults", "print every configuration key with its default");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    RunConfig cfg;
    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "defaults") {
      std::cout << format_config(cfg);
      return 0;
    }
    if (!config_path.empty()) {
      require_file(config_path);
      std::ifstream in(config_path);
      parse_config(in, cfg);
    }
    if (const char* env = std::getenv("UCCMC_OUTPUT_DIR"); env && *env) cfg.output_dir = env;
    for (const auto& [k, v] : overrides) set_config_value(cfg, k, v);
    cfg.validate();

    if (cmd == "parse") return cmd_parse(cfg);
    if (cmd == "mp2") return cmd_mp2(cfg);
    if (cmd == "qmc") return cmd_qmc(cfg);
    if (cmd == "screen") return cmd_screen(cfg);
    if (cmd == "vqe") return cmd_vqe(cfg);
    if (cmd == "scan") return cmd_scan(cfg);
    if (cmd == "report") return cmd_report(cfg, report_dir);
  } catch (const ConvergenceError& e) {
    std::cerr << "convergence failure: " << e.what() << '\n';
    return 1;
  } catch (const PopulationCollapseError& e) {
    std::cerr << "convergence failure: " << e.what() << '\n';
    return 1;
  } catch (const MissingFileError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
