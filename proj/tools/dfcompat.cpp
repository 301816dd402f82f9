// Copyright 2026 The dfcompat Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "dfc/error.hpp"
#include "dfc/interp.hpp"
#include "dfc/model.hpp"
#include "dfc/pipeline.hpp"
#include "dfc/solver.hpp"

namespace {

using namespace dfc;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
}

struct ModelOptions {
  std::string datastore = "internal";
  std::string order = "strict";

  FlattenOptions flatten() const {
    FlattenOptions o;
    o.datastore = datastore == "global" ? DataStoreMode::Global : DataStoreMode::Internal;
    o.order = order == "schedule" ? DataStoreOrder::Schedule : DataStoreOrder::Strict;
    return o;
  }
};

FlatModel load(const std::string& path, const ModelOptions& mo) {
  return flatten_and_validate(parse_model(read_file(path)), mo.flatten());
}

PortMapping load_mapping(const FlatModel& a, const FlatModel& b, const std::string& path) {
  MappingOverrides ov;
  if (!path.empty()) ov = parse_mapping_overrides(read_file(path));
  return derive_port_mapping(a, b, ov);
}

void add_model_options(CLI::App* cmd, ModelOptions& mo) {
  cmd->add_option("--datastore", mo.datastore, "Data store interpretation")
      ->check(CLI::IsMember({"internal", "global"}))
      ->capture_default_str();
  cmd->add_option("--datastore-order", mo.order, "Read-before-write policy for data stores")
      ->check(CLI::IsMember({"strict", "schedule"}))
      ->capture_default_str();
}

void add_check_options(CLI::App* cmd, CheckConfig& cfg, bool& no_pruning, bool& no_split) {
  cmd->add_flag("--no-clone-pruning", no_pruning, "Compare complete models without removing clones");
  cmd->add_flag("--no-output-split", no_split, "Check one automaton per model instead of one per output");
  cmd->add_option("--solver-budget", cfg.solver_budget, "Evaluation budget per solver query")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--fix-iterations", cfg.fix_iterations, "Candidate cap when fixing extra inputs")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--case-cap", cfg.case_cap, "Case limit per guarded definition")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--state-budget", cfg.state_budget, "State limit per transition system")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--jobs", cfg.jobs, "Parallel per-output checks (0: one per core)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
}

std::string stats_table(const std::vector<StageStat>& rows) {
  std::set<std::string> cols;
  for (const auto& r : rows) {
    for (const auto& [k, v] : r.counts) cols.insert(k);
  }
  std::ostringstream os;
  os << std::left << std::setw(24) << "model";
  for (const auto& c : cols) os << std::right << std::setw(17) << c;
  os << std::right << std::setw(12) << "ms" << "\n";
  for (const auto& r : rows) {
    os << std::left << std::setw(24) << r.stage;
    for (const auto& c : cols) {
      auto it = r.counts.find(c);
      os << std::right << std::setw(17) << (it == r.counts.end() ? std::string("-") : std::to_string(it->second));
    }
    os << std::right << std::setw(12) << std::fixed << std::setprecision(2) << r.millis << "\n";
  }
  return os.str();
}

std::string solver_command(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("DFC_SOLVER_CMD")) return env;
  return "";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compatibility checker for block-diagram dataflow models"};
  app.require_subcommand(1);
  ModelOptions mo;
  CheckConfig cfg;
  bool no_pruning = false;
  bool no_split = false;
  std::string model_a, model_b, map_path;

  auto* check = app.add_subcommand("check", "Decide backward and upward compatibility of A with B");
  check->add_option("A", model_a, "Replacing model")->required()->check(CLI::ExistingFile);
  check->add_option("B", model_b, "Model to be replaced")->required()->check(CLI::ExistingFile);
  check->add_option("--map", map_path, "Port mapping overrides (bPort = aPort)")->check(CLI::ExistingFile);
  add_model_options(check, mo);
  add_check_options(check, cfg, no_pruning, no_split);
  std::string emit_cfg, emit_efa, emit_ts, emit_summary, emit_smt, report_path, cex_path;
  std::string format = "text";
  check->add_option("--emit-cfg", emit_cfg, "Write both CFGs as DOT");
  check->add_option("--emit-efa", emit_efa, "Write both automata as text");
  check->add_option("--emit-ts", emit_ts, "Write the transition systems as DOT");
  check->add_option("--emit-summary", emit_summary, "Write the guarded definitions");
  check->add_option("--emit-smt", emit_smt, "Write SMT-LIB 2 queries");
  check->add_option("--format", format, "Report format on stdout")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
  check->add_option("--report", report_path, "Write the JSON report to a file");
  check->add_option("--cex", cex_path, "Write the first counterexample's inputs as CSV");

  std::string trace_path, against;
  auto* replay = app.add_subcommand("replay", "Run a model on an input trace");
  replay->add_option("model", model_a, "Model")->required()->check(CLI::ExistingFile);
  replay->add_option("trace", trace_path, "Input CSV")->required()->check(CLI::ExistingFile);
  replay->add_option("--against", against, "Second model; report the first divergence")->check(CLI::ExistingFile);
  replay->add_option("--map", map_path, "Port mapping overrides for --against")->check(CLI::ExistingFile);
  add_model_options(replay, mo);

  std::vector<std::string> stat_models;
  auto* stats = app.add_subcommand("stats", "Element counts of each translation stage");
  stats->add_option("models", stat_models, "Models")->required()->check(CLI::ExistingFile);
  stats->add_flag("--no-output-split", no_split, "Count one transition system per model");
  add_model_options(stats, mo);

  std::string smt_out = "-", solver_cmd;
  auto* smt = app.add_subcommand("emit-smt", "Write the solver queries of a check as SMT-LIB 2");
  smt->add_option("A", model_a, "Replacing model")->required()->check(CLI::ExistingFile);
  smt->add_option("B", model_b, "Model to be replaced")->required()->check(CLI::ExistingFile);
  smt->add_option("--map", map_path, "Port mapping overrides")->check(CLI::ExistingFile);
  smt->add_option("-o,--output", smt_out, "Output file")->capture_default_str();
  smt->add_option("--solver-cmd", solver_cmd, "External solver to cross-check answers (or DFC_SOLVER_CMD)");
  add_model_options(smt, mo);
  add_check_options(smt, cfg, no_pruning, no_split);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }
  cfg.clone_pruning = !no_pruning;
  cfg.output_split = !no_split;

  try {
    if (*check || *smt) {
      FlatModel a = load(model_a, mo);
      FlatModel b = load(model_b, mo);
      PortMapping m = load_mapping(a, b, map_path);
      Artifacts art;
      CompatReport r = check_compatibility(a, b, m, cfg, &art);
      if (*smt) {
        write_file(smt_out, join_smt(art.smt));
        std::string cmd = solver_command(solver_cmd);
        if (cmd.empty()) return 0;
        int disagree = 0;
        for (const auto& q : art.smt) {
          auto ext = run_external_solver(cmd, q.script);
          const char* ext_s = !ext ? "unknown" : *ext ? "sat" : "unsat";
          bool ok = ext && *ext == q.builtin_sat;
          if (!ok) ++disagree;
          std::cerr << (ok ? "agree   " : "DISAGREE") << " builtin=" << (q.builtin_sat ? "sat" : "unsat")
                    << " external=" << ext_s << "  " << q.name << "\n";
        }
        return disagree ? 3 : 0;
      }
      if (!emit_cfg.empty()) write_file(emit_cfg, art.cfg_dot);
      if (!emit_efa.empty()) write_file(emit_efa, art.efa);
      if (!emit_ts.empty()) write_file(emit_ts, art.ts_dot);
      if (!emit_summary.empty()) write_file(emit_summary, art.summary);
      if (!emit_smt.empty()) write_file(emit_smt, join_smt(art.smt));
      if (!report_path.empty()) write_file(report_path, report_to_json(r));
      if (!cex_path.empty() && !r.counterexamples.empty()) {
        write_file(cex_path, write_csv(a.inputs, r.counterexamples.front().inputs));
      }
      std::cout << (format == "json" ? report_to_json(r) : report_to_text(r));
      return exit_code(r);
    }
    if (*replay) {
      FlatModel a = load(model_a, mo);
      auto inputs = read_csv(read_file(trace_path), a.inputs);
      if (against.empty()) {
        std::cout << trace_to_csv(a, Interpreter(a).run(inputs));
        return 0;
      }
      FlatModel b = load(against, mo);
      PortMapping m = load_mapping(a, b, map_path);
      Replay rp = replay_pair(a, b, m, inputs);
      std::vector<Port> outs;
      for (const auto& p : a.outputs) {
        if (std::any_of(m.outputs.begin(), m.outputs.end(), [&](const auto& kv) { return kv.second == p.name; })) {
          outs.push_back(p);
        }
      }
      std::cout << "# " << a.name << "\n" << write_csv(outs, rp.outputs_a);
      std::cout << "# " << b.name << "\n" << write_csv(outs, rp.outputs_b);
      if (rp.error) std::cout << "stopped: " << *rp.error << "\n";
      if (rp.divergence) {
        std::cout << "diverges at step " << *rp.divergence << "\n";
        return 1;
      }
      std::cout << "no divergence\n";
      return 0;
    }
    if (*stats) {
      std::vector<StageStat> rows;
      for (const auto& path : stat_models) rows.push_back(model_stats(load(path, mo), cfg));
      std::cout << stats_table(rows);
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
