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

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dfc/model.hpp"
#include "dfc/simcheck.hpp"

namespace dfc {

struct CheckConfig {
  bool clone_pruning = true;
  bool output_split = true;
  std::uint64_t solver_budget = kDefaultSolverBudget;
  std::size_t case_cap = kDefaultCaseCap;
  std::size_t state_budget = kDefaultStateBudget;
  int fix_iterations = 16;
  int jobs = 1;
  bool collect_artifacts = false;
};

enum class Overall { Full, BackwardOnly, UpwardOnly, Incompatible };

const char* to_string(Overall o);
std::optional<Overall> overall_from_string(std::string_view s);

/// Input sequence on which the two models' outputs first differ at
/// `divergence_step`. Port names are A's. For the backward direction the
/// expected outputs are B's; for the upward direction they are A's.
struct Counterexample {
  std::string direction;  // "backward" or "upward"
  std::string output;     // automaton the failure was found in ("*" when not split)
  std::string reason;     // output-mismatch | uncovered-transition
  std::vector<Valuation> inputs;
  std::vector<Valuation> expected;
  std::vector<Valuation> actual;
  int divergence_step = 0;
  /// The last input lies outside the simulating model's input ranges, so
  /// that model cannot replay it.
  bool out_of_range = false;

  bool operator==(const Counterexample&) const = default;
};

struct DirectionResult {
  bool compatible = false;
  std::map<std::string, Value> conditions;  // constants for extra inputs of A
  std::map<std::string, std::string> conditions_text;  // the same, formatted by port type
  int fix_iterations = 0;

  bool operator==(const DirectionResult&) const = default;
};

struct OutputVerdict {
  bool pruned = false;
  bool backward = false;
  bool upward = false;
  std::string backward_reason;
  std::string upward_reason;
  std::uint64_t states_a = 0;
  std::uint64_t states_b = 0;

  bool operator==(const OutputVerdict&) const = default;
};

struct StageStat {
  std::string stage;
  std::map<std::string, std::uint64_t> counts;
  double millis = 0;

  bool operator==(const StageStat&) const = default;
};

struct CompatReport {
  std::string model_a;
  std::string model_b;
  Overall overall = Overall::Incompatible;
  DirectionResult backward;
  DirectionResult upward;
  std::vector<InterfaceViolation> interface_violations;
  std::vector<std::string> extra_inputs;
  std::map<std::string, OutputVerdict> outputs;  // by A output name, or "*"
  std::vector<Counterexample> counterexamples;
  std::vector<StageStat> stats;

  bool operator==(const CompatReport&) const = default;
  const StageStat* stage(std::string_view name) const;
};

struct SmtQuery {
  std::string name;
  std::string script;
  bool builtin_sat = false;  // answer of the enumeration solver
};

struct Artifacts {
  std::string cfg_dot;
  std::string summary;
  std::string efa;
  std::string ts_dot;
  std::vector<SmtQuery> smt;
};

/// Scripts joined by (reset), loadable by one solver run.
std::string join_smt(const std::vector<SmtQuery>& queries);

/// Full pipeline from flat models to the compatibility report. Backward
/// compatibility means A can replace B: A simulates B over B's input
/// ranges. Upward compatibility is the inverse.
CompatReport check_compatibility(const FlatModel& a, const FlatModel& b, const PortMapping& m,
                                 const CheckConfig& config = {}, Artifacts* artifacts = nullptr);

/// Element counts of a single model's translation (CFG, automaton, TS).
StageStat model_stats(const FlatModel& m, const CheckConfig& config = {});

/// Replays `inputs` (A port names) on both models and returns the first
/// step where a mapped output differs, or nullopt.
struct Replay {
  std::vector<Valuation> outputs_a;  // A output names
  std::vector<Valuation> outputs_b;  // mapped to A output names
  std::optional<int> divergence;
  std::optional<std::string> error;  // a model rejected the inputs
};
Replay replay_pair(const FlatModel& a, const FlatModel& b, const PortMapping& m, const std::vector<Valuation>& inputs);

std::string report_to_json(const CompatReport& r);
CompatReport report_from_json(std::string_view text);
std::string report_to_text(const CompatReport& r);
/// 0 Full, 1 BackwardOnly/UpwardOnly or conditional, 2 Incompatible.
int exit_code(const CompatReport& r);

}  // namespace dfc
