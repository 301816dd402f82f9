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

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dfc/cfg.hpp"
#include "dfc/expr.hpp"
#include "dfc/model.hpp"
#include "dfc/solver.hpp"

namespace dfc {

inline constexpr std::size_t kDefaultCaseCap = 4096;

struct Case {
  Expr guard;
  Expr value;

  bool operator==(const Case&) const = default;
};

/// Next value of an output port or internal variable as disjoint, total,
/// individually satisfiable cases over inputs and variables.
struct GuardedDef {
  std::string target;
  TargetKind kind = TargetKind::Output;
  DataType type;
  std::vector<Case> cases;
};

struct Deps {
  std::set<std::string> inputs;
  std::set<std::string> vars;

  bool operator==(const Deps&) const = default;
};

struct SymbolicSummary {
  std::string name;
  std::vector<Port> inputs;
  std::vector<Port> outputs;
  std::vector<StateVar> vars;
  std::map<std::string, GuardedDef> defs;  // by target; output names never clash with variables
  std::map<std::string, Deps> deps;

  Domain domain() const;  // inputs and variables
  const StateVar* find_var(std::string_view name) const;
};

/// Propagates assignments through the CFG and lifts conditionals into cases.
/// Throws PathExplosion when a target would need more than `case_cap` cases.
SymbolicSummary substitute(const Cfg& c, const Solver& solver, std::size_t case_cap = kDefaultCaseCap);

/// Lifts nested conditionals of `e` into normalized cases with satisfiable
/// guards; cases with equal values are merged.
std::vector<Case> lift_cases(const Expr& e, const Domain& dom, const Solver& solver,
                             std::size_t case_cap = kDefaultCaseCap);

/// Renames input and output ports (old -> new); unlisted names are kept.
SymbolicSummary rename_ports(const SymbolicSummary& s, const std::map<std::string, std::string>& inputs,
                             const std::map<std::string, std::string>& outputs);

/// Removes outputs not in `keep`, then every variable and input no
/// remaining output depends on, directly or through other variables.
SymbolicSummary slice(const SymbolicSummary& s, const std::set<std::string>& keep);

/// Variables an output depends on, closed under variable-to-variable deps.
std::set<std::string> var_closure(const SymbolicSummary& s, const std::set<std::string>& targets);

struct CloneResult {
  SymbolicSummary a;
  SymbolicSummary b;
  std::set<std::string> pruned_outputs;   // A port names
  std::set<std::string> fresh_inputs;     // shared inputs replacing cloned variables
  std::set<std::pair<std::string, std::string>> pairs;  // cloned targets (A, B)
};

/// Both summaries must already use A's port names (see rename_ports).
/// Variables are paired by name, type and initial value and kept paired only
/// while their definitions agree syntactically over paired variables.
CloneResult detect_and_prune_clones(const SymbolicSummary& a, const SymbolicSummary& b);

/// Name of the shared input standing in for a cloned variable.
std::string clone_input_name(const std::string& var);

std::string summary_to_text(const SymbolicSummary& s);

}  // namespace dfc
