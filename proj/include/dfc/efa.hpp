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
#include <vector>

#include "dfc/symbolic.hpp"

namespace dfc {

struct EfaTransition {
  Expr guard;                          // over inputs and variables
  std::map<std::string, Expr> outputs;
  std::map<std::string, Expr> updates;  // identity updates omitted
};

/// Single-state input/output extended finite automaton.
struct IoEfa {
  std::string name;
  std::vector<StateVar> vars;
  std::vector<Port> inputs;
  std::vector<Port> outputs;
  std::vector<EfaTransition> transitions;

  Domain domain() const;
  Domain input_domain() const;
};

using DependencyMap = std::map<std::string, Deps>;

/// Product of the cases of all targets, dropping unsatisfiable combinations
/// as soon as they appear. Throws PathExplosion beyond `cap` transitions.
IoEfa build_efa(const SymbolicSummary& s, const Solver& solver, std::size_t cap = kDefaultCaseCap);

/// One automaton per output, keeping the variables the output depends on
/// (transitively). Transitions with equal output and update functions are
/// merged.
std::vector<IoEfa> split_by_output(const IoEfa& e, const DependencyMap& deps);

/// Guards pairwise disjoint and jointly total over the automaton's domain.
bool is_deterministic(const IoEfa& e, const Solver& solver);

std::string efa_to_text(const IoEfa& e);

}  // namespace dfc
