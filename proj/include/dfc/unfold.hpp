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

#include "dfc/efa.hpp"
#include "dfc/error.hpp"

namespace dfc {

inline constexpr std::size_t kDefaultStateBudget = 100'000;

using Vec = std::vector<Value>;

/// Image of one transition's update function. Keys are valuations of the
/// variables the transition reads (`key_vars`); images are valuations of the
/// variables it writes (`image_vars`).
struct ImageEntry {
  std::vector<std::string> key_vars;
  std::vector<std::string> image_vars;
  std::map<Vec, std::set<Vec>> map;
  /// Keys for which some enabled input leaves a variable domain or
  /// overflows. Reaching one during unfolding is an error.
  std::map<Vec, std::pair<ErrorKind, std::string>> faulty;
};

struct ImageMap {
  std::vector<ImageEntry> per_transition;  // empty entry for transitions without updates
};

/// Closed intervals derived from the top-level conjuncts of the normalized
/// `guard`; variables not constrained keep their domain. Empty when the guard is
/// statically unsatisfiable.
std::optional<Domain> narrow_ranges(const Expr& guard, const Domain& dom);

ImageMap compute_image(const IoEfa& e, const Solver& solver);

struct TsTransition {
  int from = 0;
  int to = 0;
  Expr guard;  // over inputs only
};

/// Input/output transition system: the automaton with variables unfolded
/// into states.
struct IoTs {
  std::string name;
  std::vector<Port> inputs;
  std::vector<Port> outputs;
  std::vector<std::string> var_names;
  std::vector<Vec> states;
  std::vector<std::string> labels;
  int initial = 0;
  std::vector<std::map<std::string, Expr>> output_fn;  // per state, ite-chain over inputs
  std::vector<TsTransition> transitions;

  Domain input_domain() const;
  std::vector<const TsTransition*> out(int state) const;
};

/// Reachable fixpoint from the initial valuation. Throws
/// StateBudgetExceeded beyond `state_budget` states.
IoTs unfold_to_ts(const IoEfa& e, const ImageMap& img, const Solver& solver, std::size_t state_budget = kDefaultStateBudget,
                  const std::string& label_prefix = "A");

/// Runs the system on an input sequence and returns the output valuations.
std::vector<Valuation> simulate_ts(const IoTs& ts, const std::vector<Valuation>& inputs);

std::string ts_to_dot(const IoTs& ts);

}  // namespace dfc
