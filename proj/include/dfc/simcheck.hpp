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

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dfc/unfold.hpp"

namespace dfc {

enum class FailureReason { OutputMismatch, UncoveredTransition };

const char* to_string(FailureReason r);

struct SimFailure {
  FailureReason reason = FailureReason::OutputMismatch;
  int state_a = 0;
  int state_b = 0;
  std::string output;                           // OutputMismatch only
  Witness witness;                              // input at the failing pair
  std::vector<Witness> inputs;                  // from the initial pair, ending with `witness`
  std::vector<std::pair<int, int>> pairs;       // visited pairs along `inputs`
};

struct SimVerdict {
  bool simulated = false;
  std::set<std::pair<int, int>> visited;
  std::optional<SimFailure> failure;
};

/// Decides whether `a` simulates `b` (b's initial state is simulated by a's)
/// with inputs quantified over `dom`. Inputs outside a's own ranges count
/// as not covered by a. Pairs are explored breadth first, so a failure comes
/// with a shortest input sequence.
SimVerdict simulates(const IoTs& a, const IoTs& b, const Domain& dom, const Solver& solver);

/// Fixes some inputs to constants and drops them from the interface.
IoTs bind_inputs(const IoTs& ts, const Valuation& values);

/// Covering transitions of `a` for b's transition, as in the pairwise step
/// of `simulates`.
Cover transitions_covering(const IoTs& a, int state_a, const TsTransition& tb, const Domain& dom, const Solver& solver);

/// Output-level necessary condition for a simulation when `extra` inputs of
/// the simulating side are fixed: for all inputs, every state of b has the
/// outputs of some state of a.
Expr necessary_condition(const std::vector<std::pair<const IoTs*, const IoTs*>>& pairs);

struct FixResult {
  std::optional<Witness> constants;  // nullopt: no constants can work
  int iterations = 0;
  std::vector<Witness> rejected;     // candidates refuted by the full check
};

/// Searches constants for the `extra` inputs of each pair's simulating side
/// (first) so that it simulates the second. Throws IterationCapExceeded
/// after `max_iterations` refuted candidates.
FixResult fix_free_ports(const std::vector<std::pair<const IoTs*, const IoTs*>>& pairs, const Domain& extra,
                         const Domain& dom, const Solver& solver, int max_iterations);

}  // namespace dfc
