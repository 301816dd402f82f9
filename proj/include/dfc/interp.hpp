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

#include <string>
#include <string_view>
#include <vector>

#include "dfc/cfg.hpp"
#include "dfc/model.hpp"

namespace dfc {

/// Values of all internal variables (delays, holds, internal data stores).
struct SimState {
  Valuation values;

  bool operator==(const SimState&) const = default;
};

SimState initial_state(const FlatModel& m);

struct StepResult {
  Valuation outputs;
  SimState next;
};

struct TraceStep {
  Valuation inputs;
  Valuation outputs;

  bool operator==(const TraceStep&) const = default;
};

struct Trace {
  std::vector<TraceStep> steps;

  bool operator==(const Trace&) const = default;
};

/// Direct block-by-block execution of a flat model in sorted order.
class Interpreter {
 public:
  explicit Interpreter(FlatModel m);

  const FlatModel& model() const { return m_; }
  const Schedule& schedule() const { return schedule_; }

  /// Throws ArithmeticOverflow when an overflowing value reaches an output
  /// or the next state, StateOutOfDomain when a variable leaves its range,
  /// and InvalidParameter for missing or out-of-domain inputs.
  StepResult step(const SimState& s, const Valuation& inputs) const;
  Trace run(const std::vector<Valuation>& inputs) const;
  Trace run_from(SimState s, const std::vector<Valuation>& inputs) const;

 private:
  FlatModel m_;
  Schedule schedule_;
  std::vector<const FlatBlock*> order_;
};

/// Reads rows of port values. The header must name exactly `ports` (any
/// order); booleans accept 0/1/true/false, enums accept names or indices.
/// Blank text is an empty trace.
std::vector<Valuation> read_csv(std::string_view text, const std::vector<Port>& ports);
/// Writes a header of port names then one row per valuation. Booleans are
/// written as 0/1 and enums by variant name.
std::string write_csv(const std::vector<Port>& ports, const std::vector<Valuation>& rows);
/// Inputs followed by outputs, one row per step.
std::string trace_to_csv(const FlatModel& m, const Trace& t);

}  // namespace dfc
