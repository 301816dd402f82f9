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
#include <string>
#include <vector>

#include "dfc/expr.hpp"
#include "dfc/model.hpp"

namespace dfc {

/// Execution order of one simulation step.
struct Schedule {
  std::vector<std::string> output_phase;  // atomic blocks, sorted order
  std::vector<std::string> update_phase;  // blocks owning a state update

  bool operator==(const Schedule&) const = default;
};

/// Topological order over the delay-broken dependency graph. Ready blocks
/// are taken in lexicographic name order, except that a DataStoreRead waits
/// while a write to the same store is still unscheduled.
Schedule sorted_order(const FlatModel& m);

enum class TargetKind { Signal, Var, Output };

struct Assignment {
  TargetKind kind = TargetKind::Signal;
  std::string target;
  Expr value;  // over Sig/Input leaves
};

struct CfgNode {
  int id = 0;
  std::string label;  // originating block
  std::vector<Assignment> assignments;
};

struct CfgEdge {
  int from = 0;
  int to = 0;
  Expr guard;
};

/// Acyclic guarded-assignment graph; one entry-to-exit traversal is one
/// simulation step. Node ids are a topological order.
struct Cfg {
  std::string name;
  std::vector<CfgNode> nodes;
  std::vector<CfgEdge> edges;
  int entry = 0;
  int exit = 0;
  std::vector<Port> inputs;
  std::vector<Port> outputs;
  std::vector<StateVar> vars;
  /// Global data stores: read from an input port at step start, written to
  /// the output port of the same name at step end.
  std::vector<std::string> global_stores;
  /// Value of each output port at the exit node, over Sig/Input leaves.
  std::map<std::string, Expr> output_values;

  std::vector<const CfgEdge*> out_edges(int node) const;
  std::vector<const CfgEdge*> in_edges(int node) const;
};

Cfg extract_cfg(const FlatModel& m, const Schedule& s);

/// All entry-to-exit paths as node id sequences; stops after `cap` paths.
std::vector<std::vector<int>> enumerate_paths(const Cfg& c, std::size_t cap = 1u << 20);

std::string cfg_to_dot(const Cfg& c);

}  // namespace dfc
