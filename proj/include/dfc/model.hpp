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
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "dfc/types.hpp"

namespace dfc {

enum class Direction { In, Out };

struct Port {
  std::string name;
  Direction dir = Direction::In;
  DataType type;

  bool operator==(const Port&) const = default;
};

enum class BlockKind {
  Inport,
  Outport,
  Constant,
  UnitDelay,
  Switch,
  Logic,
  Relational,
  Sum,
  Product,
  Gain,
  MinMax,
  Saturation,
  DataStoreMemory,
  DataStoreRead,
  DataStoreWrite,
  Subsystem,
  EnabledSubsystem,
  // Produced by flattening only: the held output of an enabled subsystem.
  Hold,
};

const char* to_string(BlockKind kind);
std::optional<BlockKind> block_kind_from_string(std::string_view name);

enum class LogicOp { And, Or, Not, Xor };
enum class RelOp { Eq, Ne, Lt, Le, Gt, Ge };
enum class MinMaxMode { Min, Max };

/// Source position for diagnostics. Never part of model equality.
struct SourcePos {
  int line = 0;
  int col = 0;
  friend bool operator==(const SourcePos&, const SourcePos&) { return true; }
};

struct Connection {
  std::string src_block;
  std::string src_port;
  std::string dst_block;
  std::string dst_port;
  SourcePos pos;

  bool operator==(const Connection&) const = default;
};

struct Block;

/// One hierarchy level: blocks plus the wires between them.
struct Diagram {
  std::vector<Block> blocks;
  std::vector<Connection> wires;

  const Block* find(std::string_view name) const;
  bool operator==(const Diagram&) const;
};

struct Block {
  std::string name;
  BlockKind kind = BlockKind::Constant;
  SourcePos pos;

  // Kind-specific parameters; unused ones keep their defaults.
  std::optional<DataType> type;  // Inport/Outport/UnitDelay/DataStoreMemory/Constant annotation
  Value value = 0;               // Constant value, UnitDelay/DataStoreMemory/Outport init, Gain factor
  bool has_value = false;        // Outport init given explicitly
  LogicOp logic = LogicOp::And;
  RelOp rel = RelOp::Eq;
  MinMaxMode minmax = MinMaxMode::Min;
  std::string signs;             // Sum, one of '+'/'-' per input
  int num_inputs = 0;            // Logic/Product/MinMax arity
  Value lo = 0;                  // Saturation bounds
  Value hi = 0;
  std::string store;             // DataStoreRead/DataStoreWrite target
  Diagram body;                  // Subsystem/EnabledSubsystem contents

  bool is_subsystem() const {
    return kind == BlockKind::Subsystem || kind == BlockKind::EnabledSubsystem;
  }
  /// Names of input ports in positional order (`in1`, `in2`, ... or the
  /// subsystem's inner Inport names, then `enable`).
  std::vector<std::string> input_ports() const;
  /// Names of output ports (`out`, or the subsystem's inner Outport names).
  std::vector<std::string> output_ports() const;

  bool operator==(const Block&) const = default;
};

struct Model {
  std::string name;
  Diagram root;

  /// External interface derived from the root Inport/Outport blocks.
  std::vector<Port> inputs() const;
  std::vector<Port> outputs() const;

  bool operator==(const Model&) const = default;
};

/// Parses the line-oriented block-diagram language. See docs/dfm-grammar.md.
Model parse_model(std::string_view text);
/// Canonical text form; parse_model(print_model(m)) == m.
std::string print_model(const Model& m);

// ---------------------------------------------------------------------------
// Flattened models

enum class DataStoreMode { Internal, Global };
enum class DataStoreOrder { Strict, Schedule };

struct FlattenOptions {
  DataStoreMode datastore = DataStoreMode::Internal;
  DataStoreOrder order = DataStoreOrder::Strict;
};

/// Reference to a signal in a flat model: an external input port or the
/// single output of an atomic block.
struct SignalRef {
  enum class Kind { Input, Block } kind = Kind::Block;
  std::string name;

  bool operator==(const SignalRef&) const = default;
  auto operator<=>(const SignalRef&) const = default;
};

struct StateVar {
  std::string name;
  DataType type;
  Value init = 0;

  bool operator==(const StateVar&) const = default;
};

struct FlatBlock {
  std::string name;  // hierarchical path, '/'-separated
  BlockKind kind = BlockKind::Constant;
  std::vector<SignalRef> inputs;
  /// Conjunction of enable signals of all enclosing enabled subsystems
  /// (for Hold: including the subsystem's own enable).
  std::vector<SignalRef> enable;
  DataType out_type;   // type of the block's output signal, if it has one
  std::string var;     // internal variable (UnitDelay, Hold)
  std::string store;   // resolved store (DataStoreRead/Write)

  Value value = 0;
  LogicOp logic = LogicOp::And;
  RelOp rel = RelOp::Eq;
  MinMaxMode minmax = MinMaxMode::Min;
  std::string signs;
  Value lo = 0;
  Value hi = 0;

  bool has_output() const { return kind != BlockKind::DataStoreWrite; }
  bool operator==(const FlatBlock&) const = default;
};

struct DataStore {
  std::string name;  // flat path of the DataStoreMemory block
  DataType type;
  Value init = 0;
  bool global = false;

  bool operator==(const DataStore&) const = default;
};

struct FlatModel {
  std::string name;
  std::vector<Port> inputs;   // includes global data stores
  std::vector<Port> outputs;  // includes global data stores
  std::vector<FlatBlock> blocks;
  std::map<std::string, SignalRef> output_drivers;  // outputs other than global stores
  std::vector<StateVar> vars;                       // UnitDelay, Hold and internal stores
  std::vector<DataStore> stores;
  FlattenOptions options;

  const FlatBlock* find_block(std::string_view name) const;
  const Port* find_input(std::string_view name) const;
  const Port* find_output(std::string_view name) const;
  DataType signal_type(const SignalRef& s) const;
};

/// Inlines subsystems, resolves wires to signals, checks typing, arity and
/// algebraic loops, and attaches enable conditions.
FlatModel flatten_and_validate(const Model& m, const FlattenOptions& options = {});

// ---------------------------------------------------------------------------
// Interfaces

/// Ports of model B mapped onto ports of model A (B name -> A name).
struct PortMapping {
  std::map<std::string, std::string> inputs;
  std::map<std::string, std::string> outputs;
  std::set<std::string> extra_inputs_a;

  bool operator==(const PortMapping&) const = default;
};

/// `bPort = aPort` overrides, as read from a mapping file.
using MappingOverrides = std::map<std::string, std::string>;

MappingOverrides parse_mapping_overrides(std::string_view text);

PortMapping derive_port_mapping(const FlatModel& a, const FlatModel& b,
                                const MappingOverrides& overrides = {});

struct InterfaceViolation {
  std::string port;
  std::string reason;

  bool operator==(const InterfaceViolation&) const = default;
};

struct InterfaceReport {
  bool compatible = true;
  std::vector<InterfaceViolation> violations;
  std::set<std::string> extra_inputs_a;
  /// B's input domains, keyed by the mapped A port name.
  std::map<std::string, DataType> dom_b;
};

/// Kinds must agree in both directions; integer ranges of B inputs must lie
/// inside the ranges of the A inputs they are mapped to.
InterfaceReport check_interface(const FlatModel& a, const FlatModel& b, const PortMapping& m);

/// True if every value of `inner` is a value of `outer` and the kinds agree.
bool range_contained(const DataType& inner, const DataType& outer);

}  // namespace dfc
