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

#include <algorithm>
#include <functional>
#include <memory>
#include <set>
#include <tuple>

#include "dfc/cfg.hpp"
#include "dfc/error.hpp"
#include "dfc/model.hpp"

namespace dfc {

const FlatBlock* FlatModel::find_block(std::string_view name) const {
  for (const auto& b : blocks) {
    if (b.name == name) return &b;
  }
  return nullptr;
}

const Port* FlatModel::find_input(std::string_view name) const {
  for (const auto& p : inputs) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

const Port* FlatModel::find_output(std::string_view name) const {
  for (const auto& p : outputs) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

DataType FlatModel::signal_type(const SignalRef& s) const {
  if (s.kind == SignalRef::Kind::Input) {
    if (const Port* p = find_input(s.name)) return p->type;
  } else if (const FlatBlock* b = find_block(s.name)) {
    return b->out_type;
  }
  throw Error(ErrorKind::InvalidParameter, "unknown signal '" + s.name + "'");
}

namespace {

struct Ctx {
  const Diagram* diagram = nullptr;
  std::string prefix;
  const Ctx* parent = nullptr;
  const Block* self = nullptr;
  std::vector<SignalRef> enable;
  std::map<std::string, std::string> stores;
  std::map<std::string, Ctx*> children;
};

std::string describe(const SignalRef& s) {
  return (s.kind == SignalRef::Kind::Input ? "input " : "") + s.name;
}

class Flattener {
 public:
  Flattener(const Model& m, const FlattenOptions& opt) : model_(m) {
    out_.name = m.name;
    out_.options = opt;
  }

  FlatModel run() {
    Ctx* root = make_ctx(&model_.root, "", nullptr, nullptr, {});
    compute_enables(*root);
    emit(*root);
    interface(*root);
    check_names();
    check_loops();
    infer_types();
    check_types();
    if (out_.options.order == DataStoreOrder::Strict) check_store_order();
    return std::move(out_);
  }

 private:
  Ctx* make_ctx(const Diagram* d, std::string prefix, const Ctx* parent, const Block* self,
                std::map<std::string, std::string> stores) {
    auto owned = std::make_unique<Ctx>();
    Ctx* ctx = owned.get();
    ctxs_.push_back(std::move(owned));
    ctx->diagram = d;
    ctx->prefix = std::move(prefix);
    ctx->parent = parent;
    ctx->self = self;
    for (const auto& b : d->blocks) {
      if (b.kind == BlockKind::DataStoreMemory) stores[b.name] = ctx->prefix + b.name;
    }
    ctx->stores = stores;
    check_wires(*ctx);
    for (const auto& b : d->blocks) {
      if (b.is_subsystem()) {
        ctx->children[b.name] = make_ctx(&b.body, ctx->prefix + b.name + "/", ctx, &b, stores);
      }
    }
    return ctx;
  }

  void check_wires(const Ctx& ctx) {
    const Diagram& d = *ctx.diagram;
    std::set<std::pair<std::string, std::string>> driven;
    for (const auto& w : d.wires) {
      const Block* src = d.find(w.src_block);
      const Block* dst = d.find(w.dst_block);
      std::string at = std::to_string(w.pos.line) + ":" + std::to_string(w.pos.col) + ": ";
      if (!src || !dst) {
        throw Error(ErrorKind::InvalidParameter,
                    at + "wire references unknown block '" + (src ? w.dst_block : w.src_block) + "'");
      }
      auto outs = src->output_ports();
      if (std::find(outs.begin(), outs.end(), w.src_port) == outs.end()) {
        throw Error(ErrorKind::ArityError, at + to_string(src->kind) + " '" + ctx.prefix + src->name +
                                               "' has no output port '" + w.src_port + "'");
      }
      auto ins = dst->input_ports();
      if (std::find(ins.begin(), ins.end(), w.dst_port) == ins.end()) {
        throw Error(ErrorKind::ArityError, at + to_string(dst->kind) + " '" + ctx.prefix + dst->name +
                                               "' has no input port '" + w.dst_port + "'");
      }
      if (!driven.insert({w.dst_block, w.dst_port}).second) {
        throw Error(ErrorKind::ArityError,
                    at + "port " + ctx.prefix + w.dst_block + "." + w.dst_port + " is driven twice");
      }
    }
    for (const auto& b : d.blocks) {
      auto ins = b.input_ports();
      std::size_t connected = 0;
      std::string missing;
      for (const auto& p : ins) {
        if (driven.count({b.name, p})) {
          ++connected;
        } else if (missing.empty()) {
          missing = p;
        }
      }
      if (connected == ins.size()) continue;
      if (connected == 0) {
        throw Error(ErrorKind::UnconnectedInput, "input " + ctx.prefix + b.name + "." + missing + " is not connected");
      }
      throw Error(ErrorKind::ArityError, std::string(to_string(b.kind)) + " '" + ctx.prefix + b.name + "' expects " +
                                             std::to_string(ins.size()) + " inputs, " +
                                             std::to_string(connected) + " connected");
    }
  }

  SignalRef resolve_input(const Ctx& ctx, const std::string& block, const std::string& port) {
    for (const auto& w : ctx.diagram->wires) {
      if (w.dst_block == block && w.dst_port == port) return resolve_output(ctx, w.src_block, w.src_port);
    }
    throw Error(ErrorKind::UnconnectedInput, "input " + ctx.prefix + block + "." + port + " is not connected");
  }

  SignalRef resolve_output(const Ctx& ctx, const std::string& block, const std::string& port) {
    auto key = std::make_tuple(&ctx, block, port);
    if (!resolving_.insert(key).second) {
      throw Error(ErrorKind::AlgebraicLoop, "wire cycle through " + ctx.prefix + block + "." + port);
    }
    struct Release {
      std::set<std::tuple<const Ctx*, std::string, std::string>>& set;
      std::tuple<const Ctx*, std::string, std::string> key;
      ~Release() { set.erase(key); }
    } release{resolving_, key};

    const Block* b = ctx.diagram->find(block);
    switch (b->kind) {
      case BlockKind::Inport:
        if (!ctx.parent) return SignalRef{SignalRef::Kind::Input, b->name};
        return resolve_input(*ctx.parent, ctx.self->name, b->name);
      case BlockKind::Subsystem:
        return resolve_input(*ctx.children.at(block), port, "in1");
      case BlockKind::EnabledSubsystem:
        return SignalRef{SignalRef::Kind::Block, ctx.children.at(block)->prefix + port};
      default:
        return SignalRef{SignalRef::Kind::Block, ctx.prefix + block};
    }
  }

  void compute_enables(Ctx& ctx) {
    for (auto& [name, child] : ctx.children) {
      child->enable = ctx.enable;
      if (child->self->kind == BlockKind::EnabledSubsystem) {
        child->enable.push_back(resolve_input(ctx, name, "enable"));
      }
      compute_enables(*child);
    }
  }

  void emit(const Ctx& ctx) {
    for (const auto& b : ctx.diagram->blocks) {
      std::string flat = ctx.prefix + b.name;
      switch (b.kind) {
        case BlockKind::Inport:
        case BlockKind::Subsystem:
        case BlockKind::EnabledSubsystem:
          continue;
        case BlockKind::Outport: {
          if (!ctx.self || ctx.self->kind != BlockKind::EnabledSubsystem) continue;
          FlatBlock h;
          h.name = flat;
          h.kind = BlockKind::Hold;
          h.inputs = {resolve_input(ctx, b.name, "in1")};
          h.enable = ctx.enable;
          h.out_type = *b.type;
          h.var = flat + "_hold";
          h.value = b.has_value ? b.value : b.type->lo();
          out_.vars.push_back(StateVar{h.var, *b.type, h.value});
          out_.blocks.push_back(std::move(h));
          continue;
        }
        case BlockKind::DataStoreMemory: {
          bool global = out_.options.datastore == DataStoreMode::Global;
          out_.stores.push_back(DataStore{flat, *b.type, b.value, global});
          if (!global) out_.vars.push_back(StateVar{flat, *b.type, b.value});
          continue;
        }
        default:
          break;
      }
      FlatBlock fb;
      fb.name = flat;
      fb.kind = b.kind;
      for (const auto& p : b.input_ports()) fb.inputs.push_back(resolve_input(ctx, b.name, p));
      fb.enable = ctx.enable;
      fb.value = b.value;
      fb.logic = b.logic;
      fb.rel = b.rel;
      fb.minmax = b.minmax;
      fb.signs = b.signs;
      fb.lo = b.lo;
      fb.hi = b.hi;
      if (b.kind == BlockKind::Constant || b.kind == BlockKind::UnitDelay) fb.out_type = *b.type;
      if (b.kind == BlockKind::UnitDelay) {
        fb.var = flat + "_internal";
        out_.vars.push_back(StateVar{fb.var, *b.type, b.value});
      }
      if (b.kind == BlockKind::DataStoreRead || b.kind == BlockKind::DataStoreWrite) {
        auto it = ctx.stores.find(b.store);
        if (it == ctx.stores.end()) {
          throw Error(ErrorKind::InvalidParameter, flat + ": no data store '" + b.store + "' in scope");
        }
        fb.store = it->second;
      }
      out_.blocks.push_back(std::move(fb));
    }
    for (const auto& b : ctx.diagram->blocks) {
      if (b.is_subsystem()) emit(*ctx.children.at(b.name));
    }
  }

  void interface(const Ctx& root) {
    out_.inputs = model_.inputs();
    out_.outputs = model_.outputs();
    for (const auto& p : out_.outputs) out_.output_drivers[p.name] = resolve_input(root, p.name, "in1");
    for (const auto& s : out_.stores) {
      if (!s.global) continue;
      out_.inputs.push_back(Port{s.name, Direction::In, s.type});
      out_.outputs.push_back(Port{s.name, Direction::Out, s.type});
    }
  }

  void check_names() {
    std::set<std::string> seen;
    auto add = [&](const std::string& n) {
      if (!seen.insert(n).second) throw Error(ErrorKind::DuplicateName, "name '" + n + "' is used twice after flattening");
    };
    std::set<std::string> ports;
    for (const auto& p : out_.inputs) ports.insert(p.name);
    for (const auto& p : out_.outputs) ports.insert(p.name);
    for (const auto& n : ports) add(n);
    for (const auto& b : out_.blocks) add(b.name);
    for (const auto& v : out_.vars) {
      bool is_internal_store = std::any_of(out_.stores.begin(), out_.stores.end(),
                                           [&](const DataStore& s) { return s.name == v.name; });
      if (!is_internal_store || ports.count(v.name)) add(v.name);
    }
  }

  void check_loops() {
    std::map<std::string, std::vector<std::string>> deps;
    for (const auto& b : out_.blocks) {
      auto& d = deps[b.name];
      if (b.kind != BlockKind::UnitDelay) {
        for (const auto& s : b.inputs) {
          if (s.kind == SignalRef::Kind::Block) d.push_back(s.name);
        }
      }
      if (b.kind == BlockKind::Hold || b.kind == BlockKind::DataStoreWrite) {
        for (const auto& s : b.enable) {
          if (s.kind == SignalRef::Kind::Block) d.push_back(s.name);
        }
      }
    }
    std::map<std::string, int> color;
    std::vector<std::string> path;
    std::function<void(const std::string&)> visit = [&](const std::string& n) {
      color[n] = 1;
      path.push_back(n);
      for (const auto& d : deps[n]) {
        if (color[d] == 1) {
          std::string cycle;
          auto it = std::find(path.begin(), path.end(), d);
          for (; it != path.end(); ++it) cycle += *it + " -> ";
          throw Error(ErrorKind::AlgebraicLoop, "delay-free cycle " + cycle + d);
        }
        if (color[d] == 0) visit(d);
      }
      path.pop_back();
      color[n] = 2;
    };
    for (const auto& b : out_.blocks) {
      if (color[b.name] == 0) visit(b.name);
    }
  }

  void infer_types() {
    std::map<std::string, const DataStore*> stores;
    for (const auto& s : out_.stores) stores[s.name] = &s;
    std::map<std::string, FlatBlock*> by_name;
    for (auto& b : out_.blocks) by_name[b.name] = &b;
    std::set<std::string> done;
    std::function<DataType(const SignalRef&)> type_of;
    std::function<void(FlatBlock&)> infer = [&](FlatBlock& b) {
      if (done.count(b.name)) return;
      switch (b.kind) {
        case BlockKind::Switch: b.out_type = type_of(b.inputs[0]); break;
        case BlockKind::Logic:
        case BlockKind::Relational: b.out_type = DataType::boolean(); break;
        case BlockKind::Sum:
        case BlockKind::Product:
        case BlockKind::Gain:
        case BlockKind::MinMax:
        case BlockKind::Saturation: b.out_type = DataType::unbounded_integer(); break;
        case BlockKind::DataStoreRead: b.out_type = stores.at(b.store)->type; break;
        default: break;  // set during emission
      }
      done.insert(b.name);
    };
    type_of = [&](const SignalRef& s) -> DataType {
      if (s.kind == SignalRef::Kind::Input) return out_.find_input(s.name)->type;
      FlatBlock& b = *by_name.at(s.name);
      infer(b);
      return b.out_type;
    };
    for (auto& b : out_.blocks) infer(b);
  }

  void check_types() {
    auto mismatch = [](const std::string& where, const std::string& detail) {
      return Error(ErrorKind::TypeMismatch, where + ": " + detail);
    };
    std::map<std::string, const DataStore*> stores;
    for (const auto& s : out_.stores) stores[s.name] = &s;
    for (const auto& b : out_.blocks) {
      std::vector<DataType> in;
      for (const auto& s : b.inputs) in.push_back(out_.signal_type(s));
      for (const auto& e : b.enable) {
        if (!out_.signal_type(e).is_bool()) throw mismatch(b.name, "enable signal " + describe(e) + " is not bool");
      }
      auto need_int = [&]() {
        for (std::size_t i = 0; i < in.size(); ++i) {
          if (!in[i].is_int()) {
            throw mismatch(b.name, "input " + std::to_string(i + 1) + " (" + describe(b.inputs[i]) + ") is " +
                                       in[i].to_string() + ", arithmetic needs int");
          }
        }
      };
      switch (b.kind) {
        case BlockKind::Switch:
          if (!in[0].same_kind(in[2])) {
            throw mismatch(b.name, "data inputs differ: " + in[0].to_string() + " vs " + in[2].to_string());
          }
          if (in[1].is_enum()) throw mismatch(b.name, "control input must be bool or int");
          break;
        case BlockKind::Logic:
          for (std::size_t i = 0; i < in.size(); ++i) {
            if (!in[i].is_bool()) throw mismatch(b.name, "logic input " + describe(b.inputs[i]) + " is not bool");
          }
          break;
        case BlockKind::Relational:
          if (!in[0].same_kind(in[1])) {
            throw mismatch(b.name, "compares " + in[0].to_string() + " with " + in[1].to_string());
          }
          if (!in[0].is_int() && b.rel != RelOp::Eq && b.rel != RelOp::Ne) {
            throw mismatch(b.name, "ordering comparison needs int operands");
          }
          break;
        case BlockKind::Sum:
        case BlockKind::Product:
        case BlockKind::Gain:
        case BlockKind::MinMax:
        case BlockKind::Saturation:
          need_int();
          break;
        case BlockKind::UnitDelay:
        case BlockKind::Hold:
          if (!in[0].same_kind(b.out_type)) {
            throw mismatch(b.name, "input " + in[0].to_string() + " does not match state type " + b.out_type.to_string());
          }
          break;
        case BlockKind::DataStoreWrite: {
          const DataType& st = stores.at(b.store)->type;
          if (!in[0].same_kind(st)) {
            throw mismatch(b.name, "writes " + in[0].to_string() + " into store of type " + st.to_string());
          }
          break;
        }
        default:
          break;
      }
    }
    for (const auto& [port, driver] : out_.output_drivers) {
      DataType declared = out_.find_output(port)->type;
      DataType actual = out_.signal_type(driver);
      if (!actual.same_kind(declared)) {
        throw mismatch("output " + port, describe(driver) + " is " + actual.to_string() + ", port is " +
                                             declared.to_string());
      }
    }
  }

  void check_store_order() {
    Schedule s = sorted_order(out_);
    std::map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < s.output_phase.size(); ++i) pos[s.output_phase[i]] = i;
    for (const auto& r : out_.blocks) {
      if (r.kind != BlockKind::DataStoreRead) continue;
      for (const auto& w : out_.blocks) {
        if (w.kind == BlockKind::DataStoreWrite && w.store == r.store && pos[r.name] < pos[w.name]) {
          throw Error(ErrorKind::DataStoreOrder, "store '" + r.store + "' is read by " + r.name +
                                                     " before it is written by " + w.name + " in the same step");
        }
      }
    }
  }

  const Model& model_;
  FlatModel out_;
  std::vector<std::unique_ptr<Ctx>> ctxs_;
  std::set<std::tuple<const Ctx*, std::string, std::string>> resolving_;
};

}  // namespace

FlatModel flatten_and_validate(const Model& m, const FlattenOptions& options) {
  return Flattener(m, options).run();
}

}  // namespace dfc
