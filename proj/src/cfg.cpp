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

#include "dfc/cfg.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <set>
#include <sstream>

#include "dfc/error.hpp"

namespace dfc {

namespace {

Sort sort_of(const DataType& t) { return t.is_bool() ? Sort::Bool : Sort::Int; }

}  // namespace

Schedule sorted_order(const FlatModel& m) {
  std::map<std::string, std::set<std::string>> preds;
  std::map<std::string, std::set<std::string>> succs;
  std::map<std::string, const FlatBlock*> by_name;
  for (const auto& b : m.blocks) {
    by_name[b.name] = &b;
    preds[b.name];
  }
  auto depend = [&](const std::string& from, const SignalRef& s) {
    if (s.kind != SignalRef::Kind::Block) return;
    preds[from].insert(s.name);
    succs[s.name].insert(from);
  };
  for (const auto& b : m.blocks) {
    if (b.kind != BlockKind::UnitDelay) {
      for (const auto& s : b.inputs) depend(b.name, s);
    }
    if (b.kind == BlockKind::Hold || b.kind == BlockKind::DataStoreWrite) {
      for (const auto& s : b.enable) depend(b.name, s);
    }
  }
  std::map<std::string, int> pending_writes;
  for (const auto& b : m.blocks) {
    if (b.kind == BlockKind::DataStoreWrite) ++pending_writes[b.store];
  }

  Schedule s;
  std::set<std::string> ready;
  std::map<std::string, std::size_t> missing;
  for (const auto& [name, p] : preds) {
    missing[name] = p.size();
    if (p.empty()) ready.insert(name);
  }
  while (!ready.empty()) {
    auto pick = ready.end();
    for (auto it = ready.begin(); it != ready.end(); ++it) {
      const FlatBlock* b = by_name[*it];
      if (b->kind != BlockKind::DataStoreRead || pending_writes[b->store] == 0) {
        pick = it;
        break;
      }
    }
    if (pick == ready.end()) pick = ready.begin();
    std::string name = *pick;
    ready.erase(pick);
    s.output_phase.push_back(name);
    const FlatBlock* b = by_name[name];
    if (b->kind == BlockKind::DataStoreWrite) --pending_writes[b->store];
    for (const auto& n : succs[name]) {
      if (--missing[n] == 0) ready.insert(n);
    }
  }
  if (s.output_phase.size() != m.blocks.size()) {
    throw Error(ErrorKind::AlgebraicLoop, "dependency cycle among blocks of " + m.name);
  }
  for (const auto& b : m.blocks) {
    if (b.kind == BlockKind::UnitDelay || b.kind == BlockKind::Hold) s.update_phase.push_back(b.name);
  }
  std::sort(s.update_phase.begin(), s.update_phase.end());
  return s;
}

std::vector<const CfgEdge*> Cfg::out_edges(int node) const {
  std::vector<const CfgEdge*> r;
  for (const auto& e : edges) {
    if (e.from == node) r.push_back(&e);
  }
  return r;
}

std::vector<const CfgEdge*> Cfg::in_edges(int node) const {
  std::vector<const CfgEdge*> r;
  for (const auto& e : edges) {
    if (e.to == node) r.push_back(&e);
  }
  return r;
}

namespace {

class CfgBuilder {
 public:
  explicit CfgBuilder(const FlatModel& m) : m_(m) {
    cfg_.name = m.name;
    cfg_.inputs = m.inputs;
    cfg_.outputs = m.outputs;
    cfg_.vars = m.vars;
    for (const auto& st : m.stores) {
      if (st.global) cfg_.global_stores.push_back(st.name);
    }
  }

  Cfg build(const Schedule& s) {
    for (const auto& name : s.output_phase) output_block(*m_.find_block(name));

    std::vector<Assignment> updates;
    std::vector<const FlatBlock*> conditional;
    for (const auto& name : s.update_phase) {
      const FlatBlock& b = *m_.find_block(name);
      if (b.kind == BlockKind::Hold) {
        updates.push_back({TargetKind::Var, b.var, signal(b)});
      } else if (b.enable.empty()) {
        updates.push_back({TargetKind::Var, b.var, leaf(b.inputs[0])});
      } else {
        conditional.push_back(&b);
      }
    }
    if (!updates.empty()) add_node("update", std::move(updates));
    for (const FlatBlock* b : conditional) {
      branch(b->name, enable_of(*b), {{TargetKind::Var, b->var, leaf(b->inputs[0])}}, std::nullopt);
    }

    if (cfg_.nodes.empty() || pending_.size() > 1) add_node("exit", {});
    cfg_.exit = pending_.front().first;

    for (const auto& [port, driver] : m_.output_drivers) cfg_.output_values[port] = leaf(driver);
    for (const auto& st : cfg_.global_stores) {
      cfg_.output_values[st] = Expr::sig(st, sort_of(m_.find_input(st)->type));
    }
    return std::move(cfg_);
  }

 private:
  Expr leaf(const SignalRef& s) const {
    Sort sort = sort_of(m_.signal_type(s));
    return s.kind == SignalRef::Kind::Input ? Expr::input(s.name, sort) : Expr::sig(s.name, sort);
  }

  Expr signal(const FlatBlock& b) const { return Expr::sig(b.name, sort_of(b.out_type)); }

  Expr store_ref(const std::string& store) const {
    for (const auto& st : m_.stores) {
      if (st.name == store) return Expr::sig(store, sort_of(st.type));
    }
    throw Error(ErrorKind::InvalidParameter, "unknown data store '" + store + "'");
  }

  Expr enable_of(const FlatBlock& b) const {
    std::vector<Expr> terms;
    for (const auto& e : b.enable) terms.push_back(leaf(e));
    return make_and(terms);
  }

  Expr chain(Op op, const FlatBlock& b) const {
    Expr acc = leaf(b.inputs[0]);
    for (std::size_t i = 1; i < b.inputs.size(); ++i) acc = Expr::binary(op, acc, leaf(b.inputs[i]));
    return acc;
  }

  Expr compute(const FlatBlock& b) const {
    switch (b.kind) {
      case BlockKind::Constant: return Expr::constant(b.value, sort_of(b.out_type));
      case BlockKind::UnitDelay: return Expr::var(b.var, sort_of(b.out_type));
      case BlockKind::Logic:
        switch (b.logic) {
          case LogicOp::Not: return Expr::unary(Op::Not, leaf(b.inputs[0]));
          case LogicOp::And: return chain(Op::And, b);
          case LogicOp::Or: return chain(Op::Or, b);
          case LogicOp::Xor: return chain(Op::Xor, b);
        }
        break;
      case BlockKind::Relational: {
        static const Op ops[] = {Op::Eq, Op::Ne, Op::Lt, Op::Le, Op::Gt, Op::Ge};
        return Expr::binary(ops[static_cast<int>(b.rel)], leaf(b.inputs[0]), leaf(b.inputs[1]));
      }
      case BlockKind::Sum: {
        Expr acc = leaf(b.inputs[0]);
        if (b.signs[0] == '-') acc = Expr::unary(Op::Neg, acc);
        for (std::size_t i = 1; i < b.inputs.size(); ++i) {
          acc = Expr::binary(b.signs[i] == '-' ? Op::Sub : Op::Add, acc, leaf(b.inputs[i]));
        }
        return acc;
      }
      case BlockKind::Product: return chain(Op::Mul, b);
      case BlockKind::Gain: return Expr::binary(Op::Mul, leaf(b.inputs[0]), Expr::integer(b.value));
      case BlockKind::MinMax: return chain(b.minmax == MinMaxMode::Min ? Op::Min : Op::Max, b);
      case BlockKind::Saturation:
        return Expr::binary(Op::Min, Expr::binary(Op::Max, leaf(b.inputs[0]), Expr::integer(b.lo)),
                            Expr::integer(b.hi));
      case BlockKind::DataStoreRead: return store_ref(b.store);
      default: break;
    }
    throw Error(ErrorKind::InvalidParameter, std::string("no combinational form for ") + to_string(b.kind));
  }

  void output_block(const FlatBlock& b) {
    switch (b.kind) {
      case BlockKind::Switch: {
        Expr ctrl = leaf(b.inputs[1]);
        if (ctrl.sort() == Sort::Int) ctrl = Expr::binary(Op::Ne, ctrl, Expr::integer(0));
        branch(b.name, ctrl, {{TargetKind::Signal, b.name, leaf(b.inputs[0])}},
               std::vector<Assignment>{{TargetKind::Signal, b.name, leaf(b.inputs[2])}});
        return;
      }
      case BlockKind::Hold:
        branch(b.name, enable_of(b), {{TargetKind::Signal, b.name, leaf(b.inputs[0])}},
               std::vector<Assignment>{{TargetKind::Signal, b.name, Expr::var(b.var, sort_of(b.out_type))}});
        return;
      case BlockKind::DataStoreWrite: {
        std::vector<Assignment> write{{TargetKind::Var, b.store, leaf(b.inputs[0])}};
        if (b.enable.empty()) {
          add_node(b.name, std::move(write));
        } else {
          branch(b.name, enable_of(b), std::move(write), std::nullopt);
        }
        return;
      }
      default:
        add_node(b.name, {{TargetKind::Signal, b.name, compute(b)}});
    }
  }

  int new_node(std::string label, std::vector<Assignment> assigns) {
    int id = static_cast<int>(cfg_.nodes.size());
    cfg_.nodes.push_back(CfgNode{id, std::move(label), std::move(assigns)});
    return id;
  }

  void add_node(std::string label, std::vector<Assignment> assigns) {
    int id = new_node(std::move(label), std::move(assigns));
    if (id == 0) cfg_.entry = 0;
    for (const auto& [from, guard] : pending_) cfg_.edges.push_back(CfgEdge{from, id, guard});
    pending_ = {{id, Expr::boolean(true)}};
  }

  void branch(const std::string& label, const Expr& cond, std::vector<Assignment> then_assigns,
              std::optional<std::vector<Assignment>> else_assigns) {
    if (cfg_.nodes.empty()) {
      add_node("entry", {});
    } else if (pending_.size() > 1) {
      add_node("join", {});
    }
    int src = pending_.front().first;
    pending_.clear();
    int t = new_node(label, std::move(then_assigns));
    cfg_.edges.push_back(CfgEdge{src, t, cond});
    pending_.push_back({t, Expr::boolean(true)});
    Expr neg = make_not(cond);
    if (else_assigns) {
      int e = new_node(label, std::move(*else_assigns));
      cfg_.edges.push_back(CfgEdge{src, e, neg});
      pending_.push_back({e, Expr::boolean(true)});
    } else {
      pending_.push_back({src, neg});
    }
  }

  const FlatModel& m_;
  Cfg cfg_;
  std::vector<std::pair<int, Expr>> pending_;
};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

Cfg extract_cfg(const FlatModel& m, const Schedule& s) { return CfgBuilder(m).build(s); }

std::vector<std::vector<int>> enumerate_paths(const Cfg& c, std::size_t cap) {
  std::vector<std::vector<int>> paths;
  std::vector<int> cur;
  std::function<void(int)> walk = [&](int n) {
    if (paths.size() >= cap) return;
    cur.push_back(n);
    if (n == c.exit) {
      paths.push_back(cur);
    } else {
      for (const CfgEdge* e : c.out_edges(n)) walk(e->to);
    }
    cur.pop_back();
  };
  if (!c.nodes.empty()) walk(c.entry);
  return paths;
}

std::string cfg_to_dot(const Cfg& c) {
  std::ostringstream os;
  os << "digraph \"" << escape(c.name) << "\" {\n  node [shape=box, fontname=\"monospace\"];\n";
  for (const auto& n : c.nodes) {
    std::string label = std::to_string(n.id) + ": " + n.label;
    for (const auto& a : n.assignments) label += "\n" + a.target + " := " + to_string(a.value);
    os << "  n" << n.id << " [label=\"" << escape(label) << "\"";
    if (n.id == c.entry) os << ", style=bold";
    if (n.id == c.exit) os << ", peripheries=2";
    os << "];\n";
  }
  for (const auto& e : c.edges) {
    os << "  n" << e.from << " -> n" << e.to;
    if (!e.guard.is_true()) os << " [label=\"" << escape(to_string(e.guard)) << "\"]";
    os << ";\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace dfc
