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

#include "dfc/efa.hpp"

#include <sstream>

#include "dfc/error.hpp"

namespace dfc {

Domain IoEfa::domain() const {
  Domain d = input_domain();
  for (const auto& v : vars) d[v.name] = v.type;
  return d;
}

Domain IoEfa::input_domain() const {
  Domain d;
  for (const auto& p : inputs) d[p.name] = p.type;
  return d;
}

IoEfa build_efa(const SymbolicSummary& s, const Solver& solver, std::size_t cap) {
  IoEfa e;
  e.name = s.name;
  e.vars = s.vars;
  e.inputs = s.inputs;
  e.outputs = s.outputs;
  Domain dom = s.domain();

  std::vector<const GuardedDef*> targets;
  for (const auto& p : s.outputs) targets.push_back(&s.defs.at(p.name));
  for (const auto& v : s.vars) targets.push_back(&s.defs.at(v.name));

  std::vector<EfaTransition> acc{EfaTransition{Expr::boolean(true), {}, {}}};
  for (const GuardedDef* d : targets) {
    std::vector<EfaTransition> next;
    for (const auto& t : acc) {
      for (const auto& c : d->cases) {
        Expr g = normalize(make_and(t.guard, c.guard));
        if (g.is_false() || !solver.is_sat(g, dom)) continue;
        EfaTransition n = t;
        n.guard = g;
        if (d->kind == TargetKind::Output) {
          n.outputs[d->target] = c.value;
        } else if (!(c.value.op() == Op::Var && c.value.name() == d->target)) {
          n.updates[d->target] = c.value;
        }
        next.push_back(std::move(n));
        if (next.size() > cap) {
          throw Error(ErrorKind::PathExplosion, "automaton of " + s.name + " exceeds " + std::to_string(cap) + " transitions");
        }
      }
    }
    acc = std::move(next);
  }
  e.transitions = std::move(acc);
  return e;
}

std::vector<IoEfa> split_by_output(const IoEfa& e, const DependencyMap& deps) {
  std::vector<IoEfa> out;
  for (const auto& o : e.outputs) {
    std::set<std::string> vars;
    std::vector<std::string> work;
    auto add_deps = [&](const std::string& t) {
      if (auto it = deps.find(t); it != deps.end()) work.insert(work.end(), it->second.vars.begin(), it->second.vars.end());
    };
    add_deps(o.name);
    while (!work.empty()) {
      std::string v = work.back();
      work.pop_back();
      if (vars.insert(v).second) add_deps(v);
    }

    IoEfa sub;
    sub.name = e.name + "/" + o.name;
    sub.outputs = {o};
    for (const auto& v : e.vars) {
      if (vars.count(v.name)) sub.vars.push_back(v);
    }
    // Guards may still test dropped variables. The kept functions do not
    // depend on them, so any fixed valuation (the initial one) selects a
    // partition with the same behavior.
    Valuation dropped;
    for (const auto& v : e.vars) {
      if (!vars.count(v.name)) dropped[v.name] = v.init;
    }
    std::map<std::vector<Expr>, std::size_t> groups;
    for (const auto& full : e.transitions) {
      EfaTransition t = full;
      if (!dropped.empty()) {
        t.guard = normalize(dfc::bind(t.guard, dropped));
        if (t.guard.is_false()) continue;
      }
      std::vector<Expr> key{t.outputs.at(o.name)};
      for (const auto& v : sub.vars) {
        auto it = t.updates.find(v.name);
        key.push_back(it == t.updates.end() ? Expr::var(v.name, v.type.is_bool() ? Sort::Bool : Sort::Int) : it->second);
      }
      auto [it, fresh] = groups.emplace(key, sub.transitions.size());
      if (fresh) {
        EfaTransition n{t.guard, {{o.name, t.outputs.at(o.name)}}, {}};
        for (const auto& v : sub.vars) {
          if (auto u = t.updates.find(v.name); u != t.updates.end()) n.updates[v.name] = u->second;
        }
        sub.transitions.push_back(std::move(n));
      } else {
        EfaTransition& n = sub.transitions[it->second];
        n.guard = normalize(make_or(n.guard, t.guard));
      }
    }
    RefSet refs;
    for (const auto& t : sub.transitions) {
      collect_refs(t.guard, refs);
      for (const auto& [k, v] : t.outputs) collect_refs(v, refs);
      for (const auto& [k, v] : t.updates) collect_refs(v, refs);
    }
    for (const auto& p : e.inputs) {
      if (refs.inputs.count(p.name)) sub.inputs.push_back(p);
    }
    out.push_back(std::move(sub));
  }
  return out;
}

bool is_deterministic(const IoEfa& e, const Solver& solver) {
  Domain dom = e.domain();
  std::vector<Expr> guards;
  for (const auto& t : e.transitions) guards.push_back(t.guard);
  for (std::size_t i = 0; i < guards.size(); ++i) {
    for (std::size_t j = i + 1; j < guards.size(); ++j) {
      if (solver.is_sat(make_and(guards[i], guards[j]), dom)) return false;
    }
  }
  return !solver.is_sat(make_not(make_or(guards)), dom);
}

std::string efa_to_text(const IoEfa& e) {
  std::ostringstream os;
  os << "efa " << e.name << "\nstate s0\ninputs:";
  for (const auto& p : e.inputs) os << " " << p.name << ":" << p.type.to_string();
  os << "\noutputs:";
  for (const auto& p : e.outputs) os << " " << p.name << ":" << p.type.to_string();
  os << "\nvars:";
  for (const auto& v : e.vars) os << " " << v.name << ":" << v.type.to_string() << "=" << v.type.format_value(v.init);
  os << "\n";
  for (std::size_t i = 0; i < e.transitions.size(); ++i) {
    const auto& t = e.transitions[i];
    os << "t" << i << ": s0 -> s0 [" << to_string(t.guard) << "]\n";
    for (const auto& [k, v] : t.outputs) os << "    " << k << " = " << to_string(v) << "\n";
    for (const auto& [k, v] : t.updates) os << "    " << k << " := " << to_string(v) << "\n";
  }
  return os.str();
}

}  // namespace dfc
