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

#include "dfc/symbolic.hpp"

#include <algorithm>
#include <sstream>

#include "dfc/error.hpp"

namespace dfc {

Domain SymbolicSummary::domain() const {
  Domain d;
  for (const auto& p : inputs) d[p.name] = p.type;
  for (const auto& v : vars) d[v.name] = v.type;
  return d;
}

const StateVar* SymbolicSummary::find_var(std::string_view name) const {
  for (const auto& v : vars) {
    if (v.name == name) return &v;
  }
  return nullptr;
}

namespace {

Sort sort_of(const DataType& t) { return t.is_bool() ? Sort::Bool : Sort::Int; }

Deps deps_of(const GuardedDef& d) {
  RefSet r;
  for (const auto& c : d.cases) {
    collect_refs(c.guard, r);
    collect_refs(c.value, r);
  }
  return Deps{std::move(r.inputs), std::move(r.vars)};
}

void recompute_deps(SymbolicSummary& s) {
  s.deps.clear();
  for (const auto& [t, d] : s.defs) s.deps[t] = deps_of(d);
}

class Lifter {
 public:
  Lifter(const Domain& dom, const Solver& solver, std::size_t cap) : dom_(dom), solver_(solver), cap_(cap) {}

  std::vector<Case> lift(const Expr& e) {
    if (auto it = memo_.find(e); it != memo_.end()) return it->second;
    std::vector<Case> out;
    if (is_leaf(e.op()) || e.is_const()) {
      out.push_back({Expr::boolean(true), e});
    } else if (e.op() == Op::Ite) {
      auto cs = lift(e.arg(0));
      auto ts = lift(e.arg(1));
      auto es = lift(e.arg(2));
      for (const auto& c : cs) {
        Expr on = normalize(make_and(c.guard, c.value));
        Expr off = normalize(make_and(c.guard, make_not(c.value)));
        for (const auto& t : ts) push(out, make_and(on, t.guard), t.value);
        for (const auto& x : es) push(out, make_and(off, x.guard), x.value);
      }
    } else {
      std::vector<std::pair<Expr, std::vector<Expr>>> acc{{Expr::boolean(true), {}}};
      for (const auto& arg : e.args()) {
        auto cs = lift(arg);
        std::vector<std::pair<Expr, std::vector<Expr>>> next;
        for (const auto& [g, vals] : acc) {
          for (const auto& c : cs) {
            Expr ng = normalize(make_and(g, c.guard));
            if (ng.is_false()) continue;
            auto nv = vals;
            nv.push_back(c.value);
            next.emplace_back(ng, std::move(nv));
            check(next.size());
          }
        }
        acc = std::move(next);
      }
      for (auto& [g, vals] : acc) {
        Expr v = vals.size() == 1 ? Expr::unary(e.op(), vals[0]) : Expr::binary(e.op(), vals[0], vals[1]);
        out.push_back({g, normalize(v)});
      }
    }
    if (out.size() > 32) out = prune(std::move(out));
    memo_[e] = out;
    return out;
  }

  std::vector<Case> prune(std::vector<Case> in) {
    std::vector<Case> out;
    for (auto& c : in) {
      if (solver_.is_sat(c.guard, dom_)) out.push_back(std::move(c));
    }
    return out;
  }

 private:
  void push(std::vector<Case>& out, const Expr& g, const Expr& v) {
    Expr ng = normalize(g);
    if (ng.is_false()) return;
    out.push_back({ng, v});
    check(out.size());
  }

  void check(std::size_t n) const {
    if (n > cap_) {
      throw Error(ErrorKind::PathExplosion, "more than " + std::to_string(cap_) + " cases for one target");
    }
  }

  const Domain& dom_;
  const Solver& solver_;
  std::size_t cap_;
  std::map<Expr, std::vector<Case>> memo_;
};

}  // namespace

std::vector<Case> lift_cases(const Expr& e, const Domain& dom, const Solver& solver, std::size_t case_cap) {
  Lifter lifter(dom, solver, case_cap);
  auto cases = lifter.prune(lifter.lift(normalize(e)));
  std::vector<Case> merged;
  for (const auto& c : cases) {
    auto it = std::find_if(merged.begin(), merged.end(), [&](const Case& m) { return m.value == c.value; });
    if (it == merged.end()) {
      merged.push_back(c);
    } else {
      it->guard = normalize(make_or(it->guard, c.guard));
    }
  }
  if (merged.empty()) throw Error(ErrorKind::InvalidParameter, "expression has no satisfiable case");
  return merged;
}

SymbolicSummary substitute(const Cfg& c, const Solver& solver, std::size_t case_cap) {
  using Env = std::map<std::string, Expr, std::less<>>;
  std::vector<Env> envs(c.nodes.size());
  std::vector<bool> done(c.nodes.size());

  auto resolve = [](const Env& env, const Expr& e) {
    return substitute(e, [&](const Expr& leaf) -> std::optional<Expr> {
      if (leaf.op() != Op::Sig) return std::nullopt;
      auto it = env.find(leaf.name());
      if (it == env.end()) throw Error(ErrorKind::InvalidParameter, "signal '" + leaf.name() + "' used before assignment");
      return it->second;
    });
  };
  // Guard of the branch arm `n`, or true if `n` is not an arm.
  auto arm_guard = [&](int n) {
    auto in = c.in_edges(n);
    if (in.size() == 1 && c.out_edges(in[0]->from).size() > 1) return resolve(envs[in[0]->from], in[0]->guard);
    return Expr::boolean(true);
  };

  Env initial;
  for (const auto& v : c.vars) initial[v.name] = Expr::var(v.name, sort_of(v.type));
  for (const auto& g : c.global_stores) {
    for (const auto& p : c.inputs) {
      if (p.name == g) initial[g] = Expr::input(g, sort_of(p.type));
    }
  }

  for (const auto& node : c.nodes) {
    auto in = c.in_edges(node.id);
    Env env;
    if (in.empty()) {
      env = initial;
    } else if (in.size() == 1) {
      env = envs[in[0]->from];
    } else {
      std::vector<Expr> conds;
      for (const CfgEdge* e : in) {
        conds.push_back(normalize(make_and(resolve(envs[e->from], e->guard), arm_guard(e->from))));
      }
      std::set<std::string> keys;
      for (const CfgEdge* e : in) {
        for (const auto& [k, v] : envs[e->from]) keys.insert(k);
      }
      for (const auto& k : keys) {
        std::vector<std::pair<Expr, Expr>> alts;
        for (std::size_t i = 0; i < in.size(); ++i) {
          const Env& pe = envs[in[i]->from];
          if (auto it = pe.find(k); it != pe.end()) alts.emplace_back(conds[i], it->second);
        }
        Expr v = alts.back().second;
        for (std::size_t i = alts.size() - 1; i-- > 0;) v = make_ite(alts[i].first, alts[i].second, v);
        env[k] = v;
      }
    }
    for (const auto& a : node.assignments) env[a.target] = resolve(env, a.value);
    envs[node.id] = std::move(env);
  }

  SymbolicSummary s;
  s.name = c.name;
  s.inputs = c.inputs;
  s.outputs = c.outputs;
  s.vars = c.vars;
  Domain dom = s.domain();
  const Env& exit = envs[c.exit];
  for (const auto& p : c.outputs) {
    GuardedDef d{p.name, TargetKind::Output, p.type, {}};
    d.cases = lift_cases(resolve(exit, c.output_values.at(p.name)), dom, solver, case_cap);
    s.defs[p.name] = std::move(d);
  }
  for (const auto& v : c.vars) {
    GuardedDef d{v.name, TargetKind::Var, v.type, {}};
    d.cases = lift_cases(exit.at(v.name), dom, solver, case_cap);
    s.defs[v.name] = std::move(d);
  }
  recompute_deps(s);
  return s;
}

SymbolicSummary rename_ports(const SymbolicSummary& s, const std::map<std::string, std::string>& inputs,
                             const std::map<std::string, std::string>& outputs) {
  auto rn = [](const std::map<std::string, std::string>& m, const std::string& n) {
    auto it = m.find(n);
    return it == m.end() ? n : it->second;
  };
  auto fix = [&](const Expr& e) {
    return substitute(e, [&](const Expr& leaf) -> std::optional<Expr> {
      if (leaf.op() != Op::Input) return std::nullopt;
      return Expr::input(rn(inputs, leaf.name()), leaf.sort());
    });
  };
  SymbolicSummary r;
  r.name = s.name;
  for (auto p : s.inputs) {
    p.name = rn(inputs, p.name);
    r.inputs.push_back(p);
  }
  for (auto p : s.outputs) {
    p.name = rn(outputs, p.name);
    r.outputs.push_back(p);
  }
  r.vars = s.vars;
  for (const auto& [t, d] : s.defs) {
    GuardedDef nd = d;
    if (d.kind == TargetKind::Output) nd.target = rn(outputs, t);
    for (auto& c : nd.cases) c = {normalize(fix(c.guard)), normalize(fix(c.value))};
    r.defs[nd.target] = std::move(nd);
  }
  recompute_deps(r);
  return r;
}

std::set<std::string> var_closure(const SymbolicSummary& s, const std::set<std::string>& targets) {
  std::set<std::string> seen;
  std::vector<std::string> work;
  for (const auto& t : targets) {
    if (auto it = s.deps.find(t); it != s.deps.end()) work.insert(work.end(), it->second.vars.begin(), it->second.vars.end());
  }
  while (!work.empty()) {
    std::string v = work.back();
    work.pop_back();
    if (!seen.insert(v).second) continue;
    if (auto it = s.deps.find(v); it != s.deps.end()) work.insert(work.end(), it->second.vars.begin(), it->second.vars.end());
  }
  return seen;
}

SymbolicSummary slice(const SymbolicSummary& s, const std::set<std::string>& keep) {
  SymbolicSummary r;
  r.name = s.name;
  std::set<std::string> outs;
  for (const auto& p : s.outputs) {
    if (keep.count(p.name)) {
      r.outputs.push_back(p);
      outs.insert(p.name);
    }
  }
  std::set<std::string> vars = var_closure(s, outs);
  for (const auto& v : s.vars) {
    if (vars.count(v.name)) r.vars.push_back(v);
  }
  std::set<std::string> used_inputs;
  for (const auto& [t, d] : s.defs) {
    if (!outs.count(t) && !(d.kind == TargetKind::Var && vars.count(t))) continue;
    r.defs[t] = d;
    used_inputs.insert(s.deps.at(t).inputs.begin(), s.deps.at(t).inputs.end());
  }
  for (const auto& p : s.inputs) {
    if (used_inputs.count(p.name)) r.inputs.push_back(p);
  }
  recompute_deps(r);
  return r;
}

std::string clone_input_name(const std::string& var) { return "clone:" + var; }

namespace {

std::vector<Case> canonical(const GuardedDef& d) {
  std::vector<Case> cs = d.cases;
  std::sort(cs.begin(), cs.end(), [](const Case& x, const Case& y) {
    int c = compare(x.value, y.value);
    return c != 0 ? c < 0 : x.guard < y.guard;
  });
  return cs;
}

bool refs_within(const Deps& d, const std::set<std::string>& paired) {
  return std::all_of(d.vars.begin(), d.vars.end(), [&](const std::string& v) { return paired.count(v) > 0; });
}

SymbolicSummary replace_vars(const SymbolicSummary& s, const std::set<std::string>& cloned) {
  SymbolicSummary r = s;
  r.vars.clear();
  for (const auto& v : s.vars) {
    if (cloned.count(v.name)) {
      r.inputs.push_back(Port{clone_input_name(v.name), Direction::In, v.type});
      r.defs.erase(v.name);
    } else {
      r.vars.push_back(v);
    }
  }
  auto fix = [&](const Expr& e) {
    return substitute(e, [&](const Expr& leaf) -> std::optional<Expr> {
      if (leaf.op() != Op::Var || !cloned.count(leaf.name())) return std::nullopt;
      return Expr::input(clone_input_name(leaf.name()), leaf.sort());
    });
  };
  for (auto& [t, d] : r.defs) {
    for (auto& c : d.cases) c = {normalize(fix(c.guard)), normalize(fix(c.value))};
  }
  recompute_deps(r);
  return r;
}

}  // namespace

CloneResult detect_and_prune_clones(const SymbolicSummary& a, const SymbolicSummary& b) {
  std::set<std::string> paired;
  for (const auto& v : a.vars) {
    const StateVar* w = b.find_var(v.name);
    if (w && w->type == v.type && w->init == v.init) paired.insert(v.name);
  }
  auto same = [&](const std::string& ta, const std::string& tb) {
    auto ia = a.defs.find(ta);
    auto ib = b.defs.find(tb);
    if (ia == a.defs.end() || ib == b.defs.end()) return false;
    return refs_within(a.deps.at(ta), paired) && refs_within(b.deps.at(tb), paired) &&
           ia->second.type.same_kind(ib->second.type) && canonical(ia->second) == canonical(ib->second);
  };
  for (bool changed = true; changed;) {
    changed = false;
    for (auto it = paired.begin(); it != paired.end();) {
      if (same(*it, *it)) {
        ++it;
      } else {
        it = paired.erase(it);
        changed = true;
      }
    }
  }

  CloneResult r;
  for (const auto& v : paired) r.pairs.insert({v, v});
  std::set<std::string> keep;
  for (const auto& p : b.outputs) {
    if (a.defs.count(p.name) && same(p.name, p.name)) {
      r.pruned_outputs.insert(p.name);
      r.pairs.insert({p.name, p.name});
    } else {
      keep.insert(p.name);
    }
  }
  r.a = slice(replace_vars(a, paired), keep);
  r.b = slice(replace_vars(b, paired), keep);
  for (const auto* s : {&r.a, &r.b}) {
    for (const auto& p : s->inputs) {
      if (p.name.rfind("clone:", 0) == 0) r.fresh_inputs.insert(p.name);
    }
  }
  return r;
}

std::string summary_to_text(const SymbolicSummary& s) {
  std::ostringstream os;
  os << "summary " << s.name << "\n";
  os << "inputs:";
  for (const auto& p : s.inputs) os << " " << p.name << ":" << p.type.to_string();
  os << "\nvars:";
  for (const auto& v : s.vars) os << " " << v.name << ":" << v.type.to_string() << "=" << v.type.format_value(v.init);
  os << "\n";
  auto dump = [&](const GuardedDef& d) {
    os << (d.kind == TargetKind::Output ? "out " : "var ") << d.target << " : " << d.type.to_string() << "\n";
    for (const auto& c : d.cases) os << "  [" << to_string(c.guard) << "] " << to_string(c.value) << "\n";
    const Deps& dp = s.deps.at(d.target);
    os << "  deps inputs {";
    for (auto it = dp.inputs.begin(); it != dp.inputs.end(); ++it) os << (it == dp.inputs.begin() ? "" : ", ") << *it;
    os << "} vars {";
    for (auto it = dp.vars.begin(); it != dp.vars.end(); ++it) os << (it == dp.vars.begin() ? "" : ", ") << *it;
    os << "}\n";
  };
  for (const auto& p : s.outputs) {
    if (auto it = s.defs.find(p.name); it != s.defs.end()) dump(it->second);
  }
  for (const auto& v : s.vars) {
    if (auto it = s.defs.find(v.name); it != s.defs.end()) dump(it->second);
  }
  return os.str();
}

}  // namespace dfc
