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

#include "dfc/simcheck.hpp"

#include <deque>
#include <map>

namespace dfc {

const char* to_string(FailureReason r) {
  return r == FailureReason::OutputMismatch ? "output-mismatch" : "uncovered-transition";
}

namespace {

// Constraint restricting inputs to a's own ranges where `dom` is wider.
Expr own_range(const IoTs& a, const Domain& dom) {
  std::vector<Expr> terms;
  for (const auto& p : a.inputs) {
    auto it = dom.find(p.name);
    if (it == dom.end() || p.type.is_bool()) continue;
    Expr x = Expr::input(p.name, Sort::Int);
    if (it->second.lo() < p.type.lo()) terms.push_back(Expr::binary(Op::Le, Expr::integer(p.type.lo()), x));
    if (it->second.hi() > p.type.hi()) terms.push_back(Expr::binary(Op::Le, x, Expr::integer(p.type.hi())));
  }
  return normalize(make_and(terms));
}

}  // namespace

Cover transitions_covering(const IoTs& a, int state_a, const TsTransition& tb, const Domain& dom, const Solver& solver) {
  Expr range = own_range(a, dom);
  std::vector<Expr> guards;
  for (const TsTransition* ta : a.out(state_a)) guards.push_back(normalize(make_and(ta->guard, range)));
  return solver.minimal_cover(tb.guard, guards, dom);
}

SimVerdict simulates(const IoTs& a, const IoTs& b, const Domain& dom, const Solver& solver) {
  struct Node {
    int sa;
    int sb;
    int parent;
    Witness input;
  };
  Expr range = own_range(a, dom);
  std::vector<Node> nodes{{a.initial, b.initial, -1, {}}};
  std::map<std::pair<int, int>, int> seen{{{a.initial, b.initial}, 0}};
  std::deque<int> queue{0};
  SimVerdict v;

  auto fail = [&](int k, FailureReason reason, std::string output, Witness w) {
    SimFailure f;
    f.reason = reason;
    f.state_a = nodes[k].sa;
    f.state_b = nodes[k].sb;
    f.output = std::move(output);
    std::vector<int> chain;
    for (int i = k; i >= 0; i = nodes[i].parent) chain.push_back(i);
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      if (nodes[*it].parent >= 0) f.inputs.push_back(nodes[*it].input);
      f.pairs.emplace_back(nodes[*it].sa, nodes[*it].sb);
    }
    f.inputs.push_back(w);
    f.witness = std::move(w);
    v.simulated = false;
    v.failure = std::move(f);
    for (const auto& [p, i] : seen) v.visited.insert(p);
    return v;
  };

  while (!queue.empty()) {
    int k = queue.front();
    queue.pop_front();
    int sa = nodes[k].sa;
    int sb = nodes[k].sb;
    for (const auto& o : b.outputs) {
      Expr differ = make_and(range, Expr::binary(Op::Ne, a.output_fn[sa].at(o.name), b.output_fn[sb].at(o.name)));
      if (auto w = solver.sat_witness(normalize(differ), dom)) return fail(k, FailureReason::OutputMismatch, o.name, *w);
    }
    auto a_out = a.out(sa);
    for (const TsTransition* tb : b.out(sb)) {
      Cover c = transitions_covering(a, sa, *tb, dom, solver);
      if (c.uncovered) return fail(k, FailureReason::UncoveredTransition, "", *c.uncovered);
      for (std::size_t i = 0; i < c.indices->size(); ++i) {
        std::pair<int, int> next{a_out[(*c.indices)[i]]->to, tb->to};
        if (seen.count(next)) continue;
        seen[next] = static_cast<int>(nodes.size());
        nodes.push_back({next.first, next.second, k, c.witnesses[i]});
        queue.push_back(static_cast<int>(nodes.size()) - 1);
      }
    }
  }
  v.simulated = true;
  for (const auto& [p, i] : seen) v.visited.insert(p);
  return v;
}

IoTs bind_inputs(const IoTs& ts, const Valuation& values) {
  IoTs r = ts;
  r.inputs.clear();
  for (const auto& p : ts.inputs) {
    if (!values.count(p.name)) r.inputs.push_back(p);
  }
  for (auto& fn : r.output_fn) {
    for (auto& [o, e] : fn) e = normalize(dfc::bind(e, values));
  }
  r.transitions.clear();
  for (const auto& t : ts.transitions) {
    Expr g = normalize(dfc::bind(t.guard, values));
    if (!g.is_false()) r.transitions.push_back({t.from, t.to, g});
  }
  return r;
}

Expr necessary_condition(const std::vector<std::pair<const IoTs*, const IoTs*>>& pairs) {
  std::vector<Expr> all;
  for (const auto& [a, b] : pairs) {
    for (std::size_t sb = 0; sb < b->states.size(); ++sb) {
      std::vector<Expr> some;
      for (std::size_t sa = 0; sa < a->states.size(); ++sa) {
        std::vector<Expr> eq;
        for (const auto& o : b->outputs) eq.push_back(make_eq(a->output_fn[sa].at(o.name), b->output_fn[sb].at(o.name)));
        some.push_back(make_and(eq));
      }
      all.push_back(make_or(some));
    }
  }
  return normalize(make_and(all));
}

FixResult fix_free_ports(const std::vector<std::pair<const IoTs*, const IoTs*>>& pairs, const Domain& extra,
                         const Domain& dom, const Solver& solver, int max_iterations) {
  FixResult r;
  Expr cond = necessary_condition(pairs);
  std::set<Witness> excluded;
  Domain univ;
  for (const auto& [n, t] : dom) {
    if (!extra.count(n)) univ[n] = t;
  }
  while (true) {
    auto c = solver.exists_forall(extra, univ, cond, excluded);
    if (!c) return r;
    if (r.iterations >= max_iterations) {
      throw Error(ErrorKind::IterationCapExceeded, "no verified constants after " + std::to_string(max_iterations) +
                                                       " candidates; search inconclusive");
    }
    ++r.iterations;
    bool ok = true;
    for (const auto& [a, b] : pairs) {
      if (!simulates(bind_inputs(*a, *c), *b, univ, solver).simulated) {
        ok = false;
        break;
      }
    }
    if (ok) {
      r.constants = c;
      return r;
    }
    r.rejected.push_back(*c);
    excluded.insert(*c);
  }
}

}  // namespace dfc
