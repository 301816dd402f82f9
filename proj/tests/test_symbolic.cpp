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

#include <gtest/gtest.h>

#include "dfc/cfg.hpp"
#include "dfc/efa.hpp"
#include "dfc/error.hpp"
#include "dfc/interp.hpp"
#include "dfc/symbolic.hpp"
#include "dfc/unfold.hpp"
#include "support.hpp"

namespace dfc {
namespace {

SymbolicSummary summarize(const FlatModel& m, const Solver& solver) {
  return substitute(extract_cfg(m, sorted_order(m)), solver);
}

LeafLookup lookup_of(const Valuation& in, const Valuation& state) {
  return [&](Op op, const std::string& n) { return op == Op::Input ? in.at(n) : state.at(n); };
}

// Exactly one case of `def` holds; returns its value.
Value select_case(const GuardedDef& def, const LeafLookup& look) {
  std::optional<Value> out;
  for (const auto& c : def.cases) {
    if (evaluate(c.guard, look) == 0) continue;
    EXPECT_FALSE(out) << def.target << " has overlapping cases";
    out = evaluate(c.value, look);
  }
  EXPECT_TRUE(out) << def.target << " has no enabled case";
  return out.value_or(0);
}

void check_summary(const FlatModel& m) {
  Solver solver;
  SymbolicSummary s = summarize(m, solver);
  Interpreter interp(m);
  for (const auto& st : test::all_valuations(test::state_domain(m))) {
    for (const auto& in : test::all_valuations(test::input_domain(m))) {
      StepResult want = interp.step(SimState{st}, in);
      auto look = lookup_of(in, st);
      for (const auto& [o, v] : want.outputs) EXPECT_EQ(select_case(s.defs.at(o), look), v) << m.name << " " << o;
      for (const auto& [n, v] : want.next.values) {
        auto it = s.defs.find(n);
        EXPECT_EQ(it == s.defs.end() ? st.at(n) : select_case(it->second, look), v) << m.name << " " << n;
      }
    }
  }
}

TEST(Substitute, FlipFlopCases) {
  Solver solver;
  SymbolicSummary s = summarize(test::load_fixture("flipflop.dfm"), solver);
  const GuardedDef& q = s.defs.at("Q");
  ASSERT_EQ(q.cases.size(), 3u);
  EXPECT_EQ(to_string(q.cases[0].guard), "S");
  EXPECT_EQ(s.deps.at("Q"), (Deps{{"R", "S"}, {"UnitDelay_internal"}}));
}

TEST(Substitute, AgreesWithTheInterpreterOnFixtures) {
  for (const auto& [name, opts] : test::model_fixtures()) check_summary(test::load_fixture(name, opts));
}

TEST(Substitute, AgreesWithTheInterpreterOnRandomModels) {
  for (std::uint64_t seed = 1; seed <= 80; ++seed) {
    auto p = test::random_pair(seed);
    check_summary(test::load_text(p.a));
    check_summary(test::load_text(p.b));
  }
}

TEST(Substitute, CaseCapRaisesPathExplosion) {
  Solver solver;
  Cfg c = extract_cfg(test::load_fixture("flipflop.dfm"), sorted_order(test::load_fixture("flipflop.dfm")));
  EXPECT_EQ(test::error_kind([&] { substitute(c, solver, 2); }), ErrorKind::PathExplosion);
  EXPECT_NO_THROW(substitute(c, solver, 3));
}

TEST(LiftCases, PartitionsAndPreservesValue) {
  Solver solver;
  std::mt19937_64 rng(17);
  Domain dom{{"X", DataType::integer(-3, 3)}, {"Y", DataType::integer(0, 2)}, {"Z", DataType::integer(-1, 1)},
             {"P", DataType::boolean()}, {"Q", DataType::boolean()}};
  int checked = 0;
  for (int k = 0; k < 200; ++k) {
    Expr e = test::random_expr(rng, 3, Sort::Int);
    std::vector<Case> cases;
    try {
      cases = lift_cases(e, dom, solver);
    } catch (const Error&) {
      continue;
    }
    for (const auto& c : cases) EXPECT_FALSE(c.value.op() == Op::Ite) << to_string(e);
    for (const auto& w : test::all_valuations(dom)) {
      LeafLookup look = [&](Op, const std::string& n) { return w.at(n); };
      auto want = try_evaluate(e, look);
      if (!want) continue;
      int enabled = 0;
      for (const auto& c : cases) {
        auto g = try_evaluate(c.guard, look);
        if (!g || *g == 0) continue;
        ++enabled;
        EXPECT_EQ(try_evaluate(c.value, look), want) << to_string(e);
      }
      EXPECT_EQ(enabled, 1) << to_string(e);
    }
    ++checked;
  }
  EXPECT_GT(checked, 100);
}

TEST(Clones, SelfComparisonPrunesEveryOutput) {
  Solver solver;
  for (const auto& [name, opts] : test::model_fixtures()) {
    FlatModel m = test::load_fixture(name, opts);
    PortMapping pm = derive_port_mapping(m, m);
    SymbolicSummary a = summarize(m, solver);
    SymbolicSummary b = rename_ports(summarize(m, solver), pm.inputs, pm.outputs);
    CloneResult r = detect_and_prune_clones(a, b);
    std::set<std::string> outs;
    for (const auto& p : m.outputs) outs.insert(p.name);
    EXPECT_EQ(r.pruned_outputs, outs) << name;
  }
}

TEST(Clones, DifferingDefinitionIsKept) {
  Solver solver;
  FlatModel a = test::load_fixture("counter_ge3.dfm");
  FlatModel b = test::load_fixture("counter_ge4.dfm");
  PortMapping pm = derive_port_mapping(a, b);
  CloneResult r = detect_and_prune_clones(summarize(a, solver), rename_ports(summarize(b, solver), pm.inputs, pm.outputs));
  EXPECT_TRUE(r.pruned_outputs.empty());
  EXPECT_EQ(r.fresh_inputs, std::set<std::string>{clone_input_name("Count_internal")});
  EXPECT_TRUE(r.a.inputs.size() > a.inputs.size());
}

TEST(Efa, FlipFlopAutomaton) {
  Solver solver;
  IoEfa e = build_efa(summarize(test::load_fixture("flipflop.dfm"), solver), solver);
  EXPECT_EQ(e.transitions.size(), 3u);
  EXPECT_TRUE(is_deterministic(e, solver));
  for (const auto& t : e.transitions) EXPECT_EQ(t.outputs.count("Q"), 1u);
}

// Steps an automaton; exactly one transition must be enabled.
std::pair<Valuation, Valuation> efa_step(const IoEfa& e, const Valuation& state, const Valuation& in) {
  auto look = lookup_of(in, state);
  std::pair<Valuation, Valuation> r{{}, state};
  int enabled = 0;
  for (const auto& t : e.transitions) {
    if (evaluate(t.guard, look) == 0) continue;
    ++enabled;
    for (const auto& [o, x] : t.outputs) r.first[o] = evaluate(x, look);
    for (const auto& [v, x] : t.updates) r.second[v] = evaluate(x, look);
  }
  EXPECT_EQ(enabled, 1) << e.name;
  return r;
}

TEST(Efa, SplitAutomataProjectTheMonolithicOne) {
  Solver solver;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    FlatModel m = test::load_text(test::random_pair(seed).a);
    SymbolicSummary s = summarize(m, solver);
    IoEfa whole = build_efa(s, solver);
    auto parts = split_by_output(whole, s.deps);
    ASSERT_EQ(parts.size(), m.outputs.size());
    std::mt19937_64 rng(seed);
    auto inputs = test::all_valuations(test::input_domain(m));
    for (const auto& part : parts) {
      ASSERT_EQ(part.outputs.size(), 1u);
      EXPECT_TRUE(is_deterministic(part, solver));
      Valuation sw, sp;
      for (const auto& v : whole.vars) sw[v.name] = v.init;
      for (const auto& v : part.vars) sp[v.name] = v.init;
      for (int k = 0; k < 12; ++k) {
        const Valuation& in = inputs[rng() % inputs.size()];
        auto [ow, nw] = efa_step(whole, sw, in);
        auto [op, np] = efa_step(part, sp, in);
        const std::string& o = part.outputs[0].name;
        EXPECT_EQ(op.at(o), ow.at(o)) << "seed " << seed;
        for (const auto& [v, x] : np) EXPECT_EQ(x, nw.at(v));
        sw = nw;
        sp = np;
      }
    }
  }
}

TEST(NarrowRanges, BoundsFromConjunctions) {
  Expr u = Expr::input("u", Sort::Int);
  Expr v = Expr::var("v", Sort::Int);
  Domain dom{{"u", DataType::integer(0, 100)}, {"v", DataType::integer(0, 9)}};
  Expr g = normalize(make_and({Expr::binary(Op::Le, Expr::integer(10), u), Expr::binary(Op::Lt, u, Expr::integer(20)),
                     Expr::binary(Op::Ge, v, Expr::integer(3))}));
  auto r = narrow_ranges(g, dom);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->at("u"), DataType::integer(10, 19));
  EXPECT_EQ(r->at("v"), DataType::integer(3, 9));
  EXPECT_FALSE(narrow_ranges(make_and(Expr::binary(Op::Lt, u, Expr::integer(0)), Expr::boolean(true)), dom));
  auto loose =
      narrow_ranges(normalize(make_or(Expr::binary(Op::Lt, u, Expr::integer(5)), Expr::binary(Op::Gt, v, Expr::integer(5)))), dom);
  ASSERT_TRUE(loose);
  EXPECT_EQ(loose->at("u"), dom.at("u"));
}

TEST(Unfold, FlipFlopHasTwoStates) {
  Solver solver;
  IoTs ts = test::model_ts(test::load_fixture("flipflop.dfm"), solver);
  EXPECT_EQ(ts.states.size(), 2u);
  EXPECT_EQ(ts.labels[ts.initial], "A0");
  std::string dot = ts_to_dot(ts);
  EXPECT_NE(dot.find("digraph"), std::string::npos);
}

TEST(Unfold, StateBudget) {
  Solver solver;
  FlatModel m = test::load_fixture("toggles3.dfm");
  IoEfa e = build_efa(summarize(m, solver), solver);
  ImageMap img = compute_image(e, solver);
  EXPECT_EQ(test::error_kind([&] { unfold_to_ts(e, img, solver, 7); }), ErrorKind::StateBudgetExceeded);
  EXPECT_EQ(unfold_to_ts(e, img, solver, 8).states.size(), 8u);
}

TEST(Unfold, TransitionSystemMatchesTheInterpreter) {
  Solver solver;
  std::vector<FlatModel> models;
  for (const auto& [name, opts] : test::model_fixtures()) models.push_back(test::load_fixture(name, opts));
  for (std::uint64_t seed = 1; seed <= 40; ++seed) models.push_back(test::load_text(test::random_pair(seed).b));
  std::mt19937_64 rng(3);
  for (const auto& m : models) {
    IoTs ts = test::model_ts(m, solver);
    auto inputs = test::all_valuations(test::input_domain(m));
    for (int run = 0; run < 8; ++run) {
      std::vector<Valuation> seq;
      for (int k = 0; k < 10; ++k) seq.push_back(inputs[rng() % inputs.size()]);
      Trace t = Interpreter(m).run(seq);
      auto got = simulate_ts(ts, seq);
      ASSERT_EQ(got.size(), t.steps.size()) << m.name;
      for (std::size_t k = 0; k < got.size(); ++k) EXPECT_EQ(got[k], t.steps[k].outputs) << m.name << " step " << k;
    }
  }
}

}  // namespace
}  // namespace dfc
