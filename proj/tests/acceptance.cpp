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

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>

#include "dfc/pipeline.hpp"
#include "dfc/simcheck.hpp"
#include "support.hpp"

using namespace dfc;
using namespace dfc::test;

namespace {

struct Outcome {
  bool pass = false;
  bool skipped = false;
  std::string detail;
};

Outcome fail(std::string why) { return {false, false, std::move(why)}; }

Expr in_u(const char* n = "u") { return Expr::input(n, Sort::Int); }
Expr lit(Value v) { return Expr::integer(v); }
Expr lt(Expr a, Expr b) { return Expr::binary(Op::Lt, std::move(a), std::move(b)); }
Expr le(Expr a, Expr b) { return Expr::binary(Op::Le, std::move(a), std::move(b)); }

// Criterion 1: image computation and unfolding of the two-transition automaton.
Outcome image_example() {
  Solver solver;
  IoEfa e;
  e.name = "A";
  e.vars = {{"d1", DataType::integer(2, 100), 2}};
  e.inputs = {{"u1", Direction::In, DataType::integer(0, 249)}};
  e.outputs = {{"y1", Direction::Out, DataType::unbounded_integer()}};
  Expr u1 = Expr::input("u1", Sort::Int);
  Expr d1 = Expr::var("d1", Sort::Int);
  Expr g1 = normalize(make_and(lt(u1, d1), le(d1, lit(5))));
  Expr g2 = normalize(make_or(Expr::binary(Op::Ge, u1, d1), Expr::binary(Op::Gt, d1, lit(5))));
  e.transitions.push_back({g1,
                           {{"y1", Expr::binary(Op::Add, Expr::binary(Op::Mul, lit(5), u1), d1)}},
                           {{"d1", Expr::binary(Op::Add, Expr::binary(Op::Mul, lit(2), d1), u1)}}});
  e.transitions.push_back({g2, {{"y1", Expr::binary(Op::Mul, lit(3), u1)}}, {}});
  ImageMap img = compute_image(e, solver);
  std::map<Vec, std::set<Vec>> expected{
      {{2}, {{4}, {5}}},
      {{3}, {{6}, {7}, {8}}},
      {{4}, {{8}, {9}, {10}, {11}}},
      {{5}, {{10}, {11}, {12}, {13}, {14}}},
  };
  if (img.per_transition.at(0).map != expected) return fail("image map differs");
  if (!img.per_transition.at(1).map.empty()) return fail("identity transition has an image");
  IoTs ts = unfold_to_ts(e, img, solver);
  std::set<Value> states;
  for (const auto& s : ts.states) states.insert(s.at(0));
  std::set<Value> want{2, 4, 5, 8, 9, 10, 11, 12, 13, 14};
  if (states != want || ts.states.size() != 10) return fail("reachable states differ");
  return {true, false, "image map exact, 10 reachable states"};
}

// Criterion 2: FlipFlop pipeline and exhaustive oracle agreement.
Outcome flipflop() {
  Solver solver;
  FlatModel ff = load_fixture("flipflop.dfm");
  IoTs ts = model_ts(ff, solver);
  if (ts.states.size() != 2) return fail("expected 2 states, got " + std::to_string(ts.states.size()));
  CompatReport r = check_compatibility(ff, ff, derive_port_mapping(ff, ff));
  if (r.overall != Overall::Full) return fail(std::string("self-check verdict ") + to_string(r.overall));
  Interpreter interp(ff);
  std::vector<Valuation> letters;
  for (Value s = 0; s <= 1; ++s) {
    for (Value rr = 0; rr <= 1; ++rr) letters.push_back({{"S", s}, {"R", rr}});
  }
  int sequences = 0;
  for (int code = 0; code < 4096; ++code) {
    std::vector<Valuation> in;
    for (int k = 0, c = code; k < 6; ++k, c /= 4) in.push_back(letters[c % 4]);
    Trace t = interp.run(in);
    auto ys = simulate_ts(ts, in);
    for (int k = 0; k < 6; ++k) {
      if (t.steps[k].outputs != ys[k]) return fail("oracle disagreement on sequence " + std::to_string(code));
    }
    ++sequences;
  }
  return {true, false, "2 states, Full, " + std::to_string(sequences) + " sequences agree"};
}

// Criterion 3: simulation agrees with bounded trace containment on random pairs.
Outcome oracle_property() {
  Solver solver;
  int pairs = 0, checks = 0, holds = 0;
  for (std::uint64_t seed = 1; pairs < 500; ++seed) {
    RandomPair rp = random_pair(seed);
    FlatModel a = load_text(rp.a);
    FlatModel b = load_text(rp.b);
    IoTs ta = model_ts(a, solver, "A");
    IoTs tb = model_ts(b, solver, "B");
    Domain da = input_domain(a);
    Domain db = input_domain(b);
    int depth = std::max<int>(6, static_cast<int>(ta.states.size() * tb.states.size()));
    bool back = simulates(ta, tb, db, solver).simulated;
    bool up = simulates(tb, ta, da, solver).simulated;
    bool back_oracle = traces_contained(a, b, db, depth);
    bool up_oracle = traces_contained(b, a, da, depth);
    if (back != back_oracle || up != up_oracle) {
      return fail("seed " + std::to_string(seed) + " disagrees:\n" + rp.a + "---\n" + rp.b);
    }
    CompatReport r = check_compatibility(a, b, derive_port_mapping(a, b));
    if (r.backward.compatible != back || r.upward.compatible != up) {
      return fail("pipeline verdict differs from simulation on seed " + std::to_string(seed));
    }
    checks += 2;
    holds += back + up;
    ++pairs;
  }
  return {true, false,
          std::to_string(pairs) + " pairs, " + std::to_string(checks) + " checks agree (" + std::to_string(holds) +
              " simulated, " + std::to_string(checks - holds) + " refuted)"};
}

IoTs branch_ts(const std::string& name, const std::vector<std::pair<Expr, Value>>& branches) {
  IoTs ts;
  ts.name = name;
  ts.inputs = {{"u", Direction::In, DataType::integer(0, 250)}};
  ts.outputs = {{"y", Direction::Out, DataType::integer(0, 2)}};
  ts.var_names = {"s"};
  ts.states.push_back({0});
  ts.labels.push_back(name + "0");
  ts.output_fn.push_back({{"y", lit(0)}});
  for (std::size_t i = 0; i < branches.size(); ++i) {
    int s = static_cast<int>(i) + 1;
    ts.states.push_back({s});
    ts.labels.push_back(name + std::to_string(s));
    ts.output_fn.push_back({{"y", lit(branches[i].second)}});
    ts.transitions.push_back({0, s, normalize(branches[i].first)});
    ts.transitions.push_back({s, s, Expr::boolean(true)});
  }
  return ts;
}

// Criterion 4: covering sets and the uncovered witness of the reverse check.
Outcome covering_sets() {
  Solver solver;
  Expr u = in_u();
  auto range = [&](Value lo, Value hi) { return make_and(le(lit(lo), u), lt(u, lit(hi))); };
  IoTs a = branch_ts("a", {{lt(u, lit(20)), 1}, {range(20, 100), 1}, {range(100, 180), 2}, {le(lit(180), u), 2}});
  IoTs b = branch_ts("b", {{range(10, 30), 1}, {range(150, 251), 2}, {make_or(lt(u, lit(10)), range(30, 70)), 1}});
  Domain dom{{"u", DataType::integer(0, 250)}};
  std::vector<std::set<int>> want{{1, 2}, {3, 4}, {1, 2}};
  auto a_out = a.out(0);
  for (std::size_t i = 0; i < want.size(); ++i) {
    Cover c = transitions_covering(a, 0, *b.out(0)[i], dom, solver);
    if (!c.indices) return fail("transition b0->b" + std::to_string(i + 1) + " not covered");
    std::set<int> got;
    for (auto k : *c.indices) got.insert(a_out[k]->to);
    if (got != want[i]) return fail("covering set of b0->b" + std::to_string(i + 1) + " differs");
  }
  if (!simulates(a, b, dom, solver).simulated) return fail("a does not simulate b");
  SimVerdict rev = simulates(b, a, dom, solver);
  if (rev.simulated || !rev.failure) return fail("b simulates a");
  const SimFailure& f = *rev.failure;
  if (f.reason != FailureReason::UncoveredTransition || f.witness.at("u") != 70) {
    return fail("reverse check failed differently");
  }
  Cover c = transitions_covering(b, 0, *a_out[1], dom, solver);
  if (!c.uncovered || c.uncovered->at("u") != 70) return fail("a0->a2 is covered");
  return {true, false, "covering sets {a1,a2},{a3,a4},{a1,a2}; reverse fails for u = 70"};
}

// Criterion 5: fixing the extra port of the cruise-control pair.
Outcome free_port() {
  Solver solver;
  FlatModel a = load_fixture("cc_v4.dfm");
  FlatModel b = load_fixture("cc_v3.dfm");
  IoTs ta = model_ts(a, solver, "A");
  IoTs tb = model_ts(b, solver, "B");
  Domain extra{{"F", DataType::boolean()}};
  Domain dom = input_domain(b);
  dom["F"] = DataType::boolean();
  FixResult fr = fix_free_ports({{&ta, &tb}}, extra, dom, solver, 16);
  if (!fr.constants || fr.constants->at("F") != 0) return fail("fix_free_ports did not return F = false");
  CompatReport r = check_compatibility(a, b, derive_port_mapping(a, b));
  if (!r.backward.compatible || r.backward.conditions != std::map<std::string, Value>{{"F", 0}}) {
    return fail("report is not backward compatible under F = false");
  }
  Domain fixed = input_domain(b);
  fixed["F"] = DataType::integer(0, 0);
  if (!traces_contained(a, b, fixed, 8)) return fail("oracle rejects F = false");
  return {true, false, "F = false, backward compatible, confirmed by replay"};
}

// Criterion 6: conditional verdict of the limiter pair.
Outcome limiter() {
  FlatModel a = load_fixture("limiter_sign.dfm");
  FlatModel b = load_fixture("limiter_plain.dfm");
  CompatReport r = check_compatibility(a, b, derive_port_mapping(a, b));
  if (r.overall != Overall::BackwardOnly) return fail(std::string("verdict ") + to_string(r.overall));
  if (r.backward.conditions != std::map<std::string, Value>{{"Sign_b", 0}}) return fail("condition differs");
  if (r.upward.compatible) return fail("upward compatible");
  Domain fixed = input_domain(b);
  fixed["Sign_b"] = DataType::integer(0, 0);
  if (!traces_contained(a, b, fixed, 20)) return fail("oracle rejects Sign_b = false");
  if (traces_contained(b, a, input_domain(a), 20)) return fail("oracle accepts upward");
  return {true, false, "backward under Sign_b = false, not upward"};
}

struct PairCase {
  std::string name;
  FlatModel a;
  FlatModel b;
};

std::vector<PairCase> fixture_pairs() {
  std::vector<PairCase> out;
  auto add = [&](const std::string& x, const std::string& y, FlattenOptions o = {}) {
    out.push_back({x + " vs " + y, load_fixture(x + ".dfm", o), load_fixture(y + ".dfm", o)});
  };
  FlattenOptions sched;
  sched.order = DataStoreOrder::Schedule;
  FlattenOptions global = sched;
  global.datastore = DataStoreMode::Global;
  add("flipflop", "flipflop");
  add("flipflop", "flipflop_reset");
  add("flipflop_reset", "flipflop");
  add("nested_flipflop", "flipflop");
  add("nested_flipflop", "flipflop_reset");
  add("limiter_sign", "limiter_plain");
  add("limiter_plain", "limiter_plain");
  add("cc_v4", "cc_v3");
  add("cc_v3", "cc_v3");
  add("toggles3", "toggles3");
  add("counter_ge3", "counter_ge4");
  add("counter_ge4", "counter_ge3");
  add("acc_store", "acc_delay", sched);
  add("acc_delay", "acc_store", sched);
  add("acc_store", "acc_delay", global);
  add("sample_enabled", "sample_switch");
  add("sample_enabled", "sample_switch_bug");
  add("sample_switch_bug", "sample_enabled");
  for (std::uint64_t seed = 1000; seed < 1030; ++seed) {
    RandomPair rp = random_pair(seed);
    out.push_back({"random " + std::to_string(seed), load_text(rp.a), load_text(rp.b)});
  }
  return out;
}

const std::vector<PairCase>& pairs() {
  static const std::vector<PairCase> p = fixture_pairs();
  return p;
}

CheckConfig config(bool pruning, bool split) {
  CheckConfig c;
  c.clone_pruning = pruning;
  c.output_split = split;
  return c;
}

// Criterion 7: verdicts independent of clone pruning and output splitting.
Outcome optimization_soundness() {
  for (const auto& pc : pairs()) {
    PortMapping m = derive_port_mapping(pc.a, pc.b);
    std::optional<CompatReport> ref;
    for (bool pruning : {true, false}) {
      for (bool split : {true, false}) {
        CompatReport r = check_compatibility(pc.a, pc.b, m, config(pruning, split));
        if (!ref) {
          ref = r;
          continue;
        }
        if (r.overall != ref->overall || r.backward.compatible != ref->backward.compatible ||
            r.upward.compatible != ref->upward.compatible || r.backward.conditions != ref->backward.conditions) {
          return fail(pc.name + ": verdict depends on configuration");
        }
      }
    }
  }
  return {true, false, std::to_string(pairs().size()) + " pairs x 4 configurations agree"};
}

bool outside(const Valuation& in, const std::vector<Port>& ports, const PortMapping* m) {
  for (const auto& p : ports) {
    std::string name = m ? m->inputs.at(p.name) : p.name;
    auto it = in.find(name);
    if (it != in.end() && !p.type.contains(it->second)) return true;
  }
  return false;
}

// Criterion 8: every refuted direction ships a replayable counterexample.
Outcome counterexamples() {
  int incompatible = 0, traces = 0, range_traces = 0;
  for (const auto& pc : pairs()) {
    PortMapping m = derive_port_mapping(pc.a, pc.b);
    for (bool pruning : {true, false}) {
      for (bool split : {true, false}) {
        CompatReport r = check_compatibility(pc.a, pc.b, m, config(pruning, split));
        if (r.overall == Overall::Incompatible) ++incompatible;
        for (const char* dir : {"backward", "upward"}) {
          bool refuted = std::string(dir) == "backward" ? !r.backward.compatible : !r.upward.compatible;
          bool shipped = std::any_of(r.counterexamples.begin(), r.counterexamples.end(),
                                     [&](const Counterexample& c) { return c.direction == dir; });
          if (refuted && !shipped) return fail(pc.name + ": no " + dir + " counterexample");
        }
        for (const auto& c : r.counterexamples) {
          ++traces;
          int k = c.divergence_step;
          if (k < 0 || k + 1 != static_cast<int>(c.inputs.size())) return fail(pc.name + ": bad divergence step");
          if (c.out_of_range) {
            // The simulating model cannot consume the last input; the
            // witness must lie outside its declared ranges.
            bool up = c.direction == "upward";
            if (!outside(c.inputs.back(), up ? pc.b.inputs : pc.a.inputs, up ? &m : nullptr)) {
              return fail(pc.name + ": out-of-range witness lies inside the ranges");
            }
            Replay rp = replay_pair(pc.a, pc.b, m, c.inputs);
            if (!rp.error || (rp.divergence && *rp.divergence < k)) return fail(pc.name + ": prefix diverges");
            ++range_traces;
            continue;
          }
          Replay rp = replay_pair(pc.a, pc.b, m, c.inputs);
          if (rp.error) return fail(pc.name + ": replay rejected: " + *rp.error);
          if (!rp.divergence || *rp.divergence != k) return fail(pc.name + ": replay diverges elsewhere");
          bool back = c.direction == "backward";
          if (c.expected != (back ? rp.outputs_b : rp.outputs_a) || c.actual != (back ? rp.outputs_a : rp.outputs_b)) {
            return fail(pc.name + ": recorded outputs differ from replay");
          }
        }
      }
    }
  }
  return {true, false,
          std::to_string(incompatible) + " incompatible verdicts, " + std::to_string(traces) + " traces replayed (" +
              std::to_string(range_traces) + " end in an out-of-range input)"};
}

// Criterion 9: per-output transition systems of three independent toggles.
Outcome output_split() {
  FlatModel t = load_fixture("toggles3.dfm");
  PortMapping m = derive_port_mapping(t, t);
  CompatReport split = check_compatibility(t, t, m, config(false, true));
  CompatReport mono = check_compatibility(t, t, m, config(false, false));
  for (const char* o : {"X", "Y", "Z"}) {
    auto it = split.outputs.find(o);
    if (it == split.outputs.end() || it->second.states_a != 2 || it->second.states_b != 2) {
      return fail(std::string("output ") + o + " does not have 2 states");
    }
  }
  auto it = mono.outputs.find("*");
  if (it == mono.outputs.end() || it->second.states_a != 8) return fail("monolithic system does not have 8 states");
  return {true, false, "3 x 2 states split, 8 monolithic"};
}

bool leaves_uncovered(const Solver& s, const Expr& eb, const std::vector<Expr>& cands, const Domain& dom) {
  return s.minimal_cover(eb, cands, dom).uncovered.has_value();
}

std::vector<SmtQuery> query_fixture() {
  Solver solver;
  std::vector<SmtQuery> qs;
  for (const auto& pc : pairs()) {
    if (pc.name.rfind("random", 0) == 0) continue;
    Artifacts art;
    check_compatibility(pc.a, pc.b, derive_port_mapping(pc.a, pc.b), CheckConfig{}, &art);
    for (auto& q : art.smt) {
      q.name = pc.name + ": " + q.name;
      qs.push_back(std::move(q));
    }
    IoTs ta = model_ts(pc.a, solver, "A");
    Domain dom = input_domain(pc.a);
    for (std::size_t i = 0; i < ta.transitions.size(); ++i) {
      const Expr& g = ta.transitions[i].guard;
      std::string base = pc.name + ": transition " + std::to_string(i);
      qs.push_back({base + " enabled", smt_sat(g, dom), solver.is_sat(g, dom)});
      std::vector<Expr> others;
      for (const auto* t : ta.out(ta.transitions[i].from)) {
        if (t != &ta.transitions[i]) others.push_back(t->guard);
      }
      qs.push_back({base + " covered by siblings", smt_cover(g, others, dom),
                    leaves_uncovered(solver, g, others, dom)});
      for (const auto& [o, f] : ta.output_fn[ta.transitions[i].from]) {
        Expr y = Expr::binary(Op::Eq, f, ta.output_fn[ta.transitions[i].to].at(o));
        qs.push_back({base + " keeps " + o, smt_implies(g, y, dom), !solver.implies(g, y, dom)});
      }
    }
  }
  return qs;
}

// Criterion 10: enumeration solver and external solver agree.
Outcome solver_agreement() {
  std::string cmd = find_solver();
  if (cmd.empty()) return {false, true, "no external solver configured"};
  auto qs = query_fixture();
  int sat = 0;
  for (const auto& q : qs) {
    auto ext = run_external_solver(cmd, q.script);
    if (!ext) return fail(q.name + ": external solver gave no answer");
    if (*ext != q.builtin_sat) return fail(q.name + ": disagreement");
    sat += q.builtin_sat;
  }
  return {true, false,
          std::to_string(qs.size()) + " queries agree (" + std::to_string(sat) + " sat, " +
              std::to_string(qs.size() - sat) + " unsat) using " + cmd};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  std::vector<Criterion> criteria{
      {1, "image example exactness", image_example},
      {2, "FlipFlop pipeline", flipflop},
      {3, "oracle equivalence", oracle_property},
      {4, "covering sets and uncovered witness", covering_sets},
      {5, "free-port fixing", free_port},
      {6, "conditional verdict", limiter},
      {7, "optimization soundness", optimization_soundness},
      {8, "counterexample validity", counterexamples},
      {9, "output-split state reduction", output_split},
      {10, "solver agreement", solver_agreement},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const char* tag = o.skipped ? "SKIP" : o.pass ? "PASS" : "FAIL";
    if (!o.pass && !o.skipped) ++failed;
    std::printf("%s criterion %d (%s): %s [%.2fs]\n", tag, c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
