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

#include "dfc/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "dfc/cfg.hpp"
#include "dfc/efa.hpp"
#include "dfc/interp.hpp"
#include "dfc/symbolic.hpp"
#include "dfc/unfold.hpp"

namespace dfc {

const char* to_string(Overall o) {
  switch (o) {
    case Overall::Full: return "Full";
    case Overall::BackwardOnly: return "BackwardOnly";
    case Overall::UpwardOnly: return "UpwardOnly";
    case Overall::Incompatible: return "Incompatible";
  }
  return "?";
}

std::optional<Overall> overall_from_string(std::string_view s) {
  for (Overall o : {Overall::Full, Overall::BackwardOnly, Overall::UpwardOnly, Overall::Incompatible}) {
    if (s == to_string(o)) return o;
  }
  return std::nullopt;
}

const StageStat* CompatReport::stage(std::string_view name) const {
  for (const auto& s : stats) {
    if (s.stage == name) return &s;
  }
  return nullptr;
}

namespace {

using Clock = std::chrono::steady_clock;

double millis_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

template <class F>
auto in_stage(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    std::string msg = e.what();
    std::string prefix = std::string(to_string(e.kind())) + ": ";
    if (msg.rfind(prefix, 0) == 0) msg = msg.substr(prefix.size());
    throw Error(e.kind(), std::string("in stage ") + stage + ": " + msg);
  }
}

template <class F>
void parallel_for(std::size_t n, int jobs, F&& f) {
  std::size_t workers = jobs > 0 ? static_cast<std::size_t>(jobs) : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!err) err = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

std::size_t case_count(const SymbolicSummary& s) {
  std::size_t n = 0;
  for (const auto& [t, d] : s.defs) n += d.cases.size();
  return n;
}

struct Group {
  std::string key;
  IoEfa ea;
  IoEfa eb;
  IoTs ta;
  IoTs tb;
  std::optional<SimVerdict> back;
  std::optional<SimVerdict> up;
};

std::vector<Group> make_groups(const IoEfa& ea, const IoEfa& eb, const SymbolicSummary& sa, const SymbolicSummary& sb,
                               bool split) {
  std::vector<Group> groups;
  if (!split) {
    if (!eb.outputs.empty()) groups.push_back({"*", ea, eb, {}, {}, {}, {}});
    return groups;
  }
  std::map<std::string, IoEfa> by_output;
  for (auto& e : split_by_output(ea, sa.deps)) by_output.emplace(e.outputs.at(0).name, std::move(e));
  for (auto& e : split_by_output(eb, sb.deps)) {
    std::string o = e.outputs.at(0).name;
    groups.push_back({o, by_output.at(o), std::move(e), {}, {}, {}, {}});
  }
  std::sort(groups.begin(), groups.end(), [](const Group& x, const Group& y) { return x.key < y.key; });
  return groups;
}

struct Stats {
  std::vector<StageStat>& out;
  void add(std::string stage, std::map<std::string, std::uint64_t> counts, Clock::time_point t0) {
    out.push_back({std::move(stage), std::move(counts), millis_since(t0)});
  }
};

Valuation complete(const Valuation& v, const std::vector<Port>& ports) {
  Valuation r;
  for (const auto& p : ports) {
    auto it = v.find(p.name);
    r[p.name] = it != v.end() ? it->second : p.type.lo();
  }
  return r;
}

bool in_ranges(const Valuation& v, const std::vector<Port>& ports) {
  for (const auto& p : ports) {
    auto it = v.find(p.name);
    if (it != v.end() && !p.type.contains(it->second)) return false;
  }
  return true;
}

// Mapped outputs under A's names.
Valuation project(const Valuation& outputs, const PortMapping& m, bool from_b) {
  Valuation r;
  for (const auto& [bn, an] : m.outputs) r[an] = outputs.at(from_b ? bn : an);
  return r;
}

}  // namespace

Replay replay_pair(const FlatModel& a, const FlatModel& b, const PortMapping& m, const std::vector<Valuation>& inputs) {
  Replay r;
  Interpreter ia(a);
  Interpreter ib(b);
  SimState sa = initial_state(a);
  SimState sb = initial_state(b);
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    Valuation in_a = complete(inputs[k], a.inputs);
    Valuation in_b;
    for (const auto& [bn, an] : m.inputs) in_b[bn] = in_a.at(an);
    StepResult ra;
    StepResult rb;
    try {
      ra = ia.step(sa, in_a);
    } catch (const Error& e) {
      r.error = e.what();
    }
    try {
      rb = ib.step(sb, in_b);
    } catch (const Error& e) {
      if (!r.error) r.error = e.what();
    }
    if (r.error) {
      if (ra.outputs.size()) r.outputs_a.push_back(project(ra.outputs, m, false));
      if (rb.outputs.size()) r.outputs_b.push_back(project(rb.outputs, m, true));
      return r;
    }
    Valuation ya = project(ra.outputs, m, false);
    Valuation yb = project(rb.outputs, m, true);
    r.outputs_a.push_back(ya);
    r.outputs_b.push_back(yb);
    if (ya != yb && !r.divergence) r.divergence = static_cast<int>(k);
    sa = std::move(ra.next);
    sb = std::move(rb.next);
  }
  return r;
}

namespace {

Counterexample build_counterexample(const std::string& direction, const std::string& key, const SimFailure& f,
                                    const FlatModel& a, const FlatModel& b, const PortMapping& m,
                                    const std::vector<Port>& simulating_ports) {
  Counterexample c;
  c.direction = direction;
  c.output = key;
  c.reason = to_string(f.reason);
  for (const auto& w : f.inputs) {
    Valuation v;
    for (const auto& [n, x] : w) {
      if (a.find_input(n)) v[n] = x;
    }
    c.inputs.push_back(complete(v, a.inputs));
  }
  c.out_of_range = !in_ranges(c.inputs.back(), simulating_ports);
  Replay r = replay_pair(a, b, m, c.inputs);
  bool backward = direction == "backward";
  const auto& expected = backward ? r.outputs_b : r.outputs_a;
  const auto& actual = backward ? r.outputs_a : r.outputs_b;
  if (r.divergence) {
    c.divergence_step = *r.divergence;
    c.inputs.resize(c.divergence_step + 1);
  } else {
    c.divergence_step = r.error ? static_cast<int>(c.inputs.size()) - 1 : -1;
  }
  std::size_t n = std::min(expected.size(), c.inputs.size());
  c.expected.assign(expected.begin(), expected.begin() + n);
  c.actual.assign(actual.begin(), actual.begin() + std::min(actual.size(), c.inputs.size()));
  return c;
}

}  // namespace

CompatReport check_compatibility(const FlatModel& a, const FlatModel& b, const PortMapping& m,
                                 const CheckConfig& config, Artifacts* artifacts) {
  CompatReport r;
  r.model_a = a.name;
  r.model_b = b.name;
  Stats stats{r.stats};
  Solver solver(config.solver_budget);
  auto total0 = Clock::now();

  auto t0 = Clock::now();
  InterfaceReport ir = check_interface(a, b, m);
  r.interface_violations = ir.violations;
  r.extra_inputs.assign(m.extra_inputs_a.begin(), m.extra_inputs_a.end());
  bool hard = std::any_of(ir.violations.begin(), ir.violations.end(),
                          [](const InterfaceViolation& v) { return v.reason.rfind("range ", 0) != 0; });
  stats.add("interface", {{"violations", ir.violations.size()}, {"extra_inputs", m.extra_inputs_a.size()}}, t0);
  if (hard) {
    r.overall = Overall::Incompatible;
    stats.add("total", {}, total0);
    return r;
  }

  t0 = Clock::now();
  Cfg ca = in_stage("cfg", [&] { return extract_cfg(a, sorted_order(a)); });
  Cfg cb = in_stage("cfg", [&] { return extract_cfg(b, sorted_order(b)); });
  stats.add("cfg",
            {{"a.nodes", ca.nodes.size()}, {"a.edges", ca.edges.size()}, {"a.vars", ca.vars.size()},
             {"b.nodes", cb.nodes.size()}, {"b.edges", cb.edges.size()}, {"b.vars", cb.vars.size()}},
            t0);

  t0 = Clock::now();
  std::set<std::string> outs;
  for (const auto& [bn, an] : m.outputs) outs.insert(an);
  SymbolicSummary xa = in_stage("symbolic", [&] { return slice(substitute(ca, solver, config.case_cap), outs); });
  SymbolicSummary xb = in_stage("symbolic", [&] {
    return rename_ports(substitute(cb, solver, config.case_cap), m.inputs, m.outputs);
  });
  stats.add("symbolic", {{"a.cases", case_count(xa)}, {"b.cases", case_count(xb)}}, t0);

  t0 = Clock::now();
  SymbolicSummary pa = xa;
  SymbolicSummary pb = xb;
  std::set<std::string> pruned;
  bool reduced = false;
  if (config.clone_pruning) {
    CloneResult cr = detect_and_prune_clones(xa, xb);
    reduced = !cr.pairs.empty();
    pruned = cr.pruned_outputs;
    pa = std::move(cr.a);
    pb = std::move(cr.b);
    stats.add("clones",
              {{"pairs", cr.pairs.size()}, {"pruned_outputs", pruned.size()}, {"fresh_inputs", cr.fresh_inputs.size()}},
              t0);
  } else {
    stats.add("clones", {{"pairs", 0}, {"pruned_outputs", 0}, {"fresh_inputs", 0}}, t0);
  }

  Domain dom_back;
  Domain dom_up;
  for (const auto& [n, t] : ir.dom_b) dom_back[n] = t;
  for (const auto& p : a.inputs) {
    dom_up[p.name] = p.type;
    if (m.extra_inputs_a.count(p.name)) dom_back[p.name] = p.type;
  }
  for (const auto* s : {&pa, &pb}) {
    for (const auto& p : s->inputs) {
      if (p.name.rfind("clone:", 0) == 0) dom_back[p.name] = dom_up[p.name] = p.type;
    }
  }

  auto interface = [](const std::vector<Port>& ports, const std::map<std::string, std::string>* rename,
                      const SymbolicSummary& s) {
    std::vector<Port> r;
    for (const auto& p : ports) r.push_back({rename ? rename->at(p.name) : p.name, p.dir, p.type});
    for (const auto& p : s.inputs) {
      if (p.name.rfind("clone:", 0) == 0) r.push_back(p);
    }
    return r;
  };

  // Builds, unfolds and checks one set of automata.
  auto run = [&](const SymbolicSummary& sa, const SymbolicSummary& sb, bool record) {
    auto t = Clock::now();
    IoEfa ea = in_stage("efa", [&] { return build_efa(sa, solver, config.case_cap); });
    IoEfa eb = in_stage("efa", [&] { return build_efa(sb, solver, config.case_cap); });
    if (record) {
      stats.add("efa",
                {{"a.vars", ea.vars.size()}, {"a.transitions", ea.transitions.size()},
                 {"b.vars", eb.vars.size()}, {"b.transitions", eb.transitions.size()}},
                t);
      if (artifacts) artifacts->efa = efa_to_text(ea) + "\n" + efa_to_text(eb);
      t = Clock::now();
    }
    std::vector<Group> groups = make_groups(ea, eb, sa, sb, config.output_split);
    if (record) {
      stats.add("split", {{"automata", groups.size()}}, t);
      t = Clock::now();
    }
    parallel_for(groups.size(), config.jobs, [&](std::size_t i) {
      Group& g = groups[i];
      in_stage("unfold", [&] {
        g.ta = unfold_to_ts(g.ea, compute_image(g.ea, solver), solver, config.state_budget, "A");
        g.tb = unfold_to_ts(g.eb, compute_image(g.eb, solver), solver, config.state_budget, "B");
      });
      // Ranges of inputs an automaton no longer reads still bound what it accepts.
      g.ta.inputs = interface(a.inputs, nullptr, sa);
      g.tb.inputs = interface(b.inputs, &m.inputs, sb);
      in_stage("simulate", [&] {
        g.back = simulates(g.ta, g.tb, dom_back, solver);
        g.up = simulates(g.tb, g.ta, dom_up, solver);
      });
    });
    if (record) {
      std::uint64_t sa_n = 0, sb_n = 0, ta_n = 0, tb_n = 0, pairs = 0;
      for (const auto& g : groups) {
        sa_n += g.ta.states.size();
        sb_n += g.tb.states.size();
        ta_n += g.ta.transitions.size();
        tb_n += g.tb.transitions.size();
        pairs += g.back->visited.size() + g.up->visited.size();
      }
      stats.add("unfold+simulate",
                {{"a.states", sa_n}, {"a.transitions", ta_n}, {"b.states", sb_n}, {"b.transitions", tb_n},
                 {"pairs", pairs}},
                t);
    }
    return groups;
  };

  std::vector<Group> groups = run(pa, pb, true);
  std::optional<std::vector<Group>> full;
  auto unpruned = [&]() -> std::vector<Group>& {
    if (!full) full = reduced ? run(xa, xb, false) : groups;
    return *full;
  };
  auto find = [](std::vector<Group>& gs, const std::string& key) -> Group* {
    for (auto& g : gs) {
      if (g.key == key) return &g;
    }
    return nullptr;
  };

  if (artifacts) {
    artifacts->cfg_dot = cfg_to_dot(ca) + cfg_to_dot(cb);
    artifacts->summary = summary_to_text(xa) + "\n" + summary_to_text(xb);
    for (const auto& g : groups) {
      artifacts->ts_dot += ts_to_dot(g.ta) + ts_to_dot(g.tb);
      for (const auto& o : g.tb.outputs) {
        Expr differ = normalize(Expr::binary(Op::Ne, g.ta.output_fn[g.ta.initial].at(o.name),
                                             g.tb.output_fn[g.tb.initial].at(o.name)));
        artifacts->smt.push_back({"initial outputs differ: " + g.key + " " + o.name, smt_sat(differ, dom_back),
                                  solver.is_sat(differ, dom_back)});
      }
    }
  }

  // Per-automaton results, with refutations on reduced automata confirmed on the originals.
  struct Outcome {
    std::string key;
    bool back = false;
    bool up = false;
    const SimVerdict* back_v = nullptr;
    const SimVerdict* up_v = nullptr;
    const Group* g = nullptr;
  };
  std::vector<Outcome> outcomes;
  for (auto& g : groups) {
    Outcome o{g.key, g.back->simulated, g.up->simulated, &*g.back, &*g.up, &g};
    if (reduced && (!o.back || !o.up)) {
      Group* u = find(unpruned(), g.key);
      o.back = u->back->simulated;
      o.up = u->up->simulated;
      o.back_v = &*u->back;
      o.up_v = &*u->up;
      o.g = u;
    }
    outcomes.push_back(o);
  }

  bool back_ok = std::all_of(outcomes.begin(), outcomes.end(), [](const Outcome& o) { return o.back; });
  bool up_ok = std::all_of(outcomes.begin(), outcomes.end(), [](const Outcome& o) { return o.up; });

  std::vector<Port> ports_b;
  for (const auto& p : b.inputs) ports_b.push_back({m.inputs.at(p.name), p.dir, p.type});
  // A value the simulated side may receive but the simulating side rejects
  // refutes the direction whatever the automata do.
  auto range_gap = [](const std::vector<Port>& simulating, const std::vector<Port>& simulated,
                      const Domain& dom) -> std::optional<Witness> {
    for (const auto& q : simulated) {
      auto p = std::find_if(simulating.begin(), simulating.end(), [&](const Port& x) { return x.name == q.name; });
      if (p == simulating.end() || range_contained(q.type, p->type)) continue;
      Witness w;
      for (const auto& [n, t] : dom) w[n] = t.lo();
      w[q.name] = q.type.lo() < p->type.lo() ? q.type.lo() : p->type.hi() + 1;
      return w;
    }
    return std::nullopt;
  };
  std::optional<Witness> back_gap = range_gap(a.inputs, ports_b, dom_back);
  std::optional<Witness> up_gap = range_gap(ports_b, a.inputs, dom_up);

  t0 = Clock::now();
  if (!back_ok && !back_gap && !m.extra_inputs_a.empty()) {
    Domain extra;
    for (const auto& n : m.extra_inputs_a) extra[n] = dom_back.at(n);
    std::vector<std::pair<const IoTs*, const IoTs*>> pairs;
    for (const auto& g : unpruned()) pairs.emplace_back(&g.ta, &g.tb);
    FixResult fr = in_stage("fix", [&] {
      return fix_free_ports(pairs, extra, dom_back, solver, config.fix_iterations);
    });
    if (artifacts) {
      Domain univ;
      for (const auto& [n, t] : dom_back) {
        if (!extra.count(n)) univ[n] = t;
      }
      Expr cond = necessary_condition(pairs);
      artifacts->smt.push_back({"constants for extra inputs", smt_exists_forall(extra, univ, cond),
                                solver.exists_forall(extra, univ, cond).has_value()});
    }
    r.backward.fix_iterations = fr.iterations;
    if (fr.constants) {
      back_ok = true;
      for (const auto& [n, v] : *fr.constants) {
        if (!extra.count(n)) continue;
        r.backward.conditions[n] = v;
        r.backward.conditions_text[n] = extra.at(n).format_value(v);
      }
      for (auto& o : outcomes) o.back = true;
    }
    stats.add("fix", {{"iterations", static_cast<std::uint64_t>(fr.iterations)}, {"rejected", fr.rejected.size()}}, t0);
  }

  bool back_traced = !back_ok;
  bool up_traced = !up_ok;
  back_ok = back_ok && !back_gap;
  up_ok = up_ok && !up_gap;
  r.backward.compatible = back_ok;
  r.upward.compatible = up_ok;
  r.overall = back_ok && up_ok ? Overall::Full
              : back_ok        ? Overall::BackwardOnly
              : up_ok          ? Overall::UpwardOnly
                               : Overall::Incompatible;

  auto range_refute = [&](OutputVerdict& v) {
    if (back_gap && v.backward) {
      v.backward = false;
      v.backward_reason = "input-range";
    }
    if (up_gap && v.upward) {
      v.upward = false;
      v.upward_reason = "input-range";
    }
  };
  for (const auto& o : outcomes) {
    OutputVerdict v;
    v.backward = o.back;
    v.upward = o.up;
    if (!o.back) v.backward_reason = to_string(o.back_v->failure->reason);
    if (!o.up) v.upward_reason = to_string(o.up_v->failure->reason);
    range_refute(v);
    v.states_a = o.g->ta.states.size();
    v.states_b = o.g->tb.states.size();
    r.outputs[o.key] = v;
  }
  for (const auto& p : pruned) {
    OutputVerdict v;
    v.pruned = v.backward = v.upward = true;
    range_refute(v);
    r.outputs[p] = v;
  }

  t0 = Clock::now();
  auto range_cex = [&](const char* dir, const Witness& w, const std::vector<Port>& simulating) {
    SimFailure f;
    f.reason = FailureReason::UncoveredTransition;
    f.inputs = {w};
    Counterexample c = build_counterexample(dir, r.outputs.begin()->first, f, a, b, m, simulating);
    c.reason = "input-range";
    r.counterexamples.push_back(std::move(c));
  };
  if (back_gap && !back_traced) in_stage("replay", [&] { range_cex("backward", *back_gap, a.inputs); });
  if (up_gap && !up_traced) in_stage("replay", [&] { range_cex("upward", *up_gap, ports_b); });
  for (const auto& o : outcomes) {
    if (!o.back) {
      r.counterexamples.push_back(in_stage("replay", [&] {
        return build_counterexample("backward", o.key, *o.back_v->failure, a, b, m, a.inputs);
      }));
    }
    if (!o.up) {
      r.counterexamples.push_back(in_stage("replay", [&] {
        return build_counterexample("upward", o.key, *o.up_v->failure, a, b, m, ports_b);
      }));
    }
  }
  stats.add("replay", {{"counterexamples", r.counterexamples.size()}}, t0);
  stats.add("total", {{"solver_evaluations", solver.evaluations()}}, total0);
  return r;
}

StageStat model_stats(const FlatModel& m, const CheckConfig& config) {
  auto t0 = Clock::now();
  Solver solver(config.solver_budget);
  StageStat s;
  s.stage = m.name;
  Cfg c = extract_cfg(m, sorted_order(m));
  s.counts["cfg.nodes"] = c.nodes.size();
  s.counts["cfg.edges"] = c.edges.size();
  s.counts["cfg.vars"] = c.vars.size();
  SymbolicSummary x = substitute(c, solver, config.case_cap);
  s.counts["summary.cases"] = case_count(x);
  IoEfa e = build_efa(x, solver, config.case_cap);
  s.counts["efa.vars"] = e.vars.size();
  s.counts["efa.transitions"] = e.transitions.size();
  std::vector<IoEfa> parts{e};
  if (config.output_split) parts = split_by_output(e, x.deps);
  std::uint64_t states = 0, transitions = 0;
  for (const auto& p : parts) {
    IoTs ts = unfold_to_ts(p, compute_image(p, solver), solver, config.state_budget);
    states += ts.states.size();
    transitions += ts.transitions.size();
  }
  s.counts["ts.automata"] = parts.size();
  s.counts["ts.states"] = states;
  s.counts["ts.transitions"] = transitions;
  s.millis = millis_since(t0);
  return s;
}

std::string join_smt(const std::vector<SmtQuery>& queries) {
  std::string out;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    if (i) out += "(reset)\n";
    out += "; " + queries[i].name + "\n" + queries[i].script;
  }
  return out;
}

int exit_code(const CompatReport& r) {
  switch (r.overall) {
    case Overall::Full: return r.backward.conditions.empty() ? 0 : 1;
    case Overall::BackwardOnly:
    case Overall::UpwardOnly: return 1;
    case Overall::Incompatible: return 2;
  }
  return 2;
}

}  // namespace dfc
