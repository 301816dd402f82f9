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

#include "dfc/unfold.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

#include "dfc/arith.hpp"

namespace dfc {

Domain IoTs::input_domain() const {
  Domain d;
  for (const auto& p : inputs) d[p.name] = p.type;
  return d;
}

std::vector<const TsTransition*> IoTs::out(int state) const {
  std::vector<const TsTransition*> r;
  for (const auto& t : transitions) {
    if (t.from == state) r.push_back(&t);
  }
  return r;
}

namespace {

void conjuncts(const Expr& e, std::vector<Expr>& out) {
  if (e.op() == Op::And) {
    conjuncts(e.arg(0), out);
    conjuncts(e.arg(1), out);
  } else {
    out.push_back(e);
  }
}

bool is_ref(const Expr& e) { return e.op() == Op::Input || e.op() == Op::Var; }

}  // namespace

std::optional<Domain> narrow_ranges(const Expr& guard, const Domain& dom) {
  std::map<std::string, std::pair<Value, Value>> iv;
  for (const auto& [n, t] : dom) iv[n] = {t.lo(), t.hi()};
  std::vector<Expr> atoms;
  conjuncts(guard, atoms);

  auto upper = [&](const std::string& n, std::optional<Value> v, bool& changed) {
    auto it = iv.find(n);
    if (it == iv.end() || !v || *v >= it->second.second) return;
    it->second.second = *v;
    changed = true;
  };
  auto lower = [&](const std::string& n, std::optional<Value> v, bool& changed) {
    auto it = iv.find(n);
    if (it == iv.end() || !v || *v <= it->second.first) return;
    it->second.first = *v;
    changed = true;
  };
  auto lo_of = [&](const Expr& e) -> std::optional<Value> {
    if (e.is_const()) return e.value();
    if (auto it = iv.find(e.name()); it != iv.end()) return it->second.first;
    return std::nullopt;
  };
  auto hi_of = [&](const Expr& e) -> std::optional<Value> {
    if (e.is_const()) return e.value();
    if (auto it = iv.find(e.name()); it != iv.end()) return it->second.second;
    return std::nullopt;
  };

  for (int pass = 0; pass < 16; ++pass) {
    bool changed = false;
    for (const auto& a : atoms) {
      if (is_ref(a)) {
        lower(a.name(), 1, changed);
        continue;
      }
      if (a.op() == Op::Not && is_ref(a.arg(0))) {
        upper(a.arg(0).name(), 0, changed);
        continue;
      }
      if (a.is_false()) return std::nullopt;
      if (a.arity() != 2 || !(a.op() == Op::Lt || a.op() == Op::Le || a.op() == Op::Eq)) continue;
      const Expr& x = a.arg(0);
      const Expr& y = a.arg(1);
      if (!(is_ref(x) || x.is_const()) || !(is_ref(y) || y.is_const())) continue;
      auto hy = hi_of(y);
      auto lx = lo_of(x);
      if (a.op() == Op::Lt) {
        if (is_ref(x) && hy) upper(x.name(), arith::sub(*hy, 1), changed);
        if (is_ref(y) && lx) lower(y.name(), arith::add(*lx, 1), changed);
      } else {
        if (is_ref(x)) upper(x.name(), hy, changed);
        if (is_ref(y)) lower(y.name(), lx, changed);
        if (a.op() == Op::Eq) {
          if (is_ref(x)) lower(x.name(), lo_of(y), changed);
          if (is_ref(y)) upper(y.name(), hi_of(x), changed);
        }
      }
    }
    for (const auto& [n, r] : iv) {
      if (r.first > r.second) return std::nullopt;
    }
    if (!changed) break;
  }
  Domain out;
  for (const auto& [n, t] : dom) {
    auto [lo, hi] = iv[n];
    out[n] = (lo == t.lo() && hi == t.hi()) ? t : DataType::integer(lo, hi);
  }
  return out;
}

ImageMap compute_image(const IoEfa& e, const Solver& solver) {
  ImageMap img;
  Domain full = e.domain();
  std::map<std::string, const StateVar*> var_info;
  for (const auto& v : e.vars) var_info[v.name] = &v;

  for (const auto& t : e.transitions) {
    ImageEntry entry;
    if (t.updates.empty()) {
      img.per_transition.push_back(std::move(entry));
      continue;
    }
    std::vector<Expr> roots{t.guard};
    RefSet refs;
    collect_refs(t.guard, refs);
    for (const auto& [v, f] : t.updates) {
      entry.image_vars.push_back(v);
      roots.push_back(f);
      collect_refs(f, refs);
    }
    for (const auto& v : refs.vars) entry.key_vars.push_back(v);

    auto dom = narrow_ranges(t.guard, full);
    if (!dom) {
      img.per_transition.push_back(std::move(entry));
      continue;
    }
    solver.enumerate(roots, *dom, [&](const Witness& w, const std::vector<std::optional<Value>>& r) {
      Vec key;
      for (const auto& v : entry.key_vars) key.push_back(w.at(v));
      if (!r[0]) {
        entry.faulty.emplace(key, std::make_pair(ErrorKind::ArithmeticOverflow, "64-bit overflow in a transition guard"));
        return true;
      }
      if (!*r[0]) return true;
      Vec image;
      for (std::size_t k = 0; k < entry.image_vars.size(); ++k) {
        const std::string& v = entry.image_vars[k];
        if (!r[k + 1]) {
          entry.faulty.emplace(key, std::make_pair(ErrorKind::ArithmeticOverflow, "64-bit overflow updating " + v));
          return true;
        }
        const DataType& type = var_info.at(v)->type;
        if (!type.contains(*r[k + 1])) {
          entry.faulty.emplace(key, std::make_pair(ErrorKind::StateOutOfDomain,
                                                   v + " would become " + std::to_string(*r[k + 1]) + ", outside " +
                                                       type.to_string()));
          return true;
        }
        image.push_back(*r[k + 1]);
      }
      entry.map[key].insert(std::move(image));
      return true;
    });
    img.per_transition.push_back(std::move(entry));
  }
  return img;
}

namespace {

std::string state_label(const std::string& prefix, const Vec& d) {
  std::string s = prefix;
  for (std::size_t i = 0; i < d.size(); ++i) s += (i ? "_" : "") + std::to_string(d[i]);
  return s;
}

}  // namespace

IoTs unfold_to_ts(const IoEfa& e, const ImageMap& img, const Solver& solver, std::size_t state_budget,
                  const std::string& label_prefix) {
  IoTs ts;
  ts.name = e.name;
  ts.inputs = e.inputs;
  ts.outputs = e.outputs;
  std::map<std::string, std::size_t> var_pos;
  Vec d0;
  for (const auto& v : e.vars) {
    var_pos[v.name] = ts.var_names.size();
    ts.var_names.push_back(v.name);
    d0.push_back(v.init);
  }
  Domain in_dom = ts.input_domain();

  std::map<Vec, int> index;
  std::deque<int> queue;
  auto intern = [&](const Vec& d) {
    auto [it, fresh] = index.emplace(d, static_cast<int>(ts.states.size()));
    if (fresh) {
      if (ts.states.size() >= state_budget) {
        throw Error(ErrorKind::StateBudgetExceeded, e.name + " has more than " + std::to_string(state_budget) + " reachable states");
      }
      ts.states.push_back(d);
      ts.labels.push_back(state_label(label_prefix, d));
      ts.output_fn.emplace_back();
      queue.push_back(it->second);
    }
    return it->second;
  };
  ts.initial = intern(d0);

  while (!queue.empty()) {
    int s = queue.front();
    queue.pop_front();
    Vec d = ts.states[s];
    Valuation vals;
    for (std::size_t i = 0; i < d.size(); ++i) vals[ts.var_names[i]] = d[i];

    std::map<std::string, std::vector<std::pair<Expr, Expr>>> outs;
    std::map<Vec, std::vector<Expr>> succ;
    for (std::size_t i = 0; i < e.transitions.size(); ++i) {
      const EfaTransition& t = e.transitions[i];
      Expr g = normalize(dfc::bind(t.guard, vals));
      if (g.is_false() || !solver.is_sat(g, in_dom)) continue;
      for (const auto& [o, h] : t.outputs) outs[o].emplace_back(g, normalize(dfc::bind(h, vals)));
      if (t.updates.empty()) {
        succ[d].push_back(g);
        continue;
      }
      const ImageEntry& entry = img.per_transition.at(i);
      Vec key;
      for (const auto& v : entry.key_vars) key.push_back(d[var_pos.at(v)]);
      if (auto f = entry.faulty.find(key); f != entry.faulty.end()) {
        throw Error(f->second.first, "from state " + ts.labels[s] + ": " + f->second.second);
      }
      auto m = entry.map.find(key);
      if (m == entry.map.end()) continue;
      for (const auto& image : m->second) {
        Vec next = d;
        std::vector<Expr> eqs{g};
        for (std::size_t k = 0; k < entry.image_vars.size(); ++k) {
          const std::string& v = entry.image_vars[k];
          next[var_pos.at(v)] = image[k];
          Expr f = dfc::bind(t.updates.at(v), vals);
          eqs.push_back(make_eq(f, Expr::constant(image[k], f.sort())));
        }
        Expr tg = normalize(make_and(eqs));
        if (!tg.is_false()) succ[next].push_back(tg);
      }
    }
    for (const auto& [o, alts] : outs) {
      Expr y = alts.back().second;
      for (std::size_t i = alts.size() - 1; i-- > 0;) y = make_ite(alts[i].first, alts[i].second, y);
      ts.output_fn[s][o] = normalize(y);
    }
    for (const auto& [next, guards] : succ) {
      int to = intern(next);
      ts.transitions.push_back(TsTransition{s, to, normalize(make_or(guards))});
    }
  }
  return ts;
}

std::vector<Valuation> simulate_ts(const IoTs& ts, const std::vector<Valuation>& inputs) {
  std::vector<Valuation> out;
  int s = ts.initial;
  for (const auto& u : inputs) {
    Valuation y;
    for (const auto& [o, f] : ts.output_fn[s]) y[o] = evaluate(f, u);
    out.push_back(std::move(y));
    int next = -1;
    for (const TsTransition* t : ts.out(s)) {
      if (evaluate(t->guard, u)) {
        next = t->to;
        break;
      }
    }
    if (next < 0) throw Error(ErrorKind::InvalidParameter, "no enabled transition from " + ts.labels[s]);
    s = next;
  }
  return out;
}

std::string ts_to_dot(const IoTs& ts) {
  auto esc = [](const std::string& s) {
    std::string r;
    for (char c : s) {
      if (c == '\n') {
        r += "\\n";
        continue;
      }
      if (c == '"' || c == '\\') r += '\\';
      r += c;
    }
    return r;
  };
  std::ostringstream os;
  os << "digraph \"" << esc(ts.name) << "\" {\n  rankdir=LR;\n  node [shape=ellipse];\n";
  os << "  init [shape=point];\n  init -> s" << ts.initial << ";\n";
  for (std::size_t i = 0; i < ts.states.size(); ++i) {
    std::string label = ts.labels[i];
    for (const auto& [o, f] : ts.output_fn[i]) label += "\n" + o + " = " + to_string(f);
    os << "  s" << i << " [label=\"" << esc(label) << "\"];\n";
  }
  for (const auto& t : ts.transitions) {
    os << "  s" << t.from << " -> s" << t.to << " [label=\"" << esc(to_string(t.guard)) << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace dfc
