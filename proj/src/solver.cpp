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

#include "dfc/solver.hpp"

#include <unistd.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "dfc/error.hpp"
#include "dfc/kernels.hpp"

namespace dfc {

namespace {

struct Space {
  std::vector<std::string> names;
  std::vector<const DataType*> types;
  std::uint64_t size = 1;
};

Space space_of(const std::vector<Expr>& roots, const Domain& dom, std::uint64_t budget) {
  RefSet r;
  for (const auto& e : roots) collect_refs(e, r);
  std::set<std::string> names(r.inputs.begin(), r.inputs.end());
  names.insert(r.vars.begin(), r.vars.end());
  if (!r.sigs.empty()) throw Error(ErrorKind::InvalidParameter, "query refers to signal '" + *r.sigs.begin() + "'");
  Space s;
  for (const auto& n : names) {
    auto it = dom.find(n);
    if (it == dom.end()) throw Error(ErrorKind::InvalidParameter, "no domain for '" + n + "'");
    if (!it->second.is_bounded()) throw Error(ErrorKind::DomainTooLarge, "'" + n + "' has an unbounded domain");
    std::uint64_t k = it->second.domain_size();
    if (k != 0 && s.size > budget / k) {
      throw Error(ErrorKind::DomainTooLarge, "enumeration space exceeds the solver budget of " + std::to_string(budget));
    }
    s.size *= k;
    s.names.push_back(n);
    s.types.push_back(&it->second);
  }
  if (s.size > budget) {
    throw Error(ErrorKind::DomainTooLarge, "enumeration space exceeds the solver budget of " + std::to_string(budget));
  }
  return s;
}

// Walks the space in batches. `fn(regs, lanes)` returns false to stop.
void scan(const kernels::Program& prog, const Space& s, std::atomic<std::uint64_t>& counter,
          const std::function<bool(const kernels::Registers&, std::size_t)>& fn) {
  kernels::Registers regs = prog.make_registers();
  const std::size_t n = s.names.size();
  std::vector<Value> cur(n);
  for (std::size_t j = 0; j < n; ++j) cur[j] = s.types[j]->lo();
  std::uint64_t remaining = s.size;
  while (remaining > 0) {
    std::size_t lanes = static_cast<std::size_t>(std::min<std::uint64_t>(remaining, kernels::kBatch));
    for (std::size_t l = 0; l < lanes; ++l) {
      for (std::size_t j = 0; j < n; ++j) regs.val(static_cast<std::uint32_t>(j))[l] = cur[j];
      for (std::size_t j = n; j-- > 0;) {
        if (cur[j] < s.types[j]->hi()) {
          ++cur[j];
          break;
        }
        cur[j] = s.types[j]->lo();
      }
    }
    remaining -= lanes;
    counter += lanes;
    prog.run(regs, lanes);
    if (!fn(regs, lanes)) return;
  }
}

Witness lane_witness(const kernels::Registers& regs, std::size_t lane, const Space& s, const Domain* all) {
  Witness w;
  if (all) {
    for (const auto& [name, type] : *all) w[name] = type.lo();
  }
  for (std::size_t j = 0; j < s.names.size(); ++j) w[s.names[j]] = regs.val(static_cast<std::uint32_t>(j))[lane];
  return w;
}

[[noreturn]] void poisoned(const Witness& w) {
  std::string at;
  for (const auto& [k, v] : w) at += (at.empty() ? "" : ", ") + k + "=" + std::to_string(v);
  throw Error(ErrorKind::ArithmeticOverflow, "64-bit overflow while evaluating a guard at {" + at + "}");
}

}  // namespace

void Solver::enumerate(
    const std::vector<Expr>& roots, const Domain& dom,
    const std::function<bool(const Witness&, const std::vector<std::optional<Value>>&)>& fn) const {
  Space s = space_of(roots, dom, budget_);
  kernels::Program prog(roots, s.names);
  std::vector<std::optional<Value>> results(roots.size());
  scan(prog, s, evaluations_, [&](const kernels::Registers& regs, std::size_t lanes) {
    for (std::size_t l = 0; l < lanes; ++l) {
      for (std::size_t k = 0; k < roots.size(); ++k) {
        std::uint32_t r = prog.root(k);
        results[k] = regs.psn(r)[l] ? std::nullopt : std::optional<Value>(regs.val(r)[l]);
      }
      if (!fn(lane_witness(regs, l, s, nullptr), results)) return false;
    }
    return true;
  });
}

std::optional<Witness> Solver::sat_witness(const Expr& g, const Domain& dom) const {
  if (g.is_false()) return std::nullopt;
  Space s = space_of({g}, dom, budget_);
  kernels::Program prog({g}, s.names);
  std::optional<Witness> found;
  scan(prog, s, evaluations_, [&](const kernels::Registers& regs, std::size_t lanes) {
    const Value* v = regs.val(prog.root(0));
    const Value* p = regs.psn(prog.root(0));
    for (std::size_t l = 0; l < lanes; ++l) {
      if (p[l]) poisoned(lane_witness(regs, l, s, nullptr));
      if (v[l]) {
        found = lane_witness(regs, l, s, &dom);
        return false;
      }
    }
    return true;
  });
  return found;
}

bool Solver::implies(const Expr& g, const Expr& h, const Domain& dom, Witness* counter) const {
  auto w = sat_witness(make_and(g, make_not(h)), dom);
  if (w && counter) *counter = *w;
  return !w;
}

Cover Solver::minimal_cover(const Expr& eb, const std::vector<Expr>& candidates, const Domain& dom) const {
  std::vector<Expr> roots{eb};
  roots.insert(roots.end(), candidates.begin(), candidates.end());
  Space s = space_of(roots, dom, budget_);
  kernels::Program prog(roots, s.names);
  std::vector<bool> hit(candidates.size());
  std::vector<Witness> first(candidates.size());
  Cover cover;
  scan(prog, s, evaluations_, [&](const kernels::Registers& regs, std::size_t lanes) {
    for (std::size_t l = 0; l < lanes; ++l) {
      std::uint32_t r0 = prog.root(0);
      if (regs.psn(r0)[l]) poisoned(lane_witness(regs, l, s, nullptr));
      if (!regs.val(r0)[l]) continue;
      bool covered = false;
      for (std::size_t k = 0; k < candidates.size(); ++k) {
        std::uint32_t r = prog.root(k + 1);
        if (regs.psn(r)[l]) poisoned(lane_witness(regs, l, s, nullptr));
        if (regs.val(r)[l]) {
          if (!hit[k]) first[k] = lane_witness(regs, l, s, &dom);
          hit[k] = true;
          covered = true;
        }
      }
      if (!covered) {
        cover.uncovered = lane_witness(regs, l, s, &dom);
        return false;
      }
    }
    return true;
  });
  if (cover.uncovered) return cover;
  cover.indices.emplace();
  for (std::size_t k = 0; k < hit.size(); ++k) {
    if (hit[k]) {
      cover.indices->push_back(k);
      cover.witnesses.push_back(std::move(first[k]));
    }
  }
  return cover;
}

void Solver::for_each_model(const Expr& g, const Domain& dom, const std::function<bool(const Witness&)>& fn) const {
  enumerate({g}, dom, [&](const Witness& w, const std::vector<std::optional<Value>>& r) {
    if (!r[0]) poisoned(w);
    return *r[0] ? fn(w) : true;
  });
}

std::optional<Witness> Solver::exists_forall(const Domain& free, const Domain& univ, const Expr& cond,
                                             const std::set<Witness>& exclude) const {
  std::vector<std::string> names;
  std::vector<const DataType*> types;
  std::uint64_t free_size = 1;
  for (const auto& [n, t] : free) {
    if (!t.is_bounded() || t.domain_size() > budget_ || free_size > budget_ / t.domain_size()) {
      throw Error(ErrorKind::DomainTooLarge, "free constant space exceeds the solver budget");
    }
    free_size *= t.domain_size();
    names.push_back(n);
    types.push_back(&t);
  }
  std::uint64_t spent = 0;
  std::vector<Value> cur;
  for (const auto* t : types) cur.push_back(t->lo());
  for (std::uint64_t i = 0; i < free_size; ++i) {
    Witness w;
    for (std::size_t j = 0; j < names.size(); ++j) w[names[j]] = cur[j];
    for (std::size_t j = names.size(); j-- > 0;) {
      if (cur[j] < types[j]->hi()) {
        ++cur[j];
        break;
      }
      cur[j] = types[j]->lo();
    }
    if (exclude.count(w)) continue;
    Expr bound = normalize(dfc::bind(cond, w));
    std::uint64_t before = evaluations_.load();
    bool holds = !sat_witness(make_not(bound), univ);
    spent += evaluations_.load() - before + 1;
    if (holds) return w;
    if (spent > budget_) throw Error(ErrorKind::DomainTooLarge, "exists-forall search exceeds the solver budget");
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// SMT-LIB 2

namespace {

std::string symbol(const std::string& name) { return "|" + name + "|"; }

std::string int_literal(Value v) {
  if (v >= 0) return std::to_string(v);
  if (v == INT64_MIN) return "(- 9223372036854775808)";
  return "(- " + std::to_string(-v) + ")";
}

const char* smt_op(Op op) {
  switch (op) {
    case Op::Not: return "not";
    case Op::Neg: return "-";
    case Op::And: return "and";
    case Op::Or: return "or";
    case Op::Xor: return "xor";
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    case Op::Eq: return "=";
    case Op::Ne: return "distinct";
    case Op::Lt: return "<";
    case Op::Le: return "<=";
    case Op::Gt: return ">";
    case Op::Ge: return ">=";
    case Op::Ite: return "ite";
    default: return nullptr;
  }
}

void write_expr(std::ostream& os, const Expr& e) {
  switch (e.op()) {
    case Op::Const:
      if (e.sort() == Sort::Bool) {
        os << (e.value() ? "true" : "false");
      } else {
        os << int_literal(e.value());
      }
      return;
    case Op::Input:
    case Op::Var:
    case Op::Sig:
      os << symbol(e.name());
      return;
    case Op::Min:
    case Op::Max: {
      os << "(ite (" << (e.op() == Op::Min ? "<=" : ">=") << " ";
      write_expr(os, e.arg(0));
      os << " ";
      write_expr(os, e.arg(1));
      os << ") ";
      write_expr(os, e.arg(0));
      os << " ";
      write_expr(os, e.arg(1));
      os << ")";
      return;
    }
    default:
      os << "(" << smt_op(e.op());
      for (const auto& a : e.args()) {
        os << " ";
        write_expr(os, a);
      }
      os << ")";
  }
}

std::string range(const std::string& name, const DataType& t) {
  return "(and (<= " + int_literal(t.lo()) + " " + symbol(name) + ") (<= " + symbol(name) + " " + int_literal(t.hi()) + "))";
}

void declare(std::ostream& os, const Domain& dom) {
  for (const auto& [name, t] : dom) {
    os << "(declare-const " << symbol(name) << (t.is_bool() ? " Bool" : " Int") << ")\n";
    if (!t.is_bool()) os << "(assert " << range(name, t) << ")\n";
  }
}

std::string header() { return "(set-logic ALL)\n(set-option :produce-models true)\n"; }

}  // namespace

std::string smt_expr(const Expr& e) {
  std::ostringstream os;
  write_expr(os, e);
  return os.str();
}

std::string smt_sat(const Expr& g, const Domain& dom) {
  std::ostringstream os;
  os << header();
  declare(os, dom);
  os << "(assert " << smt_expr(g) << ")\n(check-sat)\n(get-model)\n";
  return os.str();
}

std::string smt_implies(const Expr& g, const Expr& h, const Domain& dom) {
  std::ostringstream os;
  os << header() << "; unsat iff the implication holds\n";
  declare(os, dom);
  os << "(assert (and " << smt_expr(g) << " (not " << smt_expr(h) << ")))\n(check-sat)\n(get-model)\n";
  return os.str();
}

std::string smt_cover(const Expr& eb, const std::vector<Expr>& candidates, const Domain& dom) {
  std::ostringstream os;
  os << header() << "; unsat iff the candidates cover the guard\n";
  declare(os, dom);
  os << "(assert " << smt_expr(eb) << ")\n";
  for (const auto& c : candidates) os << "(assert (not " << smt_expr(c) << "))\n";
  os << "(check-sat)\n(get-model)\n";
  return os.str();
}

std::string smt_exists_forall(const Domain& free, const Domain& univ, const Expr& cond) {
  std::ostringstream os;
  os << header();
  declare(os, free);
  if (univ.empty()) {
    os << "(assert " << smt_expr(cond) << ")\n";
  } else {
    os << "(assert (forall (";
    for (const auto& [name, t] : univ) os << "(" << symbol(name) << (t.is_bool() ? " Bool" : " Int") << ")";
    os << ")\n  (=> (and true";
    for (const auto& [name, t] : univ) {
      if (!t.is_bool()) os << " " << range(name, t);
    }
    os << ")\n      " << smt_expr(cond) << ")))\n";
  }
  os << "(check-sat)\n(get-model)\n";
  return os.str();
}

std::optional<bool> run_external_solver(const std::string& cmd, const std::string& script) {
  char path[] = "/tmp/dfcompat-XXXXXX.smt2";
  int fd = mkstemps(path, 5);
  if (fd < 0) return std::nullopt;
  {
    std::ofstream out(path);
    out << script;
  }
  close(fd);
  std::string full = cmd + " " + path + " 2>&1";
  std::optional<bool> answer;
  if (FILE* p = popen(full.c_str(), "r")) {
    char buf[4096];
    while (std::fgets(buf, sizeof buf, p)) {
      std::string line(buf);
      while (!line.empty() && (line.back() == '\n' || line.back() == '\r' || line.back() == ' ')) line.pop_back();
      if (line == "sat" || line == "unsat") {
        answer = line == "sat";
        break;
      }
    }
    pclose(p);
  }
  std::remove(path);
  return answer;
}

}  // namespace dfc
