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

#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dfc/expr.hpp"
#include "dfc/types.hpp"

namespace dfc {

/// Quantification ranges of variables and ports.
using Domain = std::map<std::string, DataType, std::less<>>;
using Witness = Valuation;

inline constexpr std::uint64_t kDefaultSolverBudget = 10'000'000;

/// Result of a covering query: the indices of the candidates that intersect
/// the covered guard, or a witness the candidates leave uncovered.
struct Cover {
  std::optional<std::vector<std::size_t>> indices;
  std::vector<Witness> witnesses;  // per index: first valuation enabling both guards
  std::optional<Witness> uncovered;
};

/// Decides finite-domain queries by exhaustive enumeration. Variables are
/// enumerated in name order with the first name most significant and values
/// ascending, so every witness is the lexicographically first one.
///
/// Thread-safe; the evaluation counter is shared.
class Solver {
 public:
  explicit Solver(std::uint64_t budget = kDefaultSolverBudget) : budget_(budget) {}

  std::uint64_t budget() const { return budget_; }
  std::uint64_t evaluations() const { return evaluations_.load(); }

  /// Witness over all variables of `dom`; unreferenced ones are at their
  /// lower bound.
  std::optional<Witness> sat_witness(const Expr& g, const Domain& dom) const;
  bool is_sat(const Expr& g, const Domain& dom) const { return sat_witness(g, dom).has_value(); }
  /// True iff no valuation satisfies g & !h; otherwise `counter` receives one.
  bool implies(const Expr& g, const Expr& h, const Domain& dom, Witness* counter = nullptr) const;
  Cover minimal_cover(const Expr& eb, const std::vector<Expr>& candidates, const Domain& dom) const;
  /// First assignment to `free` outside `exclude` under which `cond` holds for
  /// every valuation of `univ`.
  std::optional<Witness> exists_forall(const Domain& free, const Domain& univ, const Expr& cond,
                                       const std::set<Witness>& exclude = {}) const;

  /// Calls `fn` for every satisfying valuation of `g` over the variables
  /// `g` references, in enumeration order, until it returns false.
  void for_each_model(const Expr& g, const Domain& dom, const std::function<bool(const Witness&)>& fn) const;

  /// Evaluates `roots` on every valuation of the referenced variables of
  /// `dom`. `fn(valuation, results)` receives one value per root, nullopt
  /// for a poisoned lane; returning false stops the enumeration.
  void enumerate(const std::vector<Expr>& roots, const Domain& dom,
                 const std::function<bool(const Witness&, const std::vector<std::optional<Value>>&)>& fn) const;

 private:
  std::uint64_t budget_;
  mutable std::atomic<std::uint64_t> evaluations_{0};
};

// SMT-LIB 2 scripts for the query forms above. Each script ends in
// (check-sat) and (get-model) where a model is meaningful.
std::string smt_sat(const Expr& g, const Domain& dom);
/// Satisfiable iff the implication fails.
std::string smt_implies(const Expr& g, const Expr& h, const Domain& dom);
/// Satisfiable iff some valuation of `eb` is covered by no candidate.
std::string smt_cover(const Expr& eb, const std::vector<Expr>& candidates, const Domain& dom);
std::string smt_exists_forall(const Domain& free, const Domain& univ, const Expr& cond);
std::string smt_expr(const Expr& e);

/// Runs `cmd <script-file>` and reads the first sat/unsat line. Returns
/// nullopt if the solver could not be run or answered anything else.
std::optional<bool> run_external_solver(const std::string& cmd, const std::string& script);

}  // namespace dfc
