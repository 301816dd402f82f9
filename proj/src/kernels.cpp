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

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <cstring>
#include <map>
#include <stdexcept>

#include "dfc/arith.hpp"
#include "dfc/error.hpp"
#include "dfc/kernels.hpp"

namespace dfc::kernels {

namespace {

std::atomic<int> g_forced{-1};

}  // namespace

const char* isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

bool avx2_available() {
#if defined(__x86_64__) || defined(__i386__)
  static const bool ok = __builtin_cpu_supports("avx2");
  return ok;
#else
  return false;
#endif
}

Isa active_isa() {
  int forced = g_forced.load(std::memory_order_relaxed);
  if (forced >= 0) return static_cast<Isa>(forced);
  static const Isa chosen = [] {
    const char* env = std::getenv("DFC_ISA");
    if (env && std::strcmp(env, "scalar") == 0) return Isa::Scalar;
    return avx2_available() ? Isa::Avx2 : Isa::Scalar;
  }();
  return chosen;
}

void force_isa(std::optional<Isa> isa) {
  if (isa == Isa::Avx2 && !avx2_available()) throw std::runtime_error("AVX2 is not supported on this CPU");
  g_forced.store(isa ? static_cast<int>(*isa) : -1, std::memory_order_relaxed);
}

Program::Program(const std::vector<Expr>& roots, const std::vector<std::string>& leaves)
    : num_leaves_(leaves.size()), num_regs_(leaves.size()) {
  std::map<std::string, std::uint32_t, std::less<>> leaf_reg;
  for (std::uint32_t i = 0; i < leaves.size(); ++i) leaf_reg[leaves[i]] = i;
  std::map<Expr, std::uint32_t> memo;

  auto emit = [&](auto& self, const Expr& e) -> std::uint32_t {
    if (e.op() == Op::Input || e.op() == Op::Var) {
      auto it = leaf_reg.find(e.name());
      if (it == leaf_reg.end()) throw std::invalid_argument("unbound leaf '" + e.name() + "'");
      return it->second;
    }
    if (e.op() == Op::Sig) throw std::invalid_argument("signal leaf '" + e.name() + "' in compiled expression");
    if (auto it = memo.find(e); it != memo.end()) return it->second;
    Instr in{e.op(), 0, 0, 0, 0, 0};
    if (e.op() == Op::Const) {
      in.imm = e.value();
    } else {
      in.a = self(self, e.arg(0));
      if (e.arity() > 1) in.b = self(self, e.arg(1));
      if (e.arity() > 2) in.c = self(self, e.arg(2));
    }
    in.dst = static_cast<std::uint32_t>(num_regs_++);
    code_.push_back(in);
    memo.emplace(e, in.dst);
    return in.dst;
  };
  for (const auto& r : roots) roots_.push_back(emit(emit, r));
}

void Program::run(Registers& regs, std::size_t lanes, Isa isa) const {
  if (isa == Isa::Avx2) {
    run_avx2(code_.data(), code_.size(), regs, lanes);
  } else {
    run_scalar(code_.data(), code_.size(), regs, lanes);
  }
}

void run_scalar(const Instr* code, std::size_t n, Registers& regs, std::size_t lanes) {
  for (std::size_t k = 0; k < n; ++k) {
    const Instr& in = code[k];
    Value* d = regs.val(in.dst);
    Value* dp = regs.psn(in.dst);
    const Value* a = regs.val(in.a);
    const Value* ap = regs.psn(in.a);
    const Value* b = regs.val(in.b);
    const Value* bp = regs.psn(in.b);
    for (std::size_t i = 0; i < lanes; ++i) {
      Value r = 0;
      bool bad = false;
      switch (in.op) {
        case Op::Const: r = in.imm; break;
        case Op::Not: r = a[i] == 0; bad = ap[i]; break;
        case Op::Neg: {
          auto v = arith::neg(a[i]);
          r = v.value_or(0);
          bad = ap[i] || !v;
          break;
        }
        case Op::And:
        case Op::Or: {
          bool dom = in.op == Op::Or;
          bool a_dom = !ap[i] && (a[i] != 0) == dom;
          bool b_dom = !bp[i] && (b[i] != 0) == dom;
          if (a_dom || b_dom) {
            r = dom;
          } else {
            r = !dom;
            bad = ap[i] || bp[i];
          }
          break;
        }
        case Op::Xor: r = (a[i] != 0) != (b[i] != 0); bad = ap[i] || bp[i]; break;
        case Op::Add:
        case Op::Sub:
        case Op::Mul: {
          auto v = in.op == Op::Add ? arith::add(a[i], b[i])
                   : in.op == Op::Sub ? arith::sub(a[i], b[i]) : arith::mul(a[i], b[i]);
          r = v.value_or(0);
          bad = ap[i] || bp[i] || !v;
          break;
        }
        case Op::Eq: r = a[i] == b[i]; bad = ap[i] || bp[i]; break;
        case Op::Ne: r = a[i] != b[i]; bad = ap[i] || bp[i]; break;
        case Op::Lt: r = a[i] < b[i]; bad = ap[i] || bp[i]; break;
        case Op::Le: r = a[i] <= b[i]; bad = ap[i] || bp[i]; break;
        case Op::Gt: r = a[i] > b[i]; bad = ap[i] || bp[i]; break;
        case Op::Ge: r = a[i] >= b[i]; bad = ap[i] || bp[i]; break;
        case Op::Min: r = std::min(a[i], b[i]); bad = ap[i] || bp[i]; break;
        case Op::Max: r = std::max(a[i], b[i]); bad = ap[i] || bp[i]; break;
        case Op::Ite: {
          const Value* src = a[i] != 0 ? b : regs.val(in.c);
          const Value* srcp = a[i] != 0 ? bp : regs.psn(in.c);
          r = src[i];
          bad = ap[i] || srcp[i];
          break;
        }
        default: throw std::logic_error("leaf opcode in program");
      }
      d[i] = bad ? 0 : r;
      dp[i] = bad ? -1 : 0;
    }
  }
}

}  // namespace dfc::kernels
