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

#include <stdexcept>

#include "dfc/arith.hpp"
#include "dfc/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#define DFC_HAVE_AVX2_KERNELS 1
#endif

namespace dfc::kernels {

#ifdef DFC_HAVE_AVX2_KERNELS

namespace {

#define DFC_AVX2 __attribute__((target("avx2")))

DFC_AVX2 inline __m256i load(const Value* p) { return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p)); }
DFC_AVX2 inline void store(Value* p, __m256i v) { _mm256_storeu_si256(reinterpret_cast<__m256i*>(p), v); }
DFC_AVX2 inline __m256i sign_mask(__m256i x) { return _mm256_cmpgt_epi64(_mm256_setzero_si256(), x); }
DFC_AVX2 inline __m256i truth(__m256i x) {
  return _mm256_xor_si256(_mm256_cmpeq_epi64(x, _mm256_setzero_si256()), _mm256_set1_epi64x(-1));
}

}  // namespace

DFC_AVX2 void run_avx2(const Instr* code, std::size_t n, Registers& regs, std::size_t lanes) {
  const std::size_t padded = (lanes + 3) & ~std::size_t{3};
  const __m256i zero = _mm256_setzero_si256();
  const __m256i one = _mm256_set1_epi64x(1);
  const __m256i min64 = _mm256_set1_epi64x(INT64_MIN);
  for (std::size_t k = 0; k < n; ++k) {
    const Instr& in = code[k];
    Value* d = regs.val(in.dst);
    Value* dp = regs.psn(in.dst);
    const Value* pa = regs.val(in.a);
    const Value* pap = regs.psn(in.a);
    const Value* pb = regs.val(in.b);
    const Value* pbp = regs.psn(in.b);
    const Value* pc = regs.val(in.c);
    const Value* pcp = regs.psn(in.c);

    if (in.op == Op::Mul) {
      for (std::size_t i = 0; i < padded; ++i) {
        auto v = arith::mul(pa[i], pb[i]);
        bool bad = pap[i] || pbp[i] || !v;
        d[i] = bad ? 0 : *v;
        dp[i] = bad ? -1 : 0;
      }
      continue;
    }
    if (in.op == Op::Const) {
      const __m256i imm = _mm256_set1_epi64x(in.imm);
      for (std::size_t i = 0; i < padded; i += 4) {
        store(d + i, imm);
        store(dp + i, zero);
      }
      continue;
    }

    for (std::size_t i = 0; i < padded; i += 4) {
      __m256i a = load(pa + i);
      __m256i ap = load(pap + i);
      __m256i b = zero;
      __m256i bp = zero;
      if (in.op != Op::Not && in.op != Op::Neg) {
        b = load(pb + i);
        bp = load(pbp + i);
      }
      __m256i r;
      __m256i p;
      switch (in.op) {
        case Op::Not:
          r = _mm256_and_si256(_mm256_cmpeq_epi64(a, zero), one);
          p = ap;
          break;
        case Op::Neg:
          r = _mm256_sub_epi64(zero, a);
          p = _mm256_or_si256(ap, _mm256_cmpeq_epi64(a, min64));
          break;
        case Op::And:
        case Op::Or: {
          __m256i at = truth(a);
          __m256i bt = truth(b);
          if (in.op == Op::And) {
            at = _mm256_xor_si256(at, _mm256_set1_epi64x(-1));
            bt = _mm256_xor_si256(bt, _mm256_set1_epi64x(-1));
          }
          __m256i dom = _mm256_or_si256(_mm256_andnot_si256(ap, at), _mm256_andnot_si256(bp, bt));
          p = _mm256_andnot_si256(dom, _mm256_or_si256(ap, bp));
          // And: dominated lanes are false, the rest true; Or: the reverse.
          r = in.op == Op::And ? _mm256_andnot_si256(dom, one) : _mm256_and_si256(dom, one);
          break;
        }
        case Op::Xor:
          r = _mm256_and_si256(_mm256_xor_si256(truth(a), truth(b)), one);
          p = _mm256_or_si256(ap, bp);
          break;
        case Op::Add: {
          r = _mm256_add_epi64(a, b);
          __m256i ovf = sign_mask(_mm256_and_si256(_mm256_xor_si256(a, r), _mm256_xor_si256(b, r)));
          p = _mm256_or_si256(_mm256_or_si256(ap, bp), ovf);
          break;
        }
        case Op::Sub: {
          r = _mm256_sub_epi64(a, b);
          __m256i ovf = sign_mask(_mm256_and_si256(_mm256_xor_si256(a, b), _mm256_xor_si256(a, r)));
          p = _mm256_or_si256(_mm256_or_si256(ap, bp), ovf);
          break;
        }
        case Op::Eq: r = _mm256_and_si256(_mm256_cmpeq_epi64(a, b), one); p = _mm256_or_si256(ap, bp); break;
        case Op::Ne: r = _mm256_andnot_si256(_mm256_cmpeq_epi64(a, b), one); p = _mm256_or_si256(ap, bp); break;
        case Op::Lt: r = _mm256_and_si256(_mm256_cmpgt_epi64(b, a), one); p = _mm256_or_si256(ap, bp); break;
        case Op::Le: r = _mm256_andnot_si256(_mm256_cmpgt_epi64(a, b), one); p = _mm256_or_si256(ap, bp); break;
        case Op::Gt: r = _mm256_and_si256(_mm256_cmpgt_epi64(a, b), one); p = _mm256_or_si256(ap, bp); break;
        case Op::Ge: r = _mm256_andnot_si256(_mm256_cmpgt_epi64(b, a), one); p = _mm256_or_si256(ap, bp); break;
        case Op::Min:
          r = _mm256_blendv_epi8(a, b, _mm256_cmpgt_epi64(a, b));
          p = _mm256_or_si256(ap, bp);
          break;
        case Op::Max:
          r = _mm256_blendv_epi8(b, a, _mm256_cmpgt_epi64(a, b));
          p = _mm256_or_si256(ap, bp);
          break;
        case Op::Ite: {
          __m256i c = load(pc + i);
          __m256i cp = load(pcp + i);
          __m256i sel = truth(a);
          r = _mm256_blendv_epi8(c, b, sel);
          p = _mm256_or_si256(ap, _mm256_blendv_epi8(cp, bp, sel));
          break;
        }
        default:
          throw std::logic_error("leaf opcode in program");
      }
      store(d + i, _mm256_andnot_si256(p, r));
      store(dp + i, p);
    }
  }
}

#else

void run_avx2(const Instr* code, std::size_t n, Registers& regs, std::size_t lanes) {
  run_scalar(code, n, regs, lanes);
}

#endif

}  // namespace dfc::kernels
