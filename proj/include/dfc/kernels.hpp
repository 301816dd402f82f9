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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dfc/expr.hpp"

namespace dfc::kernels {

/// Lanes evaluated per batch. A multiple of every vector width in use.
inline constexpr std::size_t kBatch = 256;

enum class Isa { Scalar, Avx2 };

const char* isa_name(Isa isa);
bool avx2_available();
/// ISA used by Program::run. Defaults to the best available one; the
/// environment variable DFC_ISA=scalar forces the scalar kernels.
Isa active_isa();
/// Overrides the ISA selection; nullopt restores the default.
void force_isa(std::optional<Isa> isa);

struct Instr {
  Op op;
  std::uint32_t dst;
  std::uint32_t a;
  std::uint32_t b;
  std::uint32_t c;
  Value imm;
};

/// Register file for one batch: values and poison masks (0 or -1), laid
/// out register-major with kBatch lanes each.
struct Registers {
  std::vector<Value> vals;
  std::vector<Value> poison;

  explicit Registers(std::size_t n) : vals(n * kBatch), poison(n * kBatch) {}
  Value* val(std::uint32_t r) { return vals.data() + r * kBatch; }
  Value* psn(std::uint32_t r) { return poison.data() + r * kBatch; }
  const Value* val(std::uint32_t r) const { return vals.data() + r * kBatch; }
  const Value* psn(std::uint32_t r) const { return poison.data() + r * kBatch; }
};

/// Straight-line code evaluating several expressions over batches of leaf
/// valuations. Common subexpressions are computed once. Overflow poisons a
/// lane with the same rules as try_evaluate.
class Program {
 public:
  /// `leaves` names the Input/Var leaves in register order; any leaf of
  /// `roots` not listed is an error.
  Program(const std::vector<Expr>& roots, const std::vector<std::string>& leaves);

  std::size_t num_leaves() const { return num_leaves_; }
  std::size_t num_registers() const { return num_regs_; }
  std::uint32_t root(std::size_t i) const { return roots_[i]; }
  const std::vector<Instr>& code() const { return code_; }

  Registers make_registers() const { return Registers(num_regs_); }
  /// Leaf registers [0, num_leaves) must be filled, with zero poison.
  void run(Registers& regs, std::size_t lanes) const { run(regs, lanes, active_isa()); }
  void run(Registers& regs, std::size_t lanes, Isa isa) const;

 private:
  std::size_t num_leaves_ = 0;
  std::size_t num_regs_ = 0;
  std::vector<Instr> code_;
  std::vector<std::uint32_t> roots_;
};

void run_scalar(const Instr* code, std::size_t n, Registers& regs, std::size_t lanes);
void run_avx2(const Instr* code, std::size_t n, Registers& regs, std::size_t lanes);

}  // namespace dfc::kernels
