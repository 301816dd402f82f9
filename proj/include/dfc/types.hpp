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

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dfc {

/// Every signal value is carried as a 64-bit integer. Booleans are 0/1 and
/// enumeration literals are their zero-based variant index.
using Value = std::int64_t;

/// Assignment of values to named ports or variables.
using Valuation = std::map<std::string, Value, std::less<>>;

/// Finite value domain of a port, internal variable or signal.
///
/// Integer signals between blocks are unbounded (full 64-bit range); only
/// ports and internal variables carry a finite range. `is_bounded()` tells
/// the two apart.
class DataType {
 public:
  enum class Kind { Bool, Int, Enum };

  DataType() : DataType(Kind::Bool, 0, 1, {}) {}

  static DataType boolean() { return DataType(Kind::Bool, 0, 1, {}); }
  static DataType integer(Value lo, Value hi);
  static DataType unbounded_integer() {
    return DataType(Kind::Int, std::numeric_limits<Value>::min(),
                    std::numeric_limits<Value>::max(), {});
  }
  static DataType enumeration(std::vector<std::string> variants);

  Kind kind() const { return kind_; }
  bool is_bool() const { return kind_ == Kind::Bool; }
  bool is_int() const { return kind_ == Kind::Int; }
  bool is_enum() const { return kind_ == Kind::Enum; }

  Value lo() const { return lo_; }
  Value hi() const { return hi_; }
  const std::vector<std::string>& variants() const { return variants_; }

  bool is_bounded() const;
  bool contains(Value v) const { return v >= lo_ && v <= hi_; }
  /// Number of values; saturates at UINT64_MAX for unbounded integers.
  std::uint64_t domain_size() const;

  /// Same kind, and for enumerations the same variant list. Integer ranges
  /// are ignored.
  bool same_kind(const DataType& other) const;

  std::string to_string() const;
  std::string format_value(Value v) const;
  /// Accepts `true`/`false`/`0`/`1` for booleans, decimal integers, and
  /// variant names or indices for enumerations.
  std::optional<Value> parse_value(std::string_view text) const;

  friend bool operator==(const DataType& a, const DataType& b) {
    return a.kind_ == b.kind_ && a.lo_ == b.lo_ && a.hi_ == b.hi_ && a.variants_ == b.variants_;
  }

 private:
  DataType(Kind kind, Value lo, Value hi, std::vector<std::string> variants)
      : kind_(kind), lo_(lo), hi_(hi), variants_(std::move(variants)) {}

  Kind kind_;
  Value lo_;
  Value hi_;
  std::vector<std::string> variants_;
};

/// Parses `bool`, `int[lo,hi]` or `enum{A,B,...}`. Returns nullopt on any
/// malformed or invalid (empty range, duplicate variant) text.
std::optional<DataType> parse_data_type(std::string_view text);

}  // namespace dfc
