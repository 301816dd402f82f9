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

#include "dfc/types.hpp"

#include <charconv>
#include <set>
#include <stdexcept>

#include "dfc/error.hpp"

namespace dfc {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::UnknownBlockKind: return "UnknownBlockKind";
    case ErrorKind::DuplicateName: return "DuplicateName";
    case ErrorKind::TypeAnnotationMissing: return "TypeAnnotationMissing";
    case ErrorKind::ArityError: return "ArityError";
    case ErrorKind::InvalidParameter: return "InvalidParameter";
    case ErrorKind::AlgebraicLoop: return "AlgebraicLoop";
    case ErrorKind::TypeMismatch: return "TypeMismatch";
    case ErrorKind::UnconnectedInput: return "UnconnectedInput";
    case ErrorKind::DataStoreOrder: return "DataStoreOrder";
    case ErrorKind::UnmappedPort: return "UnmappedPort";
    case ErrorKind::ConflictingOverride: return "ConflictingOverride";
    case ErrorKind::ArithmeticOverflow: return "ArithmeticOverflow";
    case ErrorKind::StateOutOfDomain: return "StateOutOfDomain";
    case ErrorKind::PathExplosion: return "PathExplosion";
    case ErrorKind::DomainTooLarge: return "DomainTooLarge";
    case ErrorKind::StateBudgetExceeded: return "StateBudgetExceeded";
    case ErrorKind::IterationCapExceeded: return "IterationCapExceeded";
    case ErrorKind::CsvSchema: return "CsvSchema";
    case ErrorKind::Io: return "Io";
  }
  return "Error";
}

DataType DataType::integer(Value lo, Value hi) {
  if (lo > hi) {
    throw Error(ErrorKind::InvalidParameter,
                "empty integer range [" + std::to_string(lo) + "," + std::to_string(hi) + "]");
  }
  return DataType(Kind::Int, lo, hi, {});
}

DataType DataType::enumeration(std::vector<std::string> variants) {
  if (variants.empty()) throw Error(ErrorKind::InvalidParameter, "enumeration without variants");
  std::set<std::string> seen;
  for (const auto& v : variants) {
    if (v.empty() || !seen.insert(v).second) {
      throw Error(ErrorKind::InvalidParameter, "enumeration variant '" + v + "' empty or repeated");
    }
  }
  auto n = static_cast<Value>(variants.size());
  return DataType(Kind::Enum, 0, n - 1, std::move(variants));
}

bool DataType::is_bounded() const {
  return !(kind_ == Kind::Int && lo_ == std::numeric_limits<Value>::min() &&
           hi_ == std::numeric_limits<Value>::max());
}

std::uint64_t DataType::domain_size() const {
  if (!is_bounded()) return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(hi_) - static_cast<std::uint64_t>(lo_) + 1;
}

bool DataType::same_kind(const DataType& other) const {
  if (kind_ != other.kind_) return false;
  return kind_ != Kind::Enum || variants_ == other.variants_;
}

std::string DataType::to_string() const {
  switch (kind_) {
    case Kind::Bool: return "bool";
    case Kind::Int:
      if (!is_bounded()) return "int";
      return "int[" + std::to_string(lo_) + "," + std::to_string(hi_) + "]";
    case Kind::Enum: {
      std::string out = "enum{";
      for (std::size_t i = 0; i < variants_.size(); ++i) {
        if (i) out += ",";
        out += variants_[i];
      }
      return out + "}";
    }
  }
  return "?";
}

std::string DataType::format_value(Value v) const {
  if (kind_ == Kind::Bool) return v ? "true" : "false";
  if (kind_ == Kind::Enum && v >= 0 && v < static_cast<Value>(variants_.size())) {
    return variants_[static_cast<std::size_t>(v)];
  }
  return std::to_string(v);
}

namespace {

std::optional<Value> parse_int(std::string_view text) {
  Value v = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last) return std::nullopt;
  return v;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::optional<Value> DataType::parse_value(std::string_view text) const {
  text = trim(text);
  std::optional<Value> v;
  if (kind_ == Kind::Bool) {
    if (text == "true") return 1;
    if (text == "false") return 0;
    v = parse_int(text);
  } else if (kind_ == Kind::Enum) {
    for (std::size_t i = 0; i < variants_.size(); ++i) {
      if (variants_[i] == text) return static_cast<Value>(i);
    }
    v = parse_int(text);
  } else {
    v = parse_int(text);
  }
  if (v && contains(*v)) return v;
  return std::nullopt;
}

std::optional<DataType> parse_data_type(std::string_view text) {
  text = trim(text);
  try {
    if (text == "bool") return DataType::boolean();
    if (text == "int") return DataType::unbounded_integer();
    if (text.starts_with("int[") && text.ends_with("]")) {
      auto body = text.substr(4, text.size() - 5);
      auto comma = body.find(',');
      if (comma == std::string_view::npos) return std::nullopt;
      auto lo = parse_int(trim(body.substr(0, comma)));
      auto hi = parse_int(trim(body.substr(comma + 1)));
      if (!lo || !hi || *lo > *hi) return std::nullopt;
      return DataType::integer(*lo, *hi);
    }
    if (text.starts_with("enum{") && text.ends_with("}")) {
      auto body = text.substr(5, text.size() - 6);
      std::vector<std::string> variants;
      std::size_t start = 0;
      while (start <= body.size()) {
        auto comma = body.find(',', start);
        if (comma == std::string_view::npos) comma = body.size();
        variants.emplace_back(trim(body.substr(start, comma - start)));
        start = comma + 1;
      }
      return DataType::enumeration(std::move(variants));
    }
  } catch (const Error&) {
    return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace dfc
