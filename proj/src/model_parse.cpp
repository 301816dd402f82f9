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

#include <cctype>
#include <charconv>
#include <set>
#include <sstream>

#include "dfc/error.hpp"
#include "dfc/model.hpp"

namespace dfc {

const char* to_string(BlockKind kind) {
  switch (kind) {
    case BlockKind::Inport: return "Inport";
    case BlockKind::Outport: return "Outport";
    case BlockKind::Constant: return "Constant";
    case BlockKind::UnitDelay: return "UnitDelay";
    case BlockKind::Switch: return "Switch";
    case BlockKind::Logic: return "Logic";
    case BlockKind::Relational: return "Relational";
    case BlockKind::Sum: return "Sum";
    case BlockKind::Product: return "Product";
    case BlockKind::Gain: return "Gain";
    case BlockKind::MinMax: return "MinMax";
    case BlockKind::Saturation: return "Saturation";
    case BlockKind::DataStoreMemory: return "DataStoreMemory";
    case BlockKind::DataStoreRead: return "DataStoreRead";
    case BlockKind::DataStoreWrite: return "DataStoreWrite";
    case BlockKind::Subsystem: return "Subsystem";
    case BlockKind::EnabledSubsystem: return "EnabledSubsystem";
    case BlockKind::Hold: return "Hold";
  }
  return "?";
}

std::optional<BlockKind> block_kind_from_string(std::string_view name) {
  static const BlockKind kinds[] = {
      BlockKind::Constant,       BlockKind::UnitDelay,       BlockKind::Switch,
      BlockKind::Logic,          BlockKind::Relational,      BlockKind::Sum,
      BlockKind::Product,        BlockKind::Gain,            BlockKind::MinMax,
      BlockKind::Saturation,     BlockKind::DataStoreMemory, BlockKind::DataStoreRead,
      BlockKind::DataStoreWrite, BlockKind::Subsystem,       BlockKind::EnabledSubsystem};
  for (auto k : kinds) {
    if (name == to_string(k)) return k;
  }
  return std::nullopt;
}

const Block* Diagram::find(std::string_view name) const {
  for (const auto& b : blocks) {
    if (b.name == name) return &b;
  }
  return nullptr;
}

bool Diagram::operator==(const Diagram& other) const {
  return blocks == other.blocks && wires == other.wires;
}

std::vector<std::string> Block::input_ports() const {
  std::vector<std::string> out;
  auto numbered = [&](int n) {
    for (int i = 1; i <= n; ++i) out.push_back("in" + std::to_string(i));
  };
  switch (kind) {
    case BlockKind::Inport:
    case BlockKind::Constant:
    case BlockKind::DataStoreMemory:
    case BlockKind::DataStoreRead:
      break;
    case BlockKind::Outport:
    case BlockKind::UnitDelay:
    case BlockKind::Gain:
    case BlockKind::Saturation:
    case BlockKind::DataStoreWrite:
    case BlockKind::Hold:
      numbered(1);
      break;
    case BlockKind::Switch: numbered(3); break;
    case BlockKind::Relational: numbered(2); break;
    case BlockKind::Sum: numbered(static_cast<int>(signs.size())); break;
    case BlockKind::Logic:
    case BlockKind::Product:
    case BlockKind::MinMax:
      numbered(num_inputs);
      break;
    case BlockKind::Subsystem:
    case BlockKind::EnabledSubsystem:
      for (const auto& b : body.blocks) {
        if (b.kind == BlockKind::Inport) out.push_back(b.name);
      }
      if (kind == BlockKind::EnabledSubsystem) out.push_back("enable");
      break;
  }
  return out;
}

std::vector<std::string> Block::output_ports() const {
  switch (kind) {
    case BlockKind::Outport:
    case BlockKind::DataStoreMemory:
    case BlockKind::DataStoreWrite:
      return {};
    case BlockKind::Subsystem:
    case BlockKind::EnabledSubsystem: {
      std::vector<std::string> out;
      for (const auto& b : body.blocks) {
        if (b.kind == BlockKind::Outport) out.push_back(b.name);
      }
      return out;
    }
    default:
      return {"out"};
  }
}

std::vector<Port> Model::inputs() const {
  std::vector<Port> out;
  for (const auto& b : root.blocks) {
    if (b.kind == BlockKind::Inport) out.push_back(Port{b.name, Direction::In, *b.type});
  }
  return out;
}

std::vector<Port> Model::outputs() const {
  std::vector<Port> out;
  for (const auto& b : root.blocks) {
    if (b.kind == BlockKind::Outport) out.push_back(Port{b.name, Direction::Out, *b.type});
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class LineCursor {
 public:
  LineCursor(std::string_view text, int line) : text_(text), line_(line) {}

  int line() const { return line_; }
  int col() const { return static_cast<int>(pos_) + 1; }

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\r')) ++pos_;
  }
  bool at_end() {
    skip_ws();
    return pos_ >= text_.size() || text_[pos_] == '#';
  }
  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }
  bool consume(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }
  bool consume(std::string_view s) {
    skip_ws();
    if (text_.substr(pos_, s.size()) != s) return false;
    pos_ += s.size();
    return true;
  }
  void expect(char c) {
    if (!consume(c)) fail(std::string("expected '") + c + "'");
  }
  std::string ident(const char* what = "identifier") {
    skip_ws();
    if (pos_ >= text_.size() || !is_ident_start(text_[pos_])) fail(std::string("expected ") + what);
    std::size_t start = pos_;
    while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }
  Value integer() {
    skip_ws();
    std::size_t start = pos_;
    if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) ++pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    Value v = 0;
    const char* first = text_.data() + start;
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, text_.data() + pos_, v);
    if (ec != std::errc() || ptr != text_.data() + pos_) {
      pos_ = start;
      fail("expected integer");
    }
    return v;
  }
  /// Raw text up to the matching ')', not consuming it.
  std::string until_close_paren() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != ')') ++pos_;
    if (pos_ >= text_.size()) fail("missing ')'");
    return std::string(text_.substr(start, pos_ - start));
  }

  DataType data_type() {
    std::string word = ident("type");
    if (word == "bool") return DataType::boolean();
    if (word == "int") {
      if (!consume('[')) return DataType::unbounded_integer();
      Value lo = integer();
      expect(',');
      Value hi = integer();
      expect(']');
      if (lo > hi) fail("empty integer range");
      return DataType::integer(lo, hi);
    }
    if (word == "enum") {
      expect('{');
      std::vector<std::string> variants;
      std::set<std::string> seen;
      do {
        auto v = ident("enumeration variant");
        if (!seen.insert(v).second) fail("repeated enumeration variant '" + v + "'");
        variants.push_back(v);
      } while (consume(','));
      expect('}');
      return DataType::enumeration(std::move(variants));
    }
    fail("unknown type '" + word + "'");
  }

  [[noreturn]] void fail(const std::string& message) const { throw SyntaxError(line_, col(), message); }

 private:
  std::string_view text_;
  int line_;
  std::size_t pos_ = 0;
};

std::vector<std::string> split_params(const std::string& raw) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : raw) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != ' ' && c != '\t') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  if (out.size() == 1 && out[0].empty()) out.clear();
  return out;
}

std::optional<Value> to_int(const std::string& s) {
  Value v = 0;
  const char* first = s.data();
  if (!s.empty() && s[0] == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Model parse() {
    Model m;
    bool have_header = false;
    std::vector<Diagram*> stack;
    std::vector<std::set<std::string>> names;
    std::vector<SourcePos> open_pos;
    int line_no = 0;
    std::size_t start = 0;
    while (start <= text_.size()) {
      std::size_t end = text_.find('\n', start);
      if (end == std::string_view::npos) end = text_.size();
      std::string_view line = text_.substr(start, end - start);
      ++line_no;
      start = end + 1;
      LineCursor cur(line, line_no);
      if (cur.at_end()) {
        if (end == text_.size()) break;
        continue;
      }
      SourcePos pos{line_no, cur.col()};
      if (!have_header) {
        if (!is_ident_start(cur.peek()) || cur.ident() != "model") {
          throw SyntaxError(pos.line, pos.col, "expected 'model <name>' header");
        }
        m.name = cur.ident("model name");
        if (!cur.at_end()) cur.fail("unexpected text after model name");
        have_header = true;
        stack.push_back(&m.root);
        names.emplace_back();
        if (end == text_.size()) break;
        continue;
      }
      if (cur.consume('}')) {
        if (stack.size() <= 1) cur.fail("unbalanced '}'");
        stack.pop_back();
        names.pop_back();
        open_pos.pop_back();
      } else {
        std::string keyword = cur.ident("keyword");
        Diagram& d = *stack.back();
        if (keyword == "in" || keyword == "out") {
          Block b;
          b.pos = pos;
          b.kind = keyword == "in" ? BlockKind::Inport : BlockKind::Outport;
          b.name = cur.ident("port name");
          declare(names.back(), b.name, pos);
          if (!cur.consume(':')) {
            throw Error(ErrorKind::TypeAnnotationMissing, where(pos) + "port '" + b.name + "' has no type");
          }
          b.type = cur.data_type();
          b.value = b.type->lo();
          if (b.kind == BlockKind::Outport && cur.consume('=')) {
            b.value = parse_typed_value(cur, *b.type);
            b.has_value = true;
          }
          d.blocks.push_back(std::move(b));
        } else if (keyword == "block") {
          Block b = parse_block(cur, pos);
          declare(names.back(), b.name, pos);
          bool opens = cur.consume('{');
          if (opens != b.is_subsystem()) {
            cur.fail(opens ? "only subsystems take a '{' body" : "subsystem requires a '{' body");
          }
          d.blocks.push_back(std::move(b));
          if (opens) {
            stack.push_back(&d.blocks.back().body);
            names.emplace_back();
            open_pos.push_back(pos);
          }
        } else if (keyword == "wire") {
          Connection w;
          w.pos = pos;
          w.src_block = cur.ident("source block");
          cur.expect('.');
          w.src_port = cur.ident("source port");
          if (!cur.consume("->")) cur.fail("expected '->'");
          w.dst_block = cur.ident("target block");
          cur.expect('.');
          w.dst_port = cur.ident("target port");
          d.wires.push_back(std::move(w));
        } else if (keyword == "model") {
          cur.fail("duplicate 'model' header");
        } else {
          throw SyntaxError(pos.line, pos.col, "unknown statement '" + keyword + "'");
        }
      }
      if (!cur.at_end()) cur.fail("unexpected trailing text");
      if (end == text_.size()) break;
    }
    if (!have_header) throw SyntaxError(line_no, 1, "empty model: expected 'model <name>' header");
    if (stack.size() != 1) {
      throw SyntaxError(open_pos.back().line, open_pos.back().col, "subsystem body is not closed");
    }
    return m;
  }

 private:
  static std::string where(const SourcePos& p) {
    return std::to_string(p.line) + ":" + std::to_string(p.col) + ": ";
  }

  static void declare(std::set<std::string>& names, const std::string& name, const SourcePos& pos) {
    if (!names.insert(name).second) {
      throw Error(ErrorKind::DuplicateName, where(pos) + "name '" + name + "' declared twice");
    }
  }

  static Value parse_typed_value(LineCursor& cur, const DataType& type) {
    cur.skip_ws();
    std::string token;
    if (cur.peek() == '-' || cur.peek() == '+' || std::isdigit(static_cast<unsigned char>(cur.peek()))) {
      token = std::to_string(cur.integer());
    } else {
      token = cur.ident("value");
    }
    auto v = type.parse_value(token);
    if (!v) cur.fail("value '" + token + "' is not in " + type.to_string());
    return *v;
  }

  Block parse_block(LineCursor& cur, const SourcePos& pos) {
    Block b;
    b.pos = pos;
    b.name = cur.ident("block name");
    cur.expect(':');
    std::string kind_name = cur.ident("block kind");
    auto kind = block_kind_from_string(kind_name);
    if (!kind) throw Error(ErrorKind::UnknownBlockKind, where(pos) + "unknown block kind '" + kind_name + "'");
    b.kind = *kind;
    std::vector<std::string> params;
    if (cur.consume('(')) {
      params = split_params(cur.until_close_paren());
      cur.expect(')');
    }
    if (cur.consume(':')) b.type = cur.data_type();

    auto bad = [&](const std::string& msg) -> Error {
      return Error(ErrorKind::InvalidParameter, where(pos) + b.name + ": " + msg);
    };
    auto want = [&](std::size_t lo, std::size_t hi) {
      if (params.size() < lo || params.size() > hi) {
        throw bad(std::string(to_string(b.kind)) + " takes " + std::to_string(lo) +
                  (lo == hi ? "" : "-" + std::to_string(hi)) + " parameter(s)");
      }
    };
    auto int_param = [&](std::size_t i) -> Value {
      auto v = to_int(params[i]);
      if (!v) throw bad("parameter '" + params[i] + "' is not an integer");
      return *v;
    };
    auto arity_param = [&](std::size_t i, int def) -> int {
      if (params.size() <= i) return def;
      Value n = int_param(i);
      if (n < 2 || n > 64) throw bad("input count must be within [2,64]");
      return static_cast<int>(n);
    };
    auto typed_value = [&](const std::string& raw) -> Value {
      auto v = b.type->parse_value(raw);
      if (!v) throw bad("value '" + raw + "' is not in " + b.type->to_string());
      return *v;
    };
    if (b.type && !(b.kind == BlockKind::Constant || b.kind == BlockKind::UnitDelay ||
                    b.kind == BlockKind::DataStoreMemory)) {
      throw bad(std::string(to_string(b.kind)) + " does not take a type annotation");
    }

    switch (b.kind) {
      case BlockKind::Constant:
        want(1, 1);
        if (!b.type) {
          if (params[0] == "true" || params[0] == "false") {
            b.type = DataType::boolean();
          } else if (to_int(params[0])) {
            b.type = DataType::unbounded_integer();
          } else {
            throw Error(ErrorKind::TypeAnnotationMissing,
                        where(pos) + b.name + ": constant '" + params[0] + "' needs a type");
          }
        }
        b.value = typed_value(params[0]);
        break;
      case BlockKind::UnitDelay:
      case BlockKind::DataStoreMemory:
        want(1, 1);
        if (!b.type) {
          throw Error(ErrorKind::TypeAnnotationMissing, where(pos) + b.name + ": " + to_string(b.kind) +
                                                            " needs a type annotation");
        }
        if (!b.type->is_bounded()) throw bad("internal state needs a bounded type");
        b.value = typed_value(params[0]);
        break;
      case BlockKind::Switch:
      case BlockKind::Subsystem:
      case BlockKind::EnabledSubsystem:
        want(0, 0);
        break;
      case BlockKind::Logic: {
        want(1, 2);
        const std::string& op = params[0];
        if (op == "AND") b.logic = LogicOp::And;
        else if (op == "OR") b.logic = LogicOp::Or;
        else if (op == "XOR") b.logic = LogicOp::Xor;
        else if (op == "NOT") b.logic = LogicOp::Not;
        else throw bad("unknown logic operator '" + op + "'");
        if (b.logic == LogicOp::Not) {
          want(1, 1);
          b.num_inputs = 1;
        } else {
          b.num_inputs = arity_param(1, 2);
        }
        break;
      }
      case BlockKind::Relational: {
        want(1, 1);
        const std::string& op = params[0];
        if (op == "==") b.rel = RelOp::Eq;
        else if (op == "!=") b.rel = RelOp::Ne;
        else if (op == "<") b.rel = RelOp::Lt;
        else if (op == "<=") b.rel = RelOp::Le;
        else if (op == ">") b.rel = RelOp::Gt;
        else if (op == ">=") b.rel = RelOp::Ge;
        else throw bad("unknown relational operator '" + op + "'");
        break;
      }
      case BlockKind::Sum:
        want(0, 1);
        b.signs = params.empty() ? "++" : params[0];
        if (b.signs.empty() || b.signs.size() > 64 ||
            b.signs.find_first_not_of("+-") != std::string::npos) {
          throw bad("Sum signs must be a non-empty string of '+'/'-'");
        }
        break;
      case BlockKind::Product:
        want(0, 1);
        b.num_inputs = arity_param(0, 2);
        break;
      case BlockKind::Gain:
        want(1, 1);
        b.value = int_param(0);
        break;
      case BlockKind::MinMax:
        want(1, 2);
        if (params[0] == "min") b.minmax = MinMaxMode::Min;
        else if (params[0] == "max") b.minmax = MinMaxMode::Max;
        else throw bad("MinMax mode must be 'min' or 'max'");
        b.num_inputs = arity_param(1, 2);
        break;
      case BlockKind::Saturation:
        want(2, 2);
        b.lo = int_param(0);
        b.hi = int_param(1);
        if (b.lo > b.hi) throw bad("Saturation lower bound exceeds upper bound");
        break;
      case BlockKind::DataStoreRead:
      case BlockKind::DataStoreWrite:
        want(1, 1);
        if (params[0].empty() || !is_ident_start(params[0][0])) throw bad("store name expected");
        b.store = params[0];
        break;
      default:
        throw Error(ErrorKind::UnknownBlockKind, where(pos) + "block kind not allowed here");
    }
    return b;
  }

  std::string_view text_;
};

const char* rel_text(RelOp op) {
  switch (op) {
    case RelOp::Eq: return "==";
    case RelOp::Ne: return "!=";
    case RelOp::Lt: return "<";
    case RelOp::Le: return "<=";
    case RelOp::Gt: return ">";
    case RelOp::Ge: return ">=";
  }
  return "?";
}

const char* logic_text(LogicOp op) {
  switch (op) {
    case LogicOp::And: return "AND";
    case LogicOp::Or: return "OR";
    case LogicOp::Not: return "NOT";
    case LogicOp::Xor: return "XOR";
  }
  return "?";
}

void print_diagram(std::ostringstream& out, const Diagram& d, const std::string& indent) {
  for (const auto& b : d.blocks) {
    out << indent;
    switch (b.kind) {
      case BlockKind::Inport:
        out << "in " << b.name << " : " << b.type->to_string() << "\n";
        continue;
      case BlockKind::Outport:
        out << "out " << b.name << " : " << b.type->to_string();
        if (b.has_value) out << " = " << b.type->format_value(b.value);
        out << "\n";
        continue;
      default:
        break;
    }
    out << "block " << b.name << " : " << to_string(b.kind);
    switch (b.kind) {
      case BlockKind::Constant:
      case BlockKind::UnitDelay:
      case BlockKind::DataStoreMemory:
        out << "(" << b.type->format_value(b.value) << ") : " << b.type->to_string();
        break;
      case BlockKind::Logic:
        out << "(" << logic_text(b.logic);
        if (b.logic != LogicOp::Not) out << "," << b.num_inputs;
        out << ")";
        break;
      case BlockKind::Relational: out << "(" << rel_text(b.rel) << ")"; break;
      case BlockKind::Sum: out << "(" << b.signs << ")"; break;
      case BlockKind::Product: out << "(" << b.num_inputs << ")"; break;
      case BlockKind::Gain: out << "(" << b.value << ")"; break;
      case BlockKind::MinMax:
        out << "(" << (b.minmax == MinMaxMode::Min ? "min" : "max") << "," << b.num_inputs << ")";
        break;
      case BlockKind::Saturation: out << "(" << b.lo << "," << b.hi << ")"; break;
      case BlockKind::DataStoreRead:
      case BlockKind::DataStoreWrite:
        out << "(" << b.store << ")";
        break;
      default:
        break;
    }
    if (b.is_subsystem()) {
      out << " {\n";
      print_diagram(out, b.body, indent + "  ");
      out << indent << "}";
    }
    out << "\n";
  }
  for (const auto& w : d.wires) {
    out << indent << "wire " << w.src_block << "." << w.src_port << " -> " << w.dst_block << "."
        << w.dst_port << "\n";
  }
}

}  // namespace

Model parse_model(std::string_view text) { return Parser(text).parse(); }

std::string print_model(const Model& m) {
  std::ostringstream out;
  out << "model " << m.name << "\n";
  print_diagram(out, m.root, "");
  return out.str();
}

}  // namespace dfc
