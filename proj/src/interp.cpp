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

#include "dfc/interp.hpp"

#include <optional>
#include <sstream>

#include "dfc/arith.hpp"
#include "dfc/error.hpp"

namespace dfc {

SimState initial_state(const FlatModel& m) {
  SimState s;
  for (const auto& v : m.vars) s.values[v.name] = v.init;
  return s;
}

Interpreter::Interpreter(FlatModel m) : m_(std::move(m)), schedule_(sorted_order(m_)) {
  for (const auto& name : schedule_.output_phase) order_.push_back(m_.find_block(name));
}

namespace {

using Maybe = std::optional<Value>;

Maybe lift(Maybe a, Maybe b, std::optional<Value> (*f)(Value, Value)) {
  if (!a || !b) return std::nullopt;
  return f(*a, *b);
}

// And/Or: a dominating operand wins over an overflowed one.
Maybe logic_fold(const std::vector<Maybe>& in, bool is_and) {
  bool poisoned = false;
  for (const auto& v : in) {
    if (!v) {
      poisoned = true;
    } else if ((*v != 0) != is_and) {
      return is_and ? 0 : 1;
    }
  }
  if (poisoned) return std::nullopt;
  return is_and ? 1 : 0;
}

}  // namespace

StepResult Interpreter::step(const SimState& s, const Valuation& inputs) const {
  for (const auto& p : m_.inputs) {
    auto it = inputs.find(p.name);
    if (it == inputs.end()) throw Error(ErrorKind::InvalidParameter, "no value for input '" + p.name + "'");
    if (!p.type.contains(it->second)) {
      throw Error(ErrorKind::InvalidParameter, "input " + p.name + " = " + std::to_string(it->second) +
                                                   " outside " + p.type.to_string());
    }
  }
  for (const auto& v : m_.vars) {
    auto it = s.values.find(v.name);
    if (it == s.values.end() || !v.type.contains(it->second)) {
      throw Error(ErrorKind::StateOutOfDomain, "state variable '" + v.name + "' missing or outside " + v.type.to_string());
    }
  }

  std::map<std::string, Maybe, std::less<>> sig;
  std::map<std::string, Maybe, std::less<>> store;
  for (const auto& st : m_.stores) {
    store[st.name] = st.global ? inputs.at(st.name) : s.values.at(st.name);
  }
  auto val = [&](const SignalRef& r) -> Maybe {
    if (r.kind == SignalRef::Kind::Input) return inputs.at(r.name);
    return sig.at(r.name);
  };
  // Enable conjunction: nullopt when undecidable because of overflow.
  auto enabled = [&](const FlatBlock& b) -> Maybe {
    std::vector<Maybe> in;
    for (const auto& e : b.enable) in.push_back(val(e));
    return logic_fold(in, true);
  };

  for (const FlatBlock* bp : order_) {
    const FlatBlock& b = *bp;
    std::vector<Maybe> in;
    if (b.kind != BlockKind::UnitDelay) {
      for (const auto& r : b.inputs) in.push_back(val(r));
    }
    Maybe out;
    switch (b.kind) {
      case BlockKind::Constant: out = b.value; break;
      case BlockKind::UnitDelay: out = s.values.at(b.var); break;
      case BlockKind::Switch:
        if (in[1]) out = *in[1] != 0 ? in[0] : in[2];
        break;
      case BlockKind::Logic:
        switch (b.logic) {
          case LogicOp::Not:
            if (in[0]) out = *in[0] == 0;
            break;
          case LogicOp::And: out = logic_fold(in, true); break;
          case LogicOp::Or: out = logic_fold(in, false); break;
          case LogicOp::Xor: {
            Value acc = 0;
            out = acc;
            for (const auto& v : in) {
              if (!v) {
                out.reset();
                break;
              }
              acc ^= (*v != 0);
              out = acc;
            }
            break;
          }
        }
        break;
      case BlockKind::Relational:
        if (in[0] && in[1]) {
          Value a = *in[0], c = *in[1];
          switch (b.rel) {
            case RelOp::Eq: out = a == c; break;
            case RelOp::Ne: out = a != c; break;
            case RelOp::Lt: out = a < c; break;
            case RelOp::Le: out = a <= c; break;
            case RelOp::Gt: out = a > c; break;
            case RelOp::Ge: out = a >= c; break;
          }
        }
        break;
      case BlockKind::Sum: {
        out = b.signs[0] == '-' ? (in[0] ? arith::neg(*in[0]) : std::nullopt) : in[0];
        for (std::size_t i = 1; i < in.size(); ++i) out = lift(out, in[i], b.signs[i] == '-' ? arith::sub : arith::add);
        break;
      }
      case BlockKind::Product:
        out = in[0];
        for (std::size_t i = 1; i < in.size(); ++i) out = lift(out, in[i], arith::mul);
        break;
      case BlockKind::Gain: out = lift(in[0], b.value, arith::mul); break;
      case BlockKind::MinMax:
        out = in[0];
        for (std::size_t i = 1; i < in.size(); ++i) {
          if (!out || !in[i]) {
            out.reset();
            break;
          }
          out = b.minmax == MinMaxMode::Min ? std::min(*out, *in[i]) : std::max(*out, *in[i]);
        }
        break;
      case BlockKind::Saturation:
        if (in[0]) out = std::min(std::max(*in[0], b.lo), b.hi);
        break;
      case BlockKind::DataStoreRead: out = store.at(b.store); break;
      case BlockKind::DataStoreWrite: {
        Maybe en = enabled(b);
        if (!en) {
          store[b.store].reset();
        } else if (*en) {
          store[b.store] = in[0];
        }
        continue;
      }
      case BlockKind::Hold: {
        Maybe en = enabled(b);
        if (en) out = *en ? in[0] : Maybe(s.values.at(b.var));
        break;
      }
      default:
        throw Error(ErrorKind::InvalidParameter, std::string("cannot execute ") + to_string(b.kind));
    }
    sig[b.name] = out;
  }

  auto require = [](Maybe v, const std::string& what) {
    if (!v) throw Error(ErrorKind::ArithmeticOverflow, "64-bit overflow reaches " + what);
    return *v;
  };

  StepResult r;
  for (const auto& [port, driver] : m_.output_drivers) r.outputs[port] = require(val(driver), "output " + port);
  for (const auto& st : m_.stores) {
    if (st.global) r.outputs[st.name] = require(store.at(st.name), "data store " + st.name);
  }
  r.next = s;
  for (const auto& name : schedule_.update_phase) {
    const FlatBlock& b = *m_.find_block(name);
    if (b.kind == BlockKind::Hold) {
      r.next.values[b.var] = require(sig.at(b.name), "state " + b.var);
      continue;
    }
    Maybe en = b.enable.empty() ? Maybe(1) : enabled(b);
    if (require(en, "enable of " + b.name) != 0) {
      r.next.values[b.var] = require(val(b.inputs[0]), "state " + b.var);
    }
  }
  for (const auto& st : m_.stores) {
    if (!st.global) r.next.values[st.name] = require(store.at(st.name), "data store " + st.name);
  }
  for (const auto& v : m_.vars) {
    Value x = r.next.values.at(v.name);
    if (!v.type.contains(x)) {
      throw Error(ErrorKind::StateOutOfDomain, "state variable " + v.name + " would become " + std::to_string(x) +
                                                   ", outside " + v.type.to_string());
    }
  }
  return r;
}

Trace Interpreter::run(const std::vector<Valuation>& inputs) const { return run_from(initial_state(m_), inputs); }

Trace Interpreter::run_from(SimState s, const std::vector<Valuation>& inputs) const {
  Trace t;
  for (const auto& u : inputs) {
    StepResult r = step(s, u);
    Valuation restricted;
    for (const auto& p : m_.inputs) restricted[p.name] = u.at(p.name);
    t.steps.push_back({std::move(restricted), std::move(r.outputs)});
    s = std::move(r.next);
  }
  return t;
}

namespace {

std::vector<std::string> split_row(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    std::string_view cell = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r')) cell.remove_suffix(1);
    cells.emplace_back(cell);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

}  // namespace

std::vector<Valuation> read_csv(std::string_view text, const std::vector<Port>& ports) {
  std::vector<Valuation> rows;
  std::vector<const Port*> columns;
  bool header = true;
  int line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto cells = split_row(line);
    if (header) {
      header = false;
      for (const auto& c : cells) {
        const Port* found = nullptr;
        for (const auto& p : ports) {
          if (p.name == c) found = &p;
        }
        if (!found) throw Error(ErrorKind::CsvSchema, "unknown column '" + c + "'");
        for (const Port* prev : columns) {
          if (prev == found) throw Error(ErrorKind::CsvSchema, "duplicate column '" + c + "'");
        }
        columns.push_back(found);
      }
      if (columns.size() != ports.size()) {
        for (const auto& p : ports) {
          bool present = false;
          for (const Port* c : columns) present = present || c == &p;
          if (!present) throw Error(ErrorKind::CsvSchema, "missing column '" + p.name + "'");
        }
      }
      continue;
    }
    if (cells.size() != columns.size()) {
      throw Error(ErrorKind::CsvSchema, "line " + std::to_string(line_no) + ": expected " +
                                            std::to_string(columns.size()) + " cells, got " + std::to_string(cells.size()));
    }
    Valuation row;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      auto v = columns[i]->type.parse_value(cells[i]);
      if (!v) {
        throw Error(ErrorKind::CsvSchema, "line " + std::to_string(line_no) + ": '" + cells[i] +
                                              "' is not a value of " + columns[i]->name + " : " +
                                              columns[i]->type.to_string());
      }
      row[columns[i]->name] = *v;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string write_csv(const std::vector<Port>& ports, const std::vector<Valuation>& rows) {
  std::string out;
  for (std::size_t i = 0; i < ports.size(); ++i) out += (i ? "," : "") + ports[i].name;
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < ports.size(); ++i) {
      if (i) out += ',';
      Value v = row.at(ports[i].name);
      out += ports[i].type.is_bool() ? std::to_string(v) : ports[i].type.format_value(v);
    }
    out += '\n';
  }
  return out;
}

std::string trace_to_csv(const FlatModel& m, const Trace& t) {
  std::vector<Port> ports = m.inputs;
  std::vector<Valuation> rows;
  for (const auto& p : m.outputs) {
    Port q = p;
    if (m.find_input(p.name)) q.name = p.name + "'";
    ports.push_back(q);
  }
  for (const auto& s : t.steps) {
    Valuation row = s.inputs;
    for (const auto& p : m.outputs) row[m.find_input(p.name) ? p.name + "'" : p.name] = s.outputs.at(p.name);
    rows.push_back(std::move(row));
  }
  return write_csv(ports, rows);
}

}  // namespace dfc
