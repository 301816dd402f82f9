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

#include <set>

#include "dfc/error.hpp"
#include "dfc/model.hpp"

namespace dfc {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

const Port* find_port(const std::vector<Port>& ports, std::string_view name) {
  for (const auto& p : ports) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

void map_direction(const std::vector<Port>& a_ports, const std::vector<Port>& b_ports,
                   const MappingOverrides& overrides, const char* dir,
                   std::map<std::string, std::string>& pairs) {
  std::map<std::string, std::string> used;
  for (const auto& bp : b_ports) {
    std::string target;
    if (auto it = overrides.find(bp.name); it != overrides.end() && find_port(a_ports, it->second)) {
      target = it->second;
    } else if (find_port(a_ports, bp.name)) {
      target = bp.name;
    } else {
      throw Error(ErrorKind::UnmappedPort, std::string(dir) + " port '" + bp.name + "' of model B has no counterpart in model A");
    }
    auto [it, fresh] = used.emplace(target, bp.name);
    if (!fresh) {
      throw Error(ErrorKind::ConflictingOverride, std::string(dir) + " ports '" + it->second + "' and '" + bp.name +
                                                       "' of model B both map to '" + target + "'");
    }
    pairs[bp.name] = target;
  }
}

}  // namespace

MappingOverrides parse_mapping_overrides(std::string_view text) {
  MappingOverrides out;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) throw SyntaxError(line_no, 1, "expected 'bPort = aPort'");
    std::string b(trim(line.substr(0, eq)));
    std::string a(trim(line.substr(eq + 1)));
    if (b.empty() || a.empty()) throw SyntaxError(line_no, 1, "expected 'bPort = aPort'");
    auto [it, fresh] = out.emplace(b, a);
    if (!fresh && it->second != a) {
      throw Error(ErrorKind::ConflictingOverride, "port '" + b + "' mapped to both '" + it->second + "' and '" + a + "'");
    }
  }
  return out;
}

PortMapping derive_port_mapping(const FlatModel& a, const FlatModel& b, const MappingOverrides& overrides) {
  for (const auto& [bp, ap] : overrides) {
    bool in_b = find_port(b.inputs, bp) || find_port(b.outputs, bp);
    bool in_a = find_port(a.inputs, ap) || find_port(a.outputs, ap);
    if (!in_b || !in_a) {
      throw Error(ErrorKind::UnmappedPort, "override '" + bp + " = " + ap + "' names an unknown port");
    }
  }
  PortMapping m;
  map_direction(a.inputs, b.inputs, overrides, "input", m.inputs);
  map_direction(a.outputs, b.outputs, overrides, "output", m.outputs);
  std::set<std::string> mapped;
  for (const auto& [bp, ap] : m.inputs) mapped.insert(ap);
  for (const auto& p : a.inputs) {
    if (!mapped.count(p.name)) m.extra_inputs_a.insert(p.name);
  }
  return m;
}

bool range_contained(const DataType& inner, const DataType& outer) {
  return inner.same_kind(outer) && inner.lo() >= outer.lo() && inner.hi() <= outer.hi();
}

InterfaceReport check_interface(const FlatModel& a, const FlatModel& b, const PortMapping& m) {
  InterfaceReport r;
  r.extra_inputs_a = m.extra_inputs_a;
  auto violate = [&](const std::string& port, std::string reason) {
    r.compatible = false;
    r.violations.push_back({port, std::move(reason)});
  };
  for (const auto& [bn, an] : m.inputs) {
    const Port* bp = find_port(b.inputs, bn);
    const Port* ap = find_port(a.inputs, an);
    if (!bp || !ap) {
      violate(bn, "input is not mapped");
      continue;
    }
    r.dom_b[an] = bp->type;
    if (!bp->type.same_kind(ap->type)) {
      violate(bn, "type " + bp->type.to_string() + " does not match " + ap->type.to_string() + " of " + an);
    } else if (!range_contained(bp->type, ap->type)) {
      violate(bn, "range " + bp->type.to_string() + " is not contained in " + ap->type.to_string() + " of " + an);
    }
  }
  for (const auto& bp : b.inputs) {
    if (!m.inputs.count(bp.name)) violate(bp.name, "input is not mapped");
  }
  for (const auto& [bn, an] : m.outputs) {
    const Port* bp = find_port(b.outputs, bn);
    const Port* ap = find_port(a.outputs, an);
    if (!bp || !ap) {
      violate(bn, "output is not mapped");
    } else if (!bp->type.same_kind(ap->type)) {
      violate(bn, "type " + bp->type.to_string() + " does not match " + ap->type.to_string() + " of " + an);
    }
  }
  for (const auto& bp : b.outputs) {
    if (!m.outputs.count(bp.name)) violate(bp.name, "output is not mapped");
  }
  return r;
}

}  // namespace dfc
