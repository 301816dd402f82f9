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

#include <sstream>

#include "dfc/error.hpp"
#include "dfc/pipeline.hpp"
#include "json.hpp"

namespace dfc {

using nlohmann::json;

namespace {

constexpr const char* kSchema = "dfcompat-report/1";

json valuation_json(const Valuation& v) {
  json j = json::object();
  for (const auto& [k, x] : v) j[k] = x;
  return j;
}

Valuation valuation_from(const json& j) {
  Valuation v;
  for (const auto& [k, x] : j.items()) v[k] = x.get<Value>();
  return v;
}

json rows_json(const std::vector<Valuation>& rows) {
  json j = json::array();
  for (const auto& v : rows) j.push_back(valuation_json(v));
  return j;
}

std::vector<Valuation> rows_from(const json& j) {
  std::vector<Valuation> rows;
  for (const auto& x : j) rows.push_back(valuation_from(x));
  return rows;
}

json direction_json(const DirectionResult& d) {
  return {{"compatible", d.compatible}, {"conditions", valuation_json(Valuation(d.conditions.begin(), d.conditions.end()))},
          {"conditions_text", d.conditions_text}, {"fix_iterations", d.fix_iterations}};
}

DirectionResult direction_from(const json& j) {
  DirectionResult d;
  d.compatible = j.at("compatible").get<bool>();
  for (const auto& [k, x] : j.at("conditions").items()) d.conditions[k] = x.get<Value>();
  d.conditions_text = j.at("conditions_text").get<std::map<std::string, std::string>>();
  d.fix_iterations = j.at("fix_iterations").get<int>();
  return d;
}

}  // namespace

std::string report_to_json(const CompatReport& r) {
  json j;
  j["schema"] = kSchema;
  j["model_a"] = r.model_a;
  j["model_b"] = r.model_b;
  j["overall"] = to_string(r.overall);
  j["backward"] = direction_json(r.backward);
  j["upward"] = direction_json(r.upward);
  j["extra_inputs"] = r.extra_inputs;
  j["interface_violations"] = json::array();
  for (const auto& v : r.interface_violations) j["interface_violations"].push_back({{"port", v.port}, {"reason", v.reason}});
  j["outputs"] = json::object();
  for (const auto& [k, v] : r.outputs) {
    j["outputs"][k] = {{"pruned", v.pruned},
                       {"backward", v.backward},
                       {"upward", v.upward},
                       {"backward_reason", v.backward_reason},
                       {"upward_reason", v.upward_reason},
                       {"states_a", v.states_a},
                       {"states_b", v.states_b}};
  }
  j["counterexamples"] = json::array();
  for (const auto& c : r.counterexamples) {
    j["counterexamples"].push_back({{"direction", c.direction},
                                    {"output", c.output},
                                    {"reason", c.reason},
                                    {"inputs", rows_json(c.inputs)},
                                    {"expected", rows_json(c.expected)},
                                    {"actual", rows_json(c.actual)},
                                    {"divergence_step", c.divergence_step},
                                    {"out_of_range", c.out_of_range}});
  }
  j["stats"] = json::array();
  for (const auto& s : r.stats) j["stats"].push_back({{"stage", s.stage}, {"counts", s.counts}, {"millis", s.millis}});
  return j.dump(2) + "\n";
}

CompatReport report_from_json(std::string_view text) {
  try {
    json j = json::parse(text);
    if (j.at("schema") != kSchema) throw Error(ErrorKind::Io, "unsupported report schema");
    CompatReport r;
    r.model_a = j.at("model_a").get<std::string>();
    r.model_b = j.at("model_b").get<std::string>();
    auto o = overall_from_string(j.at("overall").get<std::string>());
    if (!o) throw Error(ErrorKind::Io, "unknown overall verdict");
    r.overall = *o;
    r.backward = direction_from(j.at("backward"));
    r.upward = direction_from(j.at("upward"));
    r.extra_inputs = j.at("extra_inputs").get<std::vector<std::string>>();
    for (const auto& v : j.at("interface_violations")) {
      r.interface_violations.push_back({v.at("port").get<std::string>(), v.at("reason").get<std::string>()});
    }
    for (const auto& [k, v] : j.at("outputs").items()) {
      OutputVerdict ov;
      ov.pruned = v.at("pruned").get<bool>();
      ov.backward = v.at("backward").get<bool>();
      ov.upward = v.at("upward").get<bool>();
      ov.backward_reason = v.at("backward_reason").get<std::string>();
      ov.upward_reason = v.at("upward_reason").get<std::string>();
      ov.states_a = v.at("states_a").get<std::uint64_t>();
      ov.states_b = v.at("states_b").get<std::uint64_t>();
      r.outputs[k] = ov;
    }
    for (const auto& c : j.at("counterexamples")) {
      Counterexample x;
      x.direction = c.at("direction").get<std::string>();
      x.output = c.at("output").get<std::string>();
      x.reason = c.at("reason").get<std::string>();
      x.inputs = rows_from(c.at("inputs"));
      x.expected = rows_from(c.at("expected"));
      x.actual = rows_from(c.at("actual"));
      x.divergence_step = c.at("divergence_step").get<int>();
      x.out_of_range = c.at("out_of_range").get<bool>();
      r.counterexamples.push_back(std::move(x));
    }
    for (const auto& s : j.at("stats")) {
      StageStat st;
      st.stage = s.at("stage").get<std::string>();
      st.counts = s.at("counts").get<std::map<std::string, std::uint64_t>>();
      st.millis = s.at("millis").get<double>();
      r.stats.push_back(std::move(st));
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Io, std::string("malformed report: ") + e.what());
  }
}

namespace {

void print_rows(std::ostream& os, const char* title, const std::vector<Valuation>& rows) {
  os << "    " << title << ":";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    os << (i ? " | " : " ");
    bool first = true;
    for (const auto& [k, v] : rows[i]) {
      os << (first ? "" : ",") << k << "=" << v;
      first = false;
    }
  }
  os << "\n";
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

}  // namespace

std::string report_to_text(const CompatReport& r) {
  std::ostringstream os;
  os << "A: " << r.model_a << "\nB: " << r.model_b << "\n";
  os << "verdict: " << to_string(r.overall) << "\n";
  os << "backward (A replaces B): " << yes_no(r.backward.compatible);
  if (!r.backward.conditions.empty()) {
    os << " [";
    bool first = true;
    for (const auto& [k, v] : r.backward.conditions_text) {
      os << (first ? "" : ", ") << k << " = " << v;
      first = false;
    }
    os << "]";
  }
  os << "\nupward (B replaces A): " << yes_no(r.upward.compatible) << "\n";
  if (!r.extra_inputs.empty()) {
    os << "extra inputs of A:";
    for (const auto& n : r.extra_inputs) os << " " << n;
    os << "\n";
  }
  for (const auto& v : r.interface_violations) os << "interface: " << v.port << ": " << v.reason << "\n";
  if (!r.outputs.empty()) os << "outputs:\n";
  for (const auto& [k, v] : r.outputs) {
    os << "  " << k << ": backward " << yes_no(v.backward) << ", upward " << yes_no(v.upward);
    if (v.pruned) {
      os << " (clone)";
    } else {
      os << " (states " << v.states_a << "/" << v.states_b << ")";
    }
    os << "\n";
  }
  for (const auto& c : r.counterexamples) {
    os << "counterexample " << c.direction << " on " << c.output << " (" << c.reason << "), diverges at step "
       << c.divergence_step << (c.out_of_range ? ", last input outside the simulating model's ranges" : "") << "\n";
    print_rows(os, "inputs", c.inputs);
    print_rows(os, "expected", c.expected);
    print_rows(os, "actual", c.actual);
  }
  os << "stages:\n";
  for (const auto& s : r.stats) {
    os << "  " << s.stage << " " << static_cast<long long>(s.millis * 1000) / 1000.0 << " ms";
    for (const auto& [k, v] : s.counts) os << " " << k << "=" << v;
    os << "\n";
  }
  return os.str();
}

}  // namespace dfc
