// Copyright 2026 The Patchval Authors
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

#include "patchval/harness.h"

namespace patchval {
namespace {

nlohmann::json CountersToJson(const SetCounters& c) {
  return {
      {"rounds", c.rounds},
      {"testExecutions", c.test_executions},
      {"interpreterSteps", c.interpreter_steps},
      {"semanticSteps", c.semantic_steps},
      {"compileRounds", c.compile_rounds},
      {"parseCount", c.parse_count},
      {"fallbackCount", c.fallback_count},
      {"unstableCount", c.unstable_count},
      {"bypassCount", c.bypass_count},
  };
}

std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

nlohmann::json VerdictToJson(const PatchVerdict& verdict) {
  nlohmann::json tests = nlohmann::json::object();
  for (const auto& [name, outcome] : verdict.per_test) {
    tests[name] = {{"outcome", outcome.ToString()}, {"steps", outcome.steps}};
  }
  nlohmann::json j = {
      {"id", verdict.patch_id},
      {"status", VerdictStatusName(verdict.status)},
      {"testExecutions", verdict.test_executions},
      {"viaFallback", verdict.via_fallback},
      {"tests", std::move(tests)},
  };
  if (!verdict.note.empty()) j["note"] = verdict.note;
  return j;
}

nlohmann::json ReportToJson(const ValidationReport& report,
                            bool include_wall_time) {
  nlohmann::json verdicts = nlohmann::json::array();
  nlohmann::json sets = nlohmann::json::array();
  std::int64_t unstable = 0;
  for (const SetResult& s : report.sets) {
    nlohmann::json set = {
        {"faultLocation", s.fault_location},
        {"patches", nlohmann::json::array()},
        {"counters", CountersToJson(s.counters)},
    };
    for (const PatchVerdict& v : s.verdicts) {
      set["patches"].push_back(v.patch_id);
      verdicts.push_back(VerdictToJson(v));
    }
    if (!s.unstable_tests.empty()) set["unstableTests"] = s.unstable_tests;
    if (!s.trees.empty()) set["trees"] = s.trees;
    if (!s.woven.empty()) set["woven"] = s.woven;
    if (!s.error.empty()) set["error"] = s.error;
    unstable += s.counters.unstable_count;
    sets.push_back(std::move(set));
  }
  nlohmann::json aggregate = {
      {"totalSteps", report.TotalSteps()},
      {"interpreterSteps", report.InterpreterSteps()},
      {"offlineSteps", report.offline_steps},
      {"unstableCount", unstable},
  };
  if (include_wall_time) aggregate["wallTimeMs"] = report.wall_time_ms;
  if (report.plain_oracle_steps) {
    aggregate["plainOracleSteps"] = *report.plain_oracle_steps;
    const std::int64_t total = report.TotalSteps();
    aggregate["speedupRatio"] =
        total > 0 ? static_cast<double>(*report.plain_oracle_steps) /
                        static_cast<double>(total)
                  : 0.0;
    aggregate["verdictDiff"] = report.verdict_diff;
  }
  return {
      {"mode", report.mode},
      {"verdicts", std::move(verdicts)},
      {"patchSets", std::move(sets)},
      {"aggregate", std::move(aggregate)},
  };
}

std::string ReportToCsv(const ValidationReport& report) {
  std::ostringstream out;
  out << "patch,faultLocation,status,testExecutions,viaFallback,"
         "setRounds,setSemanticSteps,setInterpreterSteps\n";
  for (const SetResult& s : report.sets) {
    for (const PatchVerdict& v : s.verdicts) {
      out << CsvField(v.patch_id) << ',' << CsvField(s.fault_location) << ','
          << VerdictStatusName(v.status) << ',' << v.test_executions << ','
          << (v.via_fallback ? "true" : "false") << ',' << s.counters.rounds
          << ',' << s.counters.semantic_steps << ','
          << s.counters.interpreter_steps << '\n';
    }
  }
  return out.str();
}

nlohmann::json AblationToJson(const AblationResult& result) {
  nlohmann::json rows = nlohmann::json::array();
  for (const AblationRow& row : result.rows) {
    SetCounters sum;
    for (const SetResult& s : row.report.sets) {
      sum.rounds += s.counters.rounds;
      sum.test_executions += s.counters.test_executions;
      sum.interpreter_steps += s.counters.interpreter_steps;
      sum.semantic_steps += s.counters.semantic_steps;
      sum.compile_rounds += s.counters.compile_rounds;
      sum.parse_count += s.counters.parse_count;
      sum.fallback_count += s.counters.fallback_count;
      sum.unstable_count += s.counters.unstable_count;
      sum.bypass_count += s.counters.bypass_count;
    }
    rows.push_back({{"config", row.name}, {"counters", CountersToJson(sum)}});
  }
  return {{"configurations", std::move(rows)},
          {"divergence", result.divergence}};
}

}  // namespace patchval
