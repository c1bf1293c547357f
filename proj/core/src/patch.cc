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

#include "patchval/patch.h"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <type_traits>

namespace patchval {
namespace {

constexpr std::string_view kGlobalEditPrefix = "var:";
constexpr std::int64_t kMeasureCap = 50'000'000;

StmtPtr WithChildren(const Stmt& s, const std::vector<StmtPtr>& kids) {
  auto out = std::make_shared<Stmt>(s);
  std::visit(
      [&](auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, BlockStmt>) {
          n.stmts = kids;
        } else if constexpr (std::is_same_v<T, IfStmt>) {
          n.then_branch = kids[0];
          n.else_branch = kids[1];
        } else if constexpr (std::is_same_v<T, WhileStmt>) {
          n.body = kids[0];
        } else if constexpr (std::is_same_v<T, TryStmt>) {
          n.body = kids[0];
          n.handler = kids[1];
        } else if constexpr (std::is_same_v<T, SiteStmt>) {
          n.original = WithChildren(*n.original, kids);
        }
      },
      out->node);
  return out;
}

std::vector<StmtPtr> ChildrenThroughSites(const Stmt& s) {
  if (const auto* site = std::get_if<SiteStmt>(&s.node)) {
    return ChildrenThroughSites(*site->original);
  }
  return StmtChildren(s);
}

StmtPtr Rebuild(const StmtPtr& s, const std::map<Location, StmtPtr>& edits) {
  if (const auto it = edits.find(s->loc); it != edits.end()) return it->second;
  bool below = false;
  for (auto it = edits.lower_bound(s->loc); it != edits.end(); ++it) {
    if (!s->loc.Contains(it->first)) break;
    below = true;
    break;
  }
  if (!below) return s;
  std::vector<StmtPtr> kids = ChildrenThroughSites(*s);
  for (StmtPtr& k : kids) k = Rebuild(k, edits);
  return WithChildren(*s, kids);
}

}  // namespace

ParsedEdits ParseEdits(const Program& base, const Patch& patch) {
  if (patch.edits.empty()) {
    throw PatchLimitationError("patch " + patch.id + " has no edits");
  }
  ParsedEdits out;
  for (const Edit& e : patch.edits) {
    if (e.location.starts_with(kGlobalEditPrefix)) {
      throw PatchLimitationError("patch " + patch.id +
                                 " edits a global declaration (" + e.location +
                                 ")");
    }
    const std::optional<Location> loc = Location::Parse(e.location);
    if (!loc) throw NotFoundError("malformed location '" + e.location + "'");
    if (base.Find(*loc) == nullptr) {
      throw NotFoundError("no statement at " + e.location);
    }
    for (const auto& [other, stmt] : out) {
      if (other.Contains(*loc) || loc->Contains(other)) {
        throw PatchLimitationError("patch " + patch.id +
                                   " has overlapping edits at " +
                                   other.ToString() + " and " + e.location);
      }
    }
    out.emplace_back(*loc, ParseStatements(e.replacement, *loc));
  }
  return out;
}

Program ReplaceStatements(const Program& program, const ParsedEdits& edits) {
  std::map<Location, StmtPtr> by_loc(edits.begin(), edits.end());
  std::vector<Method> methods = program.methods();
  for (Method& m : methods) {
    auto it = by_loc.lower_bound(Location{m.name, {}});
    if (it == by_loc.end() || it->first.method != m.name) continue;
    m.body = Rebuild(m.body, by_loc);
  }
  return Program(program.globals(), std::move(methods));
}

Program ApplyPatch(const Program& base, const Patch& patch) {
  return ReplaceStatements(base, ParseEdits(base, patch));
}

std::vector<Patch> PatchesFromJson(const nlohmann::json& j) {
  std::vector<Patch> out;
  auto one = [&out](const nlohmann::json& p) {
    Patch patch;
    patch.id = p.at("id").get<std::string>();
    if (patch.id.empty()) throw std::invalid_argument("patch id is empty");
    for (const auto& e : p.at("edits")) {
      patch.edits.push_back(Edit{e.at("location").get<std::string>(),
                                 e.at("replacement").get<std::string>()});
    }
    out.push_back(std::move(patch));
  };
  if (j.is_array()) {
    for (const auto& p : j) one(p);
  } else {
    one(j);
  }
  return out;
}

std::vector<Patch> LoadPatchFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open patch file " + path);
  return PatchesFromJson(nlohmann::json::parse(in));
}

nlohmann::json PatchToJson(const Patch& patch) {
  nlohmann::json edits = nlohmann::json::array();
  for (const Edit& e : patch.edits) {
    edits.push_back({{"location", e.location}, {"replacement", e.replacement}});
  }
  return {{"id", patch.id}, {"edits", edits}};
}

const char* VerdictStatusName(VerdictStatus status) {
  switch (status) {
    case VerdictStatus::kPlausible:
      return "plausible";
    case VerdictStatus::kImplausible:
      return "implausible";
    case VerdictStatus::kUncompilable:
      return "uncompilable";
    case VerdictStatus::kFailsToValidate:
      return "fails-to-validate";
  }
  return "?";
}

std::int64_t BudgetFor(std::int64_t original_steps, const BudgetConfig& config) {
  return config.base + static_cast<std::int64_t>(std::ceil(
                           config.factor * static_cast<double>(original_steps)));
}

TestBudgets MeasureBudgets(const Program& base,
                           const std::vector<TestCase>& tests,
                           const BudgetConfig& config, std::uint64_t seed) {
  TestBudgets out;
  Engine engine(base);
  for (const TestCase& t : tests) {
    if (out.limit.contains(t.entry)) continue;
    engine.Reseed(seed);
    const TestOutcome o = engine.RunTest(t.entry, kMeasureCap);
    out.offline_steps += o.steps;
    out.limit[t.entry] = BudgetFor(o.steps, config);
  }
  return out;
}

}  // namespace patchval
