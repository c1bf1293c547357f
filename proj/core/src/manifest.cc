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

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "patchval/harness.h"

namespace patchval {
namespace {

namespace fs = std::filesystem;

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ManifestError("cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

fs::path Resolve(const std::string& base_dir, const std::string& path) {
  fs::path p(path);
  if (p.is_relative() && !base_dir.empty()) p = fs::path(base_dir) / p;
  return p;
}

}  // namespace

Config ConfigFromJson(const nlohmann::json& j, Config config) {
  if (j.is_null()) return config;
  if (!j.is_object()) throw ManifestError("config must be an object");
  config.workers = j.value("workers", config.workers);
  config.scope.max_vars = j.value("maxChangeScopeVars", config.scope.max_vars);
  config.budget.base = j.value("stepBudgetBase", config.budget.base);
  config.budget.factor = j.value("stepBudgetFactor", config.budget.factor);
  config.seed = j.value("seed", config.seed);
  config.unstable_seed = j.value("unstableSeed", config.unstable_seed);
  config.fallback = j.value("fallback", config.fallback);
  config.max_depth = j.value("maxDepth", config.max_depth);
  if (j.contains("disabledTechniques")) {
    for (const auto& t : j.at("disabledTechniques")) {
      const std::string name = t.get<std::string>();
      if (name != kTechniqueDedup && name != kTechniqueSchemata &&
          name != kTechniquePrioritization && name != kTechniqueVirtualization) {
        throw ManifestError("unknown technique '" + name + "'");
      }
      config.disabled.insert(name);
    }
  }
  if (j.contains("allowedKinds")) {
    config.scope.allowed_kinds.clear();
    for (const auto& k : j.at("allowedKinds")) {
      const std::string name = k.get<std::string>();
      bool found = false;
      for (ValueKind kind : {ValueKind::kInt, ValueKind::kBool, ValueKind::kStr,
                             ValueKind::kUnit}) {
        if (name == ValueKindName(kind)) {
          config.scope.allowed_kinds.insert(kind);
          found = true;
        }
      }
      if (!found) throw ManifestError("unknown value kind '" + name + "'");
    }
  }
  if (j.contains("injectCrash")) {
    for (const auto& f : j.at("injectCrash")) {
      config.inject_crash.insert(f.get<std::string>());
    }
  }
  if (config.workers < 1) throw ManifestError("workers must be at least 1");
  if (config.budget.factor < 0) {
    throw ManifestError("stepBudgetFactor must not be negative");
  }
  return config;
}

ProjectManifest ManifestFromJson(const nlohmann::json& j,
                                 const std::string& base_dir) {
  ProjectManifest m;
  try {
    for (const auto& s : j.at("sources")) {
      const fs::path path = Resolve(base_dir, s.get<std::string>());
      m.sources.push_back(
          SourceFile{path.string(), ReadFile(path), path.stem().string()});
    }
    if (j.contains("tests")) {
      for (const auto& t : j.at("tests")) {
        TestCase tc;
        tc.entry = t.at("entry").get<std::string>();
        tc.name = t.value("name", tc.entry);
        tc.failing = t.value("failing", false);
        tc.group = t.value("group", std::string());
        m.tests.push_back(std::move(tc));
      }
    }
    std::set<std::string> ids;
    for (const auto& f : j.value("patchSets", nlohmann::json::array())) {
      const fs::path path = Resolve(base_dir, f.get<std::string>());
      for (Patch& p : PatchesFromJson(nlohmann::json::parse(ReadFile(path)))) {
        if (!ids.insert(p.id).second) {
          throw ManifestError("duplicate patch id '" + p.id + "'");
        }
        m.patches.push_back(std::move(p));
      }
    }
    m.config = ConfigFromJson(j.value("config", nlohmann::json()));
  } catch (const nlohmann::json::exception& e) {
    throw ManifestError(std::string("malformed manifest: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ManifestError(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

ProjectManifest LoadManifest(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(ReadFile(path));
  } catch (const nlohmann::json::exception& e) {
    throw ManifestError(path + ": " + e.what());
  }
  return ManifestFromJson(j, fs::path(path).parent_path().string());
}

Program LoadProgram(const ProjectManifest& manifest) {
  Program program = ParseSources(manifest.sources);
  for (const TestCase& t : manifest.tests) {
    const Method* m = program.FindMethod(t.entry);
    if (m == nullptr) {
      throw ManifestError("test '" + t.name + "' names unknown entry '" +
                          t.entry + "'");
    }
    if (!m->params.empty()) {
      throw ManifestError("test entry '" + t.entry + "' takes parameters");
    }
  }
  return program;
}

std::vector<PatchSet> GroupPatchSets(const std::vector<Patch>& patches) {
  std::map<std::string, PatchSet> by_key;
  for (const Patch& p : patches) {
    std::string key;
    for (const Edit& e : p.edits) {
      if (key.empty() || e.location < key) key = e.location;
    }
    PatchSet& set = by_key[key];
    set.fault_location = key;
    set.patches.push_back(p);
  }
  std::vector<PatchSet> out;
  for (auto& [key, set] : by_key) out.push_back(std::move(set));
  return out;
}

}  // namespace patchval
