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

#include <algorithm>
#include <atomic>
#include <chrono>
#include <memory>
#include <thread>

#include "patchval/harness.h"
#include "patchval/scheduler.h"

namespace patchval {
namespace {

struct Shared {
  const ProjectManifest& manifest;
  const Config& config;
  const Program& base;
  std::vector<TestCase> tests;
  TestBudgets budgets;
};

std::vector<TestCase> EffectiveTests(const ProjectManifest& manifest,
                                     const Program& base) {
  if (!manifest.tests.empty()) return manifest.tests;
  std::vector<TestCase> out;
  for (const std::string& entry : base.test_entries()) {
    out.push_back(TestCase{entry, entry, false, base.FindMethod(entry)->group});
  }
  return out;
}

std::set<std::string> PatchedGroups(const Program& base, const PatchSet& set) {
  std::set<std::string> groups;
  for (const Patch& p : set.patches) {
    for (const Edit& e : p.edits) {
      const auto loc = Location::Parse(e.location);
      if (!loc) continue;
      if (const Method* m = base.FindMethod(loc->method)) groups.insert(m->group);
    }
  }
  return groups;
}

PatchVerdict Verdict(const std::string& id, VerdictStatus status,
                     std::string note) {
  PatchVerdict v;
  v.patch_id = id;
  v.status = status;
  v.note = std::move(note);
  return v;
}

std::uint64_t SeedFor(const Config& config, std::int64_t execution) {
  return config.unstable_seed
             ? config.seed + static_cast<std::uint64_t>(execution)
             : config.seed;
}

void AddPlainStats(SetCounters& c, const PlainStats& st) {
  c.test_executions += st.test_executions;
  c.semantic_steps += st.semantic_steps;
  c.interpreter_steps += st.interpreter_steps;
}

std::vector<PatchVerdict> InSetOrder(const PatchSet& set,
                                     std::map<std::string, PatchVerdict>& all) {
  std::vector<PatchVerdict> out;
  for (const Patch& p : set.patches) {
    const auto it = all.find(p.id);
    if (it == all.end()) {
      throw InternalError("no verdict for patch " + p.id);
    }
    out.push_back(std::move(it->second));
  }
  return out;
}

// Without schemata every patch is built and checked on its own copy of the
// sources.
SetResult ValidateSetPerPatch(const Shared& shared, const PatchSet& set,
                              const std::vector<TestCase>& tests) {
  SetResult r;
  r.fault_location = set.fault_location;
  std::map<std::string, PatchVerdict> verdicts;
  const PlainOptions options{shared.config.seed, shared.config.max_depth};
  for (const Patch& p : set.patches) {
    ++r.counters.parse_count;
    const Program base = ParseSources(shared.manifest.sources);
    Program patched;
    try {
      patched = ReplaceStatements(base, ParseEdits(base, p));
    } catch (const PatchLimitationError& e) {
      verdicts[p.id] = Verdict(p.id, VerdictStatus::kFailsToValidate, e.what());
      continue;
    } catch (const ParseError& e) {
      verdicts[p.id] = Verdict(p.id, VerdictStatus::kUncompilable, e.what());
      continue;
    } catch (const NotFoundError& e) {
      verdicts[p.id] = Verdict(p.id, VerdictStatus::kUncompilable, e.what());
      continue;
    }
    ++r.counters.compile_rounds;
    const std::vector<Diagnostic> diags = StaticCheck(patched);
    if (!diags.empty()) {
      verdicts[p.id] = Verdict(p.id, VerdictStatus::kUncompilable,
                               diags.front().ToString());
      continue;
    }
    PlainStats st;
    verdicts[p.id] =
        RunTestsOn(patched, p.id, tests, shared.budgets, options, &st);
    AddPlainStats(r.counters, st);
    r.counters.rounds += st.test_executions;
  }
  r.verdicts = InSetOrder(set, verdicts);
  return r;
}

// One booted environment: parsed sources, woven program and its engine.
struct Boot {
  Program base;
  MetaProgram meta;
  std::unique_ptr<Engine> engine;
};

std::unique_ptr<Boot> BootSet(const Shared& shared,
                              const std::vector<const Patch*>& patches) {
  auto boot = std::make_unique<Boot>();
  boot->base = ParseSources(shared.manifest.sources);
  std::vector<WovenPatch> woven;
  for (const Patch* p : patches) {
    woven.push_back(WovenPatch{p->id, ParseEdits(boot->base, *p)});
  }
  boot->meta = Weave(boot->base, woven, WeaveOptions{shared.config.scope});
  CompileMeta(boot->meta);
  boot->engine = std::make_unique<Engine>(
      boot->meta.woven,
      EngineOptions{shared.config.max_depth, shared.config.seed});
  return boot;
}

SetResult ValidateSet(const Shared& shared, const PatchSet& set) {
  const Config& cfg = shared.config;
  if (cfg.inject_crash.contains(set.fault_location)) {
    throw std::runtime_error("injected failure for patch set " +
                             set.fault_location);
  }
  const std::vector<TestCase> tests =
      cfg.Enabled(kTechniquePrioritization)
          ? PrioritizeTests(shared.tests, PatchedGroups(shared.base, set))
          : shared.tests;
  if (!cfg.Enabled(kTechniqueSchemata)) {
    return ValidateSetPerPatch(shared, set, tests);
  }

  SetResult r;
  r.fault_location = set.fault_location;
  std::map<std::string, PatchVerdict> verdicts;

  // Boot once: parse the sources and every patch, weave, compile.
  const Program base = ParseSources(shared.manifest.sources);
  r.counters.parse_count = 1;
  std::vector<WovenPatch> woven;
  std::vector<const Patch*> woven_patches;
  for (const Patch& p : set.patches) {
    try {
      woven.push_back(WovenPatch{p.id, ParseEdits(base, p)});
      woven_patches.push_back(&p);
    } catch (const PatchLimitationError& e) {
      verdicts[p.id] = Verdict(p.id, VerdictStatus::kFailsToValidate,
                               std::string(e.what()) +
                                   "; plain validation cannot apply it either");
    } catch (const ParseError& e) {
      verdicts[p.id] = Verdict(p.id, VerdictStatus::kUncompilable, e.what());
    } catch (const NotFoundError& e) {
      verdicts[p.id] = Verdict(p.id, VerdictStatus::kUncompilable, e.what());
    }
  }
  auto boot = std::make_unique<Boot>();
  boot->base = base;
  boot->meta = Weave(base, woven, WeaveOptions{cfg.scope});
  CompileMeta(boot->meta);
  boot->engine = std::make_unique<Engine>(
      boot->meta.woven, EngineOptions{cfg.max_depth, cfg.seed});
  const MetaProgram& meta = boot->meta;
  r.counters.compile_rounds = meta.compile_rounds;
  for (const std::string& id : meta.uncompilable) {
    verdicts[id] = Verdict(id, VerdictStatus::kUncompilable,
                           meta.uncompilable_reason.at(id));
  }
  if (cfg.dump_woven) r.woven = Print(meta.woven);

  // Partition compilable patches into scheduled and bypassed.
  std::vector<std::string> eligible;
  std::vector<std::string> fallback;
  std::map<std::string, std::string> bypass_note;
  std::vector<const Patch*> compilable;
  for (std::size_t i = 0; i < woven.size(); ++i) {
    const WovenPatch& wp = woven[i];
    if (meta.uncompilable.contains(wp.id)) continue;
    compilable.push_back(woven_patches[i]);
    std::optional<std::string> reason;
    std::set<Location> own;
    for (const auto& [loc, stmt] : wp.edits) own.insert(loc);
    for (const auto& [loc, stmt] : wp.edits) {
      const std::string& method = meta.component_index.at({wp.id, loc});
      reason = BypassReason(base, meta.scopes.at(method), cfg.scope);
      if (reason) break;
    }
    for (std::size_t s = 0; !reason && s < meta.sites.size(); ++s) {
      const Location& site = meta.sites[s];
      const auto edit = std::find_if(
          wp.edits.begin(), wp.edits.end(),
          [&](const auto& e) { return e.first == site; });
      const bool edits_site = edit != wp.edits.end();
      const Stmt& stmt = edits_site ? *edit->second : Resolve(base, site);
      if (Reaches(base, stmt, !edits_site, own)) {
        reason = "executing " + site.ToString() +
                 " can reach a location the patch edits";
      }
    }
    if (reason) {
      fallback.push_back(wp.id);
      bypass_note[wp.id] = "bypassed: " + *reason;
    } else {
      eligible.push_back(wp.id);
    }
  }
  r.counters.bypass_count = static_cast<std::int64_t>(fallback.size());

  // Test execution on the woven program.
  std::int64_t executions = 0;
  std::int64_t engine_calls = 0;
  const bool virtualization = cfg.Enabled(kTechniqueVirtualization);
  auto retire = [&r](Boot& b) {
    r.counters.interpreter_steps += b.engine->interpreter_steps();
    r.counters.semantic_steps += b.engine->total_semantic_steps();
  };
  EngineForRound engine_for_round = [&]() -> Engine& {
    ++engine_calls;
    if (virtualization || engine_calls == 1) return *boot->engine;
    retire(*boot);
    boot = BootSet(shared, compilable);
    ++r.counters.parse_count;
    return *boot->engine;
  };

  if (cfg.Enabled(kTechniqueDedup)) {
    SchedulerOptions options{cfg.seed, cfg.unstable_seed};
    SuiteResult suite = ValidateSuite(engine_for_round, eligible, tests,
                                      shared.budgets, options, cfg.dump_tree,
                                      executions);
    for (auto& [id, v] : suite.verdicts) verdicts[id] = std::move(v);
    r.counters.unstable_count = suite.unstable_count;
    r.unstable_tests = suite.unstable_tests;
    for (const std::string& id : suite.fallback) {
      fallback.push_back(id);
      bypass_note[id] = "unstable test; validated with the plain method";
    }
    r.trees = std::move(suite.trees);
  } else {
    for (const std::string& id : eligible) {
      PatchVerdict v;
      v.patch_id = id;
      for (const TestCase& t : tests) {
        Engine& engine = engine_for_round();
        ++executions;
        engine.set_selected_patch(id);
        engine.Reseed(SeedFor(cfg, executions));
        const TestOutcome o =
            engine.RunTest(t.entry, shared.budgets.limit.at(t.entry));
        engine.set_selected_patch("");
        v.per_test[t.name] = o;
        ++v.test_executions;
        if (!o.passed()) {
          v.status = VerdictStatus::kImplausible;
          break;
        }
      }
      verdicts[id] = std::move(v);
    }
  }
  retire(*boot);
  r.counters.rounds = executions;
  r.counters.test_executions = executions;

  if (!fallback.empty()) {
    std::vector<Patch> plain_patches;
    for (const Patch& p : set.patches) {
      if (std::find(fallback.begin(), fallback.end(), p.id) != fallback.end()) {
        plain_patches.push_back(p);
      }
    }
    if (cfg.fallback) {
      PlainStats st;
      std::vector<PatchVerdict> plain =
          PlainValidate(base, plain_patches, tests, shared.budgets,
                        PlainOptions{cfg.seed, cfg.max_depth}, &st);
      AddPlainStats(r.counters, st);
      r.counters.fallback_count = static_cast<std::int64_t>(plain.size());
      for (PatchVerdict& v : plain) {
        v.via_fallback = true;
        v.note = bypass_note[v.patch_id];
        verdicts[v.patch_id] = std::move(v);
      }
    } else {
      for (const Patch& p : plain_patches) {
        verdicts[p.id] = Verdict(p.id, VerdictStatus::kFailsToValidate,
                                 bypass_note[p.id] + " (fallback disabled)");
      }
    }
  }
  r.verdicts = InSetOrder(set, verdicts);
  return r;
}

SetResult ContainedValidateSet(const Shared& shared, const PatchSet& set) {
  try {
    return ValidateSet(shared, set);
  } catch (const std::exception& e) {
    SetResult r;
    r.fault_location = set.fault_location;
    r.error = e.what();
    for (const Patch& p : set.patches) {
      r.verdicts.push_back(Verdict(p.id, VerdictStatus::kFailsToValidate,
                                   std::string("patch set failed: ") + e.what()));
    }
    return r;
  }
}

template <typename Fn>
void ForEachParallel(std::size_t n, int workers, const Fn& fn) {
  std::atomic<std::size_t> next{0};
  auto loop = [&]() {
    for (std::size_t i = next++; i < n; i = next++) fn(i);
  };
  const std::size_t threads =
      std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), n);
  if (threads <= 1) {
    RunWithLargeStack(loop);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t]() {
      try {
        RunWithLargeStack(loop);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (std::thread& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

Program CheckedBase(const ProjectManifest& manifest) {
  Program base = LoadProgram(manifest);
  const std::vector<Diagnostic> diags = StaticCheck(base);
  if (!diags.empty()) {
    throw ManifestError("sources do not compile: " + diags.front().ToString());
  }
  return base;
}

double MillisSince(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - start)
      .count();
}

ValidationReport PlainReport(const ProjectManifest& manifest,
                             const Program& base,
                             const std::vector<TestCase>& tests,
                             const TestBudgets& budgets) {
  ValidationReport report;
  report.mode = "plain";
  const Config& cfg = manifest.config;
  const std::vector<PatchSet> sets = GroupPatchSets(manifest.patches);
  report.sets.resize(sets.size());
  ForEachParallel(sets.size(), cfg.workers, [&](std::size_t i) {
    SetResult& r = report.sets[i];
    r.fault_location = sets[i].fault_location;
    PlainStats st;
    r.verdicts = PlainValidate(base, sets[i].patches, tests, budgets,
                               PlainOptions{cfg.seed, cfg.max_depth}, &st);
    AddPlainStats(r.counters, st);
    r.counters.rounds = st.test_executions;
    r.counters.parse_count = st.parse_count;
    r.counters.compile_rounds = st.check_count;
  });
  report.offline_steps = budgets.offline_steps;
  return report;
}

}  // namespace

std::int64_t ValidationReport::TotalSteps() const {
  std::int64_t n = 0;
  for (const SetResult& s : sets) n += s.counters.semantic_steps;
  return n;
}

std::int64_t ValidationReport::InterpreterSteps() const {
  std::int64_t n = 0;
  for (const SetResult& s : sets) n += s.counters.interpreter_steps;
  return n;
}

std::vector<PatchVerdict> ValidationReport::AllVerdicts() const {
  std::vector<PatchVerdict> out;
  for (const SetResult& s : sets) {
    out.insert(out.end(), s.verdicts.begin(), s.verdicts.end());
  }
  return out;
}

ValidationReport RunValidation(const ProjectManifest& manifest) {
  const auto start = std::chrono::steady_clock::now();
  const Config& cfg = manifest.config;
  const Program base = CheckedBase(manifest);
  Shared shared{manifest, cfg, base, EffectiveTests(manifest, base), {}};
  shared.budgets = MeasureBudgets(base, shared.tests, cfg.budget, cfg.seed);

  ValidationReport report;
  report.mode = "validate";
  const std::vector<PatchSet> sets = GroupPatchSets(manifest.patches);
  report.sets.resize(sets.size());
  ForEachParallel(sets.size(), cfg.workers, [&](std::size_t i) {
    report.sets[i] = ContainedValidateSet(shared, sets[i]);
  });
  report.offline_steps = shared.budgets.offline_steps;

  if (cfg.compare_plain) {
    const ValidationReport plain =
        PlainReport(manifest, base, shared.tests, shared.budgets);
    report.plain_oracle_steps = plain.TotalSteps();
    std::map<std::string, VerdictStatus> expected;
    for (const PatchVerdict& v : plain.AllVerdicts()) {
      expected[v.patch_id] = v.status;
    }
    for (const PatchVerdict& v : report.AllVerdicts()) {
      const VerdictStatus want = expected.at(v.patch_id);
      if (want != v.status) {
        report.verdict_diff.push_back(v.patch_id + ": plain=" +
                                      VerdictStatusName(want) + " validate=" +
                                      VerdictStatusName(v.status));
      }
    }
  }
  report.wall_time_ms = MillisSince(start);
  return report;
}

ValidationReport RunPlain(const ProjectManifest& manifest) {
  const auto start = std::chrono::steady_clock::now();
  const Program base = CheckedBase(manifest);
  const std::vector<TestCase> tests = EffectiveTests(manifest, base);
  const TestBudgets budgets = MeasureBudgets(
      base, tests, manifest.config.budget, manifest.config.seed);
  ValidationReport report = PlainReport(manifest, base, tests, budgets);
  report.wall_time_ms = MillisSince(start);
  return report;
}

AblationResult AblationMatrix(const ProjectManifest& manifest) {
  const std::vector<std::pair<std::string, std::set<std::string>>> configs = {
      {"full", {}},
      {"-dedup", {kTechniqueDedup}},
      {"-dedup-virt", {kTechniqueDedup, kTechniqueVirtualization}},
      {"-prioritization", {kTechniquePrioritization}},
      {"-schemata", {kTechniqueSchemata}},
  };
  AblationResult result;
  for (const auto& [name, disabled] : configs) {
    ProjectManifest m = manifest;
    m.config.disabled = disabled;
    m.config.compare_plain = false;
    result.rows.push_back(AblationRow{name, RunValidation(m)});
  }
  std::map<std::string, VerdictStatus> reference;
  for (const PatchVerdict& v : result.rows.front().report.AllVerdicts()) {
    reference[v.patch_id] = v.status;
  }
  for (std::size_t i = 1; i < result.rows.size(); ++i) {
    for (const PatchVerdict& v : result.rows[i].report.AllVerdicts()) {
      const VerdictStatus want = reference.at(v.patch_id);
      if (want != v.status) {
        result.divergence.push_back(
            result.rows[i].name + " " + v.patch_id + ": " +
            VerdictStatusName(v.status) + " (full: " + VerdictStatusName(want) +
            ")");
      }
    }
  }
  return result;
}

}  // namespace patchval
