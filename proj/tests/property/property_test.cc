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

// Randomized invariants over generated programs, patches and test suites.

#include <algorithm>
#include <map>
#include <set>

#include <gtest/gtest.h>

#include "fixtures.h"
#include "patchval/harness.h"
#include "patchval/scheduler.h"

namespace patchval {
namespace {

constexpr std::int64_t kLimit = 200000;

testing::GenOptions WithErrors(double rate) {
  testing::GenOptions o;
  o.compile_error_rate = rate;
  return o;
}

TEST(PropertyTest, ScheduledVerdictsMatchPlain) {
  for (std::uint64_t seed = 1; seed <= 80; ++seed) {
    const testing::Instance inst = testing::GenerateInstance(seed, WithErrors(0.15));
    Config c;
    c.compare_plain = true;
    const ValidationReport r =
        RunValidation(testing::ManifestFor(inst.source, inst.patches, inst.tests, c));
    EXPECT_TRUE(r.verdict_diff.empty()) << "seed " << seed << ": " << r.verdict_diff.front();
    for (const SetResult& s : r.sets) EXPECT_TRUE(s.error.empty()) << s.error;
  }
}

TEST(PropertyTest, AblationsAgree) {
  for (std::uint64_t seed = 100; seed <= 130; ++seed) {
    const testing::Instance inst = testing::GenerateInstance(seed, WithErrors(0.1));
    const AblationResult a =
        AblationMatrix(testing::ManifestFor(inst.source, inst.patches, inst.tests));
    EXPECT_TRUE(a.divergence.empty()) << "seed " << seed << ": " << a.divergence.front();
  }
}

TEST(PropertyTest, CaptureIsNeutralAndReplayMatchesDirectExecution) {
  int checked = 0;
  for (std::uint64_t seed = 200; seed <= 260; ++seed) {
    const testing::Instance inst = testing::GenerateInstance(seed);
    const std::vector<Patch> patches = testing::ParseablePatches(inst.program, inst.patches);
    auto w = testing::WeaveAll(inst.program, patches);
    const auto states = testing::ReachableSiteStates(*w, inst.tests, kLimit, 60);
    const auto edited = testing::EditedLocations(patches);
    for (const Patch& p : patches) {
      if (w->meta.uncompilable.contains(p.id)) continue;
      const Program applied = ApplyPatch(inst.program, p);
      for (const testing::SiteState& st : states) {
        if (!edited.at(p.id).contains(st.site)) continue;
        const testing::ReplayCheck c = testing::CheckCaptureReplay(*w, applied, st, p.id, kLimit);
        if (c.skipped) continue;
        ++checked;
        EXPECT_TRUE(c.neutral) << "seed " << seed << " " << p.id << " at " << st.site.ToString();
        EXPECT_TRUE(c.equivalent) << "seed " << seed << " " << p.id << " at "
                                  << st.site.ToString() << ": " << c.detail;
      }
    }
  }
  EXPECT_GT(checked, 100);
}

TEST(PropertyTest, CaptureIsDeterministic) {
  for (std::uint64_t seed = 300; seed <= 330; ++seed) {
    const testing::Instance inst = testing::GenerateInstance(seed);
    const std::vector<Patch> patches = testing::ParseablePatches(inst.program, inst.patches);
    auto w = testing::WeaveAll(inst.program, patches);
    const auto states = testing::ReachableSiteStates(*w, inst.tests, kLimit, 20);
    for (const testing::SiteState& st : states) {
      const SiteStmt& site = testing::SiteAt(w->meta, st.site.ToString());
      for (const SiteStmt::Capture& cap : site.captures) {
        Engine& e = *w->engine;
        e.ResetData();
        e.mutable_globals() = st.globals;
        e.PushFrame(st.frame);
        CapturedChange first;
        try {
          first = e.Capture(site, cap.patch_id, kLimit).change;
        } catch (const InternalError&) {
          continue;
        }
        EXPECT_EQ(e.Capture(site, cap.patch_id, kLimit).change, first) << "seed " << seed;
      }
    }
    w->engine->ResetData();
  }
}

TEST(PropertyTest, RoundsEqualDistinctTraces) {
  for (std::uint64_t seed = 400; seed <= 460; ++seed) {
    const testing::Instance inst = testing::GenerateInstance(seed);
    const std::vector<Patch> patches = testing::ParseablePatches(inst.program, inst.patches);
    auto w = testing::WeaveAll(inst.program, patches);
    const std::vector<std::string> eligible = testing::EligiblePatches(*w, patches);
    const std::set<Location> sites(w->meta.sites.begin(), w->meta.sites.end());
    const auto edited = testing::EditedLocations(patches);
    const TestCase& t = inst.tests.front();
    std::vector<testing::TracedPatch> traced;
    for (const Patch& p : patches) {
      if (std::find(eligible.begin(), eligible.end(), p.id) == eligible.end()) continue;
      const Program applied = ApplyPatch(inst.program, p);
      testing::RefInterpreter ref(applied, 10000, 0);
      traced.push_back({ref.Run(t.entry, kLimit, sites).trace, edited.at(p.id)});
    }
    std::int64_t executions = 0;
    const OneTestResult r = ScheduledValidateOneTest(
        [&]() -> Engine& { return *w->engine; }, eligible, t.entry, kLimit, {}, executions);
    ASSERT_FALSE(r.unstable) << "seed " << seed << ": " << r.unstable_reason;
    EXPECT_EQ(r.rounds, testing::PredictedRounds(traced)) << "seed " << seed;
    EXPECT_LE(r.rounds, static_cast<int>(eligible.size()));
    // Each outcome equals the plain run of that patch.
    for (const Patch& p : patches) {
      if (!r.outcomes.contains(p.id)) continue;
      const Program applied = ApplyPatch(inst.program, p);
      Engine plain(applied);
      EXPECT_EQ(r.outcomes.at(p.id), plain.RunTest(t.entry, kLimit))
          << "seed " << seed << " " << p.id;
    }
  }
}

TEST(PropertyTest, CompileMetaIsolatesBrokenPatches) {
  for (std::uint64_t seed = 500; seed <= 560; ++seed) {
    const testing::Instance inst = testing::GenerateInstance(seed, WithErrors(0.3));
    const std::vector<Patch> patches = testing::ParseablePatches(inst.program, inst.patches);
    auto w = testing::WeaveAll(inst.program, patches);
    std::set<std::string> expected;
    for (const Patch& p : patches) {
      if (!StaticCheck(ApplyPatch(inst.program, p)).empty()) expected.insert(p.id);
    }
    EXPECT_EQ(w->meta.uncompilable, expected) << "seed " << seed;
    EXPECT_LE(w->meta.compile_rounds, 2);
    EXPECT_TRUE(StaticCheck(w->meta.woven).empty()) << "seed " << seed;
  }
}

TEST(PropertyTest, WorkerCountIsInvisible) {
  for (std::uint64_t seed = 600; seed <= 615; ++seed) {
    const testing::Instance inst = testing::GenerateInstance(seed, WithErrors(0.1));
    Config one;
    Config four;
    four.workers = 4;
    const std::string a = ReportToJson(RunValidation(testing::ManifestFor(
                                           inst.source, inst.patches, inst.tests, one)),
                                       false)
                              .dump();
    const std::string b = ReportToJson(RunValidation(testing::ManifestFor(
                                           inst.source, inst.patches, inst.tests, four)),
                                       false)
                              .dump();
    EXPECT_EQ(a, b) << "seed " << seed;
  }
}

TEST(PropertyTest, PrioritizationPermutesTests) {
  std::mt19937_64 rng(7);
  for (int iter = 0; iter < 500; ++iter) {
    std::vector<TestCase> tests;
    const int n = static_cast<int>(rng() % 8);
    for (int i = 0; i < n; ++i) {
      tests.push_back({"t" + std::to_string(i), "t" + std::to_string(i), rng() % 3 == 0,
                       "g" + std::to_string(rng() % 3)});
    }
    const std::set<std::string> groups = {"g" + std::to_string(rng() % 3)};
    const std::vector<TestCase> out = PrioritizeTests(tests, groups);
    ASSERT_EQ(out.size(), tests.size());
    auto tier = [&](const TestCase& t) { return t.failing ? 0 : groups.contains(t.group) ? 1 : 2; };
    for (std::size_t i = 1; i < out.size(); ++i) {
      EXPECT_LE(tier(out[i - 1]), tier(out[i]));
      if (tier(out[i - 1]) == tier(out[i])) {
        EXPECT_LT(out[i - 1].name, out[i].name);
      }
    }
  }
}

TEST(PropertyTest, ReportSerializationIsStable) {
  for (std::uint64_t seed = 700; seed <= 710; ++seed) {
    const testing::Instance inst = testing::GenerateInstance(seed);
    const ProjectManifest m = testing::ManifestFor(inst.source, inst.patches, inst.tests);
    EXPECT_EQ(ReportToJson(RunValidation(m), false), ReportToJson(RunValidation(m), false));
  }
}

}  // namespace
}  // namespace patchval
