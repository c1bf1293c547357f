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

#include "fixtures.h"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#ifndef PATCHVAL_TEST_DATA_DIR
#error "PATCHVAL_TEST_DATA_DIR must be defined"
#endif

namespace patchval::testing {

std::string DataPath(const std::string& relative) {
  return std::string(PATCHVAL_TEST_DATA_DIR) + "/" + relative;
}

std::string ReadText(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunningExample LoadRunningExample() {
  RunningExample ex;
  ex.program = Parse(ReadText(DataPath("running/running.imp")));
  ex.patches = LoadPatchFile(DataPath("running/patches.json"));
  ex.tests = {TestCase{"test", "test", true, ""}};
  return ex;
}

ProjectManifest ManifestFor(const std::string& source,
                            const std::vector<Patch>& patches,
                            const std::vector<TestCase>& tests,
                            const Config& config) {
  ProjectManifest m;
  m.sources = {SourceFile{"gen.imp", source, ""}};
  m.patches = patches;
  m.tests = tests;
  m.config = config;
  return m;
}

std::unique_ptr<WovenFixture> WeaveAll(const Program& base,
                                       const std::vector<Patch>& patches,
                                       const ScopeOptions& scope) {
  auto f = std::make_unique<WovenFixture>();
  f->base = base;
  std::vector<WovenPatch> woven;
  for (const Patch& p : patches) {
    woven.push_back(WovenPatch{p.id, ParseEdits(f->base, p)});
  }
  f->meta = Weave(f->base, woven, WeaveOptions{scope});
  CompileMeta(f->meta);
  f->engine = std::make_unique<Engine>(f->meta.woven);
  return f;
}

const SiteStmt& SiteAt(const MetaProgram& meta, const std::string& loc) {
  const Stmt* s = meta.woven.Find(*Location::Parse(loc));
  if (s == nullptr || !std::holds_alternative<SiteStmt>(s->node)) {
    throw std::runtime_error("no site at " + loc);
  }
  return std::get<SiteStmt>(s->node);
}

std::vector<Patch> ParseablePatches(const Program& base,
                                    const std::vector<Patch>& patches) {
  std::vector<Patch> out;
  for (const Patch& p : patches) {
    try {
      ParseEdits(base, p);
      out.push_back(p);
    } catch (const std::exception&) {
    }
  }
  return out;
}

std::vector<std::string> EligiblePatches(const WovenFixture& w,
                                         const std::vector<Patch>& patches,
                                         const ScopeOptions& scope) {
  std::vector<std::string> out;
  for (const Patch& p : patches) {
    if (w.meta.uncompilable.contains(p.id)) continue;
    const ParsedEdits edits = ParseEdits(w.base, p);
    std::set<Location> own;
    for (const auto& [loc, stmt] : edits) own.insert(loc);
    bool ok = true;
    for (const auto& [loc, stmt] : edits) {
      const std::string& m = w.meta.component_index.at({p.id, loc});
      if (BypassReason(w.base, w.meta.scopes.at(m), scope)) ok = false;
    }
    for (const Location& site : w.meta.sites) {
      if (!ok) break;
      const auto e = std::find_if(edits.begin(), edits.end(),
                                  [&](const auto& x) { return x.first == site; });
      const bool edited = e != edits.end();
      if (Reaches(w.base, edited ? *e->second : Resolve(w.base, site), !edited,
                  own)) {
        ok = false;
      }
    }
    if (ok) out.push_back(p.id);
  }
  return out;
}

namespace {

class StateRecorder : public SiteHandler {
 public:
  StateRecorder(std::vector<SiteState>* out, std::size_t cap)
      : out_(out), cap_(cap) {}
  std::optional<CapturedChange> OnSite(Engine& engine,
                                       const SiteStmt& site) override {
    if (out_->size() < cap_) {
      out_->push_back(SiteState{site.site, engine.globals(), engine.frame()});
    }
    return std::nullopt;
  }

 private:
  std::vector<SiteState>* out_;
  std::size_t cap_;
};

void LoadState(Engine& e, const SiteState& s, bool keep_temporaries) {
  e.ResetData();
  DataState g;
  for (const auto& [name, v] : s.globals) {
    if (keep_temporaries || !name.starts_with("$")) g[name] = v;
  }
  e.mutable_globals() = std::move(g);
  e.PushFrame(s.frame);
  e.set_semantic_steps(0);
}

}  // namespace

std::vector<SiteState> ReachableSiteStates(WovenFixture& w,
                                           const std::vector<TestCase>& tests,
                                           std::int64_t limit,
                                           std::size_t cap) {
  std::vector<SiteState> out;
  StateRecorder rec(&out, cap);
  w.engine->set_site_handler(&rec);
  for (const TestCase& t : tests) w.engine->RunTest(t.entry, limit);
  w.engine->set_site_handler(nullptr);
  return out;
}

ReplayCheck CheckCaptureReplay(WovenFixture& w, const Program& applied,
                               const SiteState& state,
                               const std::string& patch_id,
                               std::int64_t limit) {
  ReplayCheck r;
  const std::string& method = w.meta.component_index.at({patch_id, state.site});
  const ChangeScope& scope = w.meta.scopes.at(method);
  r.scope_size = scope.vars.size() + scope.lifted_read.size();

  Engine direct(applied);
  LoadState(direct, state, false);
  direct.set_semantic_limit(limit);
  const std::int64_t d0 = direct.interpreter_steps();
  std::optional<ControlState> expected;
  try {
    expected = direct.Execute(Resolve(applied, state.site));
  } catch (const TimeoutError&) {
  }
  r.direct_steps = direct.interpreter_steps() - d0;

  Engine& e = *w.engine;
  LoadState(e, state, true);
  const SiteStmt& site = SiteAt(w.meta, state.site.ToString());
  const DataState before = e.VisibleState();
  const std::int64_t w0 = e.interpreter_steps();
  CaptureResult cap;
  try {
    cap = e.Capture(site, patch_id, limit);
  } catch (const InternalError&) {
    r.skipped = true;
    e.ResetData();
    return r;
  }
  r.neutral = e.VisibleState() == before;
  if (cap.change.control == ChangeKind::kTimeout) {
    r.timed_out = true;
    r.equivalent = !expected.has_value();
    if (!r.equivalent) r.detail = "capture timed out, direct run did not";
    e.ResetData();
    return r;
  }
  const ControlState got = e.Replay(site, cap.change);
  r.woven_steps = e.interpreter_steps() - w0;
  if (!expected) {
    r.equivalent = false;
    r.detail = "direct run timed out, capture did not";
  } else if (got != *expected || e.VisibleState() != direct.VisibleState()) {
    r.equivalent = false;
    r.detail = "replay gave " + got.ToString() + ", direct gave " +
               expected->ToString() + " (change " + cap.change.ToString() + ")";
  }
  e.ResetData();
  return r;
}

std::vector<std::string> Ids(const std::vector<Patch>& patches) {
  std::vector<std::string> out;
  for (const Patch& p : patches) out.push_back(p.id);
  return out;
}

std::map<std::string, std::string> StatusById(
    const std::vector<PatchVerdict>& verdicts) {
  std::map<std::string, std::string> out;
  for (const PatchVerdict& v : verdicts) {
    out[v.patch_id] = VerdictStatusName(v.status);
  }
  return out;
}

std::map<std::string, std::set<Location>> EditedLocations(
    const std::vector<Patch>& patches) {
  std::map<std::string, std::set<Location>> out;
  for (const Patch& p : patches) {
    for (const Edit& e : p.edits) {
      if (auto loc = Location::Parse(e.location)) out[p.id].insert(*loc);
    }
  }
  return out;
}

int PredictedRounds(const std::vector<TracedPatch>& patches) {
  auto has_prefix = [](const std::vector<TraceEvent>& t,
                       const std::vector<TraceEvent>& p) {
    return t.size() >= p.size() && std::equal(p.begin(), p.end(), t.begin());
  };
  std::set<std::vector<TraceEvent>> complete;
  std::set<std::vector<TraceEvent>> aborted;
  for (const TracedPatch& tp : patches) {
    const auto& t = tp.trace;
    if (t.empty() || t.back().change != "timeout") {
      complete.insert(t);
      continue;
    }
    // A timeout at a statement nobody in the group edits ends a normal round.
    const std::vector<TraceEvent> prefix(t.begin(), t.end() - 1);
    const Location& site = t.back().site;
    bool captured = false;
    bool continues = false;
    for (const TracedPatch& other : patches) {
      if (!has_prefix(other.trace, prefix)) continue;
      if (other.edits.contains(site)) captured = true;
      if (other.trace.size() == prefix.size() ||
          other.trace[prefix.size()].change != "timeout") {
        continues = true;
      }
    }
    if (!captured) {
      complete.insert(t);
    } else if (!continues) {
      aborted.insert(prefix);
    }
  }
  return static_cast<int>(complete.size() + aborted.size());
}

}  // namespace patchval::testing
