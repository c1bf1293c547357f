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
#include <cstdio>

#include "patchval/engine.h"
#include "patchval/interceptor.h"

namespace patchval {
namespace {

std::vector<StmtPtr> ChildrenThroughSites(const Stmt& s) {
  if (const auto* site = std::get_if<SiteStmt>(&s.node)) {
    return ChildrenThroughSites(*site->original);
  }
  return StmtChildren(s);
}

StmtPtr FindShared(const Program& program, const Location& loc) {
  const Method* m = program.FindMethod(loc.method);
  if (m == nullptr) throw NotFoundError("no method '" + loc.method + "'");
  StmtPtr cur = m->body;
  for (int index : loc.path) {
    std::vector<StmtPtr> kids = ChildrenThroughSites(*cur);
    if (index < 0 || static_cast<std::size_t>(index) >= kids.size()) {
      throw NotFoundError("no statement at " + loc.ToString());
    }
    cur = kids[index];
  }
  return cur;
}

std::string Hex8(std::uint32_t v) {
  char buf[9];
  std::snprintf(buf, sizeof(buf), "%08x", v);
  return buf;
}

std::vector<Location> DeepestFirst(std::vector<Location> sites) {
  std::stable_sort(sites.begin(), sites.end(),
                   [](const Location& a, const Location& b) {
                     return a.path.size() > b.path.size();
                   });
  return sites;
}

ParseOptions Reserved() {
  ParseOptions o;
  o.allow_reserved = true;
  return o;
}

}  // namespace

MetaProgram Weave(const Program& base, const std::vector<WovenPatch>& patches,
                  const WeaveOptions& options) {
  MetaProgram meta;
  std::map<Location, std::vector<std::pair<std::string, StmtPtr>>> by_site;
  for (const WovenPatch& p : patches) {
    for (const auto& [loc, stmt] : p.edits) {
      by_site[loc].emplace_back(p.id, stmt);
      meta.patch_locations[p.id].insert(loc);
    }
  }
  for (const auto& [loc, unused] : by_site) meta.sites.push_back(loc);

  std::set<std::string> names;
  for (const Method& m : base.methods()) names.insert(m.name);
  auto unique = [&names](std::string name) {
    std::string candidate = name;
    for (int i = 2; names.contains(candidate) ||
                    names.contains(candidate + "_ret");
         ++i) {
      candidate = name + "_" + std::to_string(i);
    }
    names.insert(candidate);
    names.insert(candidate + "_ret");
    return candidate;
  };

  std::vector<Method> generated;
  auto add_methods = [&](const GeneratedCapture& gen, const std::string& owner) {
    Program part = Parse(gen.source, Reserved());
    for (const Method& m : part.methods()) {
      meta.method_owner[m.name] = owner;
      generated.push_back(m);
    }
  };

  Program cur = base;
  for (const Location& loc : DeepestFirst(meta.sites)) {
    const Stmt& original = Resolve(base, loc);
    const std::vector<std::string> frame = FrameNamesAt(base, loc);
    const bool in_loop = InLoop(base, loc);
    const std::string hash = Hex8(LocationHash(loc));

    SiteStmt site;
    site.site = loc;
    site.original = FindShared(cur, loc);

    const ChangeScope orig_scope =
        AnalyzeChangeScope(base, original, frame, options.scope);
    const std::string orig_name = unique("$orig_" + hash);
    const GeneratedCapture orig_gen =
        GenerateCapture(orig_name, original, orig_scope, in_loop);
    try {
      add_methods(orig_gen, "");
    } catch (const ParseError& e) {
      throw InternalError("generated component for original code at " +
                          loc.ToString() + " does not parse: " + e.what());
    }
    meta.scopes[orig_name] = orig_scope;
    site.original_capture = ParseStatements(orig_gen.call, loc, Reserved());
    std::set<std::string> replay_vars = orig_scope.vars;

    for (const auto& [id, stmt] : by_site[loc]) {
      const ChangeScope scope =
          AnalyzeChangeScope(base, *stmt, frame, options.scope);
      const std::string name =
          unique("$cap_" + SanitizeId(id) + "_" + hash);
      const GeneratedCapture gen = GenerateCapture(name, *stmt, scope, in_loop);
      try {
        add_methods(gen, id);
      } catch (const ParseError& e) {
        meta.uncompilable.insert(id);
        meta.uncompilable_reason[id] = e.what();
        continue;
      }
      meta.component_index[{id, loc}] = name;
      meta.scopes[name] = scope;
      site.captures.push_back(
          SiteStmt::Capture{id, ParseStatements(gen.call, loc, Reserved())});
      replay_vars.insert(scope.vars.begin(), scope.vars.end());
    }
    site.replay_vars.assign(replay_vars.begin(), replay_vars.end());
    site.replay =
        ParseStatements(GenerateReplay(site.replay_vars, in_loop), loc, Reserved());

    auto node = std::make_shared<Stmt>();
    node->node = std::move(site);
    node->loc = loc;
    node->synthetic = true;
    cur = ReplaceStatements(cur, {{loc, node}});
  }

  std::vector<Method> methods = cur.methods();
  methods.insert(methods.end(), generated.begin(), generated.end());
  meta.woven = Program(cur.globals(), std::move(methods));
  if (!meta.uncompilable.empty()) {
    const std::set<std::string> bad = meta.uncompilable;
    RemovePatches(meta, bad);
  }
  return meta;
}

void RemovePatches(MetaProgram& meta, const std::set<std::string>& ids) {
  if (ids.empty()) return;
  Program cur = meta.woven;
  for (const Location& loc : DeepestFirst(meta.sites)) {
    StmtPtr node = FindShared(cur, loc);
    const auto* site = std::get_if<SiteStmt>(&node->node);
    if (site == nullptr) throw InternalError("missing site at " + loc.ToString());
    auto copy = std::make_shared<Stmt>(*node);
    auto& edited = std::get<SiteStmt>(copy->node);
    std::erase_if(edited.captures, [&](const SiteStmt::Capture& c) {
      return ids.contains(c.patch_id);
    });
    cur = ReplaceStatements(cur, {{loc, copy}});
  }
  std::vector<Method> methods;
  for (const Method& m : cur.methods()) {
    const auto owner = meta.method_owner.find(m.name);
    if (owner != meta.method_owner.end() && ids.contains(owner->second)) {
      continue;
    }
    methods.push_back(m);
  }
  std::erase_if(meta.method_owner,
                [&](const auto& kv) { return ids.contains(kv.second); });
  std::erase_if(meta.component_index,
                [&](const auto& kv) { return ids.contains(kv.first.first); });
  meta.woven = Program(cur.globals(), std::move(methods));
}

void CompileMeta(MetaProgram& meta) {
  meta.compile_rounds = 1;
  std::set<std::string> bad;
  for (const Diagnostic& d : StaticCheck(meta.woven)) {
    const auto owner = meta.method_owner.find(d.isolation_unit);
    if (owner == meta.method_owner.end() || owner->second.empty()) {
      throw InternalError("diagnostic outside patch components: " +
                          d.ToString());
    }
    if (bad.insert(owner->second).second) {
      meta.uncompilable_reason[owner->second] = d.ToString();
    }
  }
  if (bad.empty()) return;
  RemovePatches(meta, bad);
  meta.uncompilable.insert(bad.begin(), bad.end());
  meta.compile_rounds = 2;
  const std::vector<Diagnostic> second = StaticCheck(meta.woven);
  if (!second.empty()) {
    throw InternalError("second compilation round is not clean: " +
                        second.front().ToString());
  }
}

}  // namespace patchval
