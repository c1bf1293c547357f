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
#include <utility>

#include "patchval/program.h"

namespace patchval {
namespace {

// Statement children with Site nodes looked through to the original code.
std::vector<StmtPtr> StructuralChildren(const Stmt& s) {
  if (const auto* site = std::get_if<SiteStmt>(&s.node)) {
    return StructuralChildren(*site->original);
  }
  return StmtChildren(s);
}

void IndexStmt(const Stmt& s, std::map<Location, const Stmt*>& index) {
  index.emplace(s.loc, &s);
  for (const StmtPtr& c : StructuralChildren(s)) IndexStmt(*c, index);
}

bool IsTestName(const Method& m) {
  return m.params.empty() && m.name.starts_with("test");
}

// Walks from the method body towards `loc`, calling `visit(parent, index)` for
// every step down.
template <typename Visit>
void WalkPath(const Program& program, const Location& loc, Visit visit) {
  const Method* method = program.FindMethod(loc.method);
  if (method == nullptr) {
    throw NotFoundError("no method '" + loc.method + "'");
  }
  const Stmt* cur = method->body.get();
  for (int index : loc.path) {
    std::vector<StmtPtr> children = StructuralChildren(*cur);
    if (index < 0 || static_cast<std::size_t>(index) >= children.size()) {
      throw NotFoundError("no statement at " + loc.ToString());
    }
    const Stmt* structural = cur;
    if (const auto* site = std::get_if<SiteStmt>(&cur->node)) {
      structural = site->original.get();
    }
    visit(*structural, index);
    cur = children[index].get();
  }
}

}  // namespace

Program::Program(std::vector<GlobalDecl> globals, std::vector<Method> methods)
    : globals_(std::move(globals)), methods_(std::move(methods)) {
  Index();
}

void Program::Index() {
  method_pos_.clear();
  test_entries_.clear();
  stmt_index_.clear();
  for (std::size_t i = 0; i < methods_.size(); ++i) {
    const Method& m = methods_[i];
    method_pos_.emplace(m.name, i);
    if (m.is_test || IsTestName(m)) test_entries_.push_back(m.name);
    if (m.body) IndexStmt(*m.body, stmt_index_);
  }
}

const Method* Program::FindMethod(std::string_view name) const {
  const auto it = method_pos_.find(name);
  return it == method_pos_.end() ? nullptr : &methods_[it->second];
}

const GlobalDecl* Program::FindGlobal(std::string_view name) const {
  for (const GlobalDecl& g : globals_) {
    if (g.name == name) return &g;
  }
  return nullptr;
}

const Stmt* Program::Find(const Location& loc) const {
  const auto it = stmt_index_.find(loc);
  return it == stmt_index_.end() ? nullptr : it->second;
}

const char* DiagnosticKindName(DiagnosticKind kind) {
  switch (kind) {
    case DiagnosticKind::kUndeclaredVariable:
      return "undeclared-variable";
    case DiagnosticKind::kUndefinedMethod:
      return "undefined-method";
    case DiagnosticKind::kArityMismatch:
      return "arity-mismatch";
    case DiagnosticKind::kBreakOutsideLoop:
      return "break-outside-loop";
    case DiagnosticKind::kContinueOutsideLoop:
      return "continue-outside-loop";
    case DiagnosticKind::kSyntaxError:
      return "syntax-error";
    case DiagnosticKind::kReservedIdentifier:
      return "reserved-identifier";
  }
  return "unknown";
}

std::string Diagnostic::ToString() const {
  std::string out = DiagnosticKindName(kind);
  if (!location.empty()) out += " at " + location;
  if (!isolation_unit.empty()) out += " in " + isolation_unit;
  return out + ": " + message;
}

const Stmt& Resolve(const Program& program, const Location& loc) {
  if (const Stmt* s = program.Find(loc)) return *s;
  throw NotFoundError("no statement at " + loc.ToString());
}

bool InLoop(const Program& program, const Location& loc) {
  bool in_loop = false;
  WalkPath(program, loc, [&](const Stmt& parent, int) {
    if (std::holds_alternative<WhileStmt>(parent.node)) in_loop = true;
  });
  return in_loop;
}

std::vector<std::string> FrameNamesAt(const Program& program,
                                      const Location& loc) {
  const Method* method = program.FindMethod(loc.method);
  if (method == nullptr) {
    throw NotFoundError("no method '" + loc.method + "'");
  }
  std::vector<std::string> names = method->params;
  WalkPath(program, loc, [&](const Stmt& parent, int index) {
    const auto* t = std::get_if<TryStmt>(&parent.node);
    if (t != nullptr && index == 1 &&
        std::find(names.begin(), names.end(), t->var) == names.end()) {
      names.push_back(t->var);
    }
  });
  return names;
}

}  // namespace patchval
