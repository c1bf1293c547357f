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

#ifndef PATCHVAL_PROGRAM_H_
#define PATCHVAL_PROGRAM_H_

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "patchval/ast.h"
#include "patchval/value.h"

namespace patchval {

struct Method {
  std::string name;
  std::vector<std::string> params;
  StmtPtr body;
  // Package of the source file that declared the method ("" if none).
  std::string group;
  bool is_test = false;
};

struct GlobalDecl {
  std::string name;
  Value init;
};

// An immutable parsed codebase. Methods and globals are kept in declaration
// order; `stmt_index` maps every statement location to its node.
class Program {
 public:
  Program() = default;
  Program(std::vector<GlobalDecl> globals, std::vector<Method> methods);

  const std::vector<GlobalDecl>& globals() const { return globals_; }
  const std::vector<Method>& methods() const { return methods_; }
  const Method* FindMethod(std::string_view name) const;
  const GlobalDecl* FindGlobal(std::string_view name) const;
  const std::vector<std::string>& test_entries() const { return test_entries_; }
  const std::map<Location, const Stmt*>& stmt_index() const {
    return stmt_index_;
  }

  // Returns nullptr when `loc` does not name a statement.
  const Stmt* Find(const Location& loc) const;

 private:
  void Index();

  std::vector<GlobalDecl> globals_;
  std::vector<Method> methods_;
  std::map<std::string, std::size_t, std::less<>> method_pos_;
  std::vector<std::string> test_entries_;
  std::map<Location, const Stmt*> stmt_index_;
};

enum class DiagnosticKind {
  kUndeclaredVariable,
  kUndefinedMethod,
  kArityMismatch,
  kBreakOutsideLoop,
  kContinueOutsideLoop,
  kSyntaxError,
  kReservedIdentifier,
};

const char* DiagnosticKindName(DiagnosticKind kind);

struct Diagnostic {
  // The method (isolation unit) containing the offending code.
  std::string isolation_unit;
  DiagnosticKind kind;
  // `<method>:<path>` for checker diagnostics, `<line>:<column>` for parse
  // errors.
  std::string location;
  std::string message;

  std::string ToString() const;
};

class ParseError : public std::runtime_error {
 public:
  explicit ParseError(Diagnostic diag);
  const Diagnostic& diagnostic() const { return diag_; }

 private:
  Diagnostic diag_;
};

class NotFoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ParseOptions {
  // Accept `$`-prefixed names and the instrumentation-only constructs
  // (`$sentinel`, `$site`, `$patch`). Nodes are marked synthetic except inside
  // `$patch { ... }`.
  bool allow_reserved = false;
  // Package for methods of a source without a `package` directive.
  std::string default_group;
};

// Parses a complete `.imp` source. Throws ParseError.
Program Parse(std::string_view source, const ParseOptions& options = {});

// Parses and merges several sources; each file's methods get that file's
// group. Duplicate names across files are syntax errors.
struct SourceFile {
  std::string name;
  std::string text;
  std::string default_group;
};
Program ParseSources(const std::vector<SourceFile>& sources);

// Parses a statement sequence (a patch replacement). A single statement is
// returned as-is; several are wrapped in a block. Locations are assigned
// beneath `loc`. Throws ParseError.
StmtPtr ParseStatements(std::string_view text, const Location& loc,
                        const ParseOptions& options = {});

// Parses a single method definition (reserved syntax allowed).
Method ParseMethod(std::string_view text);

// Canonical IMP+ text. `Parse(Print(p))` is structurally equal to `p`.
std::string Print(const Program& program);
std::string PrintStmt(const Stmt& stmt, int indent = 0);
std::string PrintExpr(const Expr& expr);
std::string PrintMethod(const Method& method);

// Returns every diagnostic; empty iff the program compiles. Each diagnostic is
// attributed to the method it occurs in.
std::vector<Diagnostic> StaticCheck(const Program& program);
// Checks only the named methods (the rest of the program provides context).
std::vector<Diagnostic> StaticCheckMethods(
    const Program& program, const std::vector<std::string>& methods);

// Throws NotFoundError.
const Stmt& Resolve(const Program& program, const Location& loc);

// True if the statement at `loc` sits inside a `while` body of its method.
bool InLoop(const Program& program, const Location& loc);

// Names bound in the frame at `loc`: the method's parameters followed by the
// catch variables of enclosing handlers, innermost last.
std::vector<std::string> FrameNamesAt(const Program& program,
                                      const Location& loc);

}  // namespace patchval

#endif  // PATCHVAL_PROGRAM_H_
