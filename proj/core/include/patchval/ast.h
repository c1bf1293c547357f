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

#ifndef PATCHVAL_AST_H_
#define PATCHVAL_AST_H_

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "patchval/value.h"

namespace patchval {

// Names starting with this character are reserved for instrumentation.
inline constexpr char kReservedPrefix = '$';
// Assignment target used by the `m(...);` call-statement sugar; writes to it
// are discarded.
inline constexpr std::string_view kIgnoreVar = "$ignore";

inline bool IsReservedName(std::string_view name) {
  return !name.empty() && name.front() == kReservedPrefix;
}

// Statement address: a method plus the child-index path from the method body.
// Serialized as `<method>:<i0>.<i1>...`; the body root itself is `<method>:`.
//
// Child numbering: the i-th statement of a block is child i; `if` has the
// then-block as child 0 and the else-block as child 1; `while` has its body as
// child 0; `try` has its body as child 0 and the handler as child 1.
struct Location {
  std::string method;
  std::vector<int> path;

  std::string ToString() const;
  // Returns nullopt on malformed text.
  static std::optional<Location> Parse(std::string_view text);

  Location Child(int index) const;
  // True if `other` is this location or lies beneath it.
  bool Contains(const Location& other) const;

  friend bool operator==(const Location&, const Location&) = default;
  friend auto operator<=>(const Location&, const Location&) = default;
};

enum class UnaryOp : std::uint8_t { kNeg, kNot };
enum class BinaryOp : std::uint8_t {
  kAdd,
  kSub,
  kMul,
  kDiv,
  kEq,
  kNe,
  kLt,
  kLe,
  kGt,
  kGe,
  kAnd,
  kOr,
};

const char* BinaryOpSymbol(BinaryOp op);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct LiteralExpr {
  Value value;
};
struct VarExpr {
  std::string name;
};
struct UnaryExpr {
  UnaryOp op;
  ExprPtr operand;
};
struct BinaryExpr {
  BinaryOp op;
  ExprPtr lhs;
  ExprPtr rhs;
};
// `nondet(k)`: an integer drawn from the engine's seeded generator.
struct NondetExpr {
  ExprPtr bound;
};

struct Expr {
  std::variant<LiteralExpr, VarExpr, UnaryExpr, BinaryExpr, NondetExpr> node;
};

ExprPtr MakeLiteral(Value v);
ExprPtr MakeVar(std::string name);
ExprPtr MakeUnary(UnaryOp op, ExprPtr operand);
ExprPtr MakeBinary(BinaryOp op, ExprPtr lhs, ExprPtr rhs);
ExprPtr MakeNondet(ExprPtr bound);

bool ExprEqual(const Expr& a, const Expr& b);

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;

struct BlockStmt {
  std::vector<StmtPtr> stmts;
};
struct AssignStmt {
  std::string target;
  ExprPtr value;
};
struct CallStmt {
  std::string target;
  std::string method;
  std::vector<ExprPtr> args;
};
struct IfStmt {
  ExprPtr cond;
  StmtPtr then_branch;
  StmtPtr else_branch;
};
struct TryStmt {
  StmtPtr body;
  std::string var;
  StmtPtr handler;
};
struct WhileStmt {
  ExprPtr cond;
  StmtPtr body;
};
struct BreakStmt {};
struct ContinueStmt {};
struct ReturnStmt {
  ExprPtr value;
};
struct ThrowStmt {
  ExprPtr value;
};
struct SkipStmt {};

// A patched location in a woven program. Without a selected patch the engine
// runs `original`; otherwise it runs one capture call and then `replay`.
struct SiteStmt {
  struct Capture {
    std::string patch_id;
    StmtPtr call;
  };
  Location site;
  StmtPtr original;
  StmtPtr original_capture;
  std::vector<Capture> captures;
  StmtPtr replay;
  // Variables the replay block may write, in canonical order.
  std::vector<std::string> replay_vars;

  const Capture* FindCapture(std::string_view patch_id) const;
};

struct Stmt {
  std::variant<BlockStmt, AssignStmt, CallStmt, IfStmt, TryStmt, WhileStmt,
               BreakStmt, ContinueStmt, ReturnStmt, ThrowStmt, SkipStmt,
               SiteStmt>
      node;
  Location loc;
  // Instrumentation nodes are excluded from the test step budget.
  bool synthetic = false;
};

// Children in location order (see Location).
std::vector<StmtPtr> StmtChildren(const Stmt& s);

// Deep structural equality, including locations.
bool StmtEqual(const Stmt& a, const Stmt& b);

// Deep copy of `s` with locations reassigned beneath `loc`.
StmtPtr Relocate(const Stmt& s, const Location& loc);

// Copy of `s` with the synthetic flag forced on every node.
StmtPtr MarkSynthetic(const Stmt& s);

}  // namespace patchval

#endif  // PATCHVAL_AST_H_
