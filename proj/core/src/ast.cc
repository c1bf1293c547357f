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

#include "patchval/ast.h"

#include <charconv>
#include <type_traits>

namespace patchval {

std::string Location::ToString() const {
  std::string out = method + ":";
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i > 0) out += '.';
    out += std::to_string(path[i]);
  }
  return out;
}

std::optional<Location> Location::Parse(std::string_view text) {
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0) return std::nullopt;
  Location loc;
  loc.method = std::string(text.substr(0, colon));
  std::string_view rest = text.substr(colon + 1);
  if (rest.empty()) return loc;
  while (true) {
    const auto dot = rest.find('.');
    const std::string_view part = rest.substr(0, dot);
    int index = 0;
    const auto [ptr, ec] =
        std::from_chars(part.data(), part.data() + part.size(), index);
    if (part.empty() || ec != std::errc() ||
        ptr != part.data() + part.size() || index < 0) {
      return std::nullopt;
    }
    loc.path.push_back(index);
    if (dot == std::string_view::npos) break;
    rest = rest.substr(dot + 1);
  }
  return loc;
}

Location Location::Child(int index) const {
  Location child = *this;
  child.path.push_back(index);
  return child;
}

bool Location::Contains(const Location& other) const {
  if (method != other.method || other.path.size() < path.size()) return false;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (path[i] != other.path[i]) return false;
  }
  return true;
}

const char* BinaryOpSymbol(BinaryOp op) {
  switch (op) {
    case BinaryOp::kAdd:
      return "+";
    case BinaryOp::kSub:
      return "-";
    case BinaryOp::kMul:
      return "*";
    case BinaryOp::kDiv:
      return "/";
    case BinaryOp::kEq:
      return "=";
    case BinaryOp::kNe:
      return "!=";
    case BinaryOp::kLt:
      return "<";
    case BinaryOp::kLe:
      return "<=";
    case BinaryOp::kGt:
      return ">";
    case BinaryOp::kGe:
      return ">=";
    case BinaryOp::kAnd:
      return "and";
    case BinaryOp::kOr:
      return "or";
  }
  return "?";
}

ExprPtr MakeLiteral(Value v) {
  return std::make_shared<const Expr>(Expr{LiteralExpr{std::move(v)}});
}
ExprPtr MakeVar(std::string name) {
  return std::make_shared<const Expr>(Expr{VarExpr{std::move(name)}});
}
ExprPtr MakeUnary(UnaryOp op, ExprPtr operand) {
  return std::make_shared<const Expr>(Expr{UnaryExpr{op, std::move(operand)}});
}
ExprPtr MakeBinary(BinaryOp op, ExprPtr lhs, ExprPtr rhs) {
  return std::make_shared<const Expr>(
      Expr{BinaryExpr{op, std::move(lhs), std::move(rhs)}});
}
ExprPtr MakeNondet(ExprPtr bound) {
  return std::make_shared<const Expr>(Expr{NondetExpr{std::move(bound)}});
}

bool ExprEqual(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&b](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const T& y = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, LiteralExpr>) {
          return x.value == y.value;
        } else if constexpr (std::is_same_v<T, VarExpr>) {
          return x.name == y.name;
        } else if constexpr (std::is_same_v<T, UnaryExpr>) {
          return x.op == y.op && ExprEqual(*x.operand, *y.operand);
        } else if constexpr (std::is_same_v<T, BinaryExpr>) {
          return x.op == y.op && ExprEqual(*x.lhs, *y.lhs) &&
                 ExprEqual(*x.rhs, *y.rhs);
        } else {
          return ExprEqual(*x.bound, *y.bound);
        }
      },
      a.node);
}

const SiteStmt::Capture* SiteStmt::FindCapture(std::string_view patch_id) const {
  for (const auto& c : captures) {
    if (c.patch_id == patch_id) return &c;
  }
  return nullptr;
}

std::vector<StmtPtr> StmtChildren(const Stmt& s) {
  if (const auto* b = std::get_if<BlockStmt>(&s.node)) return b->stmts;
  if (const auto* i = std::get_if<IfStmt>(&s.node)) {
    return {i->then_branch, i->else_branch};
  }
  if (const auto* w = std::get_if<WhileStmt>(&s.node)) return {w->body};
  if (const auto* t = std::get_if<TryStmt>(&s.node)) {
    return {t->body, t->handler};
  }
  return {};
}

namespace {

bool StmtListEqual(const std::vector<StmtPtr>& a,
                   const std::vector<StmtPtr>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!StmtEqual(*a[i], *b[i])) return false;
  }
  return true;
}

bool ExprListEqual(const std::vector<ExprPtr>& a,
                   const std::vector<ExprPtr>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!ExprEqual(*a[i], *b[i])) return false;
  }
  return true;
}

}  // namespace

bool StmtEqual(const Stmt& a, const Stmt& b) {
  if (a.node.index() != b.node.index() || a.loc != b.loc) return false;
  return std::visit(
      [&b](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const T& y = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, BlockStmt>) {
          return StmtListEqual(x.stmts, y.stmts);
        } else if constexpr (std::is_same_v<T, AssignStmt>) {
          return x.target == y.target && ExprEqual(*x.value, *y.value);
        } else if constexpr (std::is_same_v<T, CallStmt>) {
          return x.target == y.target && x.method == y.method &&
                 ExprListEqual(x.args, y.args);
        } else if constexpr (std::is_same_v<T, IfStmt>) {
          return ExprEqual(*x.cond, *y.cond) &&
                 StmtEqual(*x.then_branch, *y.then_branch) &&
                 StmtEqual(*x.else_branch, *y.else_branch);
        } else if constexpr (std::is_same_v<T, TryStmt>) {
          return x.var == y.var && StmtEqual(*x.body, *y.body) &&
                 StmtEqual(*x.handler, *y.handler);
        } else if constexpr (std::is_same_v<T, WhileStmt>) {
          return ExprEqual(*x.cond, *y.cond) && StmtEqual(*x.body, *y.body);
        } else if constexpr (std::is_same_v<T, ReturnStmt> ||
                             std::is_same_v<T, ThrowStmt>) {
          return ExprEqual(*x.value, *y.value);
        } else if constexpr (std::is_same_v<T, SiteStmt>) {
          if (x.site != y.site || x.captures.size() != y.captures.size() ||
              !StmtEqual(*x.original, *y.original) ||
              !StmtEqual(*x.replay, *y.replay)) {
            return false;
          }
          for (std::size_t i = 0; i < x.captures.size(); ++i) {
            if (x.captures[i].patch_id != y.captures[i].patch_id ||
                !StmtEqual(*x.captures[i].call, *y.captures[i].call)) {
              return false;
            }
          }
          return true;
        } else {
          return true;
        }
      },
      a.node);
}

namespace {

StmtPtr Rebuild(const Stmt& s, const Location& loc, bool relocate,
                bool force_synthetic) {
  auto out = std::make_shared<Stmt>();
  out->loc = relocate ? loc : s.loc;
  out->synthetic = force_synthetic || s.synthetic;
  auto child = [&](const StmtPtr& c, int index) {
    return Rebuild(*c, loc.Child(index), relocate, force_synthetic);
  };
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, BlockStmt>) {
          BlockStmt b;
          for (std::size_t i = 0; i < x.stmts.size(); ++i) {
            b.stmts.push_back(child(x.stmts[i], static_cast<int>(i)));
          }
          out->node = std::move(b);
        } else if constexpr (std::is_same_v<T, IfStmt>) {
          out->node =
              IfStmt{x.cond, child(x.then_branch, 0), child(x.else_branch, 1)};
        } else if constexpr (std::is_same_v<T, WhileStmt>) {
          out->node = WhileStmt{x.cond, child(x.body, 0)};
        } else if constexpr (std::is_same_v<T, TryStmt>) {
          out->node = TryStmt{child(x.body, 0), x.var, child(x.handler, 1)};
        } else if constexpr (std::is_same_v<T, SiteStmt>) {
          SiteStmt site = x;
          site.original =
              Rebuild(*x.original, loc, relocate, force_synthetic);
          out->node = std::move(site);
        } else {
          out->node = x;
        }
      },
      s.node);
  return out;
}

}  // namespace

StmtPtr Relocate(const Stmt& s, const Location& loc) {
  return Rebuild(s, loc, /*relocate=*/true, /*force_synthetic=*/false);
}

StmtPtr MarkSynthetic(const Stmt& s) {
  return Rebuild(s, s.loc, /*relocate=*/false, /*force_synthetic=*/true);
}

}  // namespace patchval
