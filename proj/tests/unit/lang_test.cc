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

#include <random>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "fixtures.h"
#include "generators.h"
#include "patchval/program.h"

namespace patchval {
namespace {

using ::testing::ElementsAre;
using ::testing::IsEmpty;

constexpr const char* kRunning =
    "var i := 2; var j := 1; def f() { i := i + 2; j := j + 2; } "
    "def test() { f(); assert(i = 4 and j = 2); f(); assert(i = 6 and j = 4); }";

ParseError ParseFailure(const std::string& src) {
  try {
    Parse(src);
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "parsed: " << src;
  return ParseError(Diagnostic{});
}

TEST(ParseTest, SingleGlobalAndMethod) {
  const Program p = Parse("var x := 1; def t() { x := x + 1; }");
  ASSERT_EQ(p.globals().size(), 1u);
  EXPECT_EQ(p.globals()[0].name, "x");
  EXPECT_EQ(p.globals()[0].init, Value::Int(1));
  ASSERT_EQ(p.methods().size(), 1u);
  EXPECT_EQ(p.methods()[0].name, "t");
  const Stmt* s = p.Find(*Location::Parse("t:0"));
  ASSERT_NE(s, nullptr);
  EXPECT_TRUE(std::holds_alternative<AssignStmt>(s->node));
}

TEST(ParseTest, RunningExample) {
  const Program p = Parse(kRunning);
  ASSERT_EQ(p.globals().size(), 2u);
  EXPECT_EQ(p.globals()[0].init, Value::Int(2));
  EXPECT_EQ(p.globals()[1].init, Value::Int(1));
  EXPECT_NE(p.FindMethod("f"), nullptr);
  EXPECT_NE(p.FindMethod("test"), nullptr);
  EXPECT_THAT(p.test_entries(), ElementsAre("test"));
}

TEST(ParseTest, MissingExpressionIsSyntaxError) {
  const ParseError e = ParseFailure("def t() { x := ; }");
  EXPECT_EQ(e.diagnostic().kind, DiagnosticKind::kSyntaxError);
  EXPECT_EQ(e.diagnostic().location, "1:16");
}

TEST(ParseTest, ReservedIdentifierRejected) {
  const ParseError e = ParseFailure("var $x := 1;");
  EXPECT_EQ(e.diagnostic().kind, DiagnosticKind::kReservedIdentifier);
}

TEST(ParseTest, CallInsideExpressionRejected) {
  EXPECT_EQ(ParseFailure("var x := 0; def g() { return 1; } def t() { x := g() + 1; }")
                .diagnostic()
                .kind,
            DiagnosticKind::kSyntaxError);
}

TEST(ParseTest, DuplicateDeclarationsRejected) {
  ParseFailure("var x := 1; var x := 2;");
  ParseFailure("def m(a, a) { skip; }");
  ParseFailure("def m() { skip; } def m() { skip; }");
}

TEST(ParseTest, AssertDesugarsToGuardedThrow) {
  const Program p = Parse("var x := 1; def t() { assert(x = 1); }");
  const Stmt& s = Resolve(p, *Location::Parse("t:0"));
  const auto* guard = std::get_if<IfStmt>(&s.node);
  ASSERT_NE(guard, nullptr);
  EXPECT_EQ(PrintExpr(*guard->cond), "not ((x = 1))");
  EXPECT_EQ(PrintStmt(*guard->then_branch), "{\n  throw \"assertion failed\";\n}\n");
}

TEST(ParseTest, MinInt64Literal) {
  const Program p = Parse("var x := -9223372036854775808;");
  EXPECT_EQ(p.globals()[0].init, Value::Int(INT64_MIN));
}

TEST(ParseTest, TestModifierAndNameTest) {
  const Program p =
      Parse("test def check() { skip; } def test() { skip; } def helper(a) { skip; }");
  EXPECT_THAT(p.test_entries(), ElementsAre("check", "test"));
}

TEST(LocationTest, RoundTrip) {
  for (const char* text : {"f:", "f:0", "m:1.0.3", "test:12.1"}) {
    const auto loc = Location::Parse(text);
    ASSERT_TRUE(loc.has_value()) << text;
    EXPECT_EQ(loc->ToString(), text);
  }
  EXPECT_FALSE(Location::Parse("nocolon").has_value());
  EXPECT_FALSE(Location::Parse("f:1..2").has_value());
  EXPECT_FALSE(Location::Parse("f:-1").has_value());
}

TEST(ResolveTest, RunningExampleStatements) {
  const Program p = Parse(kRunning);
  EXPECT_EQ(PrintStmt(Resolve(p, *Location::Parse("f:0"))), "i := (i + 2);\n");
  EXPECT_THROW(Resolve(p, *Location::Parse("f:9")), NotFoundError);
  const Location first = *Location::Parse("test:0");
  EXPECT_EQ(&Resolve(p, first), p.stmt_index().at(first));
}

TEST(ResolveTest, IndexIsTotal) {
  const Program p = Parse(
      "var x := 0; def m(a) { while (a < 3) { if (a = 1) { break; } else { a := a + 1; } } "
      "try { throw 1; } catch (e) { x := e; } }");
  for (const char* l : {"m:", "m:0", "m:0.0", "m:0.0.0", "m:0.0.0.0", "m:0.0.0.0.0",
                        "m:0.0.0.1", "m:0.0.0.1.0", "m:1", "m:1.0", "m:1.0.0", "m:1.1", "m:1.1.0"}) {
    EXPECT_NE(p.Find(*Location::Parse(l)), nullptr) << l;
  }
}

TEST(StaticCheckTest, RunningExampleIsClean) {
  EXPECT_THAT(StaticCheck(Parse(kRunning)), IsEmpty());
}

TEST(StaticCheckTest, UndeclaredVariable) {
  const auto diags = StaticCheck(Parse("def t() { q := 1; }"));
  ASSERT_EQ(diags.size(), 1u);
  EXPECT_EQ(diags[0].isolation_unit, "t");
  EXPECT_EQ(diags[0].kind, DiagnosticKind::kUndeclaredVariable);
  EXPECT_EQ(diags[0].location, "t:0");
}

TEST(StaticCheckTest, ErrorsStayInTheirMethod) {
  const auto diags = StaticCheck(Parse(
      "var x := 0; def a() { x := y; nope(); x := b(1); break; } def b() { x := 1; }"));
  ASSERT_EQ(diags.size(), 4u);
  for (const Diagnostic& d : diags) EXPECT_EQ(d.isolation_unit, "a");
  EXPECT_EQ(diags[0].kind, DiagnosticKind::kUndeclaredVariable);
  EXPECT_EQ(diags[1].kind, DiagnosticKind::kUndefinedMethod);
  EXPECT_EQ(diags[2].kind, DiagnosticKind::kArityMismatch);
  EXPECT_EQ(diags[3].kind, DiagnosticKind::kBreakOutsideLoop);
}

TEST(StaticCheckTest, CatchVariableScopedToHandler) {
  EXPECT_THAT(StaticCheck(Parse("var x := 0; def t() { try { throw 1; } catch (e) { x := e; } }")),
              IsEmpty());
  const auto diags = StaticCheck(
      Parse("var x := 0; def t() { try { throw 1; } catch (e) { skip; } x := e; }"));
  ASSERT_EQ(diags.size(), 1u);
  EXPECT_EQ(diags[0].kind, DiagnosticKind::kUndeclaredVariable);
}

TEST(StaticCheckTest, ContinueOutsideLoopAndInsideLoop) {
  EXPECT_EQ(StaticCheck(Parse("def t() { continue; }"))[0].kind,
            DiagnosticKind::kContinueOutsideLoop);
  EXPECT_THAT(StaticCheck(Parse("def t() { while (true) { if (true) { continue; } break; } }")),
              IsEmpty());
}

TEST(PrintTest, RoundTripOnGeneratedPrograms) {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const testing::Instance inst =
        testing::GenerateInstance(seed, {.min_patches = 1, .max_patches = 2});
    const std::string once = Print(inst.program);
    const Program again = Parse(once);
    EXPECT_EQ(Print(again), once) << "seed " << seed;
    ASSERT_EQ(again.methods().size(), inst.program.methods().size());
    for (std::size_t i = 0; i < again.methods().size(); ++i) {
      EXPECT_TRUE(StmtEqual(*again.methods()[i].body, *inst.program.methods()[i].body))
          << "seed " << seed << " method " << again.methods()[i].name;
    }
  }
}

TEST(PrintTest, LocationsStableAcrossReparse) {
  const testing::Instance inst = testing::GenerateInstance(7);
  const Program again = Parse(inst.source);
  std::vector<Location> a;
  std::vector<Location> b;
  for (const auto& [loc, s] : inst.program.stmt_index()) a.push_back(loc);
  for (const auto& [loc, s] : again.stmt_index()) b.push_back(loc);
  EXPECT_EQ(a, b);
}

// Injecting an error into one method only adds diagnostics for that method.
TEST(StaticCheckTest, DiagnosticLocalityUnderInjection) {
  const std::vector<std::string> errors = {"zz := 1;", "g0 := nope(1);",
                                           "g0 := h(1, 2);", "continue;"};
  std::mt19937_64 rng(11);
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const testing::Instance inst = testing::GenerateInstance(seed, {.min_patches = 1, .max_patches = 1});
    ASSERT_THAT(StaticCheck(inst.program), IsEmpty());
    const Location& loc = inst.mutable_locations[rng() % inst.mutable_locations.size()];
    const std::string& text = errors[rng() % errors.size()];
    if (text == "continue;" && InLoop(inst.program, loc)) continue;
    const Program broken = ApplyPatch(inst.program, Patch{"x", {Edit{loc.ToString(), text}}});
    const auto diags = StaticCheck(broken);
    ASSERT_FALSE(diags.empty()) << text << " at " << loc.ToString();
    for (const Diagnostic& d : diags) EXPECT_EQ(d.isolation_unit, loc.method);
  }
}

}  // namespace
}  // namespace patchval
