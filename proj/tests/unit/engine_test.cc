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

#include <set>

#include <gtest/gtest.h>

#include "fixtures.h"
#include "patchval/engine.h"

namespace patchval {
namespace {

ExprPtr ParseExpr(const std::string& text) {
  ParseOptions reserved;
  reserved.allow_reserved = true;
  const StmtPtr s = ParseStatements("$e := " + text + ";", Location{"x", {}}, reserved);
  return std::get<AssignStmt>(s->node).value;
}

ControlState Eval(const Program& p, const std::string& text, Value* out,
                  const DataState& data = {}) {
  Engine e(p);
  for (const auto& [k, v] : data) e.mutable_globals()[k] = v;
  return e.EvalControl(*ParseExpr(text), out);
}

TEST(EvalTest, Arithmetic) {
  const Program p;
  Value v;
  ASSERT_TRUE(Eval(p, "j + 3", &v, {{"i", Value::Int(2)}, {"j", Value::Int(1)}}).is_normal());
  EXPECT_EQ(v, Value::Int(4));
  ASSERT_TRUE(Eval(p, "1 = 1 and not (2 < 1)", &v).is_normal());
  EXPECT_EQ(v, Value::Bool(true));
  ASSERT_TRUE(Eval(p, "-7 / 2", &v).is_normal());
  EXPECT_EQ(v, Value::Int(-3));
}

TEST(EvalTest, DivisionByZeroRaises) {
  Value v;
  const ControlState c = Eval(Program(), "x / 0", &v, {{"x", Value::Int(5)}});
  EXPECT_EQ(c.kind, ControlKind::kException);
  EXPECT_EQ(c.value, Value::Str("div-by-zero"));
}

TEST(EvalTest, WrappingAndTypeErrors) {
  Value v;
  ASSERT_TRUE(Eval(Program(), "9223372036854775807 + 1", &v).is_normal());
  EXPECT_EQ(v, Value::Int(INT64_MIN));
  ASSERT_TRUE(Eval(Program(), "-9223372036854775808 / -1", &v).is_normal());
  EXPECT_EQ(v, Value::Int(INT64_MIN));
  EXPECT_EQ(Eval(Program(), "1 + true", &v).value, Value::Str("type-error"));
  EXPECT_EQ(Eval(Program(), "not 3", &v).value, Value::Str("type-error"));
  EXPECT_EQ(Eval(Program(), "y", &v).value, Value::Str("unbound-variable"));
  ASSERT_TRUE(Eval(Program(), "\"a\" = \"a\" and 1 != true", &v).is_normal());
  EXPECT_EQ(v, Value::Bool(true));
}

TEST(EvalTest, ShortCircuitSkipsRightOperand) {
  Value v;
  ASSERT_TRUE(Eval(Program(), "false and (1 / 0 = 1)", &v).is_normal());
  EXPECT_EQ(v, Value::Bool(false));
  ASSERT_TRUE(Eval(Program(), "true or (1 / 0 = 1)", &v).is_normal());
  EXPECT_EQ(v, Value::Bool(true));
}

TEST(EvalTest, EachNodeCostsOneStep) {
  static const Program kEmpty;
  Engine e(kEmpty);
  Value v;
  e.EvalControl(*ParseExpr("(1 + 2) * 3"), &v);
  EXPECT_EQ(e.semantic_steps(), 5);
}

TEST(ExecuteTest, RunningExampleMethodBody) {
  const testing::RunningExample ex = testing::LoadRunningExample();
  Engine e(ex.program);
  const ControlState c = e.Execute(*ex.program.FindMethod("f")->body);
  EXPECT_TRUE(c.is_normal());
  EXPECT_EQ(e.globals().at("i"), Value::Int(4));
  EXPECT_EQ(e.globals().at("j"), Value::Int(3));
}

TEST(ExecuteTest, WhileBreakIsNormal) {
  const Program p = Parse("def m() { while (true) { break; } }");
  Engine e(p);
  EXPECT_TRUE(e.Execute(*p.FindMethod("m")->body).is_normal());
  EXPECT_TRUE(e.globals().empty());
}

TEST(ExecuteTest, CatchBindsValue) {
  const Program p = Parse("var x := 0; def m() { try { throw 7; } catch (e) { x := e; } }");
  Engine e(p);
  EXPECT_TRUE(e.Execute(*p.FindMethod("m")->body).is_normal());
  EXPECT_EQ(e.globals().at("x"), Value::Int(7));
  EXPECT_TRUE(e.frame().empty());
}

TEST(ExecuteTest, CatchRestoresShadowedParameter) {
  const Program p = Parse(
      "var x := 0; var y := 0; def m(e) { try { throw 7; } catch (e) { x := e; } y := e; return e; }"
      " def t() { r := m(3); }  var r := 0;");
  Engine e(p);
  EXPECT_TRUE(e.RunTest("t", 1000).passed());
  e.ResetData();
  e.PushFrame({});
  e.Execute(*ParseStatements("r := m(3);", Location{"t", {0}}));
  EXPECT_EQ(e.globals().at("x"), Value::Int(7));
  EXPECT_EQ(e.globals().at("y"), Value::Int(3));
  EXPECT_EQ(e.globals().at("r"), Value::Int(3));
}

TEST(ExecuteTest, ContinueAndReturnInLoops) {
  const Program p = Parse(
      "var s := 0; def m(n) { while (n < 10) { n := n + 1; if (n = 3) { continue; } "
      "if (n = 6) { return s; } s := s + n; } return 0 - 1; } def t() { s := m(0); }");
  Engine e(p);
  EXPECT_TRUE(e.RunTest("t", 10000).passed());
  e.ResetData();
  e.Execute(*ParseStatements("s := m(0);", Location{"t", {0}}));
  EXPECT_EQ(e.globals().at("s"), Value::Int(1 + 2 + 4 + 5));
}

TEST(ExecuteTest, ExceptionPropagatesThroughCalls) {
  const Program p = Parse(
      "var x := 0; def a() { throw \"bad\"; } def b() { a(); x := 1; } "
      "def t() { try { b(); } catch (e) { x := e; } }");
  Engine e(p);
  e.PushFrame({});
  EXPECT_TRUE(e.Execute(*p.FindMethod("t")->body).is_normal());
  EXPECT_EQ(e.globals().at("x"), Value::Str("bad"));
}

TEST(ExecuteTest, StackOverflowIsCatchable) {
  const Program p = Parse(
      "var r := 0; def rec(n) { rec(n + 1); } def t() { try { rec(0); } catch (e) { r := e; } }");
  Engine e(p, EngineOptions{.max_depth = 50});
  const TestOutcome o = e.RunTest("t", 100000);
  EXPECT_TRUE(o.passed());
  Engine f(p, EngineOptions{.max_depth = 50});
  f.PushFrame({});
  f.Execute(*p.FindMethod("t")->body);
  EXPECT_EQ(f.globals().at("r"), Value::Str("stack-overflow"));
}

TEST(RunTestTest, RunningExample) {
  const testing::RunningExample ex = testing::LoadRunningExample();
  Engine e(ex.program);
  const TestOutcome o = e.RunTest("test", 100000);
  EXPECT_FALSE(o.passed());
  EXPECT_EQ(o.exception, Value::Str("assertion failed"));
  const Program p3 = ApplyPatch(ex.program, ex.patches[2]);
  Engine e3(p3);
  EXPECT_TRUE(e3.RunTest("test", 100000).passed());
}

TEST(RunTestTest, SkipPassesWithBudgetOne) {
  const Program p = Parse("def t() { skip; }");
  Engine e(p);
  EXPECT_EQ(e.RunTest("t", 1), TestOutcome::Passed(1));
  EXPECT_EQ(e.RunTest("t", 0), TestOutcome::Timeout(0));
}

TEST(RunTestTest, TimeoutExactlyAtLimit) {
  const Program p = Parse("var x := 0; def t() { while (true) { x := x + 1; } }");
  Engine e(p);
  const TestOutcome o = e.RunTest("t", 777);
  EXPECT_EQ(o.reason, TestOutcome::Reason::kTimeout);
  EXPECT_EQ(o.steps, 777);
  EXPECT_LE(e.semantic_steps(), 777);
}

TEST(RunTestTest, ResetsDataBetweenRuns) {
  const Program p = Parse("var x := 0; def t() { x := x + 1; assert(x = 1); }");
  Engine e(p);
  EXPECT_TRUE(e.RunTest("t", 100).passed());
  EXPECT_TRUE(e.RunTest("t", 100).passed());
}

TEST(RunTestTest, DeterministicWithoutNondet) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const testing::Instance inst = testing::GenerateInstance(seed, {.min_patches = 1, .max_patches = 1});
    Engine a(inst.program);
    Engine b(inst.program);
    for (const TestCase& t : inst.tests) {
      EXPECT_EQ(a.RunTest(t.entry, 100000), b.RunTest(t.entry, 100000));
      EXPECT_EQ(a.RunTest(t.entry, 100000), b.RunTest(t.entry, 100000));
    }
  }
}

TEST(NondetTest, BoundOneAlwaysZero) {
  const Program p = Parse("var x := 5; def t() { x := nondet(1); assert(x = 0); }");
  Engine e(p, EngineOptions{.seed = 99});
  for (int i = 0; i < 20; ++i) EXPECT_TRUE(e.RunTest("t", 100).passed());
}

TEST(NondetTest, NonPositiveBoundRaises) {
  Value v;
  EXPECT_EQ(Eval(Program(), "nondet(0)", &v).value, Value::Str("nondet-bound"));
}

std::vector<std::int64_t> Draws(std::uint64_t seed, int n) {
  static const Program kEmpty;
  Engine e(kEmpty);
  e.Reseed(seed);
  std::vector<std::int64_t> out;
  Value v;
  const ExprPtr x = ParseExpr("nondet(1000)");
  for (int i = 0; i < n; ++i) {
    e.EvalControl(*x, &v);
    out.push_back(v.as_int());
  }
  return out;
}

TEST(NondetTest, SameSeedSameSequence) { EXPECT_EQ(Draws(3, 100), Draws(3, 100)); }

TEST(NondetTest, DifferentSeedsDiffer) {
  const auto a = Draws(3, 100);
  const auto b = Draws(4, 100);
  EXPECT_NE(a, b);
  for (std::int64_t v : a) {
    EXPECT_GE(v, 0);
    EXPECT_LT(v, 1000);
  }
}

// The engine agrees with the independent reference interpreter on outcomes
// and step counts.
TEST(EngineVsReferenceTest, GeneratedPrograms) {
  for (std::uint64_t seed = 100; seed < 200; ++seed) {
    const testing::Instance inst = testing::GenerateInstance(seed);
    for (const Patch& p : inst.patches) {
      const Program patched = ApplyPatch(inst.program, p);
      Engine e(patched);
      testing::RefInterpreter ref(patched, 10000, 0);
      for (const TestCase& t : inst.tests) {
        for (std::int64_t limit : {40, 100000}) {
          const TestOutcome o = e.RunTest(t.entry, limit);
          const testing::RefRun r = ref.Run(t.entry, limit);
          ASSERT_EQ(o.ToString(), r.outcome) << "seed " << seed << " " << p.id;
          ASSERT_EQ(o.steps, r.steps) << "seed " << seed << " " << p.id;
        }
      }
    }
  }
}

}  // namespace
}  // namespace patchval
