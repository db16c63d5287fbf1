/* Copyright 2026 The probrec Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <cmath>

#include "doctest.h"
#include "probrec/oracle.hpp"
#include "probrec/prm.hpp"
#include "probrec/tiering.hpp"
#include "test_util.hpp"

namespace probrec {
namespace {

using namespace prm;
using testing::Q;

PRMSpec Program(const std::string& name) {
  return ParseProgram(dsl::ReadFile(fixtures::Find(name).path));
}

dsl::WordProgram TierProgram(const std::string& name) {
  for (auto& c : testing::TierCorpus()) {
    if (c.name == name) return c.program;
  }
  throw UnknownName(name);
}

PRMSpec Tiny(std::vector<Instruction> program, unsigned registers = 2) {
  PRMSpec s;
  s.alphabet = "ab";
  s.registers = registers;
  s.program = std::move(program);
  s.Validate();
  return s;
}

TEST_CASE("single instructions") {
  auto cons = Tiny({ConsA('a', 0, 1)});
  auto next = StepPRM(cons, Initial(cons, {"b"}));
  REQUIRE(next.size() == 1);
  CHECK(next[0].config.regs == std::vector<Word>{"b", "ab"});
  CHECK(next[0].config.pc == 2);
  CHECK(IsFinal(cons, next[0].config));
  CHECK_THROWS_AS(StepPRM(cons, next[0].config), FinalConfiguration);

  auto pred = Tiny({PredA('a', 0, 1)});
  CHECK(StepPRM(pred, Initial(pred, {"ab"}))[0].config.regs[1] == "b");
  CHECK(StepPRM(pred, Initial(pred, {"ba"}))[0].config.regs[1] == "ba");

  auto eps = Tiny({EpsMove(0, 1)});
  CHECK(StepPRM(eps, Initial(eps, {"ab"}))[0].config.regs[1] == "ab");

  std::vector<Instruction> filler(6, EpsMove(0, 0));
  filler.insert(filler.begin() + 2, JumpRand(7));
  auto jr = Tiny(filler);
  PRMConfiguration at3 = Initial(jr, {""});
  at3.pc = 3;
  auto branches = StepPRM(jr, at3);
  REQUIRE(branches.size() == 2);
  CHECK(branches[0].config.pc == 7);
  CHECK(branches[1].config.pc == 4);
  CHECK(branches[0].p == Q(1, 2));
  CHECK(StepWithCoin(jr, at3, 0).pc == 7);
  CHECK(StepWithCoin(jr, at3, 1).pc == 4);

  auto jump = Tiny({Jump(0, {3, 4}), EpsMove(0, 0), EpsMove(0, 0)});
  CHECK(StepPRM(jump, Initial(jump, {""}))[0].config.pc == 2);
  auto on_b = StepPRM(jump, Initial(jump, {"ba"}))[0].config;
  CHECK(on_b.pc == 4);
  CHECK(on_b.regs[0] == "a");
}

TEST_CASE("program text round trip and validation") {
  for (const auto& f : fixtures::List("program")) {
    CAPTURE(f.name);
    auto p = Program(f.name);
    auto back = ParseProgram(FormatProgram(p));
    CHECK(back.program == p.program);
    CHECK(back.alphabet == p.alphabet);
    CHECK(back.registers == p.registers);
  }
  CHECK(ParseProgram("cons 0 r0 r4").registers == 5);
  CHECK(ParseProgram("alphabet \"a#\"\ncons '#' r0 r0 # trailing\n").program[0].symbol == '#');
  CHECK_THROWS_AS(ParseProgram("frob r0"), ParseError);
  CHECK_THROWS_AS(ParseProgram("alphabet \"ab\"\njump r0 -> 1"), InvalidMachine);
  CHECK_THROWS_AS(ParseProgram("alphabet \"ab\"\njrand 9"), InvalidMachine);
  CHECK_THROWS_AS(ParseProgram("alphabet \"ab\"\ncons c r0 r0"), InvalidMachine);
}

TEST_CASE("fixture programs") {
  CHECK(EvalPRM(Program("cons-a"), {"b"}, 5, 0) == Point(WordKey("ab")));
  CHECK(MaxSteps(Program("cons-a"), {"b"}, 5).steps == 1u);
  auto coin = EvalPRM(Program("coin-choice"), {"b"}, 10, 0);
  CHECK(coin.At(WordKey("ab")) == Q(1, 2));
  CHECK(coin.At(WordKey("bb")) == Q(1, 2));
  CHECK(MaxSteps(Program("coin-choice"), {"b"}, 10).steps == 4u);
  auto rev = Program("reverse-loop");
  for (const auto& w : testing::WordsUpTo("ab", 5)) {
    Word r(w.rbegin(), w.rend());
    CHECK(EvalPRM(rev, {w}, 200, 1) == Point(WordKey(r)));
  }
  CHECK(MaxSteps(rev, {"abb"}, 200).steps == 15u);
  auto cut = MaxSteps(rev, {"abb"}, 5);
  CHECK_FALSE(cut.bounded());
  CHECK(cut.str() == "Unbounded(5)");
}

TEST_CASE("exact evaluation matches coin-stream enumeration") {
  auto read0 = [](const PRMConfiguration& c) { return c.regs[0]; };
  for (const auto& f : fixtures::List("program")) {
    auto p = Program(f.name);
    for (const auto& w : testing::WordsUpTo("ab", 3)) {
      for (unsigned d : {0u, 2u, 6u, 12u}) {
        CAPTURE(f.name);
        CHECK(EvalPRM(p, {w}, d, read0) == oracle::EnumeratePRM(p, {w}, d, read0));
      }
    }
  }
}

TEST_CASE("the machine reduction preserves output distributions") {
  for (const char* name : {"tree-machine", "coin-writer", "copy-machine", "diverging"}) {
    auto m = testing::Machine(name);
    auto r = PtmToPrm(m);
    for (const auto& x : testing::WordsUpTo(m.InputAlphabet(), 3)) {
      for (unsigned d : {1u, 2u, 4u, 8u}) {
        CAPTURE(name);
        CAPTURE(x);
        CAPTURE(d);
        // Exact when every path halts within d; otherwise the reduced run
        // may finish paths the machine needs more than d steps for.
        Distribution reduced = EvalReduced(r, x, 8 * d + 8);
        if (ptm::MaxSteps(m, x, d)) {
          CHECK(reduced == ptm::EvalPTM(m, x, d));
        } else {
          CHECK(PointwiseLeq(ptm::EvalPTM(m, x, d), reduced));
          CHECK(PointwiseLeq(reduced, ptm::EvalPTM(m, x, 8 * d + 8)));
        }
      }
    }
  }
}

TEST_CASE("reduced step counts stay linear in machine steps") {
  auto m = testing::Machine("copy-machine");
  auto r = PtmToPrm(m);
  for (const auto& x : testing::WordsUpTo("01", 4)) {
    auto steps = ptm::MaxSteps(m, x, 40);
    REQUIRE(steps.has_value());
    auto reduced = MaxStepsReduced(r, x, 400);
    REQUIRE(reduced.bounded());
    CHECK(*reduced.steps <= 8 * *steps + 8);
  }
}

TEST_CASE("compiled tiered terms agree with the term semantics") {
  for (const auto& c : testing::TierCorpus()) {
    if (c.expect == "reject") continue;
    CAPTURE(c.name);
    auto compiled = CompileWordTerm(c.program.term, c.program.alphabet);
    for (const auto& ins : compiled.prm.program) CHECK(ins.op != Op::kPred);
    unsigned arity = compiled.arity;
    for (const auto& w : testing::WordsUpTo(c.program.alphabet.symbols(), arity > 1 ? 2 : 3)) {
      std::vector<Word> args(arity, w);
      if (arity > 1) args[1] = Word(w.rbegin(), w.rend());
      CAPTURE(w);
      CHECK(EvalCompiled(compiled, args, 4000) == word::EvalWord(c.program.term, args, c.program.alphabet));
    }
  }
}

TEST_CASE("compiled random tiered terms") {
  testing::WordTermGen gen(7, true);
  word::Alphabet ab("ab");
  int compiled_count = 0;
  for (int i = 0; i < 200 && compiled_count < 40; ++i) {
    auto t = gen.Gen(1, 3);
    if (!tier::InferTiers(t).typable) continue;
    ++compiled_count;
    auto c = CompileWordTerm(t, ab);
    for (const auto& w : testing::WordsUpTo("ab", 2)) {
      CHECK(EvalCompiled(c, {w}, 4000) == word::EvalWord(t, {w}, ab));
    }
  }
  CHECK(compiled_count >= 20);
}

TEST_CASE("compilation refuses untiered terms") {
  for (const auto& c : testing::TierCorpus()) {
    if (c.expect != "reject") continue;
    CAPTURE(c.name);
    CHECK_THROWS_AS(CompileWordTerm(c.program.term, c.program.alphabet), NotTiered);
  }
  auto alien = word::Det(std::make_shared<const word::DetWordFnDef>(
      word::DetWordFnDef{"alien", 1, [](const std::vector<Word>& a) { return std::optional<Word>(a[0]); }, {{0}, 0}}));
  CHECK_THROWS_AS(CompileWordTerm(alien, word::Alphabet("ab")), NotCompilable);
}

TEST_CASE("power-law fit") {
  std::vector<std::pair<unsigned, uint64_t>> cubic;
  for (unsigned n = 1; n <= 8; ++n) cubic.push_back({n, 5ull * n * n * n});
  auto fit = FitPowerLaw(cubic);
  CHECK(fit.k == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(fit.c == doctest::Approx(5.0).epsilon(1e-9));
  CHECK(fit.r2 == doctest::Approx(1.0));
  CHECK_THROWS(FitPowerLaw({{2, 4}}));
}

TEST_CASE("growth of compiled programs") {
  word::Alphabet ab("ab");
  std::vector<unsigned> sizes{1, 2, 3, 4, 5, 6, 7, 8};
  auto linear = MeasureGrowth(CompileWordTerm(TierProgram("copy").term, ab), ab, sizes, 100000);
  CHECK(linear.bounded);
  CHECK(linear.monotone);
  CHECK(linear.stable);
  CHECK(linear.fit.k == doctest::Approx(1.0).epsilon(0.25));
  auto quad = MeasureGrowth(CompileWordTerm(TierProgram("quadratic").term, ab), ab, sizes, 100000);
  CHECK(quad.bounded);
  CHECK(quad.monotone);
  CHECK(quad.fit.k >= 1.2);
  CHECK(quad.fit.k <= 2.5);
}

}  // namespace
}  // namespace probrec
