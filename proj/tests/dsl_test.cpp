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

#include "doctest.h"
#include "probrec/dsl.hpp"
#include "test_util.hpp"

namespace probrec {
namespace {

TEST_CASE("a nat term parses to its tree") {
  auto p = dsl::ParseNat("mu (comp coin (proj 2 1))");
  REQUIRE(p.term->kind() == nat::Kind::kMu);
  auto comp = p.term->children()[0];
  REQUIRE(comp->kind() == nat::Kind::kComp);
  CHECK(comp->children()[0]->kind() == nat::Kind::kCoin);
  CHECK(comp->children()[1]->kind() == nat::Kind::kProj);
  CHECK(comp->children()[1]->proj_n() == 2);
  CHECK(comp->children()[1]->proj_m() == 1);
  CHECK(nat::StructurallyEqual(p.term, nat::Mu(nat::Comp(nat::Coin(), {nat::Proj(2, 1)}))));
  CHECK(nat::Arity(p.term) == 1);
}

TEST_CASE("parse errors carry a position") {
  try {
    dsl::ParseNat("\n  proj 0 1");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() >= 3);
  }
  CHECK_THROWS_AS(dsl::ParseNat("comp coin ("), ParseError);
  CHECK_THROWS_AS(dsl::ParseNat("mu"), ParseError);
  CHECK_THROWS_AS(dsl::ParseNat("frobnicate"), Error);
  CHECK_THROWS_AS(dsl::ParseWord("alphabet \"ab\"\ncons 'ab'"), ParseError);
  CHECK_THROWS_AS(dsl::ParseWord("alphabet \"ab\"\nrec (eps 0) ('a' -> eps 2)"), Error);
}

TEST_CASE("lets and the standard library") {
  auto p = dsl::ParseNat("let k = comp rand (proj 2 1)\ncomp add (mu k, id)");
  CHECK(p.lets.count("k") == 1);
  CHECK(nat::Arity(p.term) == 1);
  CHECK(nat::EvalNat(p.term, {Nat(0)}, {}).At(NatKey(0)) == testing::Q(1, 2));
}

TEST_CASE("nat pretty printing round trips") {
  testing::NatTermGen gen(5);
  for (int i = 0; i < 50; ++i) {
    auto t = gen.Gen(1 + i % 3, 3);
    std::string text = dsl::PrettyNat(t);
    CAPTURE(text);
    CHECK(nat::StructurallyEqual(dsl::ParseNat(text).term, t));
  }
}

TEST_CASE("word pretty printing round trips") {
  testing::WordTermGen gen(9, true);
  for (int i = 0; i < 50; ++i) {
    auto t = gen.Gen(1 + i % 2, 3);
    std::string text = "alphabet \"ab\"\n" + dsl::PrettyWord(t);
    CAPTURE(text);
    CHECK(word::StructurallyEqual(dsl::ParseWord(text).term, t));
  }
  for (const auto& c : testing::TierCorpus()) {
    CAPTURE(c.name);
    auto back = dsl::ParseWord(dsl::PrettyWordProgram(c.program));
    CHECK(word::StructurallyEqual(back.term, c.program.term));
    CHECK(back.alphabet == c.program.alphabet);
  }
}

TEST_CASE("n-ary epsilon") {
  auto p = dsl::ParseWord("alphabet \"ab\"\neps 3");
  CHECK(word::Arity(p.term) == 3);
  CHECK(dsl::PrettyWord(p.term) == "eps 3");
  CHECK(dsl::PrettyWord(word::Eps()) == "eps");
  CHECK(word::Arity(dsl::ParseWord("alphabet \"ab\"\neps").term) == 1);
}

TEST_CASE("program kind detection") {
  CHECK(std::holds_alternative<dsl::WordProgram>(dsl::ParseProgram("alphabet \"ab\"\ncons 'a'")));
  CHECK(std::holds_alternative<dsl::NatProgram>(dsl::ParseProgram("s")));
  for (const auto& f : fixtures::List("term")) {
    CAPTURE(f.name);
    CHECK_NOTHROW(dsl::ParseTermFile(f.path));
  }
}

}  // namespace
}  // namespace probrec
