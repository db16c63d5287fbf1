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
#include "probrec/tiering.hpp"
#include "test_util.hpp"

namespace probrec {
namespace {

using namespace word;
using tier::TierJudgment;

word::TermPtr Judged(const testing::TierCase& c) {
  return c.expand ? TupledExpand(c.program.term, c.program.alphabet) : c.program.term;
}

TEST_CASE("constraints of the base functions") {
  auto c = tier::CollectConstraints(Cons('a'));
  CHECK(c.stricts.empty());
  CHECK(c.equalities.size() == 1);
  CHECK(tier::InferTiers(Cons('a')).judgment == TierJudgment{{0}, 0});
  auto p = tier::CollectConstraints(Proj(2, 1));
  REQUIRE(p.equalities.size() == 1);
  CHECK(p.equalities[0].lhs == p.result_var);
  CHECK(p.equalities[0].rhs == p.arg_vars[0]);
  // ε lives at every tier and ignores its arguments.
  CHECK(tier::CollectConstraints(Eps(2)).equalities.empty());
}

TEST_CASE("recursion demands a strictly higher recurrence argument") {
  TermPtr copy = Rec(Eps(0), {{'a', Comp(Cons('a'), {Proj(2, 1)})}, {'b', Comp(Cons('b'), {Proj(2, 1)})}});
  auto c = tier::CollectConstraints(copy);
  CHECK(c.stricts.size() == 1);
  CHECK(tier::InferTiers(copy).judgment.str() == "1->0");
}

TEST_CASE("corpus: minimal judgments and rejections") {
  auto corpus = testing::TierCorpus();
  int accepted = 0, rejected = 0;
  for (const auto& c : corpus) {
    CAPTURE(c.name);
    REQUIRE_FALSE(c.expect.empty());
    auto r = tier::InferTiers(Judged(c));
    if (c.expect == "reject") {
      ++rejected;
      CHECK_FALSE(r.typable);
      CHECK_FALSE(r.cycle.empty());
      bool strict = false;
      for (const auto& step : r.cycle) strict = strict || step.find("m > ") != std::string::npos;
      CHECK(strict);
    } else {
      ++accepted;
      REQUIRE(r.typable);
      CHECK(r.judgment.str() == c.expect);
    }
  }
  CHECK(accepted >= 10);
  CHECK(rejected >= 5);
  CHECK(corpus.size() >= 20);
}

TEST_CASE("exponential doubling is rejected through the recurrence edge") {
  auto prog = testing::WordFixture("exp-rejected");
  auto r = tier::InferTiers(prog.term);
  CHECK_FALSE(r.typable);
  CHECK(r.Explain().find("untypable") != std::string::npos);
}

TEST_CASE("solver soundness: inferred judgments check") {
  for (const auto& c : testing::TierCorpus()) {
    auto r = tier::InferTiers(Judged(c));
    if (!r.typable) continue;
    CAPTURE(c.name);
    CHECK(tier::CheckJudgment(Judged(c), r.judgment).valid);
  }
  testing::WordTermGen gen(61);
  int typable = 0;
  for (int i = 0; i < 300; ++i) {
    TermPtr t = gen.Gen(2, 3);
    auto r = tier::InferTiers(t);
    if (!r.typable) continue;
    ++typable;
    CHECK(tier::CheckJudgment(t, r.judgment).valid);
  }
  CHECK(typable > 50);
}

TEST_CASE("tier shift invariance") {
  for (const auto& c : testing::TierCorpus()) {
    auto r = tier::InferTiers(Judged(c));
    if (!r.typable) continue;
    CAPTURE(c.name);
    for (unsigned by : {1u, 3u}) CHECK(tier::CheckJudgment(Judged(c), r.judgment.Shifted(by)).valid);
  }
}

TEST_CASE("minimality: lowering any tier of the least judgment breaks it") {
  for (const auto& c : testing::TierCorpus()) {
    auto r = tier::InferTiers(Judged(c));
    if (!r.typable) continue;
    CAPTURE(c.name);
    TierJudgment j = r.judgment;
    if (j.result > 0) {
      TierJudgment lower = j;
      --lower.result;
      CHECK_FALSE(tier::CheckJudgment(Judged(c), lower).valid);
    }
    for (size_t i = 0; i < j.args.size(); ++i) {
      if (j.args[i] == 0) continue;
      TierJudgment lower = j;
      --lower.args[i];
      CHECK_FALSE(tier::CheckJudgment(Judged(c), lower).valid);
    }
  }
}

TEST_CASE("checking reports the violated premise") {
  auto prog = testing::WordFixture("concat");
  auto bad = tier::CheckJudgment(prog.term, TierJudgment::Parse("0,0->0"));
  CHECK_FALSE(bad.valid);
  CHECK_FALSE(bad.diagnostics.empty());
  CHECK(tier::CheckJudgment(prog.term, TierJudgment::Parse("3,1->1")).valid);
  CHECK_THROWS_AS(tier::CheckJudgment(prog.term, TierJudgment::Parse("1->0")), ArityMismatch);
}

TEST_CASE("strict case reading") {
  // concat(select(x, y), x): the case returns y at a tier above x.
  TermPtr concat = Rec(Proj(1, 1), {{'a', Comp(Cons('a'), {Proj(3, 1)})}, {'b', Comp(Cons('b'), {Proj(3, 1)})}});
  TermPtr select = Case(Proj(1, 1), {{'a', Proj(2, 2)}, {'b', Proj(2, 2)}});
  TermPtr t = Comp(concat, {select, Proj(2, 1)});
  auto loose = tier::InferTiers(t);
  REQUIRE(loose.typable);
  CHECK(loose.judgment.str() == "0,1->0");
  tier::Options strict;
  strict.strict_case = true;
  CHECK_FALSE(tier::InferTiers(t, strict).typable);
}

TEST_CASE("judgment text") {
  CHECK(TierJudgment::Parse("1,0->0") == TierJudgment{{1, 0}, 0});
  CHECK(TierJudgment::Parse("->2").str() == "->2");
  CHECK(TierJudgment::Parse(" 2 , 1 -> 0 ").str() == "2,1->0");
  CHECK_THROWS(TierJudgment::Parse("1,0"));
}

TEST_CASE("classical functions use their declared signature") {
  TermPtr t = Comp(Det(WordDet("couple")), {Proj(2, 1), Proj(2, 2)});
  CHECK(tier::InferTiers(t).judgment.str() == "0,0->0");
}

}  // namespace
}  // namespace probrec
