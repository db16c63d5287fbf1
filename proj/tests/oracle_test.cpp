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
#include "probrec/oracle.hpp"
#include "test_util.hpp"

namespace probrec {
namespace {

using testing::Q;

TEST_CASE("fixed bit streams") {
  oracle::FixedBits bits(0b101, 3);
  CHECK(bits.Next() == 1);
  CHECK(bits.Next() == 0);
  CHECK(bits.Next() == 1);
  CHECK(bits.used() == 3);
  CHECK_THROWS_AS(bits.Next(), OracleExhausted);
}

TEST_CASE("single runs follow the coins") {
  auto h = testing::NatFixture("example-h").term;
  nat::EvalBudget budget;
  budget.muBound = 10;
  // h returns the first search index whose coin is 0.
  oracle::FixedBits bits(0b0111, 4);
  auto r = oracle::RunNat(h, {Nat(0)}, budget, bits);
  REQUIRE(r.has_value());
  CHECK(*r == 3);
  auto m = testing::Machine("coin-writer");
  oracle::FixedBits one(1, 1);
  CHECK(oracle::RunPTM(m, "", 1, one) == Word("1"));
  oracle::FixedBits none(0, 0);
  CHECK_FALSE(oracle::RunPTM(m, "", 0, none).has_value());
}

TEST_CASE("enumeration needs enough bits") {
  auto flips = testing::WordFixture("coin-flips");
  auto run = [&](oracle::BitSource& b) -> std::optional<Key> {
    auto w = oracle::RunWord(flips.term, {"000"}, b);
    if (!w) return std::nullopt;
    return WordKey(*w);
  };
  CHECK_THROWS_AS(oracle::Enumerate(KeySpace::kWord, run, 2), OracleExhausted);
  auto d = oracle::EnumerateAuto(KeySpace::kWord, run);
  CHECK(d.size() == 8);
  CHECK(d == word::EvalWord(flips.term, {"000"}, flips.alphabet));
}

TEST_CASE("Monte Carlo accepts the exact law and rejects a wrong one") {
  auto m = testing::Machine("tree-machine");
  auto run = [&](oracle::BitSource& b) -> std::optional<Key> {
    auto w = oracle::RunPTM(m, "0", 2, b);
    if (!w) return std::nullopt;
    return WordKey(*w);
  };
  auto good = oracle::MonteCarlo(ptm::EvalPTM(m, "0", 2), run, 20000, 11);
  CHECK(good.ok);
  CHECK(good.draws == 20000);
  for (const auto& row : good.rows) CHECK(row.within);

  DistributionBuilder b(KeySpace::kWord);
  b.Add(WordKey("0"), mpq_class(1, 2));
  b.Add(WordKey("1"), mpq_class(1, 2));
  auto bad = oracle::MonteCarlo(b.Build(), run, 20000, 11);
  CHECK_FALSE(bad.ok);
  CHECK_FALSE(bad.str().empty());
}

TEST_CASE("Monte Carlo tracks the undefined outcome") {
  auto h = testing::NatFixture("example-h").term;
  nat::EvalBudget budget;
  budget.muBound = 3;
  auto exact = nat::EvalNat(h, {Nat(0)}, budget);
  CHECK(exact.deficit() == Q(1, 8));
  auto run = [&](oracle::BitSource& b) -> std::optional<Key> {
    auto r = oracle::RunNat(h, {Nat(0)}, budget, b);
    if (!r) return std::nullopt;
    return Key(*r);
  };
  auto mc = oracle::MonteCarlo(exact, run, 20000, 3);
  CHECK(mc.ok);
  bool saw_undefined = false;
  for (const auto& row : mc.rows) saw_undefined = saw_undefined || !row.key.has_value();
  CHECK(saw_undefined);
}

}  // namespace
}  // namespace probrec
