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

#include <set>

#include "doctest.h"
#include "test_util.hpp"

namespace probrec {
namespace {

nat::EvalBudget Mu(uint64_t bound) {
  nat::EvalBudget b;
  b.muBound = bound;
  return b;
}

TEST_CASE("every fixture kind is present") {
  CHECK(fixtures::List("machine").size() >= 4);
  CHECK(fixtures::List("term").size() >= 7);
  CHECK(fixtures::List("tier").size() >= 20);
  CHECK(fixtures::List("program").size() >= 3);
  CHECK(fixtures::List("expected").size() >= 9);
  CHECK_THROWS_AS(fixtures::Find("no-such-fixture"), UnknownName);
  std::set<std::string> names;
  for (const auto& f : fixtures::List()) {
    CAPTURE(f.path);
    CHECK(names.insert(f.name).second);
  }
}

TEST_CASE("expected distributions match the evaluators") {
  CHECK(nat::EvalNat(testing::NatFixture("example-h").term, {Nat(0)}, Mu(10)) ==
        testing::Expected("example-h-mu10"));
  for (unsigned x : {0u, 1u, 2u, 5u}) {
    CAPTURE(x);
    CHECK(nat::EvalNat(testing::NatFixture("example-f").term, {Nat(x)}, Mu(10)) ==
          testing::Expected("example-f-x" + std::to_string(x) + "-mu10"));
  }
  CHECK(ptm::EvalPTM(testing::Machine("tree-machine"), "0", 2) ==
        testing::Expected("tree-machine-x0-d2"));
  CHECK(ptm::EvalPTM(testing::Machine("coin-writer"), "", 2) == testing::Expected("coin-writer-d2"));
  auto walk = testing::WordFixture("rand-walk");
  CHECK(word::EvalWord(walk.term, {"aaa"}, walk.alphabet) == testing::Expected("rand-walk-aaa"));
  auto flips = testing::WordFixture("coin-flips");
  CHECK(word::EvalWord(flips.term, {"00"}, flips.alphabet) == testing::Expected("coin-flips-00"));
}

TEST_CASE("every machine validates and every expected file is a distribution") {
  for (const auto& f : fixtures::List("machine")) {
    CAPTURE(f.name);
    CHECK_NOTHROW(testing::Machine(f.name).Validate());
  }
  for (const auto& f : fixtures::List("expected")) {
    CAPTURE(f.name);
    auto d = testing::Expected(f.name);
    CHECK(d.mass() <= Prob::One());
  }
}

}  // namespace
}  // namespace probrec
