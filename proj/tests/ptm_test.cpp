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

#include <random>

#include "doctest.h"
#include "probrec/oracle.hpp"
#include "probrec/ptm.hpp"
#include "test_util.hpp"

namespace probrec {
namespace {

using namespace ptm;
using testing::Q;

// Random total machine over "01_" with k working states and one final state.
PTMSpec RandomMachine(uint64_t seed, unsigned k) {
  std::mt19937_64 rng(seed);
  auto pick = [&](unsigned n) { return static_cast<unsigned>(rng() % n); };
  PTMSpec s;
  s.name = "random-" + std::to_string(seed);
  s.alphabet = "01_";
  s.blank = '_';
  for (unsigned i = 0; i < k; ++i) s.states.push_back("q" + std::to_string(i));
  s.states.push_back("qf");
  s.initial = "q0";
  s.finals = {"qf"};
  const Move moves[] = {Move::kLeft, Move::kRight, Move::kStay};
  for (unsigned i = 0; i < k; ++i) {
    for (char a : s.alphabet) {
      for (auto* table : {&s.delta0, &s.delta1}) {
        (*table)[{s.states[i], a}] = Action{s.states[pick(k + 1)], s.alphabet[pick(3)], moves[pick(3)]};
      }
    }
  }
  s.Validate();
  return s;
}

TEST_CASE("tree-machine computation tree at depth 2") {
  auto m = testing::Machine("tree-machine");
  auto tree = BuildTree(m, "0", 2);
  CHECK(tree.nodes().size() == 7);
  CHECK(tree.LeafCount() == 4);
  std::vector<std::string> ids;
  for (const auto& n : tree.nodes()) ids.push_back(n.id);
  CHECK(ids == std::vector<std::string>{"", "0", "1", "00", "01", "10", "11"});
  CHECK(tree.Find("11")->config.state == "qG");
  CHECK(Output(tree.Find("00")->config) == "1");
  CHECK(Output(tree.Find("11")->config) == "0");
  CHECK(tree.Find("111") == nullptr);
}

TEST_CASE("tree-machine configuration probabilities under both readings") {
  auto m = testing::Machine("tree-machine");
  Configuration e = Canonical({"1", '_', "", "qE"}, '_');
  CHECK(ConfigProb(m, "0", e, 2) == Q(3, 4));
  CHECK(ConfigProb(m, "0", e, 2, Counting::kLeavesOnly) == Q(3, 4));
  Configuration c = Initial(m, "0");
  CHECK(ConfigProb(m, "0", c, 2) == Prob::One());
  CHECK(ConfigProb(m, "0", c, 2, Counting::kLeavesOnly) == Prob::Zero());
}

TEST_CASE("tree-machine conditional halting probabilities") {
  auto m = testing::Machine("tree-machine");
  CHECK(Pt0(m, "0", "10", 2) == Q(1, 2));
  CHECK(Pt1(m, "0", "00", 2) == Q(3, 4));
  CHECK(Pt0(m, "0", "01", 2) == Q(1, 3));
  CHECK(Pt0(m, "0", "11", 2) == Prob::One());
  auto ptc = Ptc(m, "0", "00", 2);
  CHECK(ptc.At(NatKey(0)) == Q(1, 4));
  CHECK(ptc.At(NatKey(1)) == Q(3, 4));
  CHECK(Ptc(m, "0", "", 2).At(NatKey(1)) == Prob::One());
  CHECK_THROWS_AS(Pt0(m, "0", "000", 2), NodeNotExplored);
  CHECK_THROWS_AS(Pt1(m, "0", "0x", 2), NodeNotExplored);
}

TEST_CASE("annotation agrees with the per-node definition") {
  auto m = testing::Machine("tree-machine");
  auto tree = BuildTree(m, "0", 2);
  for (const auto& a : AnnotateTree(tree)) {
    CAPTURE(a.id);
    CHECK(a.pt0 == Pt0(m, "0", a.id, 2));
    CHECK(a.pt1 == Pt1(m, "0", a.id, 2));
  }
}

TEST_CASE("tree-machine leaf and output distributions") {
  auto m = testing::Machine("tree-machine");
  auto cf = Cf(m, "0", 2);
  CHECK(cf.size() == 4);
  for (unsigned n = 3; n <= 6; ++n) CHECK(cf.At(NatKey(n)) == Q(1, 4));
  CHECK(EvalPTM(m, "0", 2) == testing::Expected("tree-machine-x0-d2"));
  CHECK(EvalPTM(testing::Machine("coin-writer"), "", 2) == testing::Expected("coin-writer-d2"));
  CHECK(EvalPTM(m, "0", 1).mass() == Prob::Zero());
}

TEST_CASE("node order is a bijection with the naturals") {
  for (unsigned n = 0; n < 200; ++n) {
    std::string id = NodeId(Nat(n));
    CHECK(NodeIndex(id) == n);
    if (n > 0) CHECK(NodeLess(NodeId(Nat(n - 1)), id));
  }
  CHECK(PtProb("0110") == Prob::Dyadic(4));
}

TEST_CASE("exact evaluation matches coin-stream enumeration") {
  std::vector<PTMSpec> machines{testing::Machine("tree-machine"), testing::Machine("coin-writer"),
                                testing::Machine("copy-machine"), testing::Machine("diverging")};
  for (uint64_t seed = 1; seed <= 12; ++seed) machines.push_back(RandomMachine(seed, 1 + seed % 3));
  for (const auto& m : machines) {
    for (const Word& x : {Word(""), Word("0"), Word("10")}) {
      for (unsigned d : {0u, 1u, 3u, 6u, 10u}) {
        CAPTURE(m.name);
        CAPTURE(x);
        CAPTURE(d);
        CHECK(EvalPTM(m, x, d) == oracle::EnumeratePTM(m, x, d));
      }
    }
  }
  auto m = RandomMachine(99, 2);
  CHECK(EvalPTM(m, "01", 14) == oracle::EnumeratePTM(m, "01", 14));
}

TEST_CASE("output mass is monotone in depth") {
  for (uint64_t seed = 20; seed < 30; ++seed) {
    auto m = RandomMachine(seed, 3);
    Distribution prev = EvalPTM(m, "1", 0);
    for (unsigned d = 1; d <= 10; ++d) {
      Distribution next = EvalPTM(m, "1", d);
      CHECK(PointwiseLeq(prev, next));
      prev = next;
    }
  }
}

TEST_CASE("i2p is the two-point distribution of a rational") {
  auto d = I2P(mpq_class(3, 8));
  CHECK(d.At(NatKey(1)) == Q(3, 8));
  CHECK(d.At(NatKey(0)) == Q(5, 8));
  CHECK(I2P(mpq_class(1)).size() == 1);
  CHECK_THROWS_AS(I2P(mpq_class(3, 2)), OutOfRange);
  CHECK_THROWS_AS(I2P(mpq_class(-1, 2)), OutOfRange);
}

TEST_CASE("the i2p term approaches i2p from below") {
  nat::EvalBudget budget;
  budget.muBound = 10;
  for (auto q : {mpq_class(1, 2), mpq_class(3, 8), mpq_class(0), mpq_class(1)}) {
    auto d = nat::EvalNat(I2PTerm(), {nat::EncodeRational(q)}, budget);
    CHECK(PointwiseLeq(d, I2P(q)));
    CHECK(TvDistance(d, I2P(q)).value() <= mpq_class(1, 1000));
  }
}

TEST_CASE("word coding is the short-lex rank") {
  auto words = testing::WordsUpTo("01_", 4);
  for (size_t i = 0; i < words.size(); ++i) {
    CHECK(WordToNat(words[i], "01_") == Nat(static_cast<unsigned long>(i)));
    CHECK(NatToWord(Nat(static_cast<unsigned long>(i)), "01_") == words[i]);
  }
}

TEST_CASE("compiled machine terms equal the machine") {
  for (const char* name : {"tree-machine", "coin-writer"}) {
    auto m = testing::SharedMachine(name);
    auto term = CompileToTerm(m, "m");
    unsigned d = name == std::string("tree-machine") ? 2 : 1;
    nat::EvalBudget budget;
    budget.muBound = MuBoundForDepth(d);
    budget.closedFormTails = true;
    for (const auto& x : testing::WordsUpTo(m->InputAlphabet(), 2)) {
      CAPTURE(name);
      CAPTURE(x);
      auto got = nat::EvalNat(term, {WordToNat(x, m->InputAlphabet())}, budget);
      CHECK(got == EncodeOutputs(EvalPTM(*m, x, d), m->alphabet));
      CHECK(got.mass() == Prob::One());
    }
  }
  auto m = testing::SharedMachine("tree-machine");
  nat::EvalBudget budget;
  budget.muBound = MuBoundForDepth(2);
  budget.closedFormTails = true;
  auto leaves = nat::EvalNat(CfTerm(m, "m"), {WordToNat("0", "01")}, budget);
  CHECK(leaves == Cf(*m, "0", 2));
}

TEST_CASE("compiled terms of random machines") {
  for (uint64_t seed = 40; seed < 46; ++seed) {
    auto m = std::make_shared<const PTMSpec>(RandomMachine(seed, 2));
    auto term = CompileToTerm(m, "m");
    nat::EvalBudget budget;
    budget.muBound = MuBoundForDepth(3);
    budget.closedFormTails = true;
    for (const auto& x : testing::WordsUpTo("01", 2)) {
      // The term is the depth-unbounded function; within μ ≤ 2^(d+1) − 1 it
      // sees exactly the leaves of depth ≤ d.
      auto got = nat::EvalNat(term, {WordToNat(x, "01")}, budget);
      CHECK(got == EncodeOutputs(EvalPTM(*m, x, 3), m->alphabet));
    }
  }
}

TEST_CASE("machine JSON round trip and validation") {
  auto m = testing::Machine("tree-machine");
  auto back = ParseMachineJson(MachineToJson(m));
  CHECK(back.states == m.states);
  CHECK(back.delta0 == m.delta0);
  CHECK(back.delta1 == m.delta1);
  CHECK(back.finals == m.finals);
  PTMSpec broken = m;
  broken.delta1.erase({"qC", '0'});
  CHECK_THROWS_AS(broken.Validate(), InvalidMachine);
  CHECK_THROWS(ParseMachineJson("{\"name\": 3}"));
  CHECK_THROWS_AS(Step(m, Canonical({"1", '_', "", "qE"}, '_'), 0), FinalConfiguration);
}

}  // namespace
}  // namespace probrec
