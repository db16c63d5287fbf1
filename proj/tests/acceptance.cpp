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

// Acceptance runner: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (capped at 1).

#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "probrec/distribution.hpp"
#include "probrec/dsl.hpp"
#include "probrec/fixtures.hpp"
#include "probrec/nat_term.hpp"
#include "probrec/oracle.hpp"
#include "probrec/prm.hpp"
#include "probrec/ptm.hpp"
#include "probrec/tiering.hpp"
#include "probrec/word_term.hpp"

namespace probrec {
namespace {

// Tolerances and sizes, pinned.
constexpr uint64_t kMuBound = 10;
constexpr unsigned kMaxInputLength = 4;
constexpr unsigned kCompiledDepth = 6;
constexpr unsigned kOracleMaxDepth = 14;
constexpr double kMaxStepRatio = 3.0;
constexpr unsigned kReducedDepth = 8;
constexpr unsigned kSimRecMaxLength = 5;
constexpr unsigned kCouplePairs = 1000;
constexpr unsigned kGrowthMaxSize = 8;
constexpr unsigned kGrowthStepCap = 200000;
constexpr uint64_t kMcDraws = 100000;
constexpr uint64_t kMcSeed = 20260101;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void Require(bool ok, const std::string& what) {
    if (!ok && pass) detail << "first failure: " << what << "; ";
    pass = pass && ok;
  }
};

Prob Dyadic(unsigned long k) { return Prob::Dyadic(k); }

std::vector<Word> WordsUpTo(const std::string& alphabet, unsigned n) {
  std::vector<Word> out{""};
  size_t from = 0;
  for (unsigned len = 1; len <= n; ++len) {
    size_t to = out.size();
    for (size_t i = from; i < to; ++i) {
      for (char c : alphabet) out.push_back(out[i] + c);
    }
    from = to;
  }
  return out;
}

ptm::PTMSpec Machine(const std::string& name) {
  return ptm::ParseMachineJson(dsl::ReadFile(fixtures::Find(name).path));
}

std::vector<ptm::PTMSpec> AllMachines() {
  std::vector<ptm::PTMSpec> out;
  for (const auto& f : fixtures::List("machine")) {
    out.push_back(ptm::ParseMachineJson(dsl::ReadFile(f.path)));
  }
  return out;
}

template <typename P>
P Program(const std::string& kind, const std::string& name) {
  for (const auto& f : fixtures::List(kind)) {
    if (f.name == name) return std::get<P>(dsl::ParseTermFile(f.path));
  }
  throw UnknownName(kind + "/" + name);
}

struct TierEntry {
  std::string name;
  dsl::WordProgram program;
  std::string expect;
  bool expand = false;
};

std::vector<TierEntry> TierCorpus() {
  std::vector<TierEntry> out;
  for (const auto& f : fixtures::List("tier")) {
    std::string text = dsl::ReadFile(f.path);
    TierEntry e{f.name, dsl::ParseWord(text), "", false};
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
      if (line.rfind("# expect: ", 0) == 0) e.expect = line.substr(10);
      if (line == "# expand: true") e.expand = true;
    }
    out.push_back(std::move(e));
  }
  return out;
}

void Criterion1(Outcome& o) {
  auto h = Program<dsl::NatProgram>("term", "example-h").term;
  nat::EvalBudget budget;
  budget.muBound = kMuBound;
  auto d = nat::EvalNat(h, {Nat(0)}, budget);
  o.Require(d.size() == kMuBound, "support size");
  for (unsigned y = 0; y < kMuBound; ++y) {
    o.Require(d.At(NatKey(y)) == Dyadic(y + 1), "h(0)(" + std::to_string(y) + ")");
  }
  o.Require(d.deficit() == Dyadic(kMuBound), "deficit");
  o.detail << "deficit " << d.deficit().str();
}

void Criterion2(Outcome& o) {
  auto f = Program<dsl::NatProgram>("term", "example-f").term;
  nat::EvalBudget budget;
  budget.muBound = kMuBound;
  for (unsigned x : {0u, 1u, 2u, 5u}) {
    auto d = nat::EvalNat(f, {Nat(x)}, budget);
    o.Require(d.size() == kMuBound, "support size at x=" + std::to_string(x));
    for (unsigned y = x; y < x + kMuBound; ++y) {
      o.Require(d.At(NatKey(y)) == Dyadic(y - x + 1),
                "f(" + std::to_string(x) + ")(" + std::to_string(y) + ")");
    }
  }
  o.detail << "x in {0,1,2,5}, y in [x, x+" << kMuBound << ")";
}

void Criterion3(Outcome& o) {
  auto m = Machine("tree-machine");
  const Word x = "0";
  ptm::Configuration e = ptm::Canonical({"1", m.blank, "", "qE"}, m.blank);
  Prob pc = ptm::ConfigProb(m, x, e, 2);
  o.Require(pc == Prob(3, 4), "configProb(E)");
  o.Require(ptm::Pt0(m, x, "10", 2) == Prob(1, 2), "pt0(10)");
  o.Require(ptm::Pt1(m, x, "00", 2) == Prob(3, 4), "pt1(00)");
  struct Leaf {
    const char* id;
    Prob p0;
    Prob p1;
  };
  const Leaf leaves[] = {{"00", Prob(1, 4), Prob(3, 4)},
                         {"01", Prob(1, 3), Prob(2, 3)},
                         {"10", Prob(1, 2), Prob(1, 2)},
                         {"11", Prob::One(), Prob::Zero()}};
  for (const auto& l : leaves) {
    auto ptc = ptm::Ptc(m, x, l.id, 2);
    o.Require(ptc.At(NatKey(0)) == l.p0 && ptc.At(NatKey(1)) == l.p1,
              std::string("ptc(") + l.id + ")");
  }
  for (const char* inner : {"", "0", "1"}) {
    auto ptc = ptm::Ptc(m, x, inner, 2);
    o.Require(ptc.At(NatKey(1)) == Prob::One(), std::string("ptc(") + inner + ")");
  }
  o.detail << "configProb(E) " << pc.str();
}

void Criterion4(Outcome& o) {
  auto machines = AllMachines();
  bool diverging = false;
  size_t checked = 0;
  for (const auto& spec : machines) {
    auto shared = std::make_shared<const ptm::PTMSpec>(spec);
    auto term = ptm::CompileToTerm(shared, "m");
    nat::EvalBudget budget;
    budget.muBound = ptm::MuBoundForDepth(kCompiledDepth);
    budget.closedFormTails = true;
    for (const auto& x : WordsUpTo(spec.InputAlphabet(), kMaxInputLength)) {
      auto reference = ptm::EvalPTM(spec, x, kCompiledDepth);
      diverging = diverging || !reference.deficit().IsZero();
      auto got = nat::EvalNat(term, {ptm::WordToNat(x, spec.InputAlphabet())}, budget);
      o.Require(got == ptm::EncodeOutputs(reference, spec.alphabet), spec.name + " on \"" + x + "\"");
      ++checked;
    }
  }
  o.Require(machines.size() >= 3, "at least three machines");
  o.Require(diverging, "a machine with a diverging branch");
  o.detail << machines.size() << " machines, " << checked << " inputs, depth " << kCompiledDepth;
}

void Criterion5(Outcome& o) {
  size_t checked = 0;
  for (const auto& spec : AllMachines()) {
    auto reduced = prm::PtmToPrm(spec);
    auto decode = [&](const prm::PRMConfiguration& c) { return reduced.Decode(c); };
    for (const auto& x : WordsUpTo(spec.InputAlphabet(), 2)) {
      for (unsigned d = 0; d <= kOracleMaxDepth; ++d) {
        o.Require(ptm::EvalPTM(spec, x, d) == oracle::EnumeratePTM(spec, x, d),
                  "evalPTM " + spec.name + " d=" + std::to_string(d));
        o.Require(prm::EvalPRM(reduced.prm, reduced.Inputs(x), d, decode) ==
                      oracle::EnumeratePRM(reduced.prm, reduced.Inputs(x), d, decode),
                  "evalPRM reduced " + spec.name + " d=" + std::to_string(d));
        checked += 2;
      }
    }
  }
  for (const auto& f : fixtures::List("program")) {
    auto p = prm::ParseProgram(dsl::ReadFile(f.path));
    auto read = [](const prm::PRMConfiguration& c) { return c.regs[0]; };
    for (const auto& x : WordsUpTo(p.alphabet, 2)) {
      for (unsigned d = 0; d <= kOracleMaxDepth; ++d) {
        o.Require(prm::EvalPRM(p, {x}, d, read) == oracle::EnumeratePRM(p, {x}, d, read),
                  "evalPRM " + f.name + " d=" + std::to_string(d));
        ++checked;
      }
    }
  }
  o.detail << checked << " comparisons at depths 0.." << kOracleMaxDepth;
}

void Criterion6(Outcome& o) {
  const mpq_class qs[] = {mpq_class(0), mpq_class(1), mpq_class(1, 2), mpq_class(3, 8), mpq_class(5, 16)};
  for (const auto& q : qs) {
    auto direct = ptm::I2P(q);
    for (uint64_t b : {4u, 8u, 12u}) {
      nat::EvalBudget budget;
      budget.muBound = b;
      auto term = nat::EvalNat(ptm::I2PTerm(), {nat::EncodeRational(q)}, budget);
      o.Require(TvDistance(term, direct) <= Dyadic(b),
                "tv at q=" + q.get_str() + " B=" + std::to_string(b));
    }
    // Dyadic q: exact once the search covers the expansion and its tail is
    // summed in closed form.
    nat::EvalBudget exact;
    exact.muBound = 6;
    exact.closedFormTails = true;
    o.Require(nat::EvalNat(ptm::I2PTerm(), {nat::EncodeRational(q)}, exact) == direct,
              "exact at q=" + q.get_str());
  }
  o.detail << "q in {0, 1, 1/2, 3/8, 5/16}, B in {4, 8, 12}";
}

void Criterion7(Outcome& o) {
  int accepted = 0, rejected = 0;
  bool exp_rejected = false;
  for (const auto& e : TierCorpus()) {
    auto term = e.expand ? word::TupledExpand(e.program.term, e.program.alphabet) : e.program.term;
    auto r = tier::InferTiers(term);
    if (e.expect == "reject") {
      bool cycle = !r.typable && !r.cycle.empty();
      o.Require(cycle, e.name + " rejected with a cycle");
      rejected += cycle;
      exp_rejected = exp_rejected || (cycle && e.name == "exp-rejected");
    } else {
      bool ok = r.typable && r.judgment.str() == e.expect;
      o.Require(ok, e.name + " accepted at " + e.expect);
      accepted += ok;
    }
  }
  o.Require(accepted >= 10, "10+ accepted");
  o.Require(rejected >= 5, "5+ rejected");
  o.Require(exp_rejected, "exponential doubling rejected");
  o.detail << accepted << " accepted, " << rejected << " rejected";
}

void Criterion8(Outcome& o) {
  double worst = 0;
  std::string worst_at;
  for (const auto& spec : AllMachines()) {
    auto reduced = prm::PtmToPrm(spec);
    for (const auto& x : WordsUpTo(spec.InputAlphabet(), 3)) {
      o.Require(prm::EvalReduced(reduced, x, 8 * kReducedDepth + 8) == ptm::EvalPTM(spec, x, kReducedDepth),
                "distribution " + spec.name + " on \"" + x + "\"");
      auto steps = ptm::MaxSteps(spec, x, kReducedDepth);
      if (!steps || *steps == 0) continue;
      auto prm_steps = prm::MaxStepsReduced(reduced, x, 8 * kReducedDepth + 8);
      if (!prm_steps.bounded()) continue;
      double ratio = static_cast<double>(*prm_steps.steps) / static_cast<double>(*steps);
      if (ratio > worst) {
        worst = ratio;
        worst_at = spec.name + " on \"" + x + "\"";
      }
    }
  }
  bool preserved = o.pass;
  o.Require(worst <= kMaxStepRatio, "step ratio <= 3");
  o.detail << "distributions " << (preserved ? "exact" : "differ") << "; max PRM/PTM step ratio " << worst << " at " << worst_at;
}

void Criterion9(Outcome& o) {
  std::vector<std::pair<std::string, dsl::WordProgram>> systems;
  systems.push_back({"parity-length", Program<dsl::WordProgram>("term", "parity-length")});
  for (auto& e : TierCorpus()) {
    if (e.program.term->kind() == word::Kind::kSimRec) systems.push_back({e.name, e.program});
  }
  size_t checked = 0;
  for (const auto& [name, p] : systems) {
    auto expanded = word::TupledExpand(p.term, p.alphabet);
    unsigned arity = word::Arity(p.term);
    auto words = WordsUpTo(p.alphabet.symbols(), kSimRecMaxLength);
    std::vector<std::vector<Word>> arg_sets;
    if (arity == 1) {
      for (const auto& w : words) arg_sets.push_back({w});
    } else {
      for (const auto& w : words) {
        for (const auto& v : WordsUpTo(p.alphabet.symbols(), 2)) arg_sets.push_back({w, v});
      }
    }
    for (const auto& args : arg_sets) {
      o.Require(word::EvalWord(expanded, args, p.alphabet) == word::EvalSimRec(p.term, args, p.alphabet),
                name + " on \"" + args[0] + "\"");
      ++checked;
    }
  }
  std::mt19937_64 rng(kMcSeed);
  auto random_word = [&](unsigned max_len) {
    Word w(rng() % (max_len + 1), 'a');
    for (char& c : w) c = "ab"[rng() % 2];
    return w;
  };
  for (unsigned i = 0; i < kCouplePairs; ++i) {
    Word u = random_word(12), v = random_word(12);
    unsigned m = 1 + i % 2;
    Word t = word::CoupleEncode(u, v, m);
    mpz_class bound;
    mpz_ui_pow_ui(bound.get_mpz_t(), t.size(), m);
    o.Require(2 * u.size() + 2 * v.size() + 2 <= bound, "size bound");
    o.Require(word::CoupleFirst(t, m) == u && word::CoupleSecond(t, m) == v, "couple round trip");
  }
  o.detail << systems.size() << " systems, " << checked << " argument tuples, " << kCouplePairs << " pairs";
}

void Criterion10(Outcome& o) {
  std::vector<unsigned> sizes;
  for (unsigned n = 1; n <= kGrowthMaxSize; ++n) sizes.push_back(n);
  std::ostringstream exps;
  int measured = 0;
  for (const auto& e : TierCorpus()) {
    if (e.expect == "reject") continue;
    auto compiled = prm::CompileWordTerm(e.program.term, e.program.alphabet);
    auto g = prm::MeasureGrowth(compiled, e.program.alphabet, sizes, kGrowthStepCap);
    o.Require(g.bounded, e.name + " halts within the cap");
    o.Require(g.stable, e.name + " exponent stable");
    exps << e.name << "=" << static_cast<int>(g.fit.k * 100 + 0.5) / 100.0 << " ";
    ++measured;
  }
  o.detail << measured << " fixtures; fitted exponents (empirical, non-probative): " << exps.str();
}

void Criterion11(Outcome& o) {
  struct Case {
    std::string name;
    Distribution exact;
    oracle::Run run;
  };
  std::vector<Case> cases;
  nat::EvalBudget budget;
  budget.muBound = kMuBound;
  auto h = Program<dsl::NatProgram>("term", "example-h").term;
  cases.push_back({"example-h", nat::EvalNat(h, {Nat(0)}, budget), [=](oracle::BitSource& b) -> std::optional<Key> {
                     auto r = oracle::RunNat(h, {Nat(0)}, budget, b);
                     if (!r) return std::nullopt;
                     return Key(*r);
                   }});
  auto f = Program<dsl::NatProgram>("term", "example-f").term;
  cases.push_back({"example-f", nat::EvalNat(f, {Nat(2)}, budget), [=](oracle::BitSource& b) -> std::optional<Key> {
                     auto r = oracle::RunNat(f, {Nat(2)}, budget, b);
                     if (!r) return std::nullopt;
                     return Key(*r);
                   }});
  auto tree = Machine("tree-machine");
  cases.push_back({"tree-machine", ptm::EvalPTM(tree, "0", 2), [=](oracle::BitSource& b) -> std::optional<Key> {
                     auto r = oracle::RunPTM(tree, "0", 2, b);
                     if (!r) return std::nullopt;
                     return WordKey(*r);
                   }});
  auto walk = Program<dsl::WordProgram>("tier", "rand-walk");
  cases.push_back({"rand-walk", word::EvalWord(walk.term, {"aaaa"}, walk.alphabet),
                   [=](oracle::BitSource& b) -> std::optional<Key> {
                     auto r = oracle::RunWord(walk.term, {"aaaa"}, b);
                     if (!r) return std::nullopt;
                     return WordKey(*r);
                   }});
  auto coin = prm::ParseProgram(dsl::ReadFile(fixtures::Find("coin-choice").path));
  auto read = [](const prm::PRMConfiguration& c) { return c.regs[0]; };
  cases.push_back({"coin-choice", prm::EvalPRM(coin, {"b"}, 20, 0), [=](oracle::BitSource& b) -> std::optional<Key> {
                     auto r = oracle::RunPRM(coin, {"b"}, 20, read, b);
                     if (!r) return std::nullopt;
                     return WordKey(*r);
                   }});
  for (size_t i = 0; i < cases.size(); ++i) {
    auto mc = oracle::MonteCarlo(cases[i].exact, cases[i].run, kMcDraws, kMcSeed + i);
    o.Require(mc.ok, cases[i].name + " within 3 sigma");
  }
  o.detail << cases.size() << " fixtures x " << kMcDraws << " draws";
}

}  // namespace
}  // namespace probrec

int main() {
  using probrec::Outcome;
  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria{
      {"1 h at muBound 10", probrec::Criterion1},
      {"2 f on x in {0,1,2,5}", probrec::Criterion2},
      {"3 computation tree annotations", probrec::Criterion3},
      {"4 machines compiled to terms", probrec::Criterion4},
      {"5 exact evaluators vs coin enumeration", probrec::Criterion5},
      {"6 i2p term vs direct i2p", probrec::Criterion6},
      {"7 tiering corpus", probrec::Criterion7},
      {"8 machine to register machine reduction", probrec::Criterion8},
      {"9 simultaneous recursion and couple codes", probrec::Criterion9},
      {"10 empirical step growth", probrec::Criterion10},
      {"11 Monte-Carlo consistency", probrec::Criterion11},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    failed += !o.pass;
    std::printf("%s criterion %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.str().c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
