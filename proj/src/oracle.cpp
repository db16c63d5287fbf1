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

#include "probrec/oracle.hpp"

#include <cmath>
#include <map>
#include <sstream>

namespace probrec {
namespace oracle {

int FixedBits::Next() {
  if (used_ >= length_) {
    throw OracleExhausted("run needs more than " + std::to_string(length_) + " coins");
  }
  return static_cast<int>((bits_ >> used_++) & 1);
}

int RandomBits::Next() {
  if (left_ == 0) {
    buffer_ = engine_();
    left_ = 64;
  }
  int b = static_cast<int>(buffer_ & 1);
  buffer_ >>= 1;
  --left_;
  return b;
}

namespace {

class NatRunner {
 public:
  NatRunner(const nat::EvalBudget& budget, BitSource& bits) : budget_(budget), bits_(bits) {}

  std::optional<Nat> Run(const nat::TermPtr& t, const std::vector<Nat>& x) {
    using nat::Kind;
    switch (t->kind()) {
      case Kind::kZero:
        return Nat(0);
      case Kind::kSucc:
        return Nat(x[0] + 1);
      case Kind::kProj:
        return x[t->proj_m() - 1];
      case Kind::kCoin:
        return Nat(x[0] + bits_.Next());
      case Kind::kDet:
        return t->det()->fn(x, budget_.recUnrollCap);
      case Kind::kComp: {
        const auto& c = t->children();
        std::vector<Nat> inner;
        for (size_t i = 1; i < c.size(); ++i) {
          auto v = Run(c[i], x);
          if (!v) return std::nullopt;
          inner.push_back(*v);
        }
        return Run(c[0], inner);
      }
      case Kind::kPrimRec: {
        Nat y = x.back();
        if (y > Nat(static_cast<unsigned long>(budget_.recUnrollCap))) return std::nullopt;
        std::vector<Nat> xs(x.begin(), x.end() - 1);
        auto acc = Run(t->children()[0], xs);
        std::vector<Nat> step = xs;
        step.push_back(0);
        step.push_back(0);
        for (Nat i = 0; acc && i < y; ++i) {
          step[xs.size()] = i;
          step[xs.size() + 1] = *acc;
          acc = Run(t->children()[1], step);
        }
        return acc;
      }
      case Kind::kMu: {
        std::vector<Nat> args = x;
        args.push_back(0);
        for (uint64_t y = 0; y < budget_.muBound; ++y) {
          args.back() = Nat(static_cast<unsigned long>(y));
          auto v = Run(t->children()[0], args);
          if (!v) return std::nullopt;
          if (*v == 0) return args.back();
        }
        return std::nullopt;
      }
    }
    return std::nullopt;
  }

 private:
  const nat::EvalBudget& budget_;
  BitSource& bits_;
};

class WordRunner {
 public:
  explicit WordRunner(BitSource& bits) : bits_(bits) {}

  std::optional<Word> Run(const word::TermPtr& t, const std::vector<Word>& x) {
    using word::Kind;
    switch (t->kind()) {
      case Kind::kEps:
        return Word();
      case Kind::kCons:
        return t->symbol() + x[0];
      case Kind::kRandCons:
        return bits_.Next() ? t->symbol() + x[0] : x[0];
      case Kind::kProj:
        return x[t->proj_m() - 1];
      case Kind::kDet:
        return t->det()->fn(x);
      case Kind::kComp: {
        const auto& c = t->children();
        std::vector<Word> inner;
        for (size_t i = 1; i < c.size(); ++i) {
          auto v = Run(c[i], x);
          if (!v) return std::nullopt;
          inner.push_back(*v);
        }
        return Run(c[0], inner);
      }
      case Kind::kCase: {
        std::vector<Word> rest(x.begin() + 1, x.end());
        if (x[0].empty()) return Run(t->base(), rest);
        rest.insert(rest.begin(), x[0].substr(1));
        return Run(t->Branch(x[0][0]), rest);
      }
      case Kind::kRec: {
        // Direct structural recursion on the first argument.
        const Word& w = x[0];
        std::vector<Word> v(x.begin() + 1, x.end());
        if (w.empty()) return Run(t->base(), v);
        std::vector<Word> inner{w.substr(1)};
        inner.insert(inner.end(), v.begin(), v.end());
        auto prev = Run(t, inner);
        if (!prev) return std::nullopt;
        std::vector<Word> step{*prev, w.substr(1)};
        step.insert(step.end(), v.begin(), v.end());
        return Run(t->Branch(w[0]), step);
      }
      case Kind::kSimRec: {
        auto all = RunSimRec(t, x);
        if (!all) return std::nullopt;
        return (*all)[t->index() - 1];
      }
    }
    return std::nullopt;
  }

 private:
  std::optional<std::vector<Word>> RunSimRec(const word::TermPtr& t, const std::vector<Word>& x) {
    unsigned n = t->components();
    const Word& w = x[0];
    std::vector<Word> v(x.begin() + 1, x.end());
    std::vector<Word> out;
    if (w.empty()) {
      for (unsigned j = 1; j <= n; ++j) {
        auto b = Run(t->SimBase(j), v);
        if (!b) return std::nullopt;
        out.push_back(*b);
      }
      return out;
    }
    std::vector<Word> inner{w.substr(1)};
    inner.insert(inner.end(), v.begin(), v.end());
    auto prev = RunSimRec(t, inner);
    if (!prev) return std::nullopt;
    std::vector<Word> step = *prev;
    step.push_back(w.substr(1));
    step.insert(step.end(), v.begin(), v.end());
    for (unsigned j = 1; j <= n; ++j) {
      auto s = Run(t->SimStep(j, w[0]), step);
      if (!s) return std::nullopt;
      out.push_back(*s);
    }
    return out;
  }

  BitSource& bits_;
};

}  // namespace

std::optional<Nat> RunNat(const nat::TermPtr& t, const std::vector<Nat>& args,
                          const nat::EvalBudget& budget, BitSource& bits) {
  return NatRunner(budget, bits).Run(t, args);
}

std::optional<Word> RunWord(const word::TermPtr& t, const std::vector<Word>& args,
                            BitSource& bits) {
  return WordRunner(bits).Run(t, args);
}

std::optional<Word> RunPTM(const ptm::PTMSpec& spec, const Word& x, unsigned depth,
                           BitSource& bits) {
  ptm::Configuration c = ptm::Initial(spec, x);
  for (unsigned t = 0;; ++t) {
    if (spec.IsFinal(c.state)) return ptm::Output(c);
    if (t == depth) return std::nullopt;
    c = ptm::Step(spec, c, bits.Next());
  }
}

std::optional<Word> RunPRM(const prm::PRMSpec& spec, const std::vector<Word>& inputs,
                           unsigned depth, const prm::Reader& read, BitSource& bits) {
  prm::PRMConfiguration c = prm::Initial(spec, inputs);
  for (unsigned t = 0;; ++t) {
    if (prm::IsFinal(spec, c)) return read(c);
    if (t == depth) return std::nullopt;
    bool random = spec.program[c.pc - 1].op == prm::Op::kJumpRand;
    c = prm::StepWithCoin(spec, c, random ? bits.Next() : 0);
  }
}

Distribution Enumerate(KeySpace ks, const Run& run, unsigned bits) {
  if (bits > 24) throw OutOfRange("enumeration limited to 24 coins");
  std::map<Key, uint64_t, KeyLess> hits;
  uint64_t total = uint64_t{1} << bits;
  for (uint64_t s = 0; s < total; ++s) {
    FixedBits source(s, bits);
    if (auto k = run(source)) ++hits[*k];
  }
  DistributionBuilder b(ks);
  for (const auto& [k, n] : hits) {
    b.Add(k, mpq_class(mpz_class(static_cast<unsigned long>(n)), mpz_class(static_cast<unsigned long>(total))));
  }
  return b.Build();
}

Distribution EnumerateAuto(KeySpace ks, const Run& run, unsigned max_bits) {
  for (unsigned bits = 0;; ++bits) {
    try {
      return Enumerate(ks, run, bits);
    } catch (const OracleExhausted&) {
      if (bits >= max_bits) throw;
    }
  }
}

Distribution EnumerateNat(const nat::TermPtr& t, const std::vector<Nat>& args,
                          const nat::EvalBudget& budget, unsigned max_bits) {
  return EnumerateAuto(
      KeySpace::kNat,
      [&](BitSource& b) -> std::optional<Key> {
        auto v = RunNat(t, args, budget, b);
        return v ? std::optional<Key>(Key(*v)) : std::nullopt;
      },
      max_bits);
}

Distribution EnumerateWord(const word::TermPtr& t, const std::vector<Word>& args,
                           unsigned max_bits) {
  return EnumerateAuto(
      KeySpace::kWord,
      [&](BitSource& b) -> std::optional<Key> {
        auto v = RunWord(t, args, b);
        return v ? std::optional<Key>(Key(*v)) : std::nullopt;
      },
      max_bits);
}

Distribution EnumeratePTM(const ptm::PTMSpec& spec, const Word& x, unsigned depth) {
  return Enumerate(
      KeySpace::kWord,
      [&](BitSource& b) -> std::optional<Key> {
        auto v = RunPTM(spec, x, depth, b);
        return v ? std::optional<Key>(Key(*v)) : std::nullopt;
      },
      depth);
}

Distribution EnumeratePRM(const prm::PRMSpec& spec, const std::vector<Word>& inputs,
                          unsigned depth, const prm::Reader& read) {
  return Enumerate(
      KeySpace::kWord,
      [&](BitSource& b) -> std::optional<Key> {
        auto v = RunPRM(spec, inputs, depth, read, b);
        return v ? std::optional<Key>(Key(*v)) : std::nullopt;
      },
      depth);
}

std::string McReport::str() const {
  std::ostringstream s;
  s << "draws " << draws << " seed " << seed << (ok ? " ok" : " MISMATCH") << "\n";
  for (const auto& r : rows) {
    s << "  " << (r.key ? KeyString(*r.key) : std::string("<undefined>")) << " exact "
      << r.exact.str() << " freq " << r.frequency << " ±" << r.bound
      << (r.within ? "" : "  outside 3σ") << "\n";
  }
  return s.str();
}

McReport MonteCarlo(const Distribution& exact, const Run& run, uint64_t draws, uint64_t seed) {
  McReport report;
  report.draws = draws;
  report.seed = seed;
  std::map<Key, uint64_t, KeyLess> hits;
  uint64_t undefined = 0;
  RandomBits bits(seed);
  for (uint64_t i = 0; i < draws; ++i) {
    if (auto k = run(bits)) {
      ++hits[*k];
    } else {
      ++undefined;
    }
  }
  for (const auto& [k, p] : exact.entries()) hits.emplace(k, 0);
  auto row = [&](std::optional<Key> key, const Prob& p, uint64_t n) {
    McRow r;
    r.key = std::move(key);
    r.exact = p;
    r.hits = n;
    r.frequency = static_cast<double>(n) / static_cast<double>(draws);
    double q = p.ToDouble();
    r.bound = 3.0 * std::sqrt(q * (1 - q) / static_cast<double>(draws));
    r.within = std::fabs(r.frequency - q) <= r.bound;
    // A zero-mass outcome may never be observed, whatever the bound.
    if (p.IsZero()) r.within = n == 0;
    return r;
  };
  for (const auto& [k, n] : hits) report.rows.push_back(row(k, exact.At(k), n));
  report.rows.push_back(row(std::nullopt, exact.deficit(), undefined));
  report.ok = true;
  for (const auto& r : report.rows) report.ok = report.ok && r.within;
  return report;
}

}  // namespace oracle
}  // namespace probrec
