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

// Probabilistic register machines over words: exact evaluation, step-count
// instrumentation, the PTM reduction and compilation of tiered word terms.
//
// Program counters are 1-based; pc = size + 1 is the halting position.
// Words are read from their first symbol: cons prepends, pred and jump strip
// the first symbol.

#ifndef PROBREC_PRM_HPP_
#define PROBREC_PRM_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "probrec/distribution.hpp"
#include "probrec/ptm.hpp"
#include "probrec/word_term.hpp"

namespace probrec {
namespace prm {

enum class Op { kEps, kCons, kPred, kJump, kJumpRand };

struct Instruction {
  Op op = Op::kEps;
  char symbol = 0;       // cons, pred
  unsigned src = 0;      // eps, cons, pred, jump
  unsigned dst = 0;      // eps, cons, pred
  std::vector<size_t> targets;  // jump: one per alphabet symbol, in order
  size_t target = 0;     // jrand

  // Text form, e.g. "cons a r0 r1", "jump r0 -> 3 5", "jrand 7".
  std::string str() const;
  friend bool operator==(const Instruction& a, const Instruction& b) {
    return a.op == b.op && a.symbol == b.symbol && a.src == b.src && a.dst == b.dst &&
           a.targets == b.targets && a.target == b.target;
  }
};

// dst := src.
Instruction EpsMove(unsigned src, unsigned dst);
// dst := a·src.
Instruction ConsA(char a, unsigned src, unsigned dst);
// dst := w when src = a·w; dst := src otherwise.
Instruction PredA(char a, unsigned src, unsigned dst);
// src = a·w: src := w, pc := targets[index of a]. src = ε: pc + 1.
Instruction Jump(unsigned src, std::vector<size_t> targets);
// pc := target or pc + 1, each with probability ½.
Instruction JumpRand(size_t target);

struct PRMSpec {
  std::string alphabet;  // ordered; indexes jump vectors
  unsigned registers = 1;
  std::vector<Instruction> program;

  size_t halt() const { return program.size() + 1; }
  // InvalidMachine on out-of-range registers or targets, jump vectors of
  // the wrong length, or symbols outside the alphabet.
  void Validate() const;
};

struct PRMConfiguration {
  std::vector<Word> regs;
  size_t pc = 1;

  std::string str() const;
  friend bool operator==(const PRMConfiguration& a, const PRMConfiguration& b) {
    return a.pc == b.pc && a.regs == b.regs;
  }
  friend bool operator<(const PRMConfiguration& a, const PRMConfiguration& b) {
    return a.pc != b.pc ? a.pc < b.pc : a.regs < b.regs;
  }
};

// Inputs fill registers 0.. in order, the rest start at ε. IndexOutOfRange
// when there are more inputs than registers.
PRMConfiguration Initial(const PRMSpec& spec, const std::vector<Word>& inputs);
bool IsFinal(const PRMSpec& spec, const PRMConfiguration& c);

struct Successor {
  PRMConfiguration config;
  Prob p;
};

// One successor with probability 1, or two with ½ each for jrand.
// Throws FinalConfiguration on a final configuration.
std::vector<Successor> StepPRM(const PRMSpec& spec, const PRMConfiguration& c);

// Deterministic step under an explicit coin; only jrand reads the coin.
PRMConfiguration StepWithCoin(const PRMSpec& spec, const PRMConfiguration& c, int bit);

using Reader = std::function<Word(const PRMConfiguration&)>;

// Mass of each final configuration reached within `depth` steps, keyed by
// `read` of it.
Distribution EvalPRM(const PRMSpec& spec, const std::vector<Word>& inputs, unsigned depth,
                     const Reader& read);
// Keyed by the content of register `out_reg`.
Distribution EvalPRM(const PRMSpec& spec, const std::vector<Word>& inputs, unsigned depth,
                     unsigned out_reg);

struct StepCount {
  // Longest path to a final configuration, when every path halts in depth.
  std::optional<uint64_t> steps;
  // Longest path among those that halted within depth.
  uint64_t longest_halting = 0;
  unsigned depth = 0;
  bool bounded() const { return steps.has_value(); }
  // "12" or "Unbounded(40)".
  std::string str() const;
};

StepCount MaxSteps(const PRMSpec& spec, const std::vector<Word>& inputs, unsigned depth);

// Line-oriented program text. Optional header lines `alphabet "01_"` and
// `registers 3`; `#` starts a comment outside quotes; symbols may be quoted
// ('#'). Registers default to one more than the largest mentioned, the
// alphabet to "01".
PRMSpec ParseProgram(const std::string& text);
std::string FormatProgram(const PRMSpec& spec);

// ---------------------------------------------------------------------------
// PTM reduction. Registers: 0 = tape left of the head, nearest symbol first;
// 1 = tape right of the head; 2 = scratch for unconditional jumps. The head
// symbol and the state live in the program counter.

struct PtmReduction {
  PRMSpec prm;
  char blank = '_';
  // First instruction of the code simulating state q reading symbol a.
  std::map<std::pair<std::string, char>, size_t> entries;

  std::vector<Word> Inputs(const Word& x) const { return {Word(), x, Word()}; }
  // The left tape in reading order, leading blanks removed.
  Word Decode(const PRMConfiguration& c) const;
};

PtmReduction PtmToPrm(const ptm::PTMSpec& spec);
Distribution EvalReduced(const PtmReduction& r, const Word& x, unsigned depth);
StepCount MaxStepsReduced(const PtmReduction& r, const Word& x, unsigned depth);

// ---------------------------------------------------------------------------
// Compilation of word terms. Arguments occupy registers 0..arity-1 and are
// never written; the result lands in out_reg.

struct CompiledTerm {
  PRMSpec prm;
  unsigned arity = 0;
  unsigned out_reg = 0;
};

// NotTiered when the term admits no tiering, NotCompilable for classical
// functions other than couple/first/second. Symbols outside `alphabet` but
// inside the alphabet of the term's own branches are a precondition error
// (AlphabetMismatch).
CompiledTerm CompileWordTerm(const word::TermPtr& t, const word::Alphabet& alphabet);
Distribution EvalCompiled(const CompiledTerm& c, const std::vector<Word>& args, unsigned depth);
StepCount MaxStepsCompiled(const CompiledTerm& c, const std::vector<Word>& args, unsigned depth);

// ---------------------------------------------------------------------------
// Empirical growth of step counts.

struct PowerFit {
  double c = 0;  // steps ≈ c · n^k
  double k = 0;
  double r2 = 0;
};

// Least squares on (log n, log steps). Needs two or more distinct n >= 1.
PowerFit FitPowerLaw(const std::vector<std::pair<unsigned, uint64_t>>& points);

struct GrowthReport {
  std::vector<std::pair<unsigned, uint64_t>> points;  // (n, worst steps)
  PowerFit fit;
  std::vector<double> refit_exponents;  // leave-one-out refits
  bool monotone = false;
  bool stable = false;                  // every refit within ±1 of fit.k
  bool bounded = true;                  // every run halted within the cap
};

// Worst-case steps over every word of length n fed to all arguments, for
// n in `sizes`. Each run is capped at `depth` steps.
GrowthReport MeasureGrowth(const CompiledTerm& c, const word::Alphabet& alphabet,
                           const std::vector<unsigned>& sizes, unsigned depth);

}  // namespace prm
}  // namespace probrec

#endif  // PROBREC_PRM_HPP_
