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

// Probabilistic functions over a word algebra: constructors, the random
// append r_a, recursion on notation, case distinction and simultaneous
// recursion.

#ifndef PROBREC_WORD_TERM_HPP_
#define PROBREC_WORD_TERM_HPP_

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "probrec/distribution.hpp"
#include "probrec/nat_term.hpp"

namespace probrec {
namespace word {

// Ordered set of single-byte symbols. The order drives jump vectors and
// branch listing; key order of distributions is always short-lex on bytes.
class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::string symbols);

  const std::string& symbols() const { return symbols_; }
  size_t size() const { return symbols_.size(); }
  bool Contains(char c) const { return symbols_.find(c) != std::string::npos; }
  size_t IndexOf(char c) const;
  bool Covers(const Word& w) const;
  // Σ ∪ extra, keeping Σ's order and appending new symbols.
  Alphabet Extended(const std::string& extra) const;
  friend bool operator==(const Alphabet& a, const Alphabet& b) {
    return a.symbols_ == b.symbols_;
  }

 private:
  std::string symbols_;
};

// Tier signature of an opaque function: arg i lives at tier base + args[i],
// the result at base + result, for a free base.
struct TierSignature {
  std::vector<int> args;
  int result = 0;
};

struct DetWordFnDef {
  std::string name;
  unsigned arity = 0;
  std::function<std::optional<Word>(const std::vector<Word>&)> fn;
  TierSignature tiers;
};

using DetWordFnPtr = std::shared_ptr<const DetWordFnDef>;

enum class Kind { kEps, kCons, kRandCons, kProj, kComp, kRec, kCase, kSimRec, kDet };

class Term;
using TermPtr = std::shared_ptr<const Term>;

// Immutable AST node.
//   Comp:   children = [f, g1..gn]
//   Rec:    children = [base, step for symbols()[0], step for symbols()[1], ...]
//   Case:   same layout as Rec
//   SimRec: children = [base_1..base_n, then steps (j, a) j-major in
//           symbols() order]; index() is the selected component, 1-based
class Term {
 public:
  Kind kind() const { return kind_; }
  char symbol() const { return symbol_; }
  unsigned proj_n() const { return n_; }  // also the arity of Eps
  unsigned proj_m() const { return m_; }
  unsigned index() const { return index_; }
  unsigned components() const { return components_; }
  const std::string& symbols() const { return symbols_; }
  const std::vector<TermPtr>& children() const { return children_; }
  const DetWordFnPtr& det() const { return det_; }
  const SourcePos& pos() const { return pos_; }

  // Rec/Case accessors.
  const TermPtr& base() const { return children_[0]; }
  const TermPtr& Branch(char a) const;
  // SimRec accessors (1-based j).
  const TermPtr& SimBase(unsigned j) const { return children_[j - 1]; }
  const TermPtr& SimStep(unsigned j, char a) const;

  struct Fields {
    Kind kind = Kind::kEps;
    char symbol = 0;
    unsigned n = 0;
    unsigned m = 0;
    unsigned index = 0;
    unsigned components = 0;
    std::string symbols;
    std::vector<TermPtr> children;
    DetWordFnPtr det;
    SourcePos pos;
  };
  static TermPtr Make(Fields f);
  Fields fields() const;
  TermPtr WithPos(SourcePos pos) const;

 private:
  Kind kind_ = Kind::kEps;
  char symbol_ = 0;
  unsigned n_ = 0;
  unsigned m_ = 0;
  unsigned index_ = 0;
  unsigned components_ = 0;
  std::string symbols_;
  std::vector<TermPtr> children_;
  DetWordFnPtr det_;
  SourcePos pos_;
};

// The n-ary constant ε; n = 0 is the nullary base of unary recursions.
TermPtr Eps(unsigned n = 1);
TermPtr Cons(char a);
TermPtr RandCons(char a);
TermPtr Proj(unsigned n, unsigned m);
TermPtr Comp(TermPtr f, std::vector<TermPtr> gs);
TermPtr Rec(TermPtr base, std::vector<std::pair<char, TermPtr>> steps);
TermPtr Case(TermPtr base, std::vector<std::pair<char, TermPtr>> branches);
// steps[(j, a)] with j 1-based; every (j, a) for j in 1..n and a in the
// symbol set must appear exactly once.
TermPtr SimRec(unsigned index, std::vector<TermPtr> bases,
               std::vector<std::tuple<unsigned, char, TermPtr>> steps);
TermPtr Det(DetWordFnPtr def);

// Throws ArityMismatch with an AST path.
unsigned Arity(const TermPtr& t);
size_t Size(const TermPtr& t);
bool StructurallyEqual(const TermPtr& a, const TermPtr& b);
// Every symbol a Cons/RandCons/branch mentions; throws AlphabetMismatch if
// some Rec/Case/SimRec does not cover `alphabet` exactly.
void CheckAlphabet(const TermPtr& t, const Alphabet& alphabet);
bool ContainsSimRec(const TermPtr& t);
bool ContainsDet(const TermPtr& t);

Distribution EvalWord(const TermPtr& t, const std::vector<Word>& args,
                      const Alphabet& alphabet);
// Same as EvalWord; IndexOutOfRange if t is not a well-formed SimRec.
Distribution EvalSimRec(const TermPtr& t, const std::vector<Word>& args,
                        const Alphabet& alphabet);

// Reserved marker symbols of the pairing code. They may not occur in an
// alphabet handed to TupledExpand.
inline constexpr char kSeparator = '#';
inline constexpr char kPad = '$';

// t = kPad^p · u · kSeparator · v with the least p making
// 2|u| + 2|v| + 2 <= |t|^m (for m = 1, p = |u| + |v| + 1). u must be
// marker-free; v may itself be an encoding.
Word CoupleEncode(const Word& u, const Word& v, unsigned m = 1);
Word CoupleFirst(const Word& t, unsigned m = 1);
Word CoupleSecond(const Word& t, unsigned m = 1);

// couple (2-ary), first, second (1-ary) as tier-neutral classical functions.
const std::map<std::string, DetWordFnPtr>& WordDetRegistry();
const DetWordFnPtr& WordDet(const std::string& name);

// Rewrites a SimRec into one Rec over right-nested couple codes, projected
// with first/second. The result is SimRec-free and uses the alphabet
// `alphabet` extended with the two markers.
TermPtr TupledExpand(const TermPtr& simrec, const Alphabet& alphabet);
Alphabet TupledAlphabet(const Alphabet& alphabet);

}  // namespace word
}  // namespace probrec

#endif  // PROBREC_WORD_TERM_HPP_
