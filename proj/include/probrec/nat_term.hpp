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

// Probabilistic recursive functions over the naturals and their exact,
// budgeted evaluator.

#ifndef PROBREC_NAT_TERM_HPP_
#define PROBREC_NAT_TERM_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "probrec/distribution.hpp"

namespace probrec {

struct SourcePos {
  int line = 0;
  int column = 0;
};

namespace nat {

// f(prefix, i + period) = f(prefix, i) for all i >= preperiod.
struct Periodicity {
  uint64_t preperiod = 0;
  uint64_t period = 1;
};

// A classical (deterministic, possibly partial) function embedded by name.
struct DetFnDef {
  std::string name;
  unsigned arity = 0;
  // nullopt means undefined at these arguments. `cap` bounds any internal
  // search the function performs; exceeding it also yields nullopt.
  std::function<std::optional<Nat>(const std::vector<Nat>& args, uint64_t cap)> fn;
  // Optional: eventual periodicity in the last argument once the others are
  // fixed. Only consulted by the closed-form tail evaluator.
  std::function<std::optional<Periodicity>(const std::vector<Nat>& prefix)>
      periodic_in_last;
};

using DetFnPtr = std::shared_ptr<const DetFnDef>;

enum class Kind { kZero, kSucc, kProj, kCoin, kComp, kPrimRec, kMu, kDet };

class Term;
using TermPtr = std::shared_ptr<const Term>;

// Immutable AST node. children: Comp = [f, g1..gn]; PrimRec = [base, step];
// Mu = [body]; leaves have none.
class Term {
 public:
  Kind kind() const { return kind_; }
  unsigned proj_n() const { return n_; }
  unsigned proj_m() const { return m_; }
  const std::vector<TermPtr>& children() const { return children_; }
  const DetFnPtr& det() const { return det_; }
  const SourcePos& pos() const { return pos_; }

  static TermPtr Make(Kind kind, std::vector<TermPtr> children, unsigned n = 0,
                      unsigned m = 0, DetFnPtr det = nullptr, SourcePos pos = {});
  TermPtr WithPos(SourcePos pos) const;

 private:
  Kind kind_ = Kind::kZero;
  unsigned n_ = 0;
  unsigned m_ = 0;
  std::vector<TermPtr> children_;
  DetFnPtr det_;
  SourcePos pos_;
};

TermPtr Zero();
TermPtr Succ();
TermPtr Proj(unsigned n, unsigned m);
TermPtr Coin();
TermPtr Comp(TermPtr f, std::vector<TermPtr> gs);
TermPtr PrimRec(TermPtr base, TermPtr step);
TermPtr Mu(TermPtr body);
TermPtr Det(DetFnPtr def);

struct EvalBudget {
  // Each μ node enumerates y = 0 .. muBound-1.
  uint64_t muBound = 32;
  // Primitive-recursion unrollings and DetFn internal searches beyond this
  // count are treated as divergence.
  uint64_t recUnrollCap = uint64_t{1} << 20;
  // Sums the tail of a μ whose body ignores its search variable exactly when
  // it feeds the last argument of a DetFn with declared periodicity.
  bool closedFormTails = false;
};

// Throws ArityMismatch naming the offending path, e.g. "comp.g[2].mu.body".
unsigned Arity(const TermPtr& t);

// Number of AST nodes.
size_t Size(const TermPtr& t);

// Conservative: false only when the value provably ignores argument
// `index` (1-based).
bool DependsOnArg(const TermPtr& t, unsigned index);

bool StructurallyEqual(const TermPtr& a, const TermPtr& b);

Distribution EvalNat(const TermPtr& t, const std::vector<Nat>& args,
                     const EvalBudget& budget = {});

// 1 − mass(EvalNat(...)).
Prob DeficitBound(const TermPtr& t, const std::vector<Nat>& args,
                  const EvalBudget& budget = {});

// Named terms and classical functions. Lookup of a missing name throws
// UnknownName.
class Registry {
 public:
  void AddTerm(const std::string& name, TermPtr t);
  void AddDet(DetFnPtr def);
  const TermPtr& Term(const std::string& name) const;
  const DetFnPtr& Det(const std::string& name) const;
  bool HasTerm(const std::string& name) const { return terms_.count(name) > 0; }
  bool HasDet(const std::string& name) const { return dets_.count(name) > 0; }
  const std::map<std::string, TermPtr>& terms() const { return terms_; }
  const std::map<std::string, DetFnPtr>& dets() const { return dets_; }

 private:
  std::map<std::string, TermPtr> terms_;
  std::map<std::string, DetFnPtr> dets_;
};

// id, add, rand, h, fShift, i2p as combinators; pair, unpairLeft,
// unpairRight, binaryDigit, mul, pred as DetFn.
const Registry& Stdlib();

// Cantor pairing π(a, b) = (a+b)(a+b+1)/2 + b and its inverse.
Nat CantorPair(const Nat& a, const Nat& b);
std::pair<Nat, Nat> CantorUnpair(const Nat& z);

// Rationals travel through naturals as pair(numerator, denominator) in
// lowest terms.
Nat EncodeRational(const mpq_class& q);
std::optional<mpq_class> DecodeRational(const Nat& code);

// i-th binary digit (0-based, most significant first) of q ∈ [0, 1]. q = 1
// uses the expansion 0.111...; every other q the terminating one.
// nullopt outside [0, 1].
std::optional<unsigned> BinaryDigit(const mpq_class& q, const Nat& i);

}  // namespace nat
}  // namespace probrec

#endif  // PROBREC_NAT_TERM_HPP_
