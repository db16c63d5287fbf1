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

// Ramified tiering of word terms as difference constraints over ℕ.
//
// Every sort position of every term occurrence gets a variable. Rules emit
// equalities (base functions, projections, composition chaining, case
// results) and strict inequalities (recurrence argument above result).
// Satisfiability is a longest-path problem: a positive cycle is a proof of
// untypability, otherwise the longest distances are the least solution.

#ifndef PROBREC_TIERING_HPP_
#define PROBREC_TIERING_HPP_

#include <optional>
#include <string>
#include <vector>

#include "probrec/word_term.hpp"

namespace probrec {
namespace tier {

struct TierJudgment {
  std::vector<unsigned> args;
  unsigned result = 0;

  // "1,0->0"; a nullary judgment is "->k".
  std::string str() const;
  static TierJudgment Parse(const std::string& text);
  TierJudgment Shifted(unsigned by) const;
  friend bool operator==(const TierJudgment& a, const TierJudgment& b) {
    return a.args == b.args && a.result == b.result;
  }
};

// value(to) >= value(from) + weight.
struct Edge {
  int from = 0;
  int to = 0;
  int weight = 0;
  std::string origin;
};

struct TierConstraintSet {
  std::vector<std::string> variables;  // human-readable sort positions
  std::vector<int> arg_vars;
  int result_var = -1;
  // lhs = rhs + offset
  struct Equality {
    int lhs;
    int rhs;
    int offset;
    std::string origin;
  };
  // high > low
  struct Strict {
    int high;
    int low;
    std::string origin;
  };
  // high >= low; only produced by the strict case reading
  struct Weak {
    int high;
    int low;
    std::string origin;
  };
  std::vector<Equality> equalities;
  std::vector<Strict> stricts;
  std::vector<Weak> weak;

  std::vector<Edge> Edges() const;
  int AddVariable(std::string name);
};

struct Options {
  // Case additionally requires scrutinee tier >= result tier. Off by
  // default: the rule as stated relates the two in no way.
  bool strict_case = false;
};

TierConstraintSet CollectConstraints(const word::TermPtr& t, const Options& options = {});

struct SolveResult {
  bool typable = false;
  TierJudgment judgment;          // least solution, when typable
  std::vector<int> assignment;    // per variable, when typable
  std::vector<std::string> cycle; // constraint origins along a positive cycle
  std::string Explain() const;
};

SolveResult SolveTiers(const TierConstraintSet& c);

// Collect then solve.
SolveResult InferTiers(const word::TermPtr& t, const Options& options = {});

struct CheckResult {
  bool valid = false;
  // Empty when valid; otherwise the first violated premise followed by the
  // chain of constraints that forces it.
  std::vector<std::string> diagnostics;
};

// Throws ArityMismatch when the judgment's length differs from the arity.
CheckResult CheckJudgment(const word::TermPtr& t, const TierJudgment& j,
                          const Options& options = {});

}  // namespace tier
}  // namespace probrec

#endif  // PROBREC_TIERING_HPP_
