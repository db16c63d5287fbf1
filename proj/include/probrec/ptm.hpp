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

// Probabilistic Turing machines: one tape, two transition functions each
// taken with probability ½, computation trees addressed by binary strings,
// and the compilation of a machine into a recursive term.

#ifndef PROBREC_PTM_HPP_
#define PROBREC_PTM_HPP_

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "probrec/distribution.hpp"
#include "probrec/nat_term.hpp"

namespace probrec {
namespace ptm {

enum class Move { kLeft, kRight, kStay };

char MoveChar(Move m);
Move ParseMove(char c);

struct Action {
  std::string state;
  char write = 0;
  Move move = Move::kStay;
  friend bool operator==(const Action& a, const Action& b) {
    return a.state == b.state && a.write == b.write && a.move == b.move;
  }
};

struct PTMSpec {
  std::string name;
  std::vector<std::string> states;
  std::string initial;
  std::set<std::string> finals;
  // Tape alphabet in declared order, blank included.
  std::string alphabet;
  char blank = '_';
  std::map<std::pair<std::string, char>, Action> delta0;
  std::map<std::pair<std::string, char>, Action> delta1;

  bool IsFinal(const std::string& q) const { return finals.count(q) > 0; }
  // Tape alphabet without the blank; inputs live here.
  std::string InputAlphabet() const;
  // Throws InvalidMachine unless both tables are total on non-final states
  // and mention only declared states and symbols.
  void Validate() const;
  const Action& Delta(int bit, const std::string& q, char a) const;
};

// Tape left of the head, head symbol, tape right of the head. Canonical:
// no blanks at the far-left end of `left` or the far-right end of `right`.
struct Configuration {
  Word left;
  char head = 0;
  Word right;
  std::string state;

  std::string str() const;
  friend bool operator==(const Configuration& a, const Configuration& b) {
    return a.left == b.left && a.head == b.head && a.right == b.right && a.state == b.state;
  }
  friend bool operator<(const Configuration& a, const Configuration& b) {
    return std::tie(a.state, a.head, a.left, a.right) < std::tie(b.state, b.head, b.left, b.right);
  }
};

Configuration Canonical(Configuration c, char blank);
// ⟨ε, first symbol (blank if none), rest, initial state⟩.
Configuration Initial(const PTMSpec& spec, const Word& input);
// Throws FinalConfiguration when c is final.
Configuration Step(const PTMSpec& spec, const Configuration& c, int bit);
// The output read at a final configuration: the left tape.
Word Output(const Configuration& c);

struct TreeNode {
  std::string id;  // binary string; ε at the root
  Configuration config;
  bool is_leaf = false;
};

// Node order: length first, then numeric on the binary string. Node n ↔ the
// binary expansion of n + 1 without its leading 1.
Nat NodeIndex(const std::string& id);
std::string NodeId(const Nat& index);
bool NodeLess(const std::string& a, const std::string& b);

class ComputationTree {
 public:
  ComputationTree(const PTMSpec& spec, const Word& input, unsigned depth);
  unsigned depth() const { return depth_; }
  // In node order.
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const TreeNode* Find(const std::string& id) const;
  size_t LeafCount() const;

 private:
  unsigned depth_;
  std::vector<TreeNode> nodes_;
  std::map<std::string, size_t> index_;
};

ComputationTree BuildTree(const PTMSpec& spec, const Word& input, unsigned depth);

Prob PtProb(const std::string& id);

enum class Counting { kAllNodes, kLeavesOnly };

// Σ ptProb over nodes within depth d labelled by `config`. kAllNodes counts
// internal nodes too (the definition taken literally); kLeavesOnly counts
// halting nodes only.
Prob ConfigProb(const PTMSpec& spec, const Word& input, const Configuration& config,
                unsigned depth, Counting counting = Counting::kAllNodes);

// Conditional halt/continue probabilities on the depth-d tree. Throws
// NodeNotExplored when the id is deeper than d or not in the tree.
Prob Pt0(const PTMSpec& spec, const Word& input, const std::string& id, unsigned depth);
Prob Pt1(const PTMSpec& spec, const Word& input, const std::string& id, unsigned depth);
// {0 ↦ pt0, 1 ↦ pt1} over naturals.
Distribution Ptc(const PTMSpec& spec, const Word& input, const std::string& id, unsigned depth);

// pt0/pt1 of every node of a tree, in node order, by the product
// definition.
struct PtAnnotation {
  std::string id;
  Prob pt0;
  Prob pt1;
};
std::vector<PtAnnotation> AnnotateTree(const ComputationTree& tree);

// Leaf distribution keyed by node index.
Distribution Cf(const PTMSpec& spec, const Word& input, unsigned depth);

// Σ over leaves within depth d of ptProb, keyed by output word.
Distribution EvalPTM(const PTMSpec& spec, const Word& input, unsigned depth);

// Longest halting path, or nullopt if some path is still running at depth d.
std::optional<uint64_t> MaxSteps(const PTMSpec& spec, const Word& input, unsigned depth);

// {1 ↦ q, 0 ↦ 1 − q}; OutOfRange outside [0, 1].
Distribution I2P(const mpq_class& q);
// binaryDigit ⊙ (id, h): unary, argument is a pair-encoded rational.
nat::TermPtr I2PTerm();

// Bijection Σ* ↔ ℕ: short-lex rank over the given ordered alphabet.
Nat WordToNat(const Word& w, const std::string& alphabet);
Word NatToWord(const Nat& n, const std::string& alphabet);

// The bookkeeping functions of a machine as classical functions:
//   <prefix>.pt1(x, y) = pair-encoded pt1 of node y on input x
//   <prefix>.sp(x, y)  = output code of node y's configuration
// x is coded over InputAlphabet(), outputs over the full tape alphabet.
struct MachineFunctions {
  nat::DetFnPtr pt1;
  nat::DetFnPtr sp;
};
MachineFunctions MakeMachineFunctions(std::shared_ptr<const PTMSpec> spec,
                                      const std::string& prefix);

// sp ⊙ (id, μ(i2p-core ⊙ pt1)): unary over input codes, result is an
// output code.
nat::TermPtr CompileToTerm(const PTMSpec& spec);
nat::TermPtr CompileToTerm(std::shared_ptr<const PTMSpec> spec, const std::string& prefix);

// μ(i2p-core ⊙ pt1), the leaf distribution as a term.
nat::TermPtr CfTerm(std::shared_ptr<const PTMSpec> spec, const std::string& prefix);

// Smallest μ bound whose enumeration covers every node of depth <= d.
uint64_t MuBoundForDepth(unsigned depth);

// Word-keyed distribution re-keyed through WordToNat.
Distribution EncodeOutputs(const Distribution& words, const std::string& alphabet);

// JSON machine description; throws InvalidMachine / ParseError.
PTMSpec ParseMachineJson(const std::string& text);
std::string MachineToJson(const PTMSpec& spec);

}  // namespace ptm
}  // namespace probrec

#endif  // PROBREC_PTM_HPP_
