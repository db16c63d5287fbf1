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

#include "probrec/ptm.hpp"

#include <algorithm>
#include <mutex>

#include "json.hpp"

namespace probrec {
namespace ptm {

char MoveChar(Move m) {
  switch (m) {
    case Move::kLeft:
      return 'L';
    case Move::kRight:
      return 'R';
    case Move::kStay:
      return 'S';
  }
  return 'S';
}

Move ParseMove(char c) {
  switch (c) {
    case 'L':
      return Move::kLeft;
    case 'R':
      return Move::kRight;
    case 'S':
      return Move::kStay;
  }
  throw InvalidMachine(std::string("head move must be L, R or S, got '") + c + "'");
}

std::string PTMSpec::InputAlphabet() const {
  std::string out;
  for (char c : alphabet) {
    if (c != blank) out.push_back(c);
  }
  return out;
}

void PTMSpec::Validate() const {
  if (alphabet.find(blank) == std::string::npos) {
    throw InvalidMachine("blank symbol not in tape alphabet");
  }
  std::set<std::string> declared(states.begin(), states.end());
  if (!declared.count(initial)) throw InvalidMachine("initial state '" + initial + "' not declared");
  for (const auto& f : finals) {
    if (!declared.count(f)) throw InvalidMachine("final state '" + f + "' not declared");
  }
  for (int bit = 0; bit < 2; ++bit) {
    const auto& table = bit == 0 ? delta0 : delta1;
    for (const auto& [key, act] : table) {
      if (!declared.count(key.first) || !declared.count(act.state)) {
        throw InvalidMachine("delta" + std::to_string(bit) + " mentions an undeclared state");
      }
      if (alphabet.find(key.second) == std::string::npos ||
          alphabet.find(act.write) == std::string::npos) {
        throw InvalidMachine("delta" + std::to_string(bit) + " mentions a symbol outside the alphabet");
      }
    }
    for (const auto& q : states) {
      if (IsFinal(q)) continue;
      for (char a : alphabet) {
        if (!table.count({q, a})) {
          throw InvalidMachine("delta" + std::to_string(bit) + " undefined on (" + q + ", " +
                               std::string(1, a) + ")");
        }
      }
    }
  }
}

const Action& PTMSpec::Delta(int bit, const std::string& q, char a) const {
  const auto& table = bit == 0 ? delta0 : delta1;
  auto it = table.find({q, a});
  if (it == table.end()) {
    throw InvalidMachine("no transition for (" + q + ", " + std::string(1, a) + ")");
  }
  return it->second;
}

std::string Configuration::str() const {
  return "<" + left + ", " + std::string(1, head) + ", " + right + ", " + state + ">";
}

Configuration Canonical(Configuration c, char blank) {
  size_t l = c.left.find_first_not_of(blank);
  c.left = l == std::string::npos ? Word() : c.left.substr(l);
  size_t r = c.right.find_last_not_of(blank);
  c.right = r == std::string::npos ? Word() : c.right.substr(0, r + 1);
  return c;
}

Configuration Initial(const PTMSpec& spec, const Word& input) {
  Configuration c;
  c.head = input.empty() ? spec.blank : input[0];
  c.right = input.empty() ? Word() : input.substr(1);
  c.state = spec.initial;
  return Canonical(std::move(c), spec.blank);
}

Configuration Step(const PTMSpec& spec, const Configuration& c, int bit) {
  if (spec.IsFinal(c.state)) throw FinalConfiguration("step from final state " + c.state);
  const Action& act = spec.Delta(bit, c.state, c.head);
  Configuration n = c;
  n.state = act.state;
  switch (act.move) {
    case Move::kStay:
      n.head = act.write;
      break;
    case Move::kRight:
      n.left.push_back(act.write);
      n.head = n.right.empty() ? spec.blank : n.right[0];
      if (!n.right.empty()) n.right.erase(0, 1);
      break;
    case Move::kLeft:
      n.right.insert(n.right.begin(), act.write);
      n.head = n.left.empty() ? spec.blank : n.left.back();
      if (!n.left.empty()) n.left.pop_back();
      break;
  }
  return Canonical(std::move(n), spec.blank);
}

Word Output(const Configuration& c) { return c.left; }

Nat NodeIndex(const std::string& id) {
  Nat n(std::string("1") + id, 2);
  return n - 1;
}

std::string NodeId(const Nat& index) {
  Nat n = index + 1;
  return n.get_str(2).substr(1);
}

bool NodeLess(const std::string& a, const std::string& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

ComputationTree::ComputationTree(const PTMSpec& spec, const Word& input, unsigned depth)
    : depth_(depth) {
  // Breadth-first from ordered parents keeps node order.
  std::vector<TreeNode> layer;
  Configuration root = Initial(spec, input);
  layer.push_back({"", root, spec.IsFinal(root.state)});
  for (unsigned d = 0;; ++d) {
    std::vector<TreeNode> next;
    for (auto& node : layer) {
      if (!node.is_leaf && d < depth) {
        for (int bit = 0; bit < 2; ++bit) {
          Configuration c = Step(spec, node.config, bit);
          bool leaf = spec.IsFinal(c.state);
          next.push_back({node.id + static_cast<char>('0' + bit), std::move(c), leaf});
        }
      }
      index_[node.id] = nodes_.size();
      nodes_.push_back(std::move(node));
    }
    if (next.empty()) break;
    layer = std::move(next);
  }
}

const TreeNode* ComputationTree::Find(const std::string& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &nodes_[it->second];
}

size_t ComputationTree::LeafCount() const {
  return static_cast<size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf; }));
}

ComputationTree BuildTree(const PTMSpec& spec, const Word& input, unsigned depth) {
  return ComputationTree(spec, input, depth);
}

Prob PtProb(const std::string& id) { return Prob::Dyadic(id.size()); }

Prob ConfigProb(const PTMSpec& spec, const Word& input, const Configuration& config,
                unsigned depth, Counting counting) {
  ComputationTree tree(spec, input, depth);
  Configuration target = Canonical(config, spec.blank);
  mpq_class sum = 0;
  for (const auto& node : tree.nodes()) {
    if (counting == Counting::kLeavesOnly && !node.is_leaf) continue;
    if (node.config == target) sum += PtProb(node.id).value();
  }
  return Prob(sum);
}

std::vector<PtAnnotation> AnnotateTree(const ComputationTree& tree) {
  std::vector<PtAnnotation> out;
  mpq_class survive = 1;  // Π_{k < y} pt1(k)
  for (const auto& node : tree.nodes()) {
    if (node.is_leaf) {
      mpq_class p0 = PtProb(node.id).value() / survive;
      out.push_back({node.id, Prob(p0), Prob(mpq_class(1 - p0))});
    } else {
      out.push_back({node.id, Prob::Zero(), Prob::One()});
    }
    survive *= out.back().pt1.value();
  }
  return out;
}

namespace {

PtAnnotation AnnotationOf(const PTMSpec& spec, const Word& input, const std::string& id,
                          unsigned depth) {
  if (id.size() > depth) {
    throw NodeNotExplored("node " + (id.empty() ? std::string("ε") : id) + " is deeper than " +
                          std::to_string(depth));
  }
  ComputationTree tree(spec, input, depth);
  if (!tree.Find(id)) throw NodeNotExplored("node " + id + " is not in the computation tree");
  for (auto& a : AnnotateTree(tree)) {
    if (a.id == id) return a;
  }
  throw NodeNotExplored("node " + id);
}

}  // namespace

Prob Pt0(const PTMSpec& spec, const Word& input, const std::string& id, unsigned depth) {
  return AnnotationOf(spec, input, id, depth).pt0;
}

Prob Pt1(const PTMSpec& spec, const Word& input, const std::string& id, unsigned depth) {
  return AnnotationOf(spec, input, id, depth).pt1;
}

Distribution Ptc(const PTMSpec& spec, const Word& input, const std::string& id, unsigned depth) {
  PtAnnotation a = AnnotationOf(spec, input, id, depth);
  DistributionBuilder b(KeySpace::kNat);
  b.Add(NatKey(0), a.pt0.value());
  b.Add(NatKey(1), a.pt1.value());
  return b.Build();
}

Distribution Cf(const PTMSpec& spec, const Word& input, unsigned depth) {
  ComputationTree tree(spec, input, depth);
  DistributionBuilder b(KeySpace::kNat);
  for (const auto& node : tree.nodes()) {
    if (node.is_leaf) b.Add(Key(NodeIndex(node.id)), PtProb(node.id).value());
  }
  return b.Build();
}

Distribution EvalPTM(const PTMSpec& spec, const Word& input, unsigned depth) {
  DistributionBuilder out(KeySpace::kWord);
  std::map<Configuration, mpq_class> layer{{Initial(spec, input), mpq_class(1)}};
  for (unsigned t = 0; !layer.empty(); ++t) {
    std::map<Configuration, mpq_class> next;
    for (const auto& [c, p] : layer) {
      if (spec.IsFinal(c.state)) {
        out.Add(Key(Output(c)), p);
      } else if (t < depth) {
        next[Step(spec, c, 0)] += p / 2;
        next[Step(spec, c, 1)] += p / 2;
      }
    }
    layer = std::move(next);
  }
  return out.Build();
}

std::optional<uint64_t> MaxSteps(const PTMSpec& spec, const Word& input, unsigned depth) {
  std::set<Configuration> layer{Initial(spec, input)};
  uint64_t longest = 0;
  for (unsigned t = 0; !layer.empty(); ++t) {
    std::set<Configuration> next;
    for (const auto& c : layer) {
      if (spec.IsFinal(c.state)) {
        longest = t;
      } else {
        if (t == depth) return std::nullopt;
        next.insert(Step(spec, c, 0));
        next.insert(Step(spec, c, 1));
      }
    }
    layer = std::move(next);
  }
  return longest;
}

Distribution I2P(const mpq_class& q) {
  if (sgn(q) < 0 || q > 1) throw OutOfRange("i2p needs 0 <= q <= 1, got " + RationalString(q));
  DistributionBuilder b(KeySpace::kNat);
  b.Add(NatKey(1), q);
  b.Add(NatKey(0), 1 - q);
  return b.Build();
}

nat::TermPtr I2PTerm() { return nat::Stdlib().Term("i2p"); }

Nat WordToNat(const Word& w, const std::string& alphabet) {
  Nat n = 0;
  Nat k(static_cast<unsigned long>(alphabet.size()));
  for (char c : w) {
    auto i = alphabet.find(c);
    if (i == std::string::npos) {
      throw AlphabetMismatch(std::string("symbol '") + c + "' not in \"" + alphabet + "\"");
    }
    n = n * k + Nat(static_cast<unsigned long>(i + 1));
  }
  return n;
}

Word NatToWord(const Nat& value, const std::string& alphabet) {
  Word out;
  Nat n = value;
  Nat k(static_cast<unsigned long>(alphabet.size()));
  while (n > 0) {
    n -= 1;
    Nat digit = n % k;
    out.push_back(alphabet[digit.get_ui()]);
    n /= k;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

namespace {

// Per-input cache of the annotated tree, deepened on demand.
class MachineTables {
 public:
  explicit MachineTables(std::shared_ptr<const PTMSpec> spec) : spec_(std::move(spec)) {}

  struct NodeInfo {
    Prob pt1;
    Word output;
  };

  // nullopt when the node does not exist (below a leaf).
  std::optional<NodeInfo> Lookup(const Word& input, const std::string& id) {
    std::lock_guard<std::mutex> lock(mu_);
    Table& table = tables_[input];
    if (!table.built || table.depth < id.size()) {
      unsigned depth = std::max<unsigned>(static_cast<unsigned>(id.size()), table.depth);
      ComputationTree tree(*spec_, input, depth);
      auto notes = AnnotateTree(tree);
      table.nodes.clear();
      for (size_t i = 0; i < notes.size(); ++i) {
        table.nodes.emplace(notes[i].id, NodeInfo{notes[i].pt1, Output(tree.nodes()[i].config)});
      }
      table.depth = depth;
      table.built = true;
    }
    auto it = table.nodes.find(id);
    if (it == table.nodes.end()) return std::nullopt;
    return it->second;
  }

 private:
  struct Table {
    bool built = false;
    unsigned depth = 0;
    std::map<std::string, NodeInfo> nodes;
  };
  std::shared_ptr<const PTMSpec> spec_;
  std::mutex mu_;
  std::map<Word, Table> tables_;
};

// Deepest node a classical function will explore (2^26 nodes).
constexpr unsigned kMaxExploredDepth = 25;

}  // namespace

MachineFunctions MakeMachineFunctions(std::shared_ptr<const PTMSpec> spec,
                                      const std::string& prefix) {
  spec->Validate();
  auto tables = std::make_shared<MachineTables>(spec);
  std::string input_alphabet = spec->InputAlphabet();
  std::string tape_alphabet = spec->alphabet;

  auto pt1 = std::make_shared<nat::DetFnDef>();
  pt1->name = prefix + ".pt1";
  pt1->arity = 2;
  pt1->fn = [tables, input_alphabet](const std::vector<Nat>& a,
                                      uint64_t) -> std::optional<Nat> {
    std::string id = NodeId(a[1]);
    if (id.size() > kMaxExploredDepth) return std::nullopt;
    auto info = tables->Lookup(NatToWord(a[0], input_alphabet), id);
    // Nodes below a leaf are not leaves: pt1 = 1.
    return nat::EncodeRational(info ? info->pt1.value() : mpq_class(1));
  };

  auto sp = std::make_shared<nat::DetFnDef>();
  sp->name = prefix + ".sp";
  sp->arity = 2;
  sp->fn = [tables, input_alphabet, tape_alphabet](const std::vector<Nat>& a,
                                                   uint64_t) -> std::optional<Nat> {
    std::string id = NodeId(a[1]);
    if (id.size() > kMaxExploredDepth) return std::nullopt;
    auto info = tables->Lookup(NatToWord(a[0], input_alphabet), id);
    if (!info) return std::nullopt;
    return WordToNat(info->output, tape_alphabet);
  };
  return {pt1, sp};
}

nat::TermPtr CfTerm(std::shared_ptr<const PTMSpec> spec, const std::string& prefix) {
  MachineFunctions fns = MakeMachineFunctions(std::move(spec), prefix);
  return nat::Mu(nat::Comp(I2PTerm(), {nat::Det(fns.pt1)}));
}

nat::TermPtr CompileToTerm(std::shared_ptr<const PTMSpec> spec, const std::string& prefix) {
  MachineFunctions fns = MakeMachineFunctions(spec, prefix);
  nat::TermPtr cf = nat::Mu(nat::Comp(I2PTerm(), {nat::Det(fns.pt1)}));
  return nat::Comp(nat::Det(fns.sp), {nat::Proj(1, 1), cf});
}

nat::TermPtr CompileToTerm(const PTMSpec& spec) {
  return CompileToTerm(std::make_shared<const PTMSpec>(spec), spec.name.empty() ? "m" : spec.name);
}

uint64_t MuBoundForDepth(unsigned depth) { return (uint64_t{1} << (depth + 1)) - 1; }

Distribution EncodeOutputs(const Distribution& words, const std::string& alphabet) {
  DistributionBuilder b(KeySpace::kNat);
  for (const auto& [k, p] : words.entries()) b.Add(Key(WordToNat(AsWord(k), alphabet)), p.value());
  return b.Build();
}

namespace {

char SingleChar(const std::string& s, const std::string& what) {
  if (s.size() != 1) throw InvalidMachine(what + " must be a single character, got \"" + s + "\"");
  return s[0];
}

Action ParseAction(const std::string& text) {
  // "state,symbol,move"; the symbol may itself be ','.
  auto first = text.find(',');
  if (first == std::string::npos || text.size() < first + 4 || text[text.size() - 2] != ',') {
    throw InvalidMachine("transition target must be \"state,symbol,move\", got \"" + text + "\"");
  }
  Action a;
  a.state = text.substr(0, first);
  a.write = SingleChar(text.substr(first + 1, text.size() - 2 - (first + 1)), "written symbol");
  a.move = ParseMove(text.back());
  return a;
}

std::pair<std::string, char> ParseKey(const std::string& text) {
  auto comma = text.find(',');
  if (comma == std::string::npos) {
    throw InvalidMachine("transition key must be \"state,symbol\", got \"" + text + "\"");
  }
  return {text.substr(0, comma), SingleChar(text.substr(comma + 1), "read symbol")};
}

}  // namespace

PTMSpec ParseMachineJson(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(1, static_cast<int>(e.byte), std::string("invalid machine JSON: ") + e.what(), "");
  }
  PTMSpec spec;
  try {
    spec.name = j.value("name", std::string("machine"));
    spec.alphabet = j.at("alphabet").get<std::string>();
    spec.blank = SingleChar(j.value("blank", std::string("_")), "blank");
    spec.states = j.at("states").get<std::vector<std::string>>();
    spec.initial = j.at("initial").get<std::string>();
    for (const auto& f : j.at("final")) spec.finals.insert(f.get<std::string>());
    for (int bit = 0; bit < 2; ++bit) {
      auto& table = bit == 0 ? spec.delta0 : spec.delta1;
      for (const auto& [key, value] : j.at(bit == 0 ? "delta0" : "delta1").items()) {
        table[ParseKey(key)] = ParseAction(value.get<std::string>());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidMachine(std::string("malformed machine description: ") + e.what());
  }
  spec.Validate();
  return spec;
}

std::string MachineToJson(const PTMSpec& spec) {
  nlohmann::ordered_json j;
  j["name"] = spec.name;
  j["alphabet"] = spec.alphabet;
  j["blank"] = std::string(1, spec.blank);
  j["states"] = spec.states;
  j["initial"] = spec.initial;
  j["final"] = std::vector<std::string>(spec.finals.begin(), spec.finals.end());
  for (int bit = 0; bit < 2; ++bit) {
    nlohmann::ordered_json table = nlohmann::ordered_json::object();
    for (const auto& [key, act] : bit == 0 ? spec.delta0 : spec.delta1) {
      table[key.first + "," + std::string(1, key.second)] =
          act.state + "," + std::string(1, act.write) + "," + std::string(1, MoveChar(act.move));
    }
    j[bit == 0 ? "delta0" : "delta1"] = table;
  }
  return j.dump(2);
}

}  // namespace ptm
}  // namespace probrec
