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

#include "probrec/prm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

#include "probrec/tiering.hpp"

namespace probrec {
namespace prm {

std::string Instruction::str() const {
  auto reg = [](unsigned r) { return "r" + std::to_string(r); };
  auto sym = [](char c) {
    bool plain = std::isgraph(static_cast<unsigned char>(c)) && c != '#' && c != '\'' && c != '"';
    return plain ? std::string(1, c) : "'" + std::string(1, c) + "'";
  };
  switch (op) {
    case Op::kEps:
      return "eps " + reg(src) + " " + reg(dst);
    case Op::kCons:
      return "cons " + sym(symbol) + " " + reg(src) + " " + reg(dst);
    case Op::kPred:
      return "pred " + sym(symbol) + " " + reg(src) + " " + reg(dst);
    case Op::kJump: {
      std::string s = "jump " + reg(src) + " ->";
      for (size_t t : targets) s += " " + std::to_string(t);
      return s;
    }
    case Op::kJumpRand:
      return "jrand " + std::to_string(target);
  }
  return "";
}

Instruction EpsMove(unsigned src, unsigned dst) {
  Instruction i;
  i.op = Op::kEps;
  i.src = src;
  i.dst = dst;
  return i;
}

Instruction ConsA(char a, unsigned src, unsigned dst) {
  Instruction i;
  i.op = Op::kCons;
  i.symbol = a;
  i.src = src;
  i.dst = dst;
  return i;
}

Instruction PredA(char a, unsigned src, unsigned dst) {
  Instruction i = ConsA(a, src, dst);
  i.op = Op::kPred;
  return i;
}

Instruction Jump(unsigned src, std::vector<size_t> targets) {
  Instruction i;
  i.op = Op::kJump;
  i.src = src;
  i.targets = std::move(targets);
  return i;
}

Instruction JumpRand(size_t target) {
  Instruction i;
  i.op = Op::kJumpRand;
  i.target = target;
  return i;
}

void PRMSpec::Validate() const {
  if (registers == 0) throw InvalidMachine("a register machine needs at least one register");
  std::set<char> seen;
  for (char c : alphabet) {
    if (!seen.insert(c).second) throw InvalidMachine("alphabet lists a symbol twice");
  }
  auto where = [](size_t pc) { return " at instruction " + std::to_string(pc); };
  auto check_target = [&](size_t t, size_t pc) {
    if (t < 1 || t > halt()) throw InvalidMachine("jump target " + std::to_string(t) + where(pc));
  };
  for (size_t pc = 1; pc <= program.size(); ++pc) {
    const Instruction& i = program[pc - 1];
    if (i.op != Op::kJumpRand && i.src >= registers) {
      throw InvalidMachine("register r" + std::to_string(i.src) + " out of range" + where(pc));
    }
    if ((i.op == Op::kEps || i.op == Op::kCons || i.op == Op::kPred) && i.dst >= registers) {
      throw InvalidMachine("register r" + std::to_string(i.dst) + " out of range" + where(pc));
    }
    if ((i.op == Op::kCons || i.op == Op::kPred) && alphabet.find(i.symbol) == std::string::npos) {
      throw InvalidMachine(std::string("symbol '") + i.symbol + "' not in alphabet" + where(pc));
    }
    if (i.op == Op::kJump) {
      if (i.targets.size() != alphabet.size()) {
        throw InvalidMachine("jump needs one target per alphabet symbol" + where(pc));
      }
      for (size_t t : i.targets) check_target(t, pc);
    }
    if (i.op == Op::kJumpRand) check_target(i.target, pc);
  }
}

std::string PRMConfiguration::str() const {
  std::string s = "<";
  for (const auto& r : regs) s += "\"" + r + "\", ";
  return s + std::to_string(pc) + ">";
}

PRMConfiguration Initial(const PRMSpec& spec, const std::vector<Word>& inputs) {
  if (inputs.size() > spec.registers) {
    throw IndexOutOfRange(std::to_string(inputs.size()) + " inputs for " +
                          std::to_string(spec.registers) + " registers");
  }
  PRMConfiguration c;
  c.regs.assign(spec.registers, Word());
  std::copy(inputs.begin(), inputs.end(), c.regs.begin());
  return c;
}

bool IsFinal(const PRMSpec& spec, const PRMConfiguration& c) { return c.pc == spec.halt(); }

PRMConfiguration StepWithCoin(const PRMSpec& spec, const PRMConfiguration& c, int bit) {
  if (IsFinal(spec, c)) throw FinalConfiguration("step from final configuration " + c.str());
  const Instruction& i = spec.program.at(c.pc - 1);
  PRMConfiguration n = c;
  n.pc = c.pc + 1;
  switch (i.op) {
    case Op::kEps:
      n.regs[i.dst] = c.regs[i.src];
      break;
    case Op::kCons:
      n.regs[i.dst] = i.symbol + c.regs[i.src];
      break;
    case Op::kPred: {
      const Word& w = c.regs[i.src];
      n.regs[i.dst] = !w.empty() && w[0] == i.symbol ? w.substr(1) : w;
      break;
    }
    case Op::kJump: {
      const Word& w = c.regs[i.src];
      if (w.empty()) break;
      size_t idx = spec.alphabet.find(w[0]);
      if (idx == std::string::npos) {
        throw AlphabetMismatch(std::string("register holds symbol '") + w[0] +
                               "' outside the alphabet");
      }
      n.pc = i.targets[idx];
      n.regs[i.src] = w.substr(1);
      break;
    }
    case Op::kJumpRand:
      if (bit == 0) n.pc = i.target;
      break;
  }
  return n;
}

std::vector<Successor> StepPRM(const PRMSpec& spec, const PRMConfiguration& c) {
  if (IsFinal(spec, c)) throw FinalConfiguration("step from final configuration " + c.str());
  if (spec.program[c.pc - 1].op != Op::kJumpRand) {
    return {{StepWithCoin(spec, c, 0), Prob::One()}};
  }
  Prob half(1, 2);
  return {{StepWithCoin(spec, c, 0), half}, {StepWithCoin(spec, c, 1), half}};
}

Distribution EvalPRM(const PRMSpec& spec, const std::vector<Word>& inputs, unsigned depth,
                     const Reader& read) {
  DistributionBuilder out(KeySpace::kWord);
  std::map<PRMConfiguration, mpq_class> layer{{Initial(spec, inputs), mpq_class(1)}};
  for (unsigned t = 0; !layer.empty(); ++t) {
    std::map<PRMConfiguration, mpq_class> next;
    for (const auto& [c, p] : layer) {
      if (IsFinal(spec, c)) {
        out.Add(Key(read(c)), p);
      } else if (t < depth) {
        for (auto& s : StepPRM(spec, c)) next[s.config] += p * s.p.value();
      }
    }
    layer = std::move(next);
  }
  return out.Build();
}

Distribution EvalPRM(const PRMSpec& spec, const std::vector<Word>& inputs, unsigned depth,
                     unsigned out_reg) {
  if (out_reg >= spec.registers) {
    throw IndexOutOfRange("output register r" + std::to_string(out_reg) + " does not exist");
  }
  return EvalPRM(spec, inputs, depth, [out_reg](const PRMConfiguration& c) { return c.regs[out_reg]; });
}

std::string StepCount::str() const {
  return steps ? std::to_string(*steps) : "Unbounded(" + std::to_string(depth) + ")";
}

StepCount MaxSteps(const PRMSpec& spec, const std::vector<Word>& inputs, unsigned depth) {
  StepCount result;
  result.depth = depth;
  std::set<PRMConfiguration> layer{Initial(spec, inputs)};
  bool all_halted = true;
  for (unsigned t = 0; !layer.empty(); ++t) {
    std::set<PRMConfiguration> next;
    for (const auto& c : layer) {
      if (IsFinal(spec, c)) {
        result.longest_halting = t;
      } else if (t == depth) {
        all_halted = false;
      } else {
        for (auto& s : StepPRM(spec, c)) next.insert(std::move(s.config));
      }
    }
    layer = std::move(next);
  }
  if (all_halted) result.steps = result.longest_halting;
  return result;
}

// ---------------------------------------------------------------------------
// Program text.

namespace {

struct Token {
  std::string text;
  int column = 0;
  bool quoted = false;
};

std::vector<Token> Tokenize(const std::string& line, int line_no) {
  std::vector<Token> out;
  size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '#') {
      break;
    } else if (c == '\'' || c == '"') {
      size_t close = line.find(c, i + 1);
      if (close == std::string::npos) {
        throw ParseError(line_no, static_cast<int>(i + 1), "unterminated quote", std::string(1, c));
      }
      out.push_back({line.substr(i + 1, close - i - 1), static_cast<int>(i + 1), true});
      i = close + 1;
    } else {
      size_t j = i;
      while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])) && line[j] != '#') {
        ++j;
      }
      out.push_back({line.substr(i, j - i), static_cast<int>(i + 1), false});
      i = j;
    }
  }
  return out;
}

class LineParser {
 public:
  LineParser(std::vector<Token> tokens, int line, size_t end_column)
      : tokens_(std::move(tokens)), line_(line), end_column_(static_cast<int>(end_column)) {}

  bool Done() const { return pos_ == tokens_.size(); }

  [[noreturn]] void Fail(const std::string& message, const std::string& expected) const {
    int column = pos_ < tokens_.size() ? tokens_[pos_].column : end_column_;
    throw ParseError(line_, column, message, expected);
  }

  const Token& Next(const std::string& expected) {
    if (Done()) Fail("unexpected end of line", expected);
    return tokens_[pos_++];
  }

  unsigned Register() {
    const Token& t = Next("register (r0, r1, ...)");
    if (t.quoted || t.text.size() < 2 || t.text[0] != 'r' ||
        !std::all_of(t.text.begin() + 1, t.text.end(), ::isdigit)) {
      --pos_;
      Fail("expected a register, got '" + t.text + "'", "register (r0, r1, ...)");
    }
    return static_cast<unsigned>(std::stoul(t.text.substr(1)));
  }

  size_t Number(const std::string& what) {
    const Token& t = Next(what);
    if (t.quoted || t.text.empty() || !std::all_of(t.text.begin(), t.text.end(), ::isdigit)) {
      --pos_;
      Fail("expected " + what + ", got '" + t.text + "'", what);
    }
    return std::stoul(t.text);
  }

  char Symbol() {
    const Token& t = Next("symbol");
    if (t.text.size() != 1) {
      --pos_;
      Fail("expected a single symbol, got '" + t.text + "'", "symbol");
    }
    return t.text[0];
  }

  void Expect(const std::string& word) {
    const Token& t = Next("'" + word + "'");
    if (t.quoted || t.text != word) {
      --pos_;
      Fail("expected '" + word + "', got '" + t.text + "'", "'" + word + "'");
    }
  }

  void End() {
    if (!Done()) Fail("trailing input '" + tokens_[pos_].text + "'", "end of line");
  }

 private:
  std::vector<Token> tokens_;
  size_t pos_ = 0;
  int line_;
  int end_column_;
};

}  // namespace

PRMSpec ParseProgram(const std::string& text) {
  PRMSpec spec;
  spec.alphabet = "01";
  std::optional<unsigned> registers;
  unsigned max_reg = 0;
  std::istringstream in(text);
  std::string line;
  const std::string kInstr = "eps, cons, pred, jump, jrand, alphabet or registers";
  for (int line_no = 1; std::getline(in, line); ++line_no) {
    LineParser p(Tokenize(line, line_no), line_no, line.size() + 1);
    if (p.Done()) continue;
    const Token op = p.Next(kInstr);
    if (op.quoted) p.Fail("expected an instruction", kInstr);
    if (op.text == "alphabet") {
      if (!spec.program.empty()) p.Fail("alphabet must precede the instructions", "instruction");
      const Token& a = p.Next("quoted alphabet");
      spec.alphabet = a.text;
      p.End();
      continue;
    }
    if (op.text == "registers") {
      registers = static_cast<unsigned>(p.Number("register count"));
      p.End();
      continue;
    }
    Instruction ins;
    if (op.text == "eps") {
      unsigned s = p.Register();
      ins = EpsMove(s, p.Register());
    } else if (op.text == "cons" || op.text == "pred") {
      char a = p.Symbol();
      unsigned s = p.Register();
      unsigned d = p.Register();
      ins = op.text == "cons" ? ConsA(a, s, d) : PredA(a, s, d);
    } else if (op.text == "jump") {
      unsigned s = p.Register();
      p.Expect("->");
      std::vector<size_t> targets;
      while (!p.Done()) targets.push_back(p.Number("instruction index"));
      ins = Jump(s, std::move(targets));
    } else if (op.text == "jrand") {
      ins = JumpRand(p.Number("instruction index"));
    } else {
      throw ParseError(line_no, op.column, "unknown instruction '" + op.text + "'", kInstr);
    }
    p.End();
    if (ins.op != Op::kJumpRand) max_reg = std::max(max_reg, ins.src);
    if (ins.op == Op::kEps || ins.op == Op::kCons || ins.op == Op::kPred) {
      max_reg = std::max(max_reg, ins.dst);
    }
    spec.program.push_back(std::move(ins));
  }
  spec.registers = registers.value_or(max_reg + 1);
  spec.Validate();
  return spec;
}

std::string FormatProgram(const PRMSpec& spec) {
  std::string out = "alphabet \"" + spec.alphabet + "\"\nregisters " +
                    std::to_string(spec.registers) + "\n";
  for (const auto& i : spec.program) out += i.str() + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Assembly with symbolic labels.

namespace {

class Assembler {
 public:
  Assembler(std::string alphabet, unsigned scratch)
      : alphabet_(std::move(alphabet)), scratch_(scratch), halt_(NewLabel()) {}

  int halt() const { return halt_; }
  const std::string& alphabet() const { return alphabet_; }

  int NewLabel() {
    labels_.push_back(std::nullopt);
    return static_cast<int>(labels_.size() - 1);
  }
  void Bind(int label) { labels_[label] = code_.size() + 1; }
  bool Bound(int label) const { return labels_[label].has_value(); }

  void Emit(Instruction i) { code_.push_back({std::move(i), {}, -1}); }
  void JumpTo(unsigned src, std::vector<int> targets) {
    code_.push_back({Jump(src, {}), std::move(targets), -1});
  }
  void JumpRandTo(int label) { code_.push_back({JumpRand(0), {}, label}); }
  // Unconditional transfer: push a symbol on the scratch register and pop it
  // again through a jump whose targets all agree. Leaves scratch unchanged.
  void Goto(int label) {
    Emit(ConsA(alphabet_[0], scratch_, scratch_));
    JumpTo(scratch_, std::vector<int>(alphabet_.size(), label));
  }

  size_t Resolve(int label) const {
    if (label == halt_) return code_.size() + 1;
    if (!labels_[label]) throw InvalidMachine("internal: unbound label");
    return *labels_[label];
  }

  PRMSpec Finish(unsigned registers) const {
    PRMSpec spec;
    spec.alphabet = alphabet_;
    spec.registers = registers;
    for (const auto& p : code_) {
      Instruction i = p.ins;
      if (i.op == Op::kJump) {
        for (int l : p.jump_labels) i.targets.push_back(Resolve(l));
      }
      if (i.op == Op::kJumpRand) i.target = Resolve(p.jrand_label);
      spec.program.push_back(std::move(i));
    }
    spec.Validate();
    return spec;
  }

 private:
  struct Pending {
    Instruction ins;
    std::vector<int> jump_labels;
    int jrand_label;
  };
  std::string alphabet_;
  unsigned scratch_;
  std::vector<std::optional<size_t>> labels_;
  std::vector<Pending> code_;
  int halt_;
};

}  // namespace

// ---------------------------------------------------------------------------
// PTM reduction.

Word PtmReduction::Decode(const PRMConfiguration& c) const {
  Word left(c.regs[0].rbegin(), c.regs[0].rend());
  size_t first = left.find_first_not_of(blank);
  return first == std::string::npos ? Word() : left.substr(first);
}

namespace {

constexpr unsigned kLeft = 0;
constexpr unsigned kRight = 1;
constexpr unsigned kScratch = 2;

class PtmLayout {
 public:
  explicit PtmLayout(const ptm::PTMSpec& spec) : spec_(spec), as_(spec.alphabet, kScratch) {}

  PtmReduction Build() {
    if (!spec_.IsFinal(spec_.initial)) {
      // Read the first head symbol off the input.
      ReadHead(kRight, spec_.initial);
    }
    while (!pending_.empty()) {
      auto unit = *pending_.begin();
      pending_.erase(pending_.begin());
      if (!placed_.count(unit)) PlaceUnit(unit.first, unit.second);
    }
    PtmReduction r;
    r.prm = as_.Finish(3);
    r.blank = spec_.blank;
    for (const auto& [unit, label] : labels_) {
      if (as_.Bound(label)) r.entries[unit] = as_.Resolve(label);
    }
    return r;
  }

 private:
  using Unit = std::pair<std::string, char>;

  int Entry(const std::string& q, char a) {
    if (spec_.IsFinal(q)) return as_.halt();
    Unit u{q, a};
    auto it = labels_.find(u);
    if (it != labels_.end()) return it->second;
    int l = as_.NewLabel();
    labels_[u] = l;
    if (!placed_.count(u)) pending_.insert(u);
    return l;
  }

  // Control continues at unit (q, a) from here; inline it when unplaced.
  void Continue(const std::string& q, char a) {
    if (spec_.IsFinal(q)) {
      as_.Goto(as_.halt());
    } else if (!placed_.count({q, a})) {
      PlaceUnit(q, a);
    } else {
      as_.Goto(Entry(q, a));
    }
  }

  // Pop the new head symbol from `reg` and dispatch on it; an empty register
  // means the head is on a blank.
  void ReadHead(unsigned reg, const std::string& q) {
    std::vector<int> targets;
    for (char a : spec_.alphabet) targets.push_back(Entry(q, a));
    as_.JumpTo(reg, targets);
    Continue(q, spec_.blank);
  }

  void EmitAction(const ptm::Action& act) {
    bool final = spec_.IsFinal(act.state);
    switch (act.move) {
      case ptm::Move::kRight:
        as_.Emit(ConsA(act.write, kLeft, kLeft));
        if (final) {
          as_.Goto(as_.halt());
        } else {
          ReadHead(kRight, act.state);
        }
        break;
      case ptm::Move::kLeft:
        if (final) {
          // Only the left tape is observed: drop its nearest symbol.
          as_.JumpTo(kLeft, std::vector<int>(spec_.alphabet.size(), as_.halt()));
          as_.Goto(as_.halt());
        } else {
          as_.Emit(ConsA(act.write, kRight, kRight));
          ReadHead(kLeft, act.state);
        }
        break;
      case ptm::Move::kStay:
        Continue(act.state, act.write);
        break;
    }
  }

  // A stay move needs no register work: the coin can jump straight to the
  // code of the next unit.
  std::optional<int> DirectTarget(const ptm::Action& act) {
    if (act.move != ptm::Move::kStay) return std::nullopt;
    return Entry(act.state, act.write);
  }

  void PlaceUnit(const std::string& q, char a) {
    Unit u{q, a};
    placed_.insert(u);
    pending_.erase(u);
    as_.Bind(Entry(q, a));
    const ptm::Action& d0 = spec_.Delta(0, q, a);
    const ptm::Action& d1 = spec_.Delta(1, q, a);
    if (d0 == d1) {
      EmitAction(d0);
      return;
    }
    // Coin 0 (taken jump) simulates δ0, fallthrough simulates δ1.
    if (auto direct = DirectTarget(d0)) {
      as_.JumpRandTo(*direct);
      EmitAction(d1);
      return;
    }
    int l0 = as_.NewLabel();
    as_.JumpRandTo(l0);
    EmitAction(d1);
    as_.Bind(l0);
    EmitAction(d0);
  }

  const ptm::PTMSpec& spec_;
  Assembler as_;
  std::map<Unit, int> labels_;
  std::set<Unit> placed_;
  std::set<Unit> pending_;
};

}  // namespace

PtmReduction PtmToPrm(const ptm::PTMSpec& spec) {
  spec.Validate();
  return PtmLayout(spec).Build();
}

Distribution EvalReduced(const PtmReduction& r, const Word& x, unsigned depth) {
  return EvalPRM(r.prm, r.Inputs(x), depth, [&r](const PRMConfiguration& c) { return r.Decode(c); });
}

StepCount MaxStepsReduced(const PtmReduction& r, const Word& x, unsigned depth) {
  return MaxSteps(r.prm, r.Inputs(x), depth);
}

// ---------------------------------------------------------------------------
// Term compilation.

namespace {

class TermCompiler {
 public:
  TermCompiler(const word::Alphabet& sigma, std::string prm_alphabet, unsigned arity)
      : sigma_(sigma),
        as_(std::move(prm_alphabet), arity + 1),
        zero_(arity),
        next_(arity + 2),
        trap_(as_.NewLabel()) {}

  unsigned Fresh() { return next_++; }

  CompiledTerm Finish(const word::TermPtr& t, unsigned arity) {
    unsigned out = Fresh();
    std::vector<unsigned> in(arity);
    for (unsigned i = 0; i < arity; ++i) in[i] = i;
    Emit(t, in, out);
    if (trap_used_) {
      as_.Goto(as_.halt());
      as_.Bind(trap_);
      as_.Goto(trap_);
    }
    CompiledTerm c;
    c.prm = as_.Finish(next_);
    c.arity = arity;
    c.out_reg = out;
    return c;
  }

 private:
  int Trap() {
    trap_used_ = true;
    return trap_;
  }

  bool InSigma(char c) const { return sigma_.Contains(c); }

  // Pops `src` symbol by symbol, running body(a) for each popped a. Symbols
  // for which `accept` is false divert to the trap.
  void Drain(unsigned src, const std::function<void(char)>& body,
             const std::function<bool(char)>& accept) {
    const std::string& abc = as_.alphabet();
    int exit = as_.NewLabel();
    std::vector<int> blocks;
    std::vector<char> live;
    for (char a : abc) {
      if (accept(a)) {
        blocks.push_back(as_.NewLabel());
        live.push_back(a);
      } else {
        blocks.push_back(Trap());
      }
    }
    as_.JumpTo(src, blocks);
    if (!live.empty()) as_.Goto(exit);
    for (size_t i = 0; i < live.size(); ++i) {
      as_.Bind(blocks[abc.find(live[i])]);
      body(live[i]);
      as_.JumpTo(src, blocks);
      if (i + 1 < live.size()) as_.Goto(exit);
    }
    as_.Bind(exit);
  }

  // dst := reverse(src) with src preserved; symbols outside Σ trap.
  void Reverse(unsigned src, unsigned dst) {
    unsigned s = Fresh();
    as_.Emit(EpsMove(src, s));
    as_.Emit(EpsMove(zero_, dst));
    Drain(s, [&](char a) { as_.Emit(ConsA(a, dst, dst)); }, [&](char a) { return InSigma(a); });
  }

  void Emit(const word::TermPtr& t, const std::vector<unsigned>& in, unsigned out) {
    using word::Kind;
    switch (t->kind()) {
      case Kind::kEps:
        as_.Emit(EpsMove(zero_, out));
        return;
      case Kind::kCons:
        as_.Emit(ConsA(t->symbol(), in[0], out));
        return;
      case Kind::kRandCons: {
        int skip = as_.NewLabel();
        as_.Emit(EpsMove(in[0], out));
        as_.JumpRandTo(skip);
        as_.Emit(ConsA(t->symbol(), out, out));
        as_.Bind(skip);
        return;
      }
      case Kind::kProj:
        as_.Emit(EpsMove(in[t->proj_m() - 1], out));
        return;
      case Kind::kComp: {
        const auto& c = t->children();
        std::vector<unsigned> temps;
        for (size_t i = 1; i < c.size(); ++i) {
          temps.push_back(Fresh());
          Emit(c[i], in, temps.back());
        }
        Emit(c[0], temps, out);
        return;
      }
      case Kind::kCase:
        EmitCase(t, in, out);
        return;
      case Kind::kRec:
        EmitRec(t, in, out);
        return;
      case Kind::kSimRec:
        EmitSimRec(t, in, out);
        return;
      case Kind::kDet:
        EmitDet(t, in, out);
        return;
    }
  }

  std::vector<int> BranchLabels(const std::map<char, int>& by_symbol) {
    std::vector<int> out;
    for (char a : as_.alphabet()) {
      auto it = by_symbol.find(a);
      out.push_back(it == by_symbol.end() ? Trap() : it->second);
    }
    return out;
  }

  void EmitCase(const word::TermPtr& t, const std::vector<unsigned>& in, unsigned out) {
    std::vector<unsigned> rest(in.begin() + 1, in.end());
    unsigned c = Fresh();
    as_.Emit(EpsMove(in[0], c));
    std::map<char, int> branch;
    for (char a : t->symbols()) branch[a] = as_.NewLabel();
    int end = as_.NewLabel();
    as_.JumpTo(c, BranchLabels(branch));
    Emit(t->base(), rest, out);
    as_.Goto(end);
    std::vector<unsigned> args{c};
    args.insert(args.end(), rest.begin(), rest.end());
    for (size_t i = 0; i < t->symbols().size(); ++i) {
      char a = t->symbols()[i];
      as_.Bind(branch[a]);
      Emit(t->Branch(a), args, out);
      if (i + 1 < t->symbols().size()) as_.Goto(end);
    }
    as_.Bind(end);
  }

  // f(a·w, v) = g_a(f(w, v), w, v): walk w from its last symbol.
  void EmitRec(const word::TermPtr& t, const std::vector<unsigned>& in, unsigned out) {
    std::vector<unsigned> v(in.begin() + 1, in.end());
    unsigned rv = Fresh(), acc = Fresh(), nacc = Fresh(), suf = Fresh();
    Reverse(in[0], rv);
    Emit(t->base(), v, acc);
    as_.Emit(EpsMove(zero_, suf));
    std::vector<unsigned> args{acc, suf};
    args.insert(args.end(), v.begin(), v.end());
    Drain(
        rv,
        [&](char a) {
          Emit(t->Branch(a), args, nacc);
          as_.Emit(EpsMove(nacc, acc));
          as_.Emit(ConsA(a, suf, suf));
        },
        [&](char a) { return t->symbols().find(a) != std::string::npos; });
    as_.Emit(EpsMove(acc, out));
  }

  void EmitSimRec(const word::TermPtr& t, const std::vector<unsigned>& in, unsigned out) {
    unsigned n = t->components();
    std::vector<unsigned> v(in.begin() + 1, in.end());
    unsigned rv = Fresh(), suf = Fresh();
    std::vector<unsigned> acc(n), nacc(n);
    for (unsigned j = 0; j < n; ++j) {
      acc[j] = Fresh();
      nacc[j] = Fresh();
    }
    Reverse(in[0], rv);
    for (unsigned j = 1; j <= n; ++j) Emit(t->SimBase(j), v, acc[j - 1]);
    as_.Emit(EpsMove(zero_, suf));
    std::vector<unsigned> args(acc);
    args.push_back(suf);
    args.insert(args.end(), v.begin(), v.end());
    Drain(
        rv,
        [&](char a) {
          for (unsigned j = 1; j <= n; ++j) Emit(t->SimStep(j, a), args, nacc[j - 1]);
          for (unsigned j = 0; j < n; ++j) as_.Emit(EpsMove(nacc[j], acc[j]));
          as_.Emit(ConsA(a, suf, suf));
        },
        [&](char a) { return t->symbols().find(a) != std::string::npos; });
    as_.Emit(EpsMove(acc[t->index() - 1], out));
  }

  void EmitDet(const word::TermPtr& t, const std::vector<unsigned>& in, unsigned out) {
    const std::string& name = t->det()->name;
    if (name == "couple") {
      EmitCouple(in[0], in[1], out);
    } else if (name == "first" || name == "second") {
      EmitProjection(in[0], out, name == "first");
    } else {
      throw NotCompilable("classical function '" + name + "' has no register-machine code");
    }
  }

  // out := '$'^(|u|+|v|+1) · u · '#' · v; u with markers traps.
  void EmitCouple(unsigned u, unsigned v, unsigned out) {
    unsigned ru = Fresh(), s = Fresh();
    Reverse(u, ru);
    as_.Emit(EpsMove(v, out));
    as_.Emit(ConsA(word::kSeparator, out, out));
    Drain(ru, [&](char a) { as_.Emit(ConsA(a, out, out)); }, [](char) { return true; });
    auto pad = [&](char) { as_.Emit(ConsA(word::kPad, out, out)); };
    as_.Emit(EpsMove(u, s));
    Drain(s, pad, [](char) { return true; });
    as_.Emit(EpsMove(v, s));
    Drain(s, pad, [](char) { return true; });
    as_.Emit(ConsA(word::kPad, out, out));
  }

  // Skips the pads, collects u up to the separator (trapping on a malformed
  // code), then returns u or what follows the separator.
  void EmitProjection(unsigned t, unsigned out, bool first) {
    const std::string& abc = as_.alphabet();
    unsigned s = Fresh(), ru = Fresh();
    as_.Emit(EpsMove(t, s));
    as_.Emit(EpsMove(zero_, ru));
    int pads = as_.NewLabel(), done = as_.NewLabel();
    std::map<char, int> body;
    for (char a : abc) {
      if (InSigma(a)) body[a] = as_.NewLabel();
    }
    auto targets = [&](bool in_pads) {
      std::vector<int> out_labels;
      for (char a : abc) {
        if (a == word::kPad) {
          out_labels.push_back(in_pads ? pads : Trap());
        } else if (a == word::kSeparator) {
          out_labels.push_back(done);
        } else {
          out_labels.push_back(body.at(a));
        }
      }
      return out_labels;
    };
    as_.Bind(pads);
    as_.JumpTo(s, targets(true));
    as_.Goto(Trap());
    for (auto& [a, label] : body) {
      as_.Bind(label);
      as_.Emit(ConsA(a, ru, ru));
      as_.JumpTo(s, targets(false));
      as_.Goto(Trap());
    }
    as_.Bind(done);
    if (first) {
      Reverse(ru, out);
    } else {
      as_.Emit(EpsMove(s, out));
    }
  }

  const word::Alphabet& sigma_;
  Assembler as_;
  unsigned zero_;
  unsigned next_;
  int trap_;
  bool trap_used_ = false;
};

bool UsesCouple(const word::TermPtr& t) {
  if (t->kind() == word::Kind::kDet) {
    const auto& n = t->det()->name;
    if (n == "couple" || n == "first" || n == "second") return true;
  }
  for (const auto& c : t->children()) {
    if (UsesCouple(c)) return true;
  }
  return false;
}

}  // namespace

CompiledTerm CompileWordTerm(const word::TermPtr& t, const word::Alphabet& alphabet) {
  unsigned arity = word::Arity(t);
  word::CheckAlphabet(t, alphabet);
  tier::SolveResult tiers = tier::InferTiers(t);
  if (!tiers.typable) throw NotTiered(tiers.Explain());
  std::string prm_alphabet =
      UsesCouple(t) ? word::TupledAlphabet(alphabet).symbols() : alphabet.symbols();
  return TermCompiler(alphabet, prm_alphabet, arity).Finish(t, arity);
}

Distribution EvalCompiled(const CompiledTerm& c, const std::vector<Word>& args, unsigned depth) {
  if (args.size() != c.arity) {
    throw ArityMismatch("compiled term takes " + std::to_string(c.arity) + " arguments, got " +
                        std::to_string(args.size()));
  }
  return EvalPRM(c.prm, args, depth, c.out_reg);
}

StepCount MaxStepsCompiled(const CompiledTerm& c, const std::vector<Word>& args, unsigned depth) {
  return MaxSteps(c.prm, args, depth);
}

// ---------------------------------------------------------------------------
// Growth fits.

PowerFit FitPowerLaw(const std::vector<std::pair<unsigned, uint64_t>>& points) {
  std::vector<double> xs, ys;
  for (const auto& [n, steps] : points) {
    if (n == 0) continue;
    xs.push_back(std::log(static_cast<double>(n)));
    ys.push_back(std::log(static_cast<double>(std::max<uint64_t>(steps, 1))));
  }
  std::set<double> distinct(xs.begin(), xs.end());
  if (distinct.size() < 2) throw OutOfRange("a power-law fit needs two distinct sizes");
  double m = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  PowerFit f;
  f.k = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  double b = (sy - f.k * sx) / m;
  f.c = std::exp(b);
  double mean = sy / m, ss_tot = 0, ss_res = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    double pred = b + f.k * xs[i];
    ss_tot += (ys[i] - mean) * (ys[i] - mean);
    ss_res += (ys[i] - pred) * (ys[i] - pred);
  }
  f.r2 = ss_tot == 0 ? 1.0 : 1.0 - ss_res / ss_tot;
  return f;
}

namespace {

void AllWords(const std::string& abc, unsigned n, Word& cur, std::vector<Word>& out) {
  if (cur.size() == n) {
    out.push_back(cur);
    return;
  }
  for (char a : abc) {
    cur.push_back(a);
    AllWords(abc, n, cur, out);
    cur.pop_back();
  }
}

}  // namespace

GrowthReport MeasureGrowth(const CompiledTerm& c, const word::Alphabet& alphabet,
                           const std::vector<unsigned>& sizes, unsigned depth) {
  GrowthReport r;
  for (unsigned n : sizes) {
    std::vector<Word> words;
    Word cur;
    AllWords(alphabet.symbols(), n, cur, words);
    uint64_t worst = 0;
    for (const auto& w : words) {
      StepCount s = MaxStepsCompiled(c, std::vector<Word>(c.arity, w), depth);
      if (!s.bounded()) r.bounded = false;
      worst = std::max(worst, s.steps.value_or(s.longest_halting));
    }
    r.points.emplace_back(n, worst);
  }
  r.monotone = std::is_sorted(r.points.begin(), r.points.end(),
                              [](const auto& a, const auto& b) { return a.second < b.second; });
  r.fit = FitPowerLaw(r.points);
  r.stable = true;
  if (r.points.size() >= 3) {
    for (size_t skip = 0; skip < r.points.size(); ++skip) {
      auto sub = r.points;
      sub.erase(sub.begin() + static_cast<long>(skip));
      double k = FitPowerLaw(sub).k;
      r.refit_exponents.push_back(k);
      if (std::fabs(k - r.fit.k) > 1.0) r.stable = false;
    }
  }
  return r;
}

}  // namespace prm
}  // namespace probrec
