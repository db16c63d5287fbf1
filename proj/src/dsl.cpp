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

#include "probrec/dsl.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "probrec/fixtures.hpp"

namespace probrec {
namespace dsl {

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UnknownName("cannot read file '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

namespace {

enum class Tok { kIdent, kInt, kChar, kString, kLParen, kRParen, kLBrack, kRBrack, kComma, kEquals, kArrow, kEnd };

struct Token {
  Tok kind = Tok::kEnd;
  std::string text;
  SourcePos pos;
};

std::string Describe(const Token& t) {
  switch (t.kind) {
    case Tok::kEnd:
      return "end of input";
    case Tok::kChar:
      return "'" + t.text + "'";
    case Tok::kString:
      return "\"" + t.text + "\"";
    default:
      return "'" + t.text + "'";
  }
}

bool IdentStart(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool IdentChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

std::vector<Token> Lex(const std::string& text) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n && i < text.size(); ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto quoted = [&](char q, Tok kind, const char* what) {
    SourcePos start{line, col};
    advance(1);
    std::string body;
    while (true) {
      if (i >= text.size() || text[i] == '\n') {
        throw ParseError(start.line, start.column, std::string("unterminated ") + what,
                         std::string(1, q));
      }
      char c = text[i];
      if (c == q) break;
      if (c == '\\' && i + 1 < text.size()) {
        advance(1);
        c = text[i];
      }
      body.push_back(c);
      advance(1);
    }
    advance(1);
    if (kind == Tok::kChar && body.size() != 1) {
      throw ParseError(start.line, start.column, "a symbol literal holds exactly one character",
                       "symbol such as 'a'");
    }
    out.push_back({kind, body, start});
  };
  while (i < text.size()) {
    char c = text[i];
    SourcePos pos{line, col};
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
    } else if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
    } else if (c == '\'') {
      quoted('\'', Tok::kChar, "symbol literal");
    } else if (c == '"') {
      quoted('"', Tok::kString, "string");
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      out.push_back({Tok::kInt, text.substr(i, j - i), pos});
      advance(j - i);
    } else if (IdentStart(c)) {
      size_t j = i;
      while (j < text.size() && IdentChar(text[j])) ++j;
      out.push_back({Tok::kIdent, text.substr(i, j - i), pos});
      advance(j - i);
    } else if (c == '-' && i + 1 < text.size() && text[i + 1] == '>') {
      out.push_back({Tok::kArrow, "->", pos});
      advance(2);
    } else {
      Tok k;
      switch (c) {
        case '(':
          k = Tok::kLParen;
          break;
        case ')':
          k = Tok::kRParen;
          break;
        case '[':
          k = Tok::kLBrack;
          break;
        case ']':
          k = Tok::kRBrack;
          break;
        case ',':
          k = Tok::kComma;
          break;
        case '=':
          k = Tok::kEquals;
          break;
        default:
          throw ParseError(line, col, std::string("unexpected character '") + c + "'", "term");
      }
      out.push_back({k, std::string(1, c), pos});
      advance(1);
    }
  }
  out.push_back({Tok::kEnd, "", {line, col}});
  return out;
}

const std::set<std::string>& NatKeywords() {
  static const std::set<std::string> k{"z", "s", "coin", "proj", "comp", "primrec", "mu", "det"};
  return k;
}
const std::set<std::string>& WordKeywords() {
  static const std::set<std::string> k{"eps", "cons", "rcons", "proj", "comp",
                                       "case", "rec", "simrec", "det"};
  return k;
}
const std::set<std::string>& Reserved() {
  static const std::set<std::string> k{"z",   "s",    "coin", "proj", "comp",   "primrec",
                                       "mu",  "det",  "eps",  "cons", "rcons",  "case",
                                       "rec", "simrec", "let", "alphabet", "use", "machine", "as"};
  return k;
}

class ParserBase {
 public:
  explicit ParserBase(const std::string& text) : toks_(Lex(text)) {}

 protected:
  const Token& Peek() const { return toks_[pos_]; }
  bool AtIdent(const std::string& word) const {
    return Peek().kind == Tok::kIdent && Peek().text == word;
  }
  const Token& Next() { return toks_[pos_ == toks_.size() - 1 ? pos_ : pos_++]; }

  [[noreturn]] void Fail(const Token& at, const std::string& message,
                         const std::string& expected) const {
    throw ParseError(at.pos.line, at.pos.column, message, expected);
  }
  [[noreturn]] void Unexpected(const std::string& expected) const {
    Fail(Peek(), "unexpected " + Describe(Peek()) + ", expected " + expected, expected);
  }

  const Token& Expect(Tok kind, const std::string& expected) {
    if (Peek().kind != kind) Unexpected(expected);
    return Next();
  }
  void ExpectWord(const std::string& word) {
    if (!AtIdent(word)) Unexpected("'" + word + "'");
    Next();
  }
  unsigned Int(const std::string& what) {
    const Token& t = Expect(Tok::kInt, what);
    if (t.text.size() > 9) Fail(t, what + " too large", what);
    return static_cast<unsigned>(std::stoul(t.text));
  }
  std::string Name() {
    const Token& t = Expect(Tok::kIdent, "name");
    if (Reserved().count(t.text)) Fail(t, "'" + t.text + "' is a keyword", "name");
    return t.text;
  }

  // Parses `let NAME = term` bindings while they appear.
  template <typename F>
  void Lets(F&& bind) {
    while (AtIdent("let")) {
      Next();
      const Token at = Peek();
      std::string name = Name();
      Expect(Tok::kEquals, "'='");
      bind(name, at);
    }
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
};

class NatParser : public ParserBase {
 public:
  NatParser(const std::string& text, const ParseOptions& options)
      : ParserBase(text), options_(options) {}

  NatProgram Parse() {
    if (AtIdent("alphabet")) Unexpected("a natural-number term (alphabet declares a word file)");
    while (AtIdent("use")) ParseUse();
    Lets([&](const std::string& name, const Token& at) {
      if (program_.lets.count(name)) Fail(at, "'" + name + "' is bound twice", "fresh name");
      program_.lets[name] = Term();
    });
    program_.term = Term();
    if (Peek().kind != Tok::kEnd) Unexpected("end of input");
    return std::move(program_);
  }

 private:
  void ParseUse() {
    Next();
    ExpectWord("machine");
    const Token path = Expect(Tok::kString, "quoted machine path");
    ExpectWord("as");
    const Token at = Peek();
    std::string alias = Name();
    std::string resolved = fixtures::ResolvePath(path.text, options_.base_dir);
    std::shared_ptr<const ptm::PTMSpec> spec;
    try {
      spec = std::make_shared<const ptm::PTMSpec>(ptm::ParseMachineJson(ReadFile(resolved)));
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      Fail(path, e.what(), "readable machine file");
    }
    auto fns = ptm::MakeMachineFunctions(spec, alias);
    dets_[fns.pt1->name] = fns.pt1;
    dets_[fns.sp->name] = fns.sp;
    program_.machines[alias] = spec;
    (void)at;
  }

  nat::TermPtr Checked(nat::TermPtr t, const Token& at) {
    try {
      nat::Arity(t);
    } catch (const ArityMismatch& e) {
      Fail(at, e.what(), "arity-consistent term");
    }
    return t->WithPos(at.pos);
  }

  nat::TermPtr Term() {
    const Token at = Peek();
    if (at.kind == Tok::kLParen) {
      Next();
      nat::TermPtr t = Term();
      Expect(Tok::kRParen, "')'");
      return t;
    }
    if (at.kind != Tok::kIdent) Unexpected("term");
    const std::string word = at.text;
    if (WordKeywords().count(word) && !NatKeywords().count(word)) {
      Fail(at, "'" + word + "' is a word-algebra constructor; declare an alphabet for word files",
           "natural-number term");
    }
    Next();
    if (word == "z") return nat::Zero()->WithPos(at.pos);
    if (word == "s") return nat::Succ()->WithPos(at.pos);
    if (word == "coin") return nat::Coin()->WithPos(at.pos);
    if (word == "proj") {
      unsigned n = Int("projection arity");
      unsigned m = Int("projection index");
      if (n < 1 || m < 1 || m > n) Fail(at, "projection needs 1 <= m <= n", "proj n m with 1 <= m <= n");
      return nat::Proj(n, m)->WithPos(at.pos);
    }
    if (word == "det") {
      const Token name = Expect(Tok::kIdent, "classical function name");
      auto it = dets_.find(name.text);
      if (it != dets_.end()) return nat::Det(it->second)->WithPos(at.pos);
      if (nat::Stdlib().HasDet(name.text)) return nat::Det(nat::Stdlib().Det(name.text))->WithPos(at.pos);
      Fail(name, "no classical function named '" + name.text + "'", "classical function name");
    }
    if (word == "comp") {
      nat::TermPtr f = Term();
      Expect(Tok::kLParen, "'(' opening the inner terms");
      std::vector<nat::TermPtr> gs{Term()};
      while (Peek().kind == Tok::kComma) {
        Next();
        gs.push_back(Term());
      }
      Expect(Tok::kRParen, "',' or ')'");
      return Checked(nat::Comp(f, std::move(gs)), at);
    }
    if (word == "primrec") {
      nat::TermPtr base = Term();
      nat::TermPtr step = Term();
      return Checked(nat::PrimRec(base, step), at);
    }
    if (word == "mu") return Checked(nat::Mu(Term()), at);
    if (Reserved().count(word)) Fail(at, "'" + word + "' cannot start a term", "term");
    auto let = program_.lets.find(word);
    if (let != program_.lets.end()) return let->second;
    if (nat::Stdlib().HasTerm(word)) return nat::Stdlib().Term(word);
    Fail(at, "unknown name '" + word + "'", "term or bound name");
  }

  const ParseOptions& options_;
  NatProgram program_;
  std::map<std::string, nat::DetFnPtr> dets_;
};

class WordParser : public ParserBase {
 public:
  explicit WordParser(const std::string& text) : ParserBase(text) {}

  WordProgram Parse() {
    if (!AtIdent("alphabet")) Unexpected("'alphabet' declaration");
    Next();
    const Token a = Expect(Tok::kString, "quoted alphabet");
    std::set<char> seen;
    for (char c : a.text) {
      if (!seen.insert(c).second) Fail(a, "alphabet lists a symbol twice", "distinct symbols");
      if (c == word::kSeparator || c == word::kPad) {
        Fail(a, "'#' and '$' are reserved for couple codes", "alphabet without '#' and '$'");
      }
    }
    if (a.text.empty()) Fail(a, "empty alphabet", "non-empty alphabet");
    program_.alphabet = word::Alphabet(a.text);
    Lets([&](const std::string& name, const Token& at) {
      if (program_.lets.count(name)) Fail(at, "'" + name + "' is bound twice", "fresh name");
      program_.lets[name] = Term();
    });
    program_.term = Term();
    if (Peek().kind != Tok::kEnd) Unexpected("end of input");
    return std::move(program_);
  }

 private:
  word::TermPtr Checked(word::TermPtr t, const Token& at) {
    try {
      word::Arity(t);
      word::CheckAlphabet(t, program_.alphabet);
    } catch (const Error& e) {
      Fail(at, e.what(), "well-formed term");
    }
    return t->WithPos(at.pos);
  }

  char Symbol() {
    const Token& t = Expect(Tok::kChar, "symbol such as 'a'");
    if (!program_.alphabet.Contains(t.text[0])) {
      Fail(t, "symbol '" + t.text + "' not in alphabet \"" + program_.alphabet.symbols() + "\"",
           "symbol of the alphabet");
    }
    return t.text[0];
  }

  std::vector<std::pair<char, word::TermPtr>> Branches() {
    Expect(Tok::kLParen, "'(' opening the branches");
    std::vector<std::pair<char, word::TermPtr>> out;
    while (true) {
      char a = Symbol();
      Expect(Tok::kArrow, "'->'");
      out.emplace_back(a, Term());
      if (Peek().kind != Tok::kComma) break;
      Next();
    }
    Expect(Tok::kRParen, "',' or ')'");
    return out;
  }

  word::TermPtr Term() {
    const Token at = Peek();
    if (at.kind == Tok::kLParen) {
      Next();
      word::TermPtr t = Term();
      Expect(Tok::kRParen, "')'");
      return t;
    }
    if (at.kind != Tok::kIdent) Unexpected("term");
    const std::string w = at.text;
    if (NatKeywords().count(w) && !WordKeywords().count(w)) {
      Fail(at, "'" + w + "' is a natural-number constructor", "word term");
    }
    Next();
    if (w == "eps") {
      unsigned n = Peek().kind == Tok::kInt ? Int("eps arity") : 1;
      return word::Eps(n)->WithPos(at.pos);
    }
    if (w == "cons") return word::Cons(Symbol())->WithPos(at.pos);
    if (w == "rcons") return word::RandCons(Symbol())->WithPos(at.pos);
    if (w == "proj") {
      unsigned n = Int("projection arity");
      unsigned m = Int("projection index");
      if (n < 1 || m < 1 || m > n) Fail(at, "projection needs 1 <= m <= n", "proj n m with 1 <= m <= n");
      return word::Proj(n, m)->WithPos(at.pos);
    }
    if (w == "det") {
      const Token name = Expect(Tok::kIdent, "classical function name");
      const auto& reg = word::WordDetRegistry();
      auto it = reg.find(name.text);
      if (it == reg.end()) Fail(name, "no word function named '" + name.text + "'", "couple, first or second");
      return word::Det(it->second)->WithPos(at.pos);
    }
    if (w == "comp") {
      word::TermPtr f = Term();
      Expect(Tok::kLParen, "'(' opening the inner terms");
      std::vector<word::TermPtr> gs{Term()};
      while (Peek().kind == Tok::kComma) {
        Next();
        gs.push_back(Term());
      }
      Expect(Tok::kRParen, "',' or ')'");
      return Checked(word::Comp(f, std::move(gs)), at);
    }
    if (w == "case" || w == "rec") {
      word::TermPtr base = Term();
      auto branches = Branches();
      try {
        return Checked(w == "case" ? word::Case(base, std::move(branches))
                                   : word::Rec(base, std::move(branches)),
                       at);
      } catch (const ParseError&) {
        throw;
      } catch (const Error& e) {
        Fail(at, e.what(), "one branch per alphabet symbol");
      }
    }
    if (w == "simrec") return SimRecTerm(at);
    if (Reserved().count(w)) Fail(at, "'" + w + "' cannot start a term", "term");
    auto let = program_.lets.find(w);
    if (let != program_.lets.end()) return let->second;
    Fail(at, "unknown name '" + w + "'", "term or bound name");
  }

  word::TermPtr SimRecTerm(const Token& at) {
    unsigned index = Int("selected component");
    Expect(Tok::kLBrack, "'[' opening the bases");
    std::vector<word::TermPtr> bases{Term()};
    while (Peek().kind == Tok::kComma) {
      Next();
      bases.push_back(Term());
    }
    Expect(Tok::kRBrack, "',' or ']'");
    Expect(Tok::kLBrack, "'[' opening the steps");
    std::vector<std::tuple<unsigned, char, word::TermPtr>> steps;
    while (true) {
      Expect(Tok::kLParen, "'(' opening a step label");
      unsigned j = Int("component number");
      Expect(Tok::kComma, "','");
      char a = Symbol();
      Expect(Tok::kRParen, "')'");
      Expect(Tok::kArrow, "'->'");
      steps.emplace_back(j, a, Term());
      if (Peek().kind != Tok::kComma) break;
      Next();
    }
    Expect(Tok::kRBrack, "',' or ']'");
    try {
      return Checked(word::SimRec(index, std::move(bases), std::move(steps)), at);
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      Fail(at, e.what(), "one step per component and symbol");
    }
  }

  WordProgram program_;
};

bool Compound(const std::string& printed) { return printed.find(' ') != std::string::npos; }
std::string Wrap(const std::string& printed) {
  return Compound(printed) ? "(" + printed + ")" : printed;
}

std::string CharLit(char c) {
  if (c == '\'' || c == '\\') return std::string("'\\") + c + "'";
  return std::string("'") + c + "'";
}

}  // namespace

NatProgram ParseNat(const std::string& text, const ParseOptions& options) {
  return NatParser(text, options).Parse();
}

WordProgram ParseWord(const std::string& text, const ParseOptions&) {
  return WordParser(text).Parse();
}

Program ParseProgram(const std::string& text, const ParseOptions& options) {
  std::vector<Token> toks = Lex(text);
  if (toks.front().kind == Tok::kIdent && toks.front().text == "alphabet") {
    return ParseWord(text, options);
  }
  return ParseNat(text, options);
}

Program ParseTermFile(const std::string& path) {
  ParseOptions options;
  options.base_dir = std::filesystem::path(path).parent_path().string();
  if (options.base_dir.empty()) options.base_dir = ".";
  return ParseProgram(ReadFile(path), options);
}

std::string PrettyNat(const nat::TermPtr& t) {
  using nat::Kind;
  const auto& c = t->children();
  switch (t->kind()) {
    case Kind::kZero:
      return "z";
    case Kind::kSucc:
      return "s";
    case Kind::kCoin:
      return "coin";
    case Kind::kProj:
      return "proj " + std::to_string(t->proj_n()) + " " + std::to_string(t->proj_m());
    case Kind::kDet:
      return "det " + t->det()->name;
    case Kind::kComp: {
      std::string s = "comp " + Wrap(PrettyNat(c[0])) + " (";
      for (size_t i = 1; i < c.size(); ++i) s += (i > 1 ? ", " : "") + PrettyNat(c[i]);
      return s + ")";
    }
    case Kind::kPrimRec:
      return "primrec " + Wrap(PrettyNat(c[0])) + " " + Wrap(PrettyNat(c[1]));
    case Kind::kMu:
      return "mu " + Wrap(PrettyNat(c[0]));
  }
  return "";
}

std::string PrettyWord(const word::TermPtr& t) {
  using word::Kind;
  const auto& c = t->children();
  auto branches = [&]() {
    std::string s = " (";
    for (size_t i = 0; i < t->symbols().size(); ++i) {
      char a = t->symbols()[i];
      s += (i ? ", " : "") + CharLit(a) + " -> " + PrettyWord(t->Branch(a));
    }
    return s + ")";
  };
  switch (t->kind()) {
    case Kind::kEps:
      return t->proj_n() == 1 ? std::string("eps") : "eps " + std::to_string(t->proj_n());
    case Kind::kCons:
      return "cons " + CharLit(t->symbol());
    case Kind::kRandCons:
      return "rcons " + CharLit(t->symbol());
    case Kind::kProj:
      return "proj " + std::to_string(t->proj_n()) + " " + std::to_string(t->proj_m());
    case Kind::kDet:
      return "det " + t->det()->name;
    case Kind::kComp: {
      std::string s = "comp " + Wrap(PrettyWord(c[0])) + " (";
      for (size_t i = 1; i < c.size(); ++i) s += (i > 1 ? ", " : "") + PrettyWord(c[i]);
      return s + ")";
    }
    case Kind::kCase:
      return "case " + Wrap(PrettyWord(t->base())) + branches();
    case Kind::kRec:
      return "rec " + Wrap(PrettyWord(t->base())) + branches();
    case Kind::kSimRec: {
      unsigned n = t->components();
      std::string s = "simrec " + std::to_string(t->index()) + " [";
      for (unsigned j = 1; j <= n; ++j) s += (j > 1 ? ", " : "") + PrettyWord(t->SimBase(j));
      s += "] [";
      bool first = true;
      for (unsigned j = 1; j <= n; ++j) {
        for (char a : t->symbols()) {
          s += (first ? "(" : ", (") + std::to_string(j) + "," + CharLit(a) + ") -> " +
               PrettyWord(t->SimStep(j, a));
          first = false;
        }
      }
      return s + "]";
    }
  }
  return "";
}

std::string PrettyWordProgram(const WordProgram& p) {
  return "alphabet \"" + p.alphabet.symbols() + "\"\n" + PrettyWord(p.term) + "\n";
}

std::string CompiledMachineFile(const nat::TermPtr& t, const std::string& machine_path,
                                const std::string& alias) {
  return "use machine \"" + machine_path + "\" as " + alias + "\n" + PrettyNat(t) + "\n";
}

}  // namespace dsl
}  // namespace probrec
