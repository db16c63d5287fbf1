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

#include "probrec/word_term.hpp"

#include <algorithm>
#include <set>
#include <tuple>
#include <utility>

namespace probrec {
namespace word {

Alphabet::Alphabet(std::string symbols) : symbols_(std::move(symbols)) {
  if (symbols_.empty()) throw AlphabetMismatch("alphabet must be nonempty");
  std::set<char> seen(symbols_.begin(), symbols_.end());
  if (seen.size() != symbols_.size()) {
    throw AlphabetMismatch("alphabet \"" + symbols_ + "\" repeats a symbol");
  }
}

size_t Alphabet::IndexOf(char c) const {
  auto i = symbols_.find(c);
  if (i == std::string::npos) {
    throw AlphabetMismatch(std::string("symbol '") + c + "' not in alphabet \"" + symbols_ + "\"");
  }
  return i;
}

bool Alphabet::Covers(const Word& w) const {
  return std::all_of(w.begin(), w.end(), [&](char c) { return Contains(c); });
}

Alphabet Alphabet::Extended(const std::string& extra) const {
  std::string s = symbols_;
  for (char c : extra) {
    if (s.find(c) == std::string::npos) s.push_back(c);
  }
  return Alphabet(s);
}

TermPtr Term::Make(Fields f) {
  auto t = std::make_shared<Term>();
  t->kind_ = f.kind;
  t->symbol_ = f.symbol;
  t->n_ = f.n;
  t->m_ = f.m;
  t->index_ = f.index;
  t->components_ = f.components;
  t->symbols_ = std::move(f.symbols);
  t->children_ = std::move(f.children);
  t->det_ = std::move(f.det);
  t->pos_ = f.pos;
  return t;
}

Term::Fields Term::fields() const {
  Fields f;
  f.kind = kind_;
  f.symbol = symbol_;
  f.n = n_;
  f.m = m_;
  f.index = index_;
  f.components = components_;
  f.symbols = symbols_;
  f.children = children_;
  f.det = det_;
  f.pos = pos_;
  return f;
}

TermPtr Term::WithPos(SourcePos pos) const {
  Fields f = fields();
  f.pos = pos;
  return Make(std::move(f));
}

const TermPtr& Term::Branch(char a) const {
  auto i = symbols_.find(a);
  if (i == std::string::npos) {
    throw AlphabetMismatch(std::string("no branch for symbol '") + a + "'");
  }
  return children_[1 + i];
}

const TermPtr& Term::SimStep(unsigned j, char a) const {
  auto i = symbols_.find(a);
  if (i == std::string::npos) {
    throw AlphabetMismatch(std::string("no simrec step for symbol '") + a + "'");
  }
  return children_[components_ + (j - 1) * symbols_.size() + i];
}

TermPtr Eps(unsigned n) { return Term::Make({.kind = Kind::kEps, .n = n}); }
TermPtr Cons(char a) { return Term::Make({.kind = Kind::kCons, .symbol = a}); }
TermPtr RandCons(char a) { return Term::Make({.kind = Kind::kRandCons, .symbol = a}); }
TermPtr Proj(unsigned n, unsigned m) { return Term::Make({.kind = Kind::kProj, .n = n, .m = m}); }

TermPtr Comp(TermPtr f, std::vector<TermPtr> gs) {
  std::vector<TermPtr> children{std::move(f)};
  for (auto& g : gs) children.push_back(std::move(g));
  return Term::Make({.kind = Kind::kComp, .children = std::move(children)});
}

namespace {

TermPtr MakeBranching(Kind kind, TermPtr base, std::vector<std::pair<char, TermPtr>> steps) {
  std::string symbols;
  std::vector<TermPtr> children{std::move(base)};
  for (auto& [a, t] : steps) {
    if (symbols.find(a) != std::string::npos) {
      throw AlphabetMismatch(std::string("duplicate branch for symbol '") + a + "'");
    }
    symbols.push_back(a);
    children.push_back(std::move(t));
  }
  return Term::Make({.kind = kind, .symbols = symbols, .children = std::move(children)});
}

}  // namespace

TermPtr Rec(TermPtr base, std::vector<std::pair<char, TermPtr>> steps) {
  return MakeBranching(Kind::kRec, std::move(base), std::move(steps));
}

TermPtr Case(TermPtr base, std::vector<std::pair<char, TermPtr>> branches) {
  return MakeBranching(Kind::kCase, std::move(base), std::move(branches));
}

TermPtr SimRec(unsigned index, std::vector<TermPtr> bases,
               std::vector<std::tuple<unsigned, char, TermPtr>> steps) {
  unsigned n = static_cast<unsigned>(bases.size());
  if (n == 0) throw IndexOutOfRange("simrec needs at least one component");
  if (index < 1 || index > n) {
    throw IndexOutOfRange("simrec index " + std::to_string(index) + " outside 1.." +
                          std::to_string(n));
  }
  std::string symbols;
  for (const auto& [j, a, t] : steps) {
    if (symbols.find(a) == std::string::npos) symbols.push_back(a);
  }
  std::vector<TermPtr> children = std::move(bases);
  children.resize(n + n * symbols.size());
  std::vector<bool> filled(n * symbols.size(), false);
  for (auto& [j, a, t] : steps) {
    if (j < 1 || j > n) {
      throw IndexOutOfRange("simrec step component " + std::to_string(j) + " outside 1.." +
                            std::to_string(n));
    }
    size_t slot = (j - 1) * symbols.size() + symbols.find(a);
    if (filled[slot]) {
      throw AlphabetMismatch("duplicate simrec step (" + std::to_string(j) + ", '" +
                             std::string(1, a) + "')");
    }
    filled[slot] = true;
    children[n + slot] = std::move(t);
  }
  for (size_t s = 0; s < filled.size(); ++s) {
    if (!filled[s]) {
      throw AlphabetMismatch("simrec step (" + std::to_string(s / symbols.size() + 1) + ", '" +
                             std::string(1, symbols[s % symbols.size()]) + "') missing");
    }
  }
  return Term::Make({.kind = Kind::kSimRec,
                     .index = index,
                     .components = n,
                     .symbols = symbols,
                     .children = std::move(children)});
}

TermPtr Det(DetWordFnPtr def) { return Term::Make({.kind = Kind::kDet, .det = std::move(def)}); }

namespace {

std::string Where(const std::string& path, const Term& t) {
  std::string out = path.empty() ? "<root>" : path;
  if (t.pos().line > 0) {
    out += " (line " + std::to_string(t.pos().line) + ", column " +
           std::to_string(t.pos().column) + ")";
  }
  return out;
}

unsigned ArityAt(const TermPtr& t, const std::string& path) {
  auto sub = [&](const std::string& s) { return path.empty() ? s : path + "." + s; };
  auto require = [&](unsigned got, unsigned want, const std::string& what, const std::string& p) {
    if (got != want) {
      throw ArityMismatch(what + ": arity " + std::to_string(got) + ", expected " +
                          std::to_string(want) + " at " + p);
    }
  };
  switch (t->kind()) {
    case Kind::kEps:
      return t->proj_n();
    case Kind::kCons:
    case Kind::kRandCons:
      return 1;
    case Kind::kProj:
      if (t->proj_n() < 1 || t->proj_m() < 1 || t->proj_m() > t->proj_n()) {
        throw ArityMismatch("projection needs 1 <= m <= n at " + Where(path, *t));
      }
      return t->proj_n();
    case Kind::kDet:
      if (!t->det()) throw ArityMismatch("unbound classical function at " + Where(path, *t));
      return t->det()->arity;
    case Kind::kComp: {
      const auto& c = t->children();
      if (c.size() < 2) throw ArityMismatch("composition without inner terms at " + Where(path, *t));
      require(ArityAt(c[0], sub("comp.f")), static_cast<unsigned>(c.size() - 1), "composition outer term",
              Where(path, *t));
      unsigned k = ArityAt(c[1], sub("comp.g[1]"));
      for (size_t i = 2; i < c.size(); ++i) {
        std::string p = sub("comp.g[" + std::to_string(i) + "]");
        require(ArityAt(c[i], p), k, "composition inner term", Where(p, *c[i]));
      }
      return k;
    }
    case Kind::kRec:
    case Kind::kCase: {
      const char* name = t->kind() == Kind::kRec ? "rec" : "case";
      unsigned k = ArityAt(t->base(), sub(std::string(name) + ".base"));
      unsigned want = t->kind() == Kind::kRec ? k + 2 : k + 1;
      for (char a : t->symbols()) {
        std::string p = sub(std::string(name) + ".'" + a + "'");
        require(ArityAt(t->Branch(a), p), want, std::string(name) + " branch", Where(p, *t->Branch(a)));
      }
      return k + 1;
    }
    case Kind::kSimRec: {
      unsigned n = t->components();
      unsigned k = ArityAt(t->SimBase(1), sub("simrec.base[1]"));
      for (unsigned j = 2; j <= n; ++j) {
        std::string p = sub("simrec.base[" + std::to_string(j) + "]");
        require(ArityAt(t->SimBase(j), p), k, "simrec base", Where(p, *t->SimBase(j)));
      }
      for (unsigned j = 1; j <= n; ++j) {
        for (char a : t->symbols()) {
          std::string p = sub("simrec.step(" + std::to_string(j) + ",'" + a + "')");
          require(ArityAt(t->SimStep(j, a), p), n + k + 1, "simrec step", Where(p, *t->SimStep(j, a)));
        }
      }
      return k + 1;
    }
  }
  return 0;
}

void CheckAlphabetAt(const TermPtr& t, const Alphabet& alphabet) {
  switch (t->kind()) {
    case Kind::kCons:
    case Kind::kRandCons:
      if (!alphabet.Contains(t->symbol())) {
        throw AlphabetMismatch(std::string("symbol '") + t->symbol() + "' not in alphabet \"" +
                               alphabet.symbols() + "\"");
      }
      break;
    case Kind::kRec:
    case Kind::kCase:
    case Kind::kSimRec: {
      std::string have = t->symbols(), want = alphabet.symbols();
      std::sort(have.begin(), have.end());
      std::sort(want.begin(), want.end());
      if (have != want) {
        throw AlphabetMismatch("branches over \"" + t->symbols() + "\" do not cover alphabet \"" +
                               alphabet.symbols() + "\" exactly");
      }
      break;
    }
    default:
      break;
  }
  for (const auto& c : t->children()) CheckAlphabetAt(c, alphabet);
}

using Tuple = std::vector<Word>;
using Joint = std::map<Tuple, mpq_class>;

class Evaluator {
 public:
  Distribution Eval(const TermPtr& t, const std::vector<Word>& args) {
    auto key = std::make_pair(t.get(), args);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    Distribution d = Compute(t, args);
    memo_.emplace(std::move(key), d);
    return d;
  }

 private:
  Distribution Compute(const TermPtr& t, const std::vector<Word>& args) {
    switch (t->kind()) {
      case Kind::kEps:
        return Point(Key(Word()));
      case Kind::kCons:
        return Point(Key(t->symbol() + args[0]));
      case Kind::kRandCons: {
        DistributionBuilder b(KeySpace::kWord);
        b.Add(Key(t->symbol() + args[0]), mpq_class(1, 2));
        b.Add(Key(args[0]), mpq_class(1, 2));
        return b.Build();
      }
      case Kind::kProj:
        return Point(Key(args[t->proj_m() - 1]));
      case Kind::kDet: {
        auto v = t->det()->fn(args);
        return v ? Point(Key(*v)) : Distribution(KeySpace::kWord);
      }
      case Kind::kComp:
        return EvalComp(t, args);
      case Kind::kCase: {
        std::vector<Word> rest(args.begin() + 1, args.end());
        if (args[0].empty()) return Eval(t->base(), rest);
        rest.insert(rest.begin(), args[0].substr(1));
        return Eval(t->Branch(args[0][0]), rest);
      }
      case Kind::kRec:
        return EvalRec(t, args);
      case Kind::kSimRec:
        return EvalSimRecJoint(t, args);
    }
    return Distribution(KeySpace::kWord);
  }

  Distribution EvalComp(const TermPtr& t, const std::vector<Word>& args) {
    const auto& c = t->children();
    std::vector<Distribution> inner;
    for (size_t i = 1; i < c.size(); ++i) {
      inner.push_back(Eval(c[i], args));
      if (inner.back().empty()) return Distribution(KeySpace::kWord);
    }
    DistributionBuilder out(KeySpace::kWord);
    std::vector<Word> point(inner.size());
    ForEachTuple(inner, 0, mpq_class(1), point,
                 [&](const mpq_class& w) { out.AddScaled(Eval(c[0], point), w); });
    return out.Build();
  }

  template <typename F>
  static void ForEachTuple(const std::vector<Distribution>& inner, size_t i, const mpq_class& w,
                           std::vector<Word>& point, F&& emit) {
    if (i == inner.size()) {
      emit(w);
      return;
    }
    for (const auto& [k, p] : inner[i].entries()) {
      point[i] = AsWord(k);
      ForEachTuple(inner, i + 1, w * p.value(), point, emit);
    }
  }

  // f(a·w, v) = g_a(f(w, v), w, v): unfold from the last symbol inwards.
  Distribution EvalRec(const TermPtr& t, const std::vector<Word>& args) {
    const Word& w = args[0];
    std::vector<Word> v(args.begin() + 1, args.end());
    Distribution d = Eval(t->base(), v);
    std::vector<Word> step_args(2 + v.size());
    std::copy(v.begin(), v.end(), step_args.begin() + 2);
    for (size_t i = w.size(); i-- > 0 && !d.empty();) {
      step_args[1] = w.substr(i + 1);
      const TermPtr& g = t->Branch(w[i]);
      d = Bind(d, KeySpace::kWord, [&](const Key& z) {
        step_args[0] = AsWord(z);
        return Eval(g, step_args);
      });
    }
    return d;
  }

  // Joint semantics: components advance together from one shared tuple, so
  // the selected marginal matches a single recursion over the coded tuple.
  Distribution EvalSimRecJoint(const TermPtr& t, const std::vector<Word>& args) {
    unsigned n = t->components();
    const Word& w = args[0];
    std::vector<Word> v(args.begin() + 1, args.end());
    Joint joint;
    {
      std::vector<Distribution> bases;
      for (unsigned j = 1; j <= n; ++j) bases.push_back(Eval(t->SimBase(j), v));
      std::vector<Word> point(n);
      ForEachTuple(bases, 0, mpq_class(1), point,
                   [&](const mpq_class& p) { joint[point] += p; });
    }
    std::vector<Word> step_args(n + 1 + v.size());
    std::copy(v.begin(), v.end(), step_args.begin() + n + 1);
    for (size_t i = w.size(); i-- > 0 && !joint.empty();) {
      step_args[n] = w.substr(i + 1);
      Joint next;
      for (const auto& [tuple, p] : joint) {
        std::copy(tuple.begin(), tuple.end(), step_args.begin());
        std::vector<Distribution> parts;
        for (unsigned j = 1; j <= n; ++j) parts.push_back(Eval(t->SimStep(j, w[i]), step_args));
        std::vector<Word> point(n);
        ForEachTuple(parts, 0, p, point, [&](const mpq_class& q) { next[point] += q; });
      }
      joint = std::move(next);
    }
    DistributionBuilder out(KeySpace::kWord);
    for (const auto& [tuple, p] : joint) out.Add(Key(tuple[t->index() - 1]), p);
    return out.Build();
  }

  std::map<std::pair<const Term*, std::vector<Word>>, Distribution> memo_;
};

}  // namespace

unsigned Arity(const TermPtr& t) { return ArityAt(t, ""); }

size_t Size(const TermPtr& t) {
  size_t n = 1;
  for (const auto& c : t->children()) n += Size(c);
  return n;
}

bool StructurallyEqual(const TermPtr& a, const TermPtr& b) {
  if (a->kind() != b->kind() || a->symbol() != b->symbol() || a->proj_n() != b->proj_n() ||
      a->proj_m() != b->proj_m() || a->index() != b->index() ||
      a->components() != b->components() || a->symbols() != b->symbols()) {
    return false;
  }
  if (a->kind() == Kind::kDet && a->det()->name != b->det()->name) return false;
  if (a->children().size() != b->children().size()) return false;
  for (size_t i = 0; i < a->children().size(); ++i) {
    if (!StructurallyEqual(a->children()[i], b->children()[i])) return false;
  }
  return true;
}

void CheckAlphabet(const TermPtr& t, const Alphabet& alphabet) { CheckAlphabetAt(t, alphabet); }

bool ContainsSimRec(const TermPtr& t) {
  if (t->kind() == Kind::kSimRec) return true;
  return std::any_of(t->children().begin(), t->children().end(), ContainsSimRec);
}

bool ContainsDet(const TermPtr& t) {
  if (t->kind() == Kind::kDet) return true;
  return std::any_of(t->children().begin(), t->children().end(), ContainsDet);
}

Distribution EvalWord(const TermPtr& t, const std::vector<Word>& args, const Alphabet& alphabet) {
  unsigned k = Arity(t);
  if (args.size() != k) {
    throw ArityMismatch("term has arity " + std::to_string(k) + " but got " +
                        std::to_string(args.size()) + " arguments");
  }
  CheckAlphabet(t, alphabet);
  for (const auto& a : args) {
    if (!alphabet.Covers(a)) {
      throw AlphabetMismatch("argument \"" + a + "\" not over alphabet \"" + alphabet.symbols() +
                             "\"");
    }
  }
  Evaluator ev;
  return ev.Eval(t, args);
}

Distribution EvalSimRec(const TermPtr& t, const std::vector<Word>& args, const Alphabet& alphabet) {
  if (t->kind() != Kind::kSimRec || t->index() < 1 || t->index() > t->components()) {
    throw IndexOutOfRange("not a simrec with a valid component index");
  }
  return EvalWord(t, args, alphabet);
}

namespace {

bool IsMarker(char c) { return c == kSeparator || c == kPad; }

// Least p >= 0 with (p + base)^m >= need.
size_t PadFor(size_t base, size_t need, unsigned m) {
  auto pow_ge = [&](size_t len) {
    mpz_class v;
    mpz_ui_pow_ui(v.get_mpz_t(), len, m);
    return v >= mpz_class(static_cast<unsigned long>(need));
  };
  size_t p = 0;
  while (!pow_ge(p + base)) ++p;
  return p;
}

}  // namespace

Word CoupleEncode(const Word& u, const Word& v, unsigned m) {
  if (m == 0) throw OutOfRange("couple needs m >= 1");
  if (std::any_of(u.begin(), u.end(), IsMarker)) {
    throw DecodeError("first component of a couple may not contain marker symbols");
  }
  size_t body = u.size() + 1 + v.size();
  size_t pad = m == 1 ? u.size() + v.size() + 1 : PadFor(body, 2 * u.size() + 2 * v.size() + 2, m);
  return Word(pad, kPad) + u + kSeparator + v;
}

Word CoupleFirst(const Word& t, unsigned) {
  size_t i = 0;
  while (i < t.size() && t[i] == kPad) ++i;
  size_t sep = t.find(kSeparator, i);
  if (sep == std::string::npos) throw DecodeError("couple code without separator");
  Word u = t.substr(i, sep - i);
  if (std::any_of(u.begin(), u.end(), IsMarker)) throw DecodeError("malformed couple code");
  return u;
}

Word CoupleSecond(const Word& t, unsigned m) {
  Word u = CoupleFirst(t, m);
  return t.substr(t.find(kSeparator) + 1);
}

namespace {

DetWordFnPtr MakeWordDet(std::string name, unsigned arity,
                         std::function<std::optional<Word>(const std::vector<Word>&)> fn) {
  auto def = std::make_shared<DetWordFnDef>();
  def->name = std::move(name);
  def->arity = arity;
  def->fn = std::move(fn);
  def->tiers.args.assign(arity, 0);
  def->tiers.result = 0;
  return def;
}

std::map<std::string, DetWordFnPtr> BuildWordDets() {
  std::map<std::string, DetWordFnPtr> r;
  r["couple"] = MakeWordDet("couple", 2, [](const std::vector<Word>& a) -> std::optional<Word> {
    if (std::any_of(a[0].begin(), a[0].end(), IsMarker)) return std::nullopt;
    return CoupleEncode(a[0], a[1], 1);
  });
  r["first"] = MakeWordDet("first", 1, [](const std::vector<Word>& a) -> std::optional<Word> {
    try {
      return CoupleFirst(a[0], 1);
    } catch (const DecodeError&) {
      return std::nullopt;
    }
  });
  r["second"] = MakeWordDet("second", 1, [](const std::vector<Word>& a) -> std::optional<Word> {
    try {
      return CoupleSecond(a[0], 1);
    } catch (const DecodeError&) {
      return std::nullopt;
    }
  });
  return r;
}

// Component j (1-based) of an n-tuple coded as couple(x1, couple(x2, ... xn)),
// applied to `arg`.
TermPtr Decode(unsigned j, unsigned n, TermPtr arg) {
  TermPtr t = std::move(arg);
  for (unsigned s = 1; s < j; ++s) t = Comp(Det(WordDet("second")), {t});
  if (j < n) t = Comp(Det(WordDet("first")), {t});
  return t;
}

TermPtr Encode(const std::vector<TermPtr>& parts, size_t from = 0) {
  if (from + 1 == parts.size()) return parts[from];
  return Comp(Det(WordDet("couple")), {parts[from], Encode(parts, from + 1)});
}

}  // namespace

const std::map<std::string, DetWordFnPtr>& WordDetRegistry() {
  static const auto* const registry = new std::map<std::string, DetWordFnPtr>(BuildWordDets());
  return *registry;
}

const DetWordFnPtr& WordDet(const std::string& name) {
  auto it = WordDetRegistry().find(name);
  if (it == WordDetRegistry().end()) throw UnknownName("no word function named '" + name + "'");
  return it->second;
}

Alphabet TupledAlphabet(const Alphabet& alphabet) {
  return alphabet.Extended(std::string{kSeparator, kPad});
}

TermPtr TupledExpand(const TermPtr& t, const Alphabet& alphabet) {
  if (t->kind() != Kind::kSimRec) throw IndexOutOfRange("tupledExpand needs a simrec");
  for (char c : alphabet.symbols()) {
    if (IsMarker(c)) throw AlphabetMismatch("alphabet contains a reserved couple marker");
  }
  CheckAlphabet(t, alphabet);
  unsigned n = t->components();
  unsigned arity = Arity(t);
  unsigned k = arity - 1;
  std::vector<TermPtr> bases;
  for (unsigned j = 1; j <= n; ++j) bases.push_back(t->SimBase(j));
  TermPtr base = Encode(bases);

  // Step arguments: (prev, w, v1..vk) → source arguments (f1..fn, w, v1..vk).
  std::vector<TermPtr> source_args;
  for (unsigned j = 1; j <= n; ++j) source_args.push_back(Decode(j, n, Proj(k + 2, 1)));
  for (unsigned p = 2; p <= k + 2; ++p) source_args.push_back(Proj(k + 2, p));

  std::vector<std::pair<char, TermPtr>> steps;
  for (char a : t->symbols()) {
    std::vector<TermPtr> parts;
    for (unsigned j = 1; j <= n; ++j) parts.push_back(Comp(t->SimStep(j, a), source_args));
    steps.emplace_back(a, Encode(parts));
  }
  TermPtr rec = Rec(base, std::move(steps));
  if (n == 1) return rec;
  return Comp(Decode(t->index(), n, Proj(1, 1)), {rec});
}

}  // namespace word
}  // namespace probrec
