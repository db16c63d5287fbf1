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

#include "probrec/nat_term.hpp"

#include <utility>

namespace probrec {
namespace nat {

TermPtr Term::Make(Kind kind, std::vector<TermPtr> children, unsigned n, unsigned m,
                   DetFnPtr det, SourcePos pos) {
  auto t = std::make_shared<Term>();
  t->kind_ = kind;
  t->children_ = std::move(children);
  t->n_ = n;
  t->m_ = m;
  t->det_ = std::move(det);
  t->pos_ = pos;
  return t;
}

TermPtr Term::WithPos(SourcePos pos) const {
  auto t = std::make_shared<Term>(*this);
  t->pos_ = pos;
  return t;
}

TermPtr Zero() { return Term::Make(Kind::kZero, {}); }
TermPtr Succ() { return Term::Make(Kind::kSucc, {}); }
TermPtr Proj(unsigned n, unsigned m) { return Term::Make(Kind::kProj, {}, n, m); }
TermPtr Coin() { return Term::Make(Kind::kCoin, {}); }

TermPtr Comp(TermPtr f, std::vector<TermPtr> gs) {
  std::vector<TermPtr> children;
  children.push_back(std::move(f));
  for (auto& g : gs) children.push_back(std::move(g));
  return Term::Make(Kind::kComp, std::move(children));
}

TermPtr PrimRec(TermPtr base, TermPtr step) {
  return Term::Make(Kind::kPrimRec, {std::move(base), std::move(step)});
}

TermPtr Mu(TermPtr body) { return Term::Make(Kind::kMu, {std::move(body)}); }

TermPtr Det(DetFnPtr def) { return Term::Make(Kind::kDet, {}, 0, 0, std::move(def)); }

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
  switch (t->kind()) {
    case Kind::kZero:
    case Kind::kSucc:
    case Kind::kCoin:
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
      unsigned fa = ArityAt(c[0], sub("comp.f"));
      if (fa != c.size() - 1) {
        throw ArityMismatch("composition: outer arity " + std::to_string(fa) + " but " +
                            std::to_string(c.size() - 1) + " inner terms at " + Where(path, *t));
      }
      unsigned k = 0;
      for (size_t i = 1; i < c.size(); ++i) {
        unsigned a = ArityAt(c[i], sub("comp.g[" + std::to_string(i) + "]"));
        if (i == 1) k = a;
        if (a != k) {
          throw ArityMismatch("composition: inner terms disagree on arity (" +
                              std::to_string(k) + " vs " + std::to_string(a) + ") at " +
                              Where(sub("comp.g[" + std::to_string(i) + "]"), *c[i]));
        }
      }
      return k;
    }
    case Kind::kPrimRec: {
      unsigned b = ArityAt(t->children()[0], sub("primrec.base"));
      unsigned s = ArityAt(t->children()[1], sub("primrec.step"));
      if (s != b + 2) {
        throw ArityMismatch("primrec: step arity " + std::to_string(s) + " must be base arity + 2 (" +
                            std::to_string(b + 2) + ") at " + Where(path, *t));
      }
      return b + 1;
    }
    case Kind::kMu: {
      unsigned b = ArityAt(t->children()[0], sub("mu.body"));
      if (b < 2) throw ArityMismatch("mu: body arity must be at least 2 at " + Where(path, *t));
      return b - 1;
    }
  }
  return 0;
}

// Deterministic evaluation state: a memo table per top-level call.
class Evaluator {
 public:
  explicit Evaluator(const EvalBudget& budget) : budget_(budget) {}

  Distribution Eval(const TermPtr& t, const std::vector<Nat>& args) {
    auto key = std::make_pair(t.get(), args);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    Distribution d = Compute(t, args);
    memo_.emplace(std::move(key), d);
    return d;
  }

 private:
  Distribution Compute(const TermPtr& t, const std::vector<Nat>& args) {
    switch (t->kind()) {
      case Kind::kZero:
        return Point(Key(Nat(0)));
      case Kind::kSucc:
        return Point(Key(Nat(args[0] + 1)));
      case Kind::kProj:
        return Point(Key(args[t->proj_m() - 1]));
      case Kind::kCoin: {
        DistributionBuilder b(KeySpace::kNat);
        b.Add(Key(args[0]), mpq_class(1, 2));
        b.Add(Key(Nat(args[0] + 1)), mpq_class(1, 2));
        return b.Build();
      }
      case Kind::kDet: {
        auto v = t->det()->fn(args, budget_.recUnrollCap);
        return v ? Point(Key(*v)) : Distribution(KeySpace::kNat);
      }
      case Kind::kComp:
        return EvalComp(t, args);
      case Kind::kPrimRec:
        return EvalPrimRec(t, args);
      case Kind::kMu:
        return EvalMu(t, args);
    }
    return Distribution(KeySpace::kNat);
  }

  // Σ over the product support of the inner distributions, then through f.
  Distribution EvalComp(const TermPtr& t, const std::vector<Nat>& args) {
    const auto& c = t->children();
    if (budget_.closedFormTails) {
      if (auto closed = TryClosedFormTail(t, args)) return *closed;
    }
    std::vector<Distribution> inner;
    for (size_t i = 1; i < c.size(); ++i) {
      inner.push_back(Eval(c[i], args));
      if (inner.back().empty()) return Distribution(KeySpace::kNat);
    }
    DistributionBuilder out(KeySpace::kNat);
    std::vector<Nat> point(inner.size());
    ForEachTuple(inner, 0, mpq_class(1), point, [&](const mpq_class& w) {
      out.AddScaled(Eval(c[0], point), w);
    });
    return out.Build();
  }

  template <typename F>
  void ForEachTuple(const std::vector<Distribution>& inner, size_t i, const mpq_class& w,
                    std::vector<Nat>& point, F&& emit) {
    if (i == inner.size()) {
      emit(w);
      return;
    }
    for (const auto& [k, p] : inner[i].entries()) {
      point[i] = AsNat(k);
      ForEachTuple(inner, i + 1, w * p.value(), point, emit);
    }
  }

  // Comp(det f, [g1..g_{n-1}, mu body]) where body ignores its search
  // variable and f is eventually periodic in its last argument. The μ is
  // geometric, P(y) = p0 · s^y, so the infinite sum over y folds into a
  // finite one.
  std::optional<Distribution> TryClosedFormTail(const TermPtr& t, const std::vector<Nat>& args) {
    const auto& c = t->children();
    const TermPtr& f = c[0];
    const TermPtr& last = c.back();
    if (f->kind() != Kind::kDet || !f->det()->periodic_in_last) return std::nullopt;
    if (last->kind() != Kind::kMu) return std::nullopt;
    const TermPtr& body = last->children()[0];
    unsigned body_arity = Arity(body);
    if (DependsOnArg(body, body_arity)) return std::nullopt;

    std::vector<Nat> body_args = args;
    body_args.push_back(0);
    Distribution db = Eval(body, body_args);
    mpq_class p0 = db.At(Key(Nat(0))).value();
    mpq_class s = db.mass().value() - p0;

    std::vector<Distribution> inner;
    for (size_t i = 1; i + 1 < c.size(); ++i) {
      inner.push_back(Eval(c[i], args));
      if (inner.back().empty()) return Distribution(KeySpace::kNat);
    }
    DistributionBuilder out(KeySpace::kNat);
    std::vector<Nat> prefix(inner.size());
    bool fallback = false;
    ForEachTuple(inner, 0, mpq_class(1), prefix, [&](const mpq_class& w) {
      if (fallback || sgn(p0) == 0) return;
      auto per = f->det()->periodic_in_last(prefix);
      if (!per || per->period == 0 ||
          per->preperiod + per->period > budget_.recUnrollCap) {
        fallback = true;
        return;
      }
      std::vector<Nat> full = prefix;
      full.push_back(0);
      auto value_at = [&](uint64_t i) {
        full.back() = Nat(static_cast<unsigned long>(i));
        return f->det()->fn(full, budget_.recUnrollCap);
      };
      mpq_class weight = w * p0;  // w · p0 · s^i as i advances
      for (uint64_t i = 0; i < per->preperiod; ++i) {
        if (auto v = value_at(i)) out.Add(Key(*v), weight);
        weight *= s;
      }
      // Σ_{j>=0} s^{jT} = 1 / (1 - s^T); s < 1 because p0 > 0.
      mpq_class sT = 1;
      for (uint64_t i = 0; i < per->period; ++i) sT *= s;
      mpq_class geometric = 1 / (1 - sT);
      for (uint64_t r = 0; r < per->period; ++r) {
        if (auto v = value_at(per->preperiod + r)) {
          out.Add(Key(*v), mpq_class(weight * geometric));
        }
        weight *= s;
      }
    });
    if (fallback) return std::nullopt;
    return out.Build();
  }

  Distribution EvalPrimRec(const TermPtr& t, const std::vector<Nat>& args) {
    std::vector<Nat> xs(args.begin(), args.end() - 1);
    const Nat& y = args.back();
    if (y > Nat(static_cast<unsigned long>(budget_.recUnrollCap))) {
      return Distribution(KeySpace::kNat);
    }
    Distribution d = Eval(t->children()[0], xs);
    unsigned long n = y.get_ui();
    std::vector<Nat> step_args = xs;
    step_args.push_back(0);
    step_args.push_back(0);
    for (unsigned long i = 0; i < n && !d.empty(); ++i) {
      step_args[xs.size()] = Nat(i);
      d = Bind(d, KeySpace::kNat, [&](const Key& z) {
        step_args[xs.size() + 1] = AsNat(z);
        return Eval(t->children()[1], step_args);
      });
    }
    return d;
  }

  // P(y) = body(x,y)(0) · Π_{z<y} Σ_{k>0} body(x,z)(k).
  Distribution EvalMu(const TermPtr& t, const std::vector<Nat>& args) {
    DistributionBuilder out(KeySpace::kNat);
    mpq_class survive = 1;
    std::vector<Nat> body_args = args;
    body_args.push_back(0);
    for (uint64_t y = 0; y < budget_.muBound && sgn(survive) > 0; ++y) {
      body_args.back() = Nat(static_cast<unsigned long>(y));
      Distribution d = Eval(t->children()[0], body_args);
      mpq_class p0 = d.At(Key(Nat(0))).value();
      out.Add(Key(Nat(static_cast<unsigned long>(y))), survive * p0);
      survive *= d.mass().value() - p0;
    }
    return out.Build();
  }

  const EvalBudget& budget_;
  std::map<std::pair<const Term*, std::vector<Nat>>, Distribution> memo_;
};

}  // namespace

unsigned Arity(const TermPtr& t) { return ArityAt(t, ""); }

size_t Size(const TermPtr& t) {
  size_t n = 1;
  for (const auto& c : t->children()) n += Size(c);
  return n;
}

bool DependsOnArg(const TermPtr& t, unsigned index) {
  switch (t->kind()) {
    case Kind::kZero:
      return false;
    case Kind::kSucc:
    case Kind::kCoin:
      return index == 1;
    case Kind::kProj:
      return t->proj_m() == index;
    case Kind::kDet:
      return true;
    case Kind::kComp:
      for (size_t i = 1; i < t->children().size(); ++i) {
        if (DependsOnArg(t->children()[i], index)) return true;
      }
      return false;
    case Kind::kPrimRec: {
      unsigned k = Arity(t->children()[0]);
      if (index == k + 1) return true;
      return DependsOnArg(t->children()[0], index) || DependsOnArg(t->children()[1], index);
    }
    case Kind::kMu:
      return DependsOnArg(t->children()[0], index);
  }
  return true;
}

bool StructurallyEqual(const TermPtr& a, const TermPtr& b) {
  if (a->kind() != b->kind() || a->proj_n() != b->proj_n() || a->proj_m() != b->proj_m()) {
    return false;
  }
  if (a->kind() == Kind::kDet && a->det()->name != b->det()->name) return false;
  if (a->children().size() != b->children().size()) return false;
  for (size_t i = 0; i < a->children().size(); ++i) {
    if (!StructurallyEqual(a->children()[i], b->children()[i])) return false;
  }
  return true;
}

Distribution EvalNat(const TermPtr& t, const std::vector<Nat>& args, const EvalBudget& budget) {
  unsigned k = Arity(t);
  if (args.size() != k) {
    throw ArityMismatch("term has arity " + std::to_string(k) + " but got " +
                        std::to_string(args.size()) + " arguments");
  }
  Evaluator ev(budget);
  return ev.Eval(t, args);
}

Prob DeficitBound(const TermPtr& t, const std::vector<Nat>& args, const EvalBudget& budget) {
  return EvalNat(t, args, budget).deficit();
}

void Registry::AddTerm(const std::string& name, TermPtr t) { terms_[name] = std::move(t); }

void Registry::AddDet(DetFnPtr def) {
  std::string name = def->name;
  dets_[name] = std::move(def);
}

const TermPtr& Registry::Term(const std::string& name) const {
  auto it = terms_.find(name);
  if (it == terms_.end()) throw UnknownName("no term named '" + name + "'");
  return it->second;
}

const DetFnPtr& Registry::Det(const std::string& name) const {
  auto it = dets_.find(name);
  if (it == dets_.end()) throw UnknownName("no classical function named '" + name + "'");
  return it->second;
}

Nat CantorPair(const Nat& a, const Nat& b) {
  Nat s = a + b;
  return s * (s + 1) / 2 + b;
}

std::pair<Nat, Nat> CantorUnpair(const Nat& z) {
  // w = floor((sqrt(8z + 1) - 1) / 2)
  Nat r;
  Nat t = 8 * z + 1;
  mpz_sqrt(r.get_mpz_t(), t.get_mpz_t());
  Nat w = (r - 1) / 2;
  Nat tri = w * (w + 1) / 2;
  Nat b = z - tri;
  return {w - b, b};
}

Nat EncodeRational(const mpq_class& q) {
  mpq_class c = q;
  c.canonicalize();
  if (sgn(c) < 0) throw OutOfRange("negative rational cannot be encoded");
  return CantorPair(c.get_num(), c.get_den());
}

std::optional<mpq_class> DecodeRational(const Nat& code) {
  auto [num, den] = CantorUnpair(code);
  if (den == 0) return std::nullopt;
  mpq_class q(num, den);
  q.canonicalize();
  return q;
}

namespace {

// Digits of a/b with b = 2^e · o, o odd: preperiod e, period ord_o(2).
std::optional<Periodicity> DigitPeriodicity(const mpq_class& q, uint64_t cap) {
  if (sgn(q) < 0 || q > 1) return std::nullopt;
  if (q == 1) return Periodicity{0, 1};
  Nat o = q.get_den();
  uint64_t e = mpz_scan1(o.get_mpz_t(), 0);
  o >>= e;
  if (o == 1) return Periodicity{e, 1};
  Nat x = 2 % o;
  uint64_t order = 1;
  while (x != 1) {
    if (++order > cap) return std::nullopt;
    x = (x * 2) % o;
  }
  return Periodicity{e, order};
}

DetFnPtr MakeDet(std::string name, unsigned arity,
                 std::function<std::optional<Nat>(const std::vector<Nat>&, uint64_t)> fn) {
  auto def = std::make_shared<DetFnDef>();
  def->name = std::move(name);
  def->arity = arity;
  def->fn = std::move(fn);
  return def;
}

Registry BuildStdlib() {
  Registry r;
  r.AddDet(MakeDet("pair", 2, [](const std::vector<Nat>& a, uint64_t) {
    return std::optional<Nat>(CantorPair(a[0], a[1]));
  }));
  r.AddDet(MakeDet("unpairLeft", 1, [](const std::vector<Nat>& a, uint64_t) {
    return std::optional<Nat>(CantorUnpair(a[0]).first);
  }));
  r.AddDet(MakeDet("unpairRight", 1, [](const std::vector<Nat>& a, uint64_t) {
    return std::optional<Nat>(CantorUnpair(a[0]).second);
  }));
  r.AddDet(MakeDet("mul", 2, [](const std::vector<Nat>& a, uint64_t) {
    return std::optional<Nat>(a[0] * a[1]);
  }));
  r.AddDet(MakeDet("pred", 1, [](const std::vector<Nat>& a, uint64_t) {
    return std::optional<Nat>(a[0] == 0 ? Nat(0) : Nat(a[0] - 1));
  }));
  auto digit = std::make_shared<DetFnDef>();
  digit->name = "binaryDigit";
  digit->arity = 2;
  digit->fn = [](const std::vector<Nat>& a, uint64_t cap) -> std::optional<Nat> {
    auto q = DecodeRational(a[0]);
    if (!q) return std::nullopt;
    if (a[1] > Nat(static_cast<unsigned long>(cap))) {
      // Reduce a far index through the period before expanding.
      auto per = DigitPeriodicity(*q, cap);
      if (!per) return std::nullopt;
      Nat i = a[1];
      Nat pre(static_cast<unsigned long>(per->preperiod));
      Nat reduced = pre + (i - pre) % Nat(static_cast<unsigned long>(per->period));
      auto d = BinaryDigit(*q, reduced);
      return d ? std::optional<Nat>(Nat(*d)) : std::nullopt;
    }
    auto d = BinaryDigit(*q, a[1]);
    return d ? std::optional<Nat>(Nat(*d)) : std::nullopt;
  };
  digit->periodic_in_last = [](const std::vector<Nat>& prefix) -> std::optional<Periodicity> {
    auto q = DecodeRational(prefix[0]);
    if (!q) return Periodicity{0, 1};  // undefined everywhere: trivially periodic
    if (sgn(*q) < 0 || *q > 1) return Periodicity{0, 1};
    return DigitPeriodicity(*q, uint64_t{1} << 20);
  };
  r.AddDet(digit);

  TermPtr id = Proj(1, 1);
  TermPtr add = PrimRec(Proj(1, 1), Comp(Succ(), {Proj(3, 3)}));
  TermPtr rand = Comp(Coin(), {Zero()});
  TermPtr h = Mu(Comp(rand, {Proj(2, 1)}));
  r.AddTerm("id", id);
  r.AddTerm("add", add);
  r.AddTerm("rand", rand);
  r.AddTerm("h", h);
  r.AddTerm("fShift", Comp(add, {h, id}));
  r.AddTerm("i2p", Comp(Det(r.Det("binaryDigit")), {id, h}));
  for (const auto& [name, def] : r.dets()) r.AddTerm(name, Det(def));
  return r;
}

}  // namespace

std::optional<unsigned> BinaryDigit(const mpq_class& q, const Nat& i) {
  if (sgn(q) < 0 || q > 1) return std::nullopt;
  if (q == 1) return 1u;
  // floor(q · 2^{i+1}) mod 2
  Nat scaled = q.get_num();
  mpz_mul_2exp(scaled.get_mpz_t(), scaled.get_mpz_t(), i.get_ui() + 1);
  Nat fl = scaled / q.get_den();
  return static_cast<unsigned>(mpz_odd_p(fl.get_mpz_t()) ? 1 : 0);
}

const Registry& Stdlib() {
  static const Registry* const registry = new Registry(BuildStdlib());
  return *registry;
}

}  // namespace nat
}  // namespace probrec
