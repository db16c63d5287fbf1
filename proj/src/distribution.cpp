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

#include "probrec/distribution.hpp"

#include <algorithm>

#include "json.hpp"

namespace probrec {
namespace {

bool InUnitInterval(const mpq_class& q) { return sgn(q) >= 0 && q <= 1; }

bool AllDigits(std::string_view s) {
  return !s.empty() &&
         std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

Prob::Prob(const mpq_class& value) : value_(value) {
  value_.canonicalize();
  if (!InUnitInterval(value_)) {
    throw InvalidProbability("probability out of [0,1]: " + RationalString(value_));
  }
}

Prob::Prob(unsigned long num, unsigned long den) {
  if (den == 0) throw InvalidProbability("zero denominator");
  value_ = mpq_class(num, den);
  value_.canonicalize();
  if (!InUnitInterval(value_)) {
    throw InvalidProbability("probability out of [0,1]: " + RationalString(value_));
  }
}

Prob Prob::Dyadic(unsigned long k) {
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), 2, k);
  return Prob(mpq_class(mpz_class(1), den));
}

Prob Prob::Parse(std::string_view text) { return Prob(ParseRational(text)); }

std::string Prob::str() const { return RationalString(value_); }

Prob Prob::Complement() const {
  Prob out;
  out.value_ = 1 - value_;
  return out;
}

std::string RationalString(const mpq_class& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

mpq_class ParseRational(std::string_view text) {
  auto slash = text.find('/');
  std::string_view num = text.substr(0, slash);
  std::string_view den =
      slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
  bool negative = !num.empty() && num.front() == '-';
  if (negative) num.remove_prefix(1);
  if (!AllDigits(num) || !AllDigits(den)) {
    throw InvalidProbability("malformed rational: " + std::string(text));
  }
  mpz_class n{std::string(num)}, d{std::string(den)};
  if (d == 0) throw InvalidProbability("zero denominator: " + std::string(text));
  if (negative) n = -n;
  mpq_class q(n, d);
  q.canonicalize();
  return q;
}

std::string_view KeySpaceName(KeySpace ks) {
  return ks == KeySpace::kNat ? "nat" : "word";
}

KeySpace KeySpaceOf(const Key& k) {
  return std::holds_alternative<Nat>(k) ? KeySpace::kNat : KeySpace::kWord;
}

std::string KeyString(const Key& k) {
  if (const Nat* n = std::get_if<Nat>(&k)) return n->get_str();
  return std::get<Word>(k);
}

const Nat& AsNat(const Key& k) {
  if (const Nat* n = std::get_if<Nat>(&k)) return *n;
  throw KeySpaceMismatch("expected a natural-number key");
}

const Word& AsWord(const Key& k) {
  if (const Word* w = std::get_if<Word>(&k)) return *w;
  throw KeySpaceMismatch("expected a word key");
}

bool ShortLex(const Word& a, const Word& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

bool KeyLess::operator()(const Key& a, const Key& b) const {
  if (a.index() != b.index()) return a.index() < b.index();
  if (const Nat* x = std::get_if<Nat>(&a)) return *x < std::get<Nat>(b);
  return ShortLex(std::get<Word>(a), std::get<Word>(b));
}

Distribution Distribution::Point(const Key& k) {
  Distribution d(KeySpaceOf(k));
  d.entries_.emplace(k, Prob::One());
  d.mass_ = Prob::One();
  return d;
}

Prob Distribution::At(const Key& k) const {
  auto it = entries_.find(k);
  return it == entries_.end() ? Prob::Zero() : it->second;
}

void DistributionBuilder::Add(const Key& k, const mpq_class& weight) {
  if (KeySpaceOf(k) != keyspace_) {
    throw KeySpaceMismatch("key " + KeyString(k) + " is not in key space " +
                           std::string(KeySpaceName(keyspace_)));
  }
  if (sgn(weight) == 0) return;
  auto [it, inserted] = acc_.try_emplace(k, weight);
  if (!inserted) it->second += weight;
}

void DistributionBuilder::AddScaled(const Distribution& d, const mpq_class& weight) {
  if (d.keyspace() != keyspace_) throw KeySpaceMismatch("mixed key spaces");
  if (sgn(weight) == 0) return;
  for (const auto& [k, p] : d.entries()) {
    auto [it, inserted] = acc_.try_emplace(k, p.value() * weight);
    if (!inserted) it->second += p.value() * weight;
  }
}

Distribution DistributionBuilder::Build() const {
  Distribution out(keyspace_);
  mpq_class total = 0;
  for (const auto& [k, w] : acc_) {
    if (sgn(w) < 0) throw InvalidProbability("negative mass at " + KeyString(k));
    if (sgn(w) == 0) continue;
    total += w;
    out.entries_.emplace_hint(out.entries_.end(), k, Prob(w));
  }
  if (total > 1) throw MassOverflow("total mass " + RationalString(total) + " exceeds 1");
  out.mass_ = Prob(total);
  return out;
}

Distribution Point(const Key& k) { return Distribution::Point(k); }
Prob Mass(const Distribution& d) { return d.mass(); }
Prob Deficit(const Distribution& d) { return d.deficit(); }

Distribution ScaleAdd(KeySpace ks,
                      const std::vector<std::pair<Prob, Distribution>>& pairs) {
  DistributionBuilder b(ks);
  for (const auto& [w, d] : pairs) {
    if (d.keyspace() != ks) throw KeySpaceMismatch("scaleAdd over mixed key spaces");
    b.AddScaled(d, w.value());
  }
  return b.Build();
}

Distribution ScaleAdd(const std::vector<std::pair<Prob, Distribution>>& pairs) {
  KeySpace ks = pairs.empty() ? KeySpace::kNat : pairs.front().second.keyspace();
  return ScaleAdd(ks, pairs);
}

Distribution Bind(const Distribution& d, KeySpace out,
                  const std::function<Distribution(const Key&)>& f) {
  DistributionBuilder b(out);
  for (const auto& [k, p] : d.entries()) b.AddScaled(f(k), p.value());
  return b.Build();
}

bool EqualExact(const Distribution& a, const Distribution& b) {
  if (a.keyspace() != b.keyspace()) throw KeySpaceMismatch("equalExact across key spaces");
  return a == b;
}

Prob TvDistance(const Distribution& a, const Distribution& b) {
  if (a.keyspace() != b.keyspace()) throw KeySpaceMismatch("tvDistance across key spaces");
  mpq_class sum = 0;
  auto ia = a.entries().begin(), ib = b.entries().begin();
  KeyLess less;
  while (ia != a.entries().end() || ib != b.entries().end()) {
    if (ib == b.entries().end() || (ia != a.entries().end() && less(ia->first, ib->first))) {
      sum += ia->second.value();
      ++ia;
    } else if (ia == a.entries().end() || less(ib->first, ia->first)) {
      sum += ib->second.value();
      ++ib;
    } else {
      sum += abs(ia->second.value() - ib->second.value());
      ++ia;
      ++ib;
    }
  }
  sum += abs(a.mass().value() - b.mass().value());
  return Prob(mpq_class(sum / 2));
}

bool PointwiseLeq(const Distribution& a, const Distribution& b) {
  if (a.keyspace() != b.keyspace()) throw KeySpaceMismatch("comparison across key spaces");
  for (const auto& [k, p] : a.entries()) {
    if (!(p <= b.At(k))) return false;
  }
  return true;
}

uint64_t SplitMix64(uint64_t seed) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Sampler::Sampler(const Distribution& d) {
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 2, 64);
  mpq_class cumulative = 0;
  for (const auto& [k, p] : d.entries()) {
    cumulative += p.value();
    mpq_class scaled = cumulative * scale;
    mpz_class up;
    mpz_cdiv_q(up.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
    keys_.push_back(k);
    upper_.push_back(up);
  }
}

std::optional<Key> Sampler::Draw(uint64_t seed) const {
  uint64_t x = SplitMix64(seed);
  mpz_class xz;
  mpz_import(xz.get_mpz_t(), 1, 1, sizeof(x), 0, 0, &x);
  auto it = std::upper_bound(upper_.begin(), upper_.end(), xz);
  if (it == upper_.end()) return std::nullopt;
  return keys_[static_cast<size_t>(it - upper_.begin())];
}

std::optional<Key> Sample(const Distribution& d, uint64_t seed) {
  return Sampler(d).Draw(seed);
}

std::string ToJson(const Distribution& d, int indent) {
  nlohmann::ordered_json j;
  j["keyspace"] = std::string(KeySpaceName(d.keyspace()));
  auto entries = nlohmann::ordered_json::array();
  for (const auto& [k, p] : d.entries()) {
    nlohmann::ordered_json e;
    e["key"] = KeyString(k);
    e["p"] = p.str();
    entries.push_back(std::move(e));
  }
  j["entries"] = std::move(entries);
  j["deficit"] = d.deficit().str();
  return j.dump(indent);
}

Distribution FromJson(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(1, 1, std::string("invalid distribution JSON: ") + e.what(), "");
  }
  try {
    std::string ks = j.at("keyspace").get<std::string>();
    if (ks != "nat" && ks != "word") throw DecodeError("unknown keyspace " + ks);
    KeySpace space = ks == "nat" ? KeySpace::kNat : KeySpace::kWord;
    DistributionBuilder b(space);
    std::optional<Key> previous;
    for (const auto& e : j.at("entries")) {
      std::string key = e.at("key").get<std::string>();
      if (space == KeySpace::kNat && !AllDigits(key)) {
        throw DecodeError("bad natural key " + key);
      }
      Key k = space == KeySpace::kNat ? Key(Nat(key)) : Key(key);
      if (previous && !KeyLess()(*previous, k)) {
        throw DecodeError("entries not in canonical order at key " + key);
      }
      Prob p = Prob::Parse(e.at("p").get<std::string>());
      if (p.IsZero()) throw DecodeError("zero-mass entry at key " + key);
      b.Add(k, p.value());
      previous = k;
    }
    Distribution d = b.Build();
    Prob deficit = Prob::Parse(j.at("deficit").get<std::string>());
    if (!(deficit == d.deficit())) {
      throw DecodeError("deficit " + deficit.str() + " does not match 1 - mass " +
                        d.deficit().str());
    }
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw DecodeError(std::string("malformed distribution JSON: ") + e.what());
  }
}

}  // namespace probrec
