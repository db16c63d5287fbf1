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

// Exact pseudodistributions: finite maps from keys to strictly positive
// rational masses whose total is at most one. The missing mass (the
// deficit) is the probability of divergence; there is no explicit bottom
// key.

#ifndef PROBREC_DISTRIBUTION_HPP_
#define PROBREC_DISTRIBUTION_HPP_

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "probrec/errors.hpp"

namespace probrec {

using Nat = mpz_class;
using Word = std::string;

// A rational in [0, 1], always in lowest terms with positive denominator.
class Prob {
 public:
  Prob() = default;
  explicit Prob(const mpq_class& value);
  Prob(unsigned long num, unsigned long den);

  static Prob Zero() { return Prob(); }
  static Prob One() { return Prob(1, 1); }
  // 1 / 2^k.
  static Prob Dyadic(unsigned long k);
  // Accepts "num/den" or a bare integer; rejects values outside [0, 1].
  static Prob Parse(std::string_view text);

  const mpq_class& value() const { return value_; }
  std::string str() const;
  double ToDouble() const { return value_.get_d(); }
  Prob Complement() const;
  bool IsZero() const { return sgn(value_) == 0; }

  friend Prob operator*(const Prob& a, const Prob& b) {
    Prob out;
    out.value_ = a.value_ * b.value_;
    return out;
  }
  friend bool operator==(const Prob& a, const Prob& b) {
    return a.value_ == b.value_;
  }
  friend bool operator<(const Prob& a, const Prob& b) {
    return a.value_ < b.value_;
  }
  friend bool operator<=(const Prob& a, const Prob& b) {
    return a.value_ <= b.value_;
  }

 private:
  mpq_class value_;
};

// Formats any rational as "num/den" (denominator always printed).
std::string RationalString(const mpq_class& q);
mpq_class ParseRational(std::string_view text);

enum class KeySpace { kNat, kWord };

std::string_view KeySpaceName(KeySpace ks);

using Key = std::variant<Nat, Word>;

inline Key NatKey(unsigned long n) { return Key(Nat(n)); }
inline Key WordKey(std::string w) { return Key(std::move(w)); }

KeySpace KeySpaceOf(const Key& k);
std::string KeyString(const Key& k);
const Nat& AsNat(const Key& k);
const Word& AsWord(const Key& k);

// Canonical order: numeric on naturals, length-then-bytewise on words.
struct KeyLess {
  bool operator()(const Key& a, const Key& b) const;
};

// Word order used everywhere a canonical enumeration of Σ* is needed.
bool ShortLex(const Word& a, const Word& b);

class Distribution {
 public:
  using Map = std::map<Key, Prob, KeyLess>;

  explicit Distribution(KeySpace ks = KeySpace::kNat) : keyspace_(ks) {}

  static Distribution Point(const Key& k);

  KeySpace keyspace() const { return keyspace_; }
  const Map& entries() const { return entries_; }
  const Prob& mass() const { return mass_; }
  Prob deficit() const { return mass_.Complement(); }
  Prob At(const Key& k) const;
  bool empty() const { return entries_.empty(); }
  size_t size() const { return entries_.size(); }

  friend bool operator==(const Distribution& a, const Distribution& b) {
    return a.keyspace_ == b.keyspace_ && a.entries_ == b.entries_;
  }

 private:
  friend class DistributionBuilder;

  KeySpace keyspace_;
  Map entries_;
  Prob mass_;
};

// Accumulates weighted mass and produces a canonical Distribution: zero
// entries are dropped and the total is checked against one.
class DistributionBuilder {
 public:
  explicit DistributionBuilder(KeySpace ks) : keyspace_(ks) {}

  void Add(const Key& k, const mpq_class& weight);
  void AddScaled(const Distribution& d, const mpq_class& weight);
  Distribution Build() const;

 private:
  KeySpace keyspace_;
  std::map<Key, mpq_class, KeyLess> acc_;
};

Distribution Point(const Key& k);
Prob Mass(const Distribution& d);
Prob Deficit(const Distribution& d);

// Pointwise Σ w_i · D_i. Throws MassOverflow when the total exceeds one and
// KeySpaceMismatch when the inputs disagree on key space.
Distribution ScaleAdd(KeySpace ks,
                      const std::vector<std::pair<Prob, Distribution>>& pairs);
Distribution ScaleAdd(const std::vector<std::pair<Prob, Distribution>>& pairs);

// result(y) = Σ_z d(z) · f(z)(y).
Distribution Bind(const Distribution& d, KeySpace out,
                  const std::function<Distribution(const Key&)>& f);

bool EqualExact(const Distribution& a, const Distribution& b);

// ½ Σ_k |a(k) − b(k)| + ½ |deficit(a) − deficit(b)|: total variation on the
// space extended with one divergence point. A metric; at most one.
Prob TvDistance(const Distribution& a, const Distribution& b);

// True when a(k) ≤ b(k) for every key.
bool PointwiseLeq(const Distribution& a, const Distribution& b);

// splitmix64 finalizer applied to the seed; the single PRNG the library uses.
uint64_t SplitMix64(uint64_t seed);

// Inverse CDF over canonical key order. The uniform variate is the dyadic
// rational SplitMix64(seed) / 2^64, compared exactly. nullopt means the
// draw fell into the deficit (divergence).
std::optional<Key> Sample(const Distribution& d, uint64_t seed);

// Precomputed cumulative table for repeated draws from one distribution.
class Sampler {
 public:
  explicit Sampler(const Distribution& d);
  std::optional<Key> Draw(uint64_t seed) const;

 private:
  std::vector<Key> keys_;
  // ceil(cumulative mass · 2^64); draw x selects the first key with
  // x < upper.
  std::vector<mpz_class> upper_;
};

// {"keyspace": ..., "entries": [{"key": ..., "p": "n/d"}...],
//  "deficit": "n/d"}, entries in canonical order.
std::string ToJson(const Distribution& d, int indent = -1);
Distribution FromJson(std::string_view text);

}  // namespace probrec

#endif  // PROBREC_DISTRIBUTION_HPP_
