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

#include "probrec/report.hpp"

#include <cstdio>
#include <set>

namespace probrec {
namespace report {

std::string Verdict::str() const {
  switch (kind) {
    case Kind::kExactMatch:
      return "exact-match";
    case Kind::kWithinTolerance: {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "within-tolerance(%.6g)", epsilon);
      return buf;
    }
    case Kind::kMismatch:
      return "mismatch(" + witness + ")";
  }
  return "";
}

Verdict CompareExact(const Distribution& subject, const Distribution& oracle) {
  if (subject.keyspace() != oracle.keyspace()) {
    throw IncompatibleInvocation("cannot compare a " + std::string(KeySpaceName(subject.keyspace())) +
                                 " distribution with a " +
                                 std::string(KeySpaceName(oracle.keyspace())) + " one");
  }
  Verdict v;
  std::set<Key, KeyLess> keys;
  for (const auto& [k, p] : subject.entries()) keys.insert(k);
  for (const auto& [k, p] : oracle.entries()) keys.insert(k);
  for (const auto& k : keys) {
    if (!(subject.At(k) == oracle.At(k))) {
      v.witness = "\"" + KeyString(k) + "\"";
      return v;
    }
  }
  if (!(subject.deficit() == oracle.deficit())) {
    v.witness = "deficit";
    return v;
  }
  v.kind = Verdict::Kind::kExactMatch;
  return v;
}

Verdict FromMonteCarlo(const oracle::McReport& mc) {
  Verdict v;
  for (const auto& r : mc.rows) {
    if (!r.within) {
      v.witness = r.key ? "\"" + KeyString(*r.key) + "\"" : "deficit";
      return v;
    }
    v.epsilon = std::max(v.epsilon, r.bound);
  }
  v.kind = Verdict::Kind::kWithinTolerance;
  return v;
}

std::string Digest(const std::string& bytes) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string DecimalString(const mpq_class& q, unsigned digits) {
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, digits);
  mpq_class scaled = q * scale + mpq_class(1, 2);
  mpz_class n = scaled.get_num() / scaled.get_den();  // floor for q >= 0
  std::string s = n.get_str();
  if (digits == 0) return s;
  if (s.size() <= digits) s.insert(0, digits + 1 - s.size(), '0');
  s.insert(s.size() - digits, ".");
  return s;
}

nlohmann::ordered_json RunReport::Json() const {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["input_digest"] = input_digest;
  if (distribution) {
    j["distribution"] = nlohmann::ordered_json::parse(ToJson(*distribution));
    j["deficit"] = distribution->deficit().str();
    if (approx_decimals >= 0) {
      nlohmann::ordered_json approx = nlohmann::ordered_json::array();
      for (const auto& [k, p] : distribution->entries()) {
        approx.push_back({{"key", KeyString(k)},
                          {"decimal", DecimalString(p.value(), static_cast<unsigned>(approx_decimals))}});
      }
      j["approx"] = approx;
    }
  }
  j["wall_ms"] = wall_ms;
  j["budget"] = budget;
  if (verdict) j["verdict"] = verdict->str();
  for (const auto& [k, v] : extra.items()) j[k] = v;
  return j;
}

}  // namespace report
}  // namespace probrec
