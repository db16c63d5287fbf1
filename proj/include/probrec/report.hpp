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

// Oracle verdicts and the JSON run report printed by the command line.

#ifndef PROBREC_REPORT_HPP_
#define PROBREC_REPORT_HPP_

#include <optional>
#include <string>

#include "json.hpp"
#include "probrec/distribution.hpp"
#include "probrec/oracle.hpp"

namespace probrec {
namespace report {

struct Verdict {
  enum class Kind { kExactMatch, kWithinTolerance, kMismatch };
  Kind kind = Kind::kMismatch;
  double epsilon = 0;   // within-tolerance: the widest 3σ bound used
  std::string witness;  // mismatch: first differing key, or "deficit"
  bool ok() const { return kind != Kind::kMismatch; }
  // "exact-match", "within-tolerance(0.0047)", "mismatch(\"ab\")".
  std::string str() const;
};

// Exact rational comparison. IncompatibleInvocation on differing key spaces.
Verdict CompareExact(const Distribution& subject, const Distribution& oracle);
Verdict FromMonteCarlo(const oracle::McReport& mc);

// FNV-1a, 16 hex digits.
std::string Digest(const std::string& bytes);

// q rounded half-up to `digits` decimals, e.g. "0.333".
std::string DecimalString(const mpq_class& q, unsigned digits);

struct RunReport {
  std::string command;
  std::string input_digest;
  std::optional<Distribution> distribution;
  double wall_ms = 0;
  nlohmann::ordered_json budget = nlohmann::ordered_json::object();
  std::optional<Verdict> verdict;
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();
  // Adds a display-only decimal column when >= 0.
  int approx_decimals = -1;

  nlohmann::ordered_json Json() const;
  std::string str(int indent = 2) const { return Json().dump(indent); }
};

}  // namespace report
}  // namespace probrec

#endif  // PROBREC_REPORT_HPP_
