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

// Reference semantics by running programs on explicit coin streams. Shares
// no code with the distribution-valued evaluators: each run is a plain
// deterministic interpretation, and distributions come from counting runs
// over every bitstring of a fixed length, or from seeded sampling.

#ifndef PROBREC_ORACLE_HPP_
#define PROBREC_ORACLE_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "probrec/distribution.hpp"
#include "probrec/nat_term.hpp"
#include "probrec/prm.hpp"
#include "probrec/ptm.hpp"
#include "probrec/word_term.hpp"

namespace probrec {
namespace oracle {

class BitSource {
 public:
  virtual ~BitSource() = default;
  virtual int Next() = 0;
};

// The bits of `bits`, least significant first; OracleExhausted past `length`.
class FixedBits : public BitSource {
 public:
  FixedBits(uint64_t bits, unsigned length) : bits_(bits), length_(length) {}
  int Next() override;
  unsigned used() const { return used_; }

 private:
  uint64_t bits_;
  unsigned length_;
  unsigned used_ = 0;
};

class RandomBits : public BitSource {
 public:
  explicit RandomBits(uint64_t seed) : engine_(seed) {}
  int Next() override;

 private:
  std::mt19937_64 engine_;
  uint64_t buffer_ = 0;
  int left_ = 0;
};

// One run each; nullopt is an undefined result (divergence within the
// budget's cut-offs, or not halted within depth).
std::optional<Nat> RunNat(const nat::TermPtr& t, const std::vector<Nat>& args,
                          const nat::EvalBudget& budget, BitSource& bits);
std::optional<Word> RunWord(const word::TermPtr& t, const std::vector<Word>& args,
                            BitSource& bits);
std::optional<Word> RunPTM(const ptm::PTMSpec& spec, const Word& x, unsigned depth,
                           BitSource& bits);
std::optional<Word> RunPRM(const prm::PRMSpec& spec, const std::vector<Word>& inputs,
                           unsigned depth, const prm::Reader& read, BitSource& bits);

using Run = std::function<std::optional<Key>(BitSource&)>;

// Every bitstring of length `bits` with weight 2^-bits. Throws
// OracleExhausted when some run needs more bits. At most 24 bits.
Distribution Enumerate(KeySpace ks, const Run& run, unsigned bits);
// Smallest sufficient length up to max_bits.
Distribution EnumerateAuto(KeySpace ks, const Run& run, unsigned max_bits = 20);

Distribution EnumerateNat(const nat::TermPtr& t, const std::vector<Nat>& args,
                          const nat::EvalBudget& budget, unsigned max_bits = 20);
Distribution EnumerateWord(const word::TermPtr& t, const std::vector<Word>& args,
                           unsigned max_bits = 20);
// A PTM consumes one coin per step, so depth bits always suffice.
Distribution EnumeratePTM(const ptm::PTMSpec& spec, const Word& x, unsigned depth);
// A PRM consumes coins only at jrand; depth bits suffice.
Distribution EnumeratePRM(const prm::PRMSpec& spec, const std::vector<Word>& inputs,
                          unsigned depth, const prm::Reader& read);

struct McRow {
  std::optional<Key> key;  // nullopt: the undefined outcome
  Prob exact;
  uint64_t hits = 0;
  double frequency = 0;
  double bound = 0;  // 3σ of the binomial proportion
  bool within = false;
};

struct McReport {
  uint64_t draws = 0;
  uint64_t seed = 0;
  std::vector<McRow> rows;
  bool ok = false;
  std::string str() const;
};

// Runs `run` on `draws` independent seeded coin streams and tests every
// observed or expected outcome's frequency against its exact mass.
McReport MonteCarlo(const Distribution& exact, const Run& run, uint64_t draws, uint64_t seed);

}  // namespace oracle
}  // namespace probrec

#endif  // PROBREC_ORACLE_HPP_
