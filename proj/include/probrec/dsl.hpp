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

// Term files. A file holds optional declarations, `let` bindings, and one
// final term in prefix notation. Grammar (see README for the full table):
//
//   file    := [alphabet STRING] {use machine STRING as NAME} {let NAME = term} term
//   term    := z | s | coin | proj INT INT | det NAME | NAME | ( term )
//            | comp term ( term {, term} ) | primrec term term | mu term
//            | eps | cons CHAR | rcons CHAR
//            | case term ( CHAR -> term {, CHAR -> term} )
//            | rec term ( CHAR -> term {, CHAR -> term} )
//            | simrec INT [ term {, term} ] [ ( INT , CHAR ) -> term {, ...} ]
//
// A file with an alphabet declaration is a word file; every other file is a
// natural-number file. `#` starts a comment outside quotes.

#ifndef PROBREC_DSL_HPP_
#define PROBREC_DSL_HPP_

#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "probrec/nat_term.hpp"
#include "probrec/ptm.hpp"
#include "probrec/word_term.hpp"

namespace probrec {
namespace dsl {

struct NatProgram {
  nat::TermPtr term;
  std::map<std::string, nat::TermPtr> lets;
  // Machines bound by `use machine`, by alias.
  std::map<std::string, std::shared_ptr<const ptm::PTMSpec>> machines;
};

struct WordProgram {
  word::TermPtr term;
  word::Alphabet alphabet;
  std::map<std::string, word::TermPtr> lets;
};

using Program = std::variant<NatProgram, WordProgram>;

struct ParseOptions {
  // Directory against which `use machine` paths resolve.
  std::string base_dir = ".";
};

// ParseError carries line, column and the expected token classes. Arity,
// projection and alphabet violations are reported at the offending node.
NatProgram ParseNat(const std::string& text, const ParseOptions& options = {});
WordProgram ParseWord(const std::string& text, const ParseOptions& options = {});
Program ParseProgram(const std::string& text, const ParseOptions& options = {});
Program ParseTermFile(const std::string& path);

// Canonical prefix form: compound arguments parenthesized, single spaces,
// names expanded. ParseNat(PrettyNat(t)) is structurally t.
std::string PrettyNat(const nat::TermPtr& t);
std::string PrettyWord(const word::TermPtr& t);
// Alphabet line plus the term.
std::string PrettyWordProgram(const WordProgram& p);

// A term file that reloads a compiled machine: a `use machine` line for
// `machine_path` under `alias` followed by the pretty-printed term.
std::string CompiledMachineFile(const nat::TermPtr& t, const std::string& machine_path,
                                const std::string& alias);

std::string ReadFile(const std::string& path);

}  // namespace dsl
}  // namespace probrec

#endif  // PROBREC_DSL_HPP_
