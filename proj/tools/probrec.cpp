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

// probrec: one binary, one subcommand per module. Every command prints a
// JSON run report (or a plain listing with --out text). Exit codes: 0
// success, 2 parse or validation error, 3 oracle mismatch.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "probrec/distribution.hpp"
#include "probrec/dsl.hpp"
#include "probrec/fixtures.hpp"
#include "probrec/nat_term.hpp"
#include "probrec/oracle.hpp"
#include "probrec/prm.hpp"
#include "probrec/ptm.hpp"
#include "probrec/report.hpp"
#include "probrec/tiering.hpp"
#include "probrec/word_term.hpp"

namespace {

using namespace probrec;
using json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitMismatch = 3;

struct Common {
  std::string out = "json";
  int approx_decimals = -1;
};

std::string Joined(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) s += (i ? " " : "") + std::string(argv[i]);
  return s;
}

std::vector<std::string> SplitCommas(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<Nat> NatArgs(const std::string& text) {
  std::vector<Nat> out;
  if (text.empty()) return out;
  for (const auto& piece : SplitCommas(text)) {
    if (piece.empty() || piece.find_first_not_of("0123456789") != std::string::npos) {
      throw ParseError(1, 1, "argument '" + piece + "' is not a natural number", "digits");
    }
    out.emplace_back(piece);
  }
  return out;
}

// A single empty word for unary terms, nothing for nullary ones.
std::vector<Word> WordArgs(const std::string& text, unsigned arity) {
  if (text.empty() && arity == 0) return {};
  return SplitCommas(text);
}

std::string ResolveFile(const std::string& path) { return fixtures::ResolvePath(path); }

ptm::PTMSpec LoadMachine(const std::string& path) {
  return ptm::ParseMachineJson(dsl::ReadFile(ResolveFile(path)));
}

prm::PRMSpec LoadProgram(const std::string& path) {
  return prm::ParseProgram(dsl::ReadFile(ResolveFile(path)));
}

std::string Sanitize(const std::string& name) {
  std::string out;
  for (char c : name) out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0]))) out = "m_" + out;
  return out;
}

class Timer {
 public:
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void Print(const report::RunReport& r, const Common& c) {
  if (c.out != "text") {
    std::cout << r.str() << "\n";
    return;
  }
  if (r.distribution) {
    for (const auto& [k, p] : r.distribution->entries()) {
      std::cout << (KeyString(k).empty() && r.distribution->keyspace() == KeySpace::kWord
                        ? std::string("\"\"")
                        : KeyString(k))
                << "\t" << p.str();
      if (c.approx_decimals >= 0) {
        std::cout << "\t" << report::DecimalString(p.value(), static_cast<unsigned>(c.approx_decimals));
      }
      std::cout << "\n";
    }
    std::cout << "deficit\t" << r.distribution->deficit().str() << "\n";
  }
  for (const auto& [k, v] : r.extra.items()) {
    std::cout << k << "\t" << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
  }
  if (r.verdict) std::cout << "verdict\t" << r.verdict->str() << "\n";
}

report::RunReport NewReport(const std::string& command, const std::string& digest_source,
                            const Common& c) {
  report::RunReport r;
  r.command = command;
  r.input_digest = report::Digest(digest_source);
  r.approx_decimals = c.approx_decimals;
  return r;
}

void AddCommon(CLI::App* app, Common& c) {
  app->add_option("--out", c.out, "json or text")->check(CLI::IsMember({"json", "text"}));
  app->add_option("--approx-decimals", c.approx_decimals, "add a display-only decimal column");
}

// ---------------------------------------------------------------------------

struct NatOpts {
  std::string term;
  std::string args;
  uint64_t mu_bound = 32;
  uint64_t rec_cap = uint64_t{1} << 20;
  bool closed_form = false;
  nat::EvalBudget Budget() const {
    nat::EvalBudget b;
    b.muBound = mu_bound;
    b.recUnrollCap = rec_cap;
    b.closedFormTails = closed_form;
    return b;
  }
};

void AddNatOptions(CLI::App* app, NatOpts& o, bool term_required = true) {
  auto* t = app->add_option("--term", o.term, "term file or fixture name");
  if (term_required) t->required();
  app->add_option("--args", o.args, "comma-separated naturals");
  app->add_option("--mu-bound", o.mu_bound, "values each mu enumerates");
  app->add_option("--rec-cap", o.rec_cap, "primitive-recursion unroll cap");
  app->add_flag("--closed-form-tails", o.closed_form, "sum periodic mu tails exactly");
}

json BudgetJson(const nat::EvalBudget& b) {
  return {{"mu_bound", b.muBound}, {"rec_cap", b.recUnrollCap}, {"closed_form_tails", b.closedFormTails}};
}

dsl::NatProgram LoadNat(const std::string& path) {
  auto p = dsl::ParseTermFile(ResolveFile(path));
  if (!std::holds_alternative<dsl::NatProgram>(p)) {
    throw IncompatibleInvocation("'" + path + "' is a word term; use eval-word");
  }
  return std::get<dsl::NatProgram>(std::move(p));
}

dsl::WordProgram LoadWord(const std::string& path) {
  auto p = dsl::ParseTermFile(ResolveFile(path));
  if (!std::holds_alternative<dsl::WordProgram>(p)) {
    throw IncompatibleInvocation("'" + path + "' is a natural-number term; use eval");
  }
  return std::get<dsl::WordProgram>(std::move(p));
}

void CheckArgCount(size_t got, unsigned arity) {
  if (got != arity) {
    throw ArityMismatch("term has arity " + std::to_string(arity) + " but " + std::to_string(got) +
                        " arguments were given");
  }
}

int RunEval(const NatOpts& o, const Common& c, const std::string& command) {
  Timer timer;
  auto prog = LoadNat(o.term);
  auto args = NatArgs(o.args);
  CheckArgCount(args.size(), nat::Arity(prog.term));
  auto budget = o.Budget();
  auto r = NewReport(command, dsl::PrettyNat(prog.term) + "|" + o.args, c);
  r.distribution = nat::EvalNat(prog.term, args, budget);
  r.budget = BudgetJson(budget);
  r.wall_ms = timer.ms();
  Print(r, c);
  return kExitOk;
}

struct WordOpts {
  std::string term;
  std::string args;
};

int RunEvalWord(const WordOpts& o, const Common& c, const std::string& command) {
  Timer timer;
  auto prog = LoadWord(o.term);
  unsigned arity = word::Arity(prog.term);
  auto args = WordArgs(o.args, arity);
  CheckArgCount(args.size(), arity);
  for (const auto& a : args) {
    if (!prog.alphabet.Covers(a)) {
      throw AlphabetMismatch("argument \"" + a + "\" is not over \"" + prog.alphabet.symbols() + "\"");
    }
  }
  auto r = NewReport(command, dsl::PrettyWordProgram(prog) + "|" + o.args, c);
  r.distribution = word::EvalWord(prog.term, args, prog.alphabet);
  r.extra["alphabet"] = prog.alphabet.symbols();
  r.wall_ms = timer.ms();
  Print(r, c);
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct TierOpts {
  std::string term;
  std::string judgment;
  bool strict_case = false;
  bool expand = false;
};

int RunTiercheck(const TierOpts& o, const Common& c, const std::string& command) {
  Timer timer;
  auto prog = LoadWord(o.term);
  word::TermPtr t = prog.term;
  auto r = NewReport(command, dsl::PrettyWordProgram(prog), c);
  if (o.expand) {
    t = word::TupledExpand(t, prog.alphabet);
    r.extra["expanded"] = dsl::PrettyWord(t);
  }
  tier::Options options;
  options.strict_case = o.strict_case;
  r.budget = {{"strict_case", o.strict_case}};
  auto solved = tier::InferTiers(t, options);
  r.extra["typable"] = solved.typable;
  if (solved.typable) {
    r.extra["judgment"] = solved.judgment.str();
  } else {
    r.extra["cycle"] = solved.cycle;
  }
  r.extra["explanation"] = solved.Explain();
  bool ok = solved.typable;
  if (!o.judgment.empty()) {
    auto j = tier::TierJudgment::Parse(o.judgment);
    auto check = tier::CheckJudgment(t, j, options);
    r.extra["checked_judgment"] = j.str();
    r.extra["valid"] = check.valid;
    if (!check.valid) r.extra["diagnostics"] = check.diagnostics;
    ok = check.valid;
  }
  r.wall_ms = timer.ms();
  Print(r, c);
  return ok ? kExitOk : kExitInvalid;
}

// ---------------------------------------------------------------------------

struct PtmOpts {
  std::string machine;
  std::string input;
  unsigned depth = 12;
  std::string annotate;
  std::string out_file;
};

void CheckInput(const ptm::PTMSpec& spec, const Word& x) {
  if (x.find_first_not_of(spec.InputAlphabet()) != std::string::npos) {
    throw AlphabetMismatch("input \"" + x + "\" is not over \"" + spec.InputAlphabet() + "\"");
  }
}

int RunPtm(const PtmOpts& o, const Common& c, const std::string& command) {
  Timer timer;
  auto spec = LoadMachine(o.machine);
  CheckInput(spec, o.input);
  auto r = NewReport(command, ptm::MachineToJson(spec) + "|" + o.input, c);
  r.budget = {{"depth", o.depth}};
  r.distribution = ptm::EvalPTM(spec, o.input, o.depth);
  auto steps = ptm::MaxSteps(spec, o.input, o.depth);
  r.extra["max_steps"] = steps ? json(*steps) : json("Unbounded(" + std::to_string(o.depth) + ")");
  r.wall_ms = timer.ms();
  Print(r, c);
  return kExitOk;
}

int RunPtmTree(const PtmOpts& o, const Common& c, const std::string& command) {
  Timer timer;
  auto spec = LoadMachine(o.machine);
  CheckInput(spec, o.input);
  auto r = NewReport(command, ptm::MachineToJson(spec) + "|" + o.input, c);
  r.budget = {{"depth", o.depth}};
  auto tree = ptm::BuildTree(spec, o.input, o.depth);
  std::map<std::string, ptm::PtAnnotation> notes;
  if (o.annotate == "ptc") {
    for (const auto& a : ptm::AnnotateTree(tree)) notes.emplace(a.id, a);
  }
  json nodes = json::array();
  for (const auto& n : tree.nodes()) {
    json j = {{"id", n.id}, {"config", n.config.str()}, {"leaf", n.is_leaf}, {"pt", ptm::PtProb(n.id).str()}};
    auto it = notes.find(n.id);
    if (it != notes.end()) {
      j["ptc"] = {{"0", it->second.pt0.str()}, {"1", it->second.pt1.str()}};
    }
    nodes.push_back(j);
  }
  r.extra["nodes"] = nodes;
  r.extra["leaves"] = tree.LeafCount();
  r.wall_ms = timer.ms();
  Print(r, c);
  return kExitOk;
}

int RunPtmCompile(const PtmOpts& o, const Common& c, const std::string& command) {
  Timer timer;
  std::string path = ResolveFile(o.machine);
  auto spec = std::make_shared<const ptm::PTMSpec>(LoadMachine(path));
  std::string alias = Sanitize(spec->name.empty() ? "machine" : spec->name);
  auto term = ptm::CompileToTerm(spec, alias);
  std::string text = dsl::CompiledMachineFile(term, path, alias);
  auto r = NewReport(command, ptm::MachineToJson(*spec), c);
  r.budget = {{"depth", o.depth}, {"mu_bound", ptm::MuBoundForDepth(o.depth)}};
  r.extra["alias"] = alias;
  r.extra["term"] = dsl::PrettyNat(term);
  r.extra["input_alphabet"] = spec->InputAlphabet();
  r.extra["output_alphabet"] = spec->alphabet;
  if (!o.out_file.empty()) {
    std::ofstream out(o.out_file);
    if (!out) throw IncompatibleInvocation("cannot write '" + o.out_file + "'");
    out << text;
    r.extra["written"] = o.out_file;
  }
  r.wall_ms = timer.ms();
  Print(r, c);
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct PrmOpts {
  std::string program;
  std::string machine;
  std::string term;
  std::string inputs;
  std::string input;
  bool has_input = false;
  unsigned depth = 20;
  unsigned prm_depth = 0;
  unsigned out_reg = 0;
  std::string out_file;
};

// A PTM step costs a bounded number of PRM steps; 8 covers the reduction.
unsigned ReducedDepth(unsigned ptm_depth) { return 8 * ptm_depth + 8; }

std::vector<Word> Inputs(const std::string& text) {
  if (text.empty()) return {};
  return SplitCommas(text);
}

int RunPrm(const PrmOpts& o, const Common& c, const std::string& command, bool steps_only) {
  Timer timer;
  auto spec = LoadProgram(o.program);
  auto inputs = Inputs(o.inputs);
  auto r = NewReport(command, prm::FormatProgram(spec) + "|" + o.inputs, c);
  r.budget = {{"depth", o.depth}, {"out_reg", o.out_reg}};
  if (o.out_reg >= spec.registers) throw IndexOutOfRange("output register out of range");
  if (!steps_only) r.distribution = prm::EvalPRM(spec, inputs, o.depth, o.out_reg);
  auto steps = prm::MaxSteps(spec, inputs, o.depth);
  r.extra["max_steps"] = steps.str();
  r.extra["longest_halting"] = steps.longest_halting;
  r.wall_ms = timer.ms();
  Print(r, c);
  return kExitOk;
}

int RunPrmFromPtm(const PrmOpts& o, const Common& c, const std::string& command) {
  Timer timer;
  auto spec = LoadMachine(o.machine);
  auto red = prm::PtmToPrm(spec);
  std::string text = prm::FormatProgram(red.prm);
  auto r = NewReport(command, ptm::MachineToJson(spec), c);
  r.extra["program"] = text;
  r.extra["registers"] = red.prm.registers;
  r.extra["instructions"] = red.prm.program.size();
  if (o.has_input) {
    CheckInput(spec, o.input);
    unsigned prm_depth = o.prm_depth ? o.prm_depth : ReducedDepth(o.depth);
    r.budget = {{"depth", o.depth}, {"prm_depth", prm_depth}};
    r.distribution = prm::EvalReduced(red, o.input, prm_depth);
    auto prm_steps = prm::MaxStepsReduced(red, o.input, prm_depth);
    auto ptm_steps = ptm::MaxSteps(spec, o.input, o.depth);
    r.extra["prm_steps"] = prm_steps.str();
    r.extra["ptm_steps"] = ptm_steps ? json(*ptm_steps) : json("Unbounded(" + std::to_string(o.depth) + ")");
  }
  if (!o.out_file.empty()) {
    std::ofstream out(o.out_file);
    if (!out) throw IncompatibleInvocation("cannot write '" + o.out_file + "'");
    out << text;
    r.extra["written"] = o.out_file;
  }
  r.wall_ms = timer.ms();
  Print(r, c);
  return kExitOk;
}

int RunPrmCompile(const PrmOpts& o, const Common& c, const std::string& command) {
  Timer timer;
  auto prog = LoadWord(o.term);
  auto compiled = prm::CompileWordTerm(prog.term, prog.alphabet);
  auto r = NewReport(command, dsl::PrettyWordProgram(prog), c);
  r.extra["program"] = prm::FormatProgram(compiled.prm);
  r.extra["out_reg"] = compiled.out_reg;
  r.extra["registers"] = compiled.prm.registers;
  if (o.has_input) {
    auto args = WordArgs(o.inputs, compiled.arity);
    CheckArgCount(args.size(), compiled.arity);
    r.budget = {{"depth", o.depth}};
    r.distribution = prm::EvalCompiled(compiled, args, o.depth);
    r.extra["max_steps"] = prm::MaxStepsCompiled(compiled, args, o.depth).str();
  }
  if (!o.out_file.empty()) {
    std::ofstream out(o.out_file);
    if (!out) throw IncompatibleInvocation("cannot write '" + o.out_file + "'");
    out << prm::FormatProgram(compiled.prm);
    r.extra["written"] = o.out_file;
  }
  r.wall_ms = timer.ms();
  Print(r, c);
  return kExitOk;
}

// ---------------------------------------------------------------------------

// One invocation of some evaluator together with its coin-stream twin.
struct Subject {
  std::string digest_source;
  Distribution exact;
  oracle::Run run;
  json budget;
  // Exhaustive enumeration length: fixed for machines, searched for terms.
  std::optional<unsigned> bits;
};

struct SubjectOpts {
  std::string term;
  std::string machine;
  std::string program;
  std::string args;
  unsigned depth = 12;
  unsigned out_reg = 0;
  uint64_t mu_bound = 32;
  std::string via = "paths";
};

void AddSubjectOptions(CLI::App* app, SubjectOpts& o) {
  auto* term = app->add_option("--term", o.term, "term file (natural-number or word)");
  auto* machine = app->add_option("--machine", o.machine, "machine file");
  auto* program = app->add_option("--program", o.program, "register-machine program");
  term->excludes(machine)->excludes(program);
  machine->excludes(program);
  app->add_option("--args,--input,--inputs", o.args, "comma-separated arguments or the machine input");
  app->add_option("--depth", o.depth, "step bound for machines");
  app->add_option("--out-reg", o.out_reg, "output register of a program");
  app->add_option("--mu-bound", o.mu_bound, "values each mu enumerates");
}

Subject MakeSubject(const SubjectOpts& o) {
  Subject s;
  if (!o.term.empty()) {
    auto prog = dsl::ParseTermFile(ResolveFile(o.term));
    if (auto* n = std::get_if<dsl::NatProgram>(&prog)) {
      auto args = NatArgs(o.args);
      CheckArgCount(args.size(), nat::Arity(n->term));
      nat::EvalBudget budget;
      budget.muBound = o.mu_bound;
      s.digest_source = dsl::PrettyNat(n->term) + "|" + o.args;
      s.exact = nat::EvalNat(n->term, args, budget);
      s.budget = BudgetJson(budget);
      auto term = n->term;
      s.run = [term, args, budget](oracle::BitSource& b) -> std::optional<Key> {
        auto v = oracle::RunNat(term, args, budget, b);
        return v ? std::optional<Key>(Key(*v)) : std::nullopt;
      };
      return s;
    }
    auto& w = std::get<dsl::WordProgram>(prog);
    unsigned arity = word::Arity(w.term);
    auto args = WordArgs(o.args, arity);
    CheckArgCount(args.size(), arity);
    s.digest_source = dsl::PrettyWordProgram(w) + "|" + o.args;
    s.exact = word::EvalWord(w.term, args, w.alphabet);
    auto term = w.term;
    s.run = [term, args](oracle::BitSource& b) -> std::optional<Key> {
      auto v = oracle::RunWord(term, args, b);
      return v ? std::optional<Key>(Key(*v)) : std::nullopt;
    };
    return s;
  }
  if (!o.machine.empty()) {
    auto spec = std::make_shared<const ptm::PTMSpec>(LoadMachine(o.machine));
    CheckInput(*spec, o.args);
    s.digest_source = ptm::MachineToJson(*spec) + "|" + o.args;
    s.exact = ptm::EvalPTM(*spec, o.args, o.depth);
    s.budget = {{"depth", o.depth}};
    s.bits = o.depth;
    Word x = o.args;
    unsigned depth = o.depth;
    s.run = [spec, x, depth](oracle::BitSource& b) -> std::optional<Key> {
      auto v = oracle::RunPTM(*spec, x, depth, b);
      return v ? std::optional<Key>(Key(*v)) : std::nullopt;
    };
    return s;
  }
  if (!o.program.empty()) {
    auto spec = std::make_shared<const prm::PRMSpec>(LoadProgram(o.program));
    if (o.out_reg >= spec->registers) throw IndexOutOfRange("output register out of range");
    auto inputs = Inputs(o.args);
    s.digest_source = prm::FormatProgram(*spec) + "|" + o.args;
    s.exact = prm::EvalPRM(*spec, inputs, o.depth, o.out_reg);
    s.budget = {{"depth", o.depth}, {"out_reg", o.out_reg}};
    s.bits = o.depth;
    unsigned depth = o.depth, reg = o.out_reg;
    s.run = [spec, inputs, depth, reg](oracle::BitSource& b) -> std::optional<Key> {
      auto v = oracle::RunPRM(*spec, inputs, depth, [reg](const prm::PRMConfiguration& c) { return c.regs[reg]; }, b);
      return v ? std::optional<Key>(Key(*v)) : std::nullopt;
    };
    return s;
  }
  throw IncompatibleInvocation("give one of --term, --machine or --program");
}

struct OracleOpts {
  SubjectOpts subject;
  std::string mode = "exhaustive";
  uint64_t draws = 100000;
  std::optional<uint64_t> seed;
  unsigned max_bits = 20;
  // A stored distribution to compare against instead of running an oracle.
  std::string expect;
};

// Machine cross-checks that compare two exact evaluators.
Distribution MachineCross(const SubjectOpts& o, const ptm::PTMSpec& spec, Distribution& subject,
                          json& extra) {
  Distribution reference = ptm::EvalPTM(spec, o.args, o.depth);
  if (o.via == "reduced") {
    auto red = prm::PtmToPrm(spec);
    unsigned prm_depth = ReducedDepth(o.depth);
    subject = prm::EvalReduced(red, o.args, prm_depth);
    extra["prm_depth"] = prm_depth;
    // The PRM sees paths the PTM cut off; compare on the PTM's horizon.
    auto steps = ptm::MaxSteps(spec, o.args, o.depth);
    if (!steps) {
      extra["note"] = "the machine has paths running past the depth; masses compare up to the PRM horizon";
    }
    return reference;
  }
  auto shared = std::make_shared<const ptm::PTMSpec>(spec);
  std::string alias = Sanitize(spec.name.empty() ? "machine" : spec.name);
  auto term = ptm::CompileToTerm(shared, alias);
  nat::EvalBudget budget;
  budget.muBound = ptm::MuBoundForDepth(o.depth);
  // The inner i2p search never ends; exact equality needs its tail summed.
  budget.closedFormTails = true;
  subject = nat::EvalNat(term, {ptm::WordToNat(o.args, spec.InputAlphabet())}, budget);
  extra["mu_bound"] = budget.muBound;
  extra["closed_form_tails"] = true;
  return ptm::EncodeOutputs(reference, spec.alphabet);
}

int RunOracle(const OracleOpts& o, const Common& c, const std::string& command) {
  Timer timer;
  const auto& so = o.subject;
  if (!so.machine.empty() && so.via != "paths") {
    auto spec = LoadMachine(so.machine);
    CheckInput(spec, so.args);
    auto r = NewReport(command, ptm::MachineToJson(spec) + "|" + so.args + "|" + so.via, c);
    r.budget = {{"depth", so.depth}, {"via", so.via}};
    Distribution subject;
    Distribution reference = MachineCross(so, spec, subject, r.extra);
    r.distribution = subject;
    r.verdict = report::CompareExact(subject, reference);
    r.wall_ms = timer.ms();
    Print(r, c);
    return r.verdict->ok() ? kExitOk : kExitMismatch;
  }
  Subject s = MakeSubject(so);
  auto r = NewReport(command, s.digest_source, c);
  r.distribution = s.exact;
  r.budget = s.budget;
  r.budget["mode"] = o.expect.empty() ? o.mode : "expected";
  if (!o.expect.empty()) {
    r.extra["expected"] = o.expect;
    r.verdict = report::CompareExact(s.exact, FromJson(dsl::ReadFile(ResolveFile(o.expect))));
  } else if (o.mode == "exhaustive") {
    Distribution enumerated = s.bits ? oracle::Enumerate(s.exact.keyspace(), s.run, *s.bits)
                                     : oracle::EnumerateAuto(s.exact.keyspace(), s.run, o.max_bits);
    r.verdict = report::CompareExact(s.exact, enumerated);
  } else {
    if (!o.seed) throw IncompatibleInvocation("--mode mc needs --seed");
    auto mc = oracle::MonteCarlo(s.exact, s.run, o.draws, *o.seed);
    r.budget["draws"] = o.draws;
    r.budget["seed"] = *o.seed;
    json rows = json::array();
    for (const auto& row : mc.rows) {
      rows.push_back({{"key", row.key ? json(KeyString(*row.key)) : json(nullptr)},
                      {"exact", row.exact.str()},
                      {"hits", row.hits},
                      {"frequency", row.frequency},
                      {"bound", row.bound},
                      {"within", row.within}});
    }
    r.extra["rows"] = rows;
    r.verdict = report::FromMonteCarlo(mc);
  }
  r.wall_ms = timer.ms();
  Print(r, c);
  return r.verdict->ok() ? kExitOk : kExitMismatch;
}

// ---------------------------------------------------------------------------

struct SampleOpts {
  SubjectOpts subject;
  uint64_t seed = 0;
  uint64_t count = 10;
};

int RunSample(const SampleOpts& o, const Common& c, const std::string& command) {
  Timer timer;
  Subject s = MakeSubject(o.subject);
  auto r = NewReport(command, s.digest_source, c);
  r.distribution = s.exact;
  r.budget = s.budget;
  r.budget["seed"] = o.seed;
  r.budget["count"] = o.count;
  Sampler sampler(s.exact);
  json draws = json::array();
  std::map<std::string, uint64_t> histogram;
  for (uint64_t i = 0; i < o.count; ++i) {
    auto k = sampler.Draw(o.seed + i);
    std::string label = k ? KeyString(*k) : std::string("<undefined>");
    draws.push_back(k ? json(label) : json(nullptr));
    ++histogram[label];
  }
  r.extra["draws"] = draws;
  r.extra["histogram"] = histogram;
  r.wall_ms = timer.ms();
  Print(r, c);
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct FixtureOpts {
  std::string kind;
  std::string show;
};

int RunFixtures(const FixtureOpts& o, const Common& c, const std::string& command) {
  if (!o.show.empty()) {
    auto f = fixtures::Find(o.show);
    if (c.out == "text") {
      std::cout << dsl::ReadFile(f.path);
      return kExitOk;
    }
    json j = {{"command", command}, {"name", f.name}, {"kind", f.kind}, {"path", f.path},
              {"content", dsl::ReadFile(f.path)}};
    std::cout << j.dump(2) << "\n";
    return kExitOk;
  }
  auto list = o.kind.empty() ? fixtures::List() : fixtures::List(o.kind);
  if (c.out == "text") {
    for (const auto& f : list) std::cout << f.kind << "\t" << f.name << "\t" << f.path << "\n";
    return kExitOk;
  }
  json arr = json::array();
  for (const auto& f : list) arr.push_back({{"name", f.name}, {"kind", f.kind}, {"path", f.path}});
  json j = {{"command", command}, {"root", fixtures::Dir()}, {"fixtures", arr}};
  std::cout << j.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"probrec: probabilistic recursion, tiering and machine simulators"};
  app.require_subcommand(1);
  const std::string command = Joined(argc, argv);
  Common common;
  std::function<int()> action;

  NatOpts eval;
  auto* eval_cmd = app.add_subcommand("eval", "exact distribution of a natural-number term");
  AddNatOptions(eval_cmd, eval);
  AddCommon(eval_cmd, common);
  eval_cmd->callback([&] { action = [&] { return RunEval(eval, common, command); }; });

  WordOpts ew;
  auto* ew_cmd = app.add_subcommand("eval-word", "exact distribution of a word term");
  ew_cmd->add_option("--term", ew.term, "term file or fixture name")->required();
  ew_cmd->add_option("--args", ew.args, "comma-separated words");
  AddCommon(ew_cmd, common);
  ew_cmd->callback([&] { action = [&] { return RunEvalWord(ew, common, command); }; });

  TierOpts tc;
  auto* tc_cmd = app.add_subcommand("tiercheck", "tier inference and judgment checking");
  tc_cmd->add_option("--term", tc.term, "word term file or fixture name")->required();
  tc_cmd->add_option("--judgment", tc.judgment, "e.g. \"1,0->0\"");
  tc_cmd->add_flag("--strict-case", tc.strict_case, "also require scrutinee tier >= result tier");
  tc_cmd->add_flag("--expand", tc.expand, "check the tupled expansion of a simrec");
  AddCommon(tc_cmd, common);
  tc_cmd->callback([&] { action = [&] { return RunTiercheck(tc, common, command); }; });

  PtmOpts pt;
  auto* ptm_cmd = app.add_subcommand("ptm", "probabilistic Turing machines");
  ptm_cmd->require_subcommand(1);
  auto* ptm_run = ptm_cmd->add_subcommand("run", "output distribution within a step bound");
  auto* ptm_tree = ptm_cmd->add_subcommand("tree", "computation tree");
  auto* ptm_compile = ptm_cmd->add_subcommand("compile", "compile to a natural-number term");
  for (auto* sub : {ptm_run, ptm_tree, ptm_compile}) {
    sub->add_option("--machine", pt.machine, "machine file or fixture name")->required();
    sub->add_option("--depth", pt.depth, "step bound");
  }
  AddCommon(ptm_run, common);
  AddCommon(ptm_tree, common);
  // --out names the term file here; the report is always JSON.
  ptm_compile->add_option("--approx-decimals", common.approx_decimals, "unused; accepted for uniformity");
  ptm_run->add_option("--input", pt.input, "input word");
  ptm_tree->add_option("--input", pt.input, "input word");
  ptm_tree->add_option("--annotate", pt.annotate, "ptc")->check(CLI::IsMember({"ptc"}));
  ptm_compile->add_option("--out", pt.out_file, "term file to write");
  ptm_run->callback([&] { action = [&] { return RunPtm(pt, common, command); }; });
  ptm_tree->callback([&] { action = [&] { return RunPtmTree(pt, common, command); }; });
  ptm_compile->callback([&] { action = [&] { return RunPtmCompile(pt, common, command); }; });

  PrmOpts pr;
  auto* prm_cmd = app.add_subcommand("prm", "probabilistic register machines");
  prm_cmd->require_subcommand(1);
  auto* prm_run = prm_cmd->add_subcommand("run", "output distribution within a step bound");
  auto* prm_steps = prm_cmd->add_subcommand("steps", "longest path to a final configuration");
  for (auto* sub : {prm_run, prm_steps}) {
    sub->add_option("--program", pr.program, "program file or fixture name")->required();
    sub->add_option("--inputs", pr.inputs, "comma-separated register contents");
    sub->add_option("--depth", pr.depth, "step bound");
    sub->add_option("--out-reg", pr.out_reg, "register read at the end");
    AddCommon(sub, common);
  }
  auto* prm_from = prm_cmd->add_subcommand("from-ptm", "reduce a machine to a register machine");
  prm_from->add_option("--machine", pr.machine, "machine file or fixture name")->required();
  prm_from->add_option("--input", pr.input, "also run the reduction on this input")
      ->each([&](const std::string&) { pr.has_input = true; });
  prm_from->add_option("--depth", pr.depth, "PTM step bound when running");
  prm_from->add_option("--prm-depth", pr.prm_depth, "PRM step bound (default 8 * depth + 8)");
  prm_from->add_option("--write", pr.out_file, "program file to write");
  AddCommon(prm_from, common);
  auto* prm_compile = prm_cmd->add_subcommand("compile", "compile a tiered word term");
  prm_compile->add_option("--term", pr.term, "word term file or fixture name")->required();
  prm_compile->add_option("--args", pr.inputs, "also run on these arguments")
      ->each([&](const std::string&) { pr.has_input = true; });
  prm_compile->add_option("--depth", pr.depth, "step bound when running");
  prm_compile->add_option("--write", pr.out_file, "program file to write");
  AddCommon(prm_compile, common);
  prm_run->callback([&] { action = [&] { return RunPrm(pr, common, command, false); }; });
  prm_steps->callback([&] { action = [&] { return RunPrm(pr, common, command, true); }; });
  prm_from->callback([&] { action = [&] { return RunPrmFromPtm(pr, common, command); }; });
  prm_compile->callback([&] { action = [&] { return RunPrmCompile(pr, common, command); }; });

  OracleOpts orc;
  auto* orc_cmd = app.add_subcommand("oracle", "compare an evaluator with an independent oracle");
  AddSubjectOptions(orc_cmd, orc.subject);
  orc_cmd->add_option("--mode", orc.mode, "exhaustive or mc")->check(CLI::IsMember({"exhaustive", "mc"}));
  orc_cmd->add_option("--draws", orc.draws, "Monte-Carlo draws");
  orc_cmd->add_option("--seed", orc.seed, "Monte-Carlo seed");
  orc_cmd->add_option("--expect", orc.expect, "compare against a stored distribution (file or fixture name)");
  orc_cmd->add_option("--max-bits", orc.max_bits, "longest coin string enumerated for terms");
  orc_cmd->add_option("--via", orc.subject.via, "machines: paths, compiled or reduced")
      ->check(CLI::IsMember({"paths", "compiled", "reduced"}));
  AddCommon(orc_cmd, common);
  orc_cmd->callback([&] { action = [&] { return RunOracle(orc, common, command); }; });

  SampleOpts smp;
  auto* smp_cmd = app.add_subcommand("sample", "seeded draws from an exact distribution");
  AddSubjectOptions(smp_cmd, smp.subject);
  smp_cmd->add_option("--seed", smp.seed, "seed of the first draw")->required();
  smp_cmd->add_option("--count", smp.count, "number of draws");
  AddCommon(smp_cmd, common);
  smp_cmd->callback([&] { action = [&] { return RunSample(smp, common, command); }; });

  FixtureOpts fx;
  auto* fx_cmd = app.add_subcommand("fixtures", "list or show the bundled corpus");
  fx_cmd->add_option("--kind", fx.kind, "machine, term, tier, program or expected");
  fx_cmd->add_option("--show", fx.show, "print one fixture");
  AddCommon(fx_cmd, common);
  fx_cmd->callback([&] { action = [&] { return RunFixtures(fx, common, command); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }
  try {
    return action();
  } catch (const ParseError& e) {
    std::cerr << "probrec: parse error: " << e.what() << "\n";
  } catch (const Error& e) {
    std::cerr << "probrec: " << e.what() << "\n";
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "probrec: malformed JSON: " << e.what() << "\n";
  }
  return kExitInvalid;
}
