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

#include "probrec/tiering.hpp"

#include <algorithm>
#include <sstream>

namespace probrec {
namespace tier {

using word::Kind;
using word::TermPtr;

std::string TierJudgment::str() const {
  std::string out;
  for (size_t i = 0; i < args.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(args[i]);
  }
  return out + "->" + std::to_string(result);
}

TierJudgment TierJudgment::Parse(const std::string& text) {
  auto arrow = text.find("->");
  if (arrow == std::string::npos) throw ParseError(1, 1, "judgment without '->'", "'->'");
  auto number = [&](const std::string& s) -> unsigned {
    std::string trimmed;
    for (char c : s) {
      if (c != ' ') trimmed.push_back(c);
    }
    if (trimmed.empty() || !std::all_of(trimmed.begin(), trimmed.end(), ::isdigit)) {
      throw ParseError(1, 1, "bad tier '" + s + "'", "natural number");
    }
    return static_cast<unsigned>(std::stoul(trimmed));
  };
  TierJudgment j;
  std::string lhs = text.substr(0, arrow);
  if (lhs.find_first_not_of(' ') != std::string::npos) {
    std::stringstream ss(lhs);
    std::string part;
    while (std::getline(ss, part, ',')) j.args.push_back(number(part));
  }
  j.result = number(text.substr(arrow + 2));
  return j;
}

TierJudgment TierJudgment::Shifted(unsigned by) const {
  TierJudgment j = *this;
  for (auto& a : j.args) a += by;
  j.result += by;
  return j;
}

int TierConstraintSet::AddVariable(std::string name) {
  variables.push_back(std::move(name));
  return static_cast<int>(variables.size()) - 1;
}

std::vector<Edge> TierConstraintSet::Edges() const {
  std::vector<Edge> edges;
  for (const auto& e : equalities) {
    edges.push_back({e.rhs, e.lhs, e.offset, e.origin});
    edges.push_back({e.lhs, e.rhs, -e.offset, e.origin});
  }
  for (const auto& s : stricts) edges.push_back({s.low, s.high, 1, s.origin});
  for (const auto& w : weak) edges.push_back({w.low, w.high, 0, w.origin});
  return edges;
}

namespace {

class Collector {
 public:
  Collector(TierConstraintSet& out, const Options& options) : out_(out), options_(options) {}

  void Gen(const TermPtr& t, const std::vector<int>& args, int result, const std::string& path) {
    auto sub = [&](const std::string& s) { return path.empty() ? s : path + "." + s; };
    auto at = [&](const std::string& rule) {
      return rule + " at " + (path.empty() ? std::string("<root>") : path);
    };
    switch (t->kind()) {
      case Kind::kEps:
        // ε ▷ W_k for every k; ignored arguments are unconstrained.
        return;
      case Kind::kCons:
        Eq(result, args[0], 0, at(std::string("cons '") + t->symbol() + "': W_k -> W_k"));
        return;
      case Kind::kRandCons:
        Eq(result, args[0], 0, at(std::string("rcons '") + t->symbol() + "': W_k -> W_k"));
        return;
      case Kind::kProj:
        Eq(result, args[t->proj_m() - 1], 0,
           at("proj " + std::to_string(t->proj_n()) + " " + std::to_string(t->proj_m()) +
              ": result tier = tier of argument " + std::to_string(t->proj_m())));
        return;
      case Kind::kDet: {
        int base = out_.AddVariable(sub("det " + t->det()->name + ".base"));
        const auto& sig = t->det()->tiers;
        for (size_t i = 0; i < args.size(); ++i) {
          int off = i < sig.args.size() ? sig.args[i] : 0;
          Eq(args[i], base, off, at("det " + t->det()->name + ": declared argument tier"));
        }
        Eq(result, base, sig.result, at("det " + t->det()->name + ": declared result tier"));
        return;
      }
      case Kind::kComp: {
        const auto& c = t->children();
        std::vector<int> mids;
        for (size_t i = 1; i < c.size(); ++i) {
          std::string p = sub("comp.g[" + std::to_string(i) + "]");
          int m = out_.AddVariable(p + ".result");
          Gen(c[i], args, m, p);
          mids.push_back(m);
        }
        Gen(c[0], mids, result, sub("comp.f"));
        return;
      }
      case Kind::kCase: {
        std::vector<int> rest(args.begin() + 1, args.end());
        Gen(t->base(), rest, result, sub("case.base"));
        for (char a : t->symbols()) {
          Gen(t->Branch(a), args, result, sub(std::string("case.'") + a + "'"));
        }
        if (options_.strict_case) {
          out_.weak.push_back({args[0], result, at("case (strict reading): scrutinee tier >= result tier")});
        }
        return;
      }
      case Kind::kRec: {
        std::vector<int> rest(args.begin() + 1, args.end());
        Gen(t->base(), rest, result, sub("rec.base"));
        out_.stricts.push_back({args[0], result, at("rec: recurrence argument tier m > result tier k")});
        std::vector<int> step_args{result, args[0]};
        step_args.insert(step_args.end(), rest.begin(), rest.end());
        for (char a : t->symbols()) {
          Gen(t->Branch(a), step_args, result, sub(std::string("rec.'") + a + "'"));
        }
        return;
      }
      case Kind::kSimRec: {
        // All components share the result tier of the selected one.
        std::vector<int> rest(args.begin() + 1, args.end());
        unsigned n = t->components();
        for (unsigned j = 1; j <= n; ++j) {
          Gen(t->SimBase(j), rest, result, sub("simrec.base[" + std::to_string(j) + "]"));
        }
        out_.stricts.push_back({args[0], result, at("simrec: recurrence argument tier m > result tier k")});
        std::vector<int> step_args(n, result);
        step_args.push_back(args[0]);
        step_args.insert(step_args.end(), rest.begin(), rest.end());
        for (unsigned j = 1; j <= n; ++j) {
          for (char a : t->symbols()) {
            Gen(t->SimStep(j, a), step_args, result,
                sub("simrec.step(" + std::to_string(j) + ",'" + a + "')"));
          }
        }
        return;
      }
    }
  }

 private:
  void Eq(int lhs, int rhs, int offset, std::string origin) {
    out_.equalities.push_back({lhs, rhs, offset, std::move(origin)});
  }

  TierConstraintSet& out_;
  const Options& options_;
};

struct LongestPaths {
  std::vector<long> dist;
  std::vector<int> pred_edge;
  std::vector<std::string> cycle;  // empty when none
};

// Bellman-Ford from a virtual source with 0-weight edges to every vertex.
LongestPaths Solve(int n, const std::vector<Edge>& edges) {
  LongestPaths out;
  out.dist.assign(n, 0);
  out.pred_edge.assign(n, -1);
  int last = -1;
  for (int round = 0; round <= n; ++round) {
    last = -1;
    for (size_t i = 0; i < edges.size(); ++i) {
      const Edge& e = edges[i];
      if (out.dist[e.from] + e.weight > out.dist[e.to]) {
        out.dist[e.to] = out.dist[e.from] + e.weight;
        out.pred_edge[e.to] = static_cast<int>(i);
        last = e.to;
      }
    }
    if (last < 0) return out;
  }
  // Still relaxing after n rounds: walk back n steps to land on the cycle.
  int v = last;
  for (int i = 0; i < n; ++i) v = edges[out.pred_edge[v]].from;
  std::vector<int> cycle_edges;
  int u = v;
  do {
    int e = out.pred_edge[u];
    cycle_edges.push_back(e);
    u = edges[e].from;
  } while (u != v);
  std::reverse(cycle_edges.begin(), cycle_edges.end());
  for (int e : cycle_edges) {
    const Edge& edge = edges[e];
    out.cycle.push_back(edge.origin + (edge.weight > 0 ? "  [+" + std::to_string(edge.weight) + "]" : ""));
  }
  return out;
}

}  // namespace

TierConstraintSet CollectConstraints(const TermPtr& t, const Options& options) {
  unsigned arity = word::Arity(t);
  TierConstraintSet c;
  for (unsigned i = 1; i <= arity; ++i) c.arg_vars.push_back(c.AddVariable("arg " + std::to_string(i)));
  c.result_var = c.AddVariable("result");
  Collector collector(c, options);
  collector.Gen(t, c.arg_vars, c.result_var, "");
  return c;
}

std::string SolveResult::Explain() const {
  if (typable) return "typable: " + judgment.str();
  std::string out = "untypable: positive cycle through";
  for (const auto& step : cycle) out += "\n  " + step;
  return out;
}

SolveResult SolveTiers(const TierConstraintSet& c) {
  SolveResult r;
  LongestPaths lp = Solve(static_cast<int>(c.variables.size()), c.Edges());
  if (!lp.cycle.empty()) {
    r.cycle = std::move(lp.cycle);
    return r;
  }
  r.typable = true;
  r.assignment.assign(lp.dist.begin(), lp.dist.end());
  for (int v : c.arg_vars) r.judgment.args.push_back(static_cast<unsigned>(lp.dist[v]));
  r.judgment.result = static_cast<unsigned>(lp.dist[c.result_var]);
  return r;
}

SolveResult InferTiers(const TermPtr& t, const Options& options) {
  return SolveTiers(CollectConstraints(t, options));
}

CheckResult CheckJudgment(const TermPtr& t, const TierJudgment& j, const Options& options) {
  TierConstraintSet c = CollectConstraints(t, options);
  if (j.args.size() != c.arg_vars.size()) {
    throw ArityMismatch("judgment has " + std::to_string(j.args.size()) + " argument tiers, term arity is " +
                        std::to_string(c.arg_vars.size()));
  }
  // Pin every judged position to an anchor z: x = z + tier. The judgment
  // holds iff no positive cycle appears and the least solution keeps z = 0.
  int z = c.AddVariable("judgment anchor");
  for (size_t i = 0; i < j.args.size(); ++i) {
    c.equalities.push_back({c.arg_vars[i], z, static_cast<int>(j.args[i]),
                            "judgment: argument " + std::to_string(i + 1) + " at tier " +
                                std::to_string(j.args[i])});
  }
  c.equalities.push_back({c.result_var, z, static_cast<int>(j.result),
                          "judgment: result at tier " + std::to_string(j.result)});
  std::vector<Edge> edges = c.Edges();
  LongestPaths lp = Solve(static_cast<int>(c.variables.size()), edges);
  CheckResult r;
  auto is_premise = [](const std::string& s) { return s.rfind("judgment:", 0) != 0; };
  if (!lp.cycle.empty()) {
    // Lead with the first strict premise on the cycle, else the first rule.
    auto first = std::find_if(lp.cycle.begin(), lp.cycle.end(), [&](const std::string& s) {
      return is_premise(s) && s.find("[+") != std::string::npos;
    });
    if (first == lp.cycle.end()) first = std::find_if(lp.cycle.begin(), lp.cycle.end(), is_premise);
    if (first != lp.cycle.end()) r.diagnostics.push_back("violated premise: " + *first);
    for (const auto& s : lp.cycle) r.diagnostics.push_back("  " + s);
    return r;
  }
  if (lp.dist[z] == 0) {
    r.valid = true;
    return r;
  }
  // The anchor was lifted: some judged position is forced above its stated
  // tier. Report the chain that lifted it, premises first.
  std::vector<std::string> chain;
  int v = z;
  for (size_t guard = 0; guard < c.variables.size() && lp.pred_edge[v] >= 0; ++guard) {
    const Edge& e = edges[lp.pred_edge[v]];
    chain.push_back(e.origin + (e.weight > 0 ? "  [+" + std::to_string(e.weight) + "]" : ""));
    v = e.from;
  }
  auto first = std::find_if(chain.begin(), chain.end(), [&](const std::string& s) {
    return is_premise(s) && s.find("[+") != std::string::npos;
  });
  if (first == chain.end()) first = std::find_if(chain.begin(), chain.end(), is_premise);
  r.diagnostics.push_back("violated premise: " + (first != chain.end() ? *first : chain.front()));
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) r.diagnostics.push_back("  " + *it);
  return r;
}

}  // namespace tier
}  // namespace probrec
