// Copyright 2026 The HEC Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "hec/egraph.hpp"

namespace egraph_props {

using namespace hec;

/// Random ground term over f/2, g/1 and leaves a, b, c with at most `budget` nodes.
inline Term random_term(std::mt19937& rng, int& budget) {
  --budget;
  int pick = budget <= 0 ? 2 + rng() % 3 : rng() % 5;
  if (pick == 0 && budget >= 2) {
    Term l = random_term(rng, budget);
    Term r = random_term(rng, budget);
    return Term::make("f", {l, r});
  }
  if (pick == 1 && budget >= 1) return Term::make("g", {random_term(rng, budget)});
  static const char* leaves[] = {"a", "b", "c"};
  return Term::atom(leaves[rng() % 3]);
}

/// Congruence closure invariant: equal canonical e-nodes live in one class.
inline bool congruent(const EGraph& g) {
  std::map<ENode, EClassId> seen;
  for (EClassId c : g.classes()) {
    for (ENode n : g.nodes(c)) {
      for (auto& ch : n.children) ch = g.find(ch);
      auto [it, fresh] = seen.emplace(n, c);
      if (!fresh && g.find(it->second) != c) return false;
    }
  }
  return true;
}

inline bool class_has(const EGraph& g, EClassId cls, const std::string& op, const std::vector<EClassId>& kids) {
  for (const ENode& n : g.nodes(cls)) {
    if (g.symbol_name(n.op) != op || n.children.size() != kids.size()) continue;
    bool ok = true;
    for (size_t i = 0; i < kids.size(); ++i) ok = ok && g.find(n.children[i]) == g.find(kids[i]);
    if (ok) return true;
  }
  return false;
}


/// One random graph of at most 15 nodes with three unions. Returns an empty
/// string when congruence holds and e-matching agrees with a brute-force
/// search over class assignments; otherwise a description of the failure.
inline std::string check_random_graph(std::mt19937& rng) {
  const Term patterns[] = {parse_term("(f ?x (g ?y))"), parse_term("(g ?x)"), parse_term("(f ?x ?x)"),
                           parse_term("(f (g ?x) a)")};
  EGraph g;
  int budget = 15;
  while (budget > 0) g.add(random_term(rng, budget));
  std::vector<EClassId> all = g.classes();
  for (int u = 0; u < 3; ++u) {
    size_t before = g.num_classes();
    g.merge(all[rng() % all.size()], all[rng() % all.size()]);
    g.rebuild();
    if (g.num_classes() > before) return "class count grew after a union";
  }
  if (!congruent(g)) return "not congruent after rebuild";
  all = g.classes();
  for (const Term& pat : patterns) {
    std::set<std::pair<EClassId, Subst>> got, want;
    for (auto& m : g.ematch(pat)) {
      for (auto& [k, v] : m.subst) v = g.find(v);
      got.insert({g.find(m.root), m.subst});
    }
    auto a = g.lookup(Term::atom("a"));
    for (EClassId r : all)
      for (EClassId x : all) {
        if (pat == patterns[0]) {
          for (EClassId y : all)
            for (EClassId gy : all)
              if (class_has(g, gy, "g", {y}) && class_has(g, r, "f", {x, gy})) want.insert({r, {{"x", x}, {"y", y}}});
        } else if (pat == patterns[1]) {
          if (class_has(g, r, "g", {x})) want.insert({r, {{"x", x}}});
        } else if (pat == patterns[2]) {
          if (class_has(g, r, "f", {x, x})) want.insert({r, {{"x", x}}});
        } else {
          for (EClassId gx : all)
            if (a && class_has(g, gx, "g", {x}) && class_has(g, r, "f", {gx, *a})) want.insert({r, {{"x", x}}});
        }
      }
    if (got != want) return "e-matching disagrees with brute force on " + pat.str();
  }
  return {};
}

/// Adding a term twice yields the same class and no new nodes.
inline bool hashcons_dedup(std::mt19937& rng) {
  EGraph g;
  int budget = 15;
  Term t = random_term(rng, budget);
  EClassId a = g.add(t);
  size_t nodes = g.num_nodes();
  return g.add(t) == a && g.num_nodes() == nodes;
}

}  // namespace egraph_props
