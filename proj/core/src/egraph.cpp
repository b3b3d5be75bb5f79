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


#include "hec/egraph.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace hec {

namespace {

bool is_constant_atom(const std::string& s) {
  if (s == "true" || s == "false") return true;
  size_t i = (!s.empty() && s[0] == '-') ? 1 : 0;
  if (i >= s.size()) return false;
  return std::all_of(s.begin() + i, s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

bool is_variable(const Term& t) { return t.is_atom() && t.op().size() > 1 && t.op()[0] == '?'; }

constexpr size_t kInfinite = SIZE_MAX / 4;

}  // namespace

size_t ENodeHash::operator()(const ENode& n) const {
  size_t h = std::hash<uint64_t>{}((uint64_t{n.op} << 1) | (n.atom ? 1 : 0));
  for (EClassId c : n.children) h ^= std::hash<uint64_t>{}(c) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::Saturated: return "saturated";
    case StopReason::IterationLimit: return "iteration-limit";
    case StopReason::NodeLimit: return "enode-limit";
    case StopReason::Timeout: return "timeout";
    case StopReason::Goal: return "goal";
  }
  return "unknown";
}

std::optional<size_t> label_arity(const std::string& l) {
  static const std::map<std::string, size_t> fixed = {
      {"forvalue", 4}, {"forcontrol", 2}, {"ifcontrol", 3}, {"floordiv", 2}, {"ceildiv", 2},
      {"mod", 2},      {"combine", 2},    {"eq0", 1},       {"ge0", 1},      {"add", 2},
      {"mul", 2}};
  auto it = fixed.find(l);
  if (it != fixed.end()) return it->second;
  if (l.rfind("arith_", 0) == 0) return 2;
  if (l.rfind("load_", 0) == 0) return 2;
  if (l.rfind("store_", 0) == 0) return 3;
  return std::nullopt;
}

EGraph::EGraph() = default;

Symbol EGraph::intern(const std::string& label) {
  auto [it, fresh] = symbol_ids_.try_emplace(label, static_cast<Symbol>(symbols_.size()));
  if (fresh) symbols_.push_back(label);
  return it->second;
}

EClassId EGraph::find(EClassId id) const {
  EClassId root = id;
  while (parent_[root] != root) root = parent_[root];
  while (parent_[id] != root) {
    EClassId next = parent_[id];
    parent_[id] = root;
    id = next;
  }
  return root;
}

ENode EGraph::canonicalize(const ENode& n) const {
  ENode c = n;
  for (auto& ch : c.children) ch = find(ch);
  return c;
}

EClassId EGraph::insert(const std::string& label, const std::vector<EClassId>& children,
                        bool atom) {
  if (!atom) {
    auto arity = label_arity(label);
    if (arity && *arity != children.size()) throw ArityMismatch(label, *arity, children.size());
  }
  for (EClassId c : children)
    if (c >= parent_.size()) throw Error("insert: unknown e-class " + std::to_string(c));
  return add(ENode{intern(label), atom, children});
}

EClassId EGraph::add(const ENode& node) {
  ENode n = canonicalize(node);
  auto it = hashcons_.find(n);
  if (it != hashcons_.end()) return find(it->second);
  EClassId id = static_cast<EClassId>(classes_.size());
  parent_.push_back(id);
  classes_.emplace_back();
  classes_[id].nodes.push_back(n);
  for (EClassId c : n.children) classes_[c].parents.emplace_back(n, id);
  hashcons_.emplace(n, id);
  if (n.op >= by_op_.size()) by_op_.resize(n.op + 1);
  by_op_[n.op].push_back(id);
  ++live_classes_;
  costs_valid_ = false;
  if (n.atom && is_constant_atom(symbols_[n.op])) classes_[id].constant = Term::atom(symbols_[n.op]);
  try_fold(n, id);
  return find(id);
}

EClassId EGraph::add(const Term& term) {
  std::unordered_map<Term, EClassId, TermHash> memo;
  std::function<EClassId(const Term&)> go = [&](const Term& t) -> EClassId {
    auto it = memo.find(t);
    if (it != memo.end()) return find(it->second);
    std::vector<EClassId> kids;
    kids.reserve(t.arity());
    for (const auto& a : t.args()) kids.push_back(go(a));
    EClassId id = insert(t.op(), kids, t.is_atom());
    memo.emplace(t, id);
    return id;
  };
  return go(term);
}

std::optional<EClassId> EGraph::lookup(const Term& term) const {
  auto sym = symbol_ids_.find(term.op());
  if (sym == symbol_ids_.end()) return std::nullopt;
  ENode n{sym->second, term.is_atom(), {}};
  for (const auto& a : term.args()) {
    auto c = lookup(a);
    if (!c) return std::nullopt;
    n.children.push_back(*c);
  }
  auto it = hashcons_.find(canonicalize(n));
  if (it == hashcons_.end()) return std::nullopt;
  return find(it->second);
}

void EGraph::set_constant(EClassId cls, const Term& c) {
  cls = find(cls);
  auto& k = classes_[cls].constant;
  if (k) {
    if (!(*k == c)) inconsistent_ = true;
    return;
  }
  k = c;
  EClassId atom = add(ENode{intern(c.op()), true, {}});
  merge(cls, atom);
}

void EGraph::try_fold(const ENode& n, EClassId cls) {
  if (!folder_ || n.atom || n.children.empty()) return;
  if (classes_[find(cls)].constant) return;
  std::vector<Term> args;
  for (EClassId c : n.children) {
    const auto& k = classes_[find(c)].constant;
    if (!k) return;
    args.push_back(*k);
  }
  if (auto r = folder_(symbols_[n.op], args)) set_constant(cls, *r);
}

EClassId EGraph::merge(EClassId a, EClassId b) {
  a = find(a);
  b = find(b);
  if (a == b) return a;
  // Keep the older id as root so ids stay stable for callers.
  if (b < a) std::swap(a, b);
  parent_[b] = a;
  --live_classes_;
  costs_valid_ = false;
  auto& ca = classes_[a];
  auto& cb = classes_[b];
  ca.nodes.insert(ca.nodes.end(), cb.nodes.begin(), cb.nodes.end());
  ca.parents.insert(ca.parents.end(), cb.parents.begin(), cb.parents.end());
  std::optional<Term> kb = std::move(cb.constant);
  cb = EClass{};
  if (kb) {
    if (ca.constant && !(*ca.constant == *kb)) inconsistent_ = true;
    if (!ca.constant) ca.constant = std::move(kb);
  }
  pending_.push_back(a);
  return a;
}

void EGraph::repair(EClassId id) {
  std::vector<std::pair<ENode, EClassId>> parents = std::move(classes_[id].parents);
  classes_[id].parents.clear();
  for (auto& [n, pc] : parents) {
    auto it = hashcons_.find(n);
    if (it != hashcons_.end() && it->first == n) hashcons_.erase(it);
    n = canonicalize(n);
    hashcons_[n] = find(pc);
  }
  std::map<ENode, EClassId> unique;
  for (auto& [n, pc] : parents) {
    auto [it, fresh] = unique.emplace(n, find(pc));
    if (!fresh) it->second = merge(it->second, pc);
  }
  EClassId root = find(id);
  for (auto& [n, pc] : unique) {
    classes_[root].parents.emplace_back(n, find(pc));
    try_fold(n, pc);
  }
}

void EGraph::rebuild() {
  if (pending_.empty()) return;
  while (!pending_.empty()) {
    std::vector<EClassId> todo;
    todo.swap(pending_);
    std::set<EClassId> roots;
    for (EClassId c : todo) roots.insert(find(c));
    for (EClassId c : roots) repair(find(c));
  }
  for (EClassId c = 0; c < classes_.size(); ++c) {
    if (find(c) != c) continue;
    auto& ns = classes_[c].nodes;
    for (auto& n : ns) n = canonicalize(n);
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  }
  for (auto& list : by_op_) {
    for (auto& c : list) c = find(c);
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  // Keys whose class moved are re-pointed at the canonical root.
  for (auto& [n, c] : hashcons_) c = find(c);
}

std::vector<EClassId> EGraph::classes() const {
  std::vector<EClassId> out;
  for (EClassId c = 0; c < classes_.size(); ++c)
    if (find(c) == c) out.push_back(c);
  return out;
}

// ---------------------------------------------------------------- matching

void EGraph::match_class(const Term& pat, EClassId cls, Subst& subst,
                         const std::function<void(const Subst&)>& yield) const {
  cls = find(cls);
  if (is_variable(pat)) {
    std::string var = pat.op().substr(1);
    auto it = subst.find(var);
    if (it != subst.end()) {
      if (find(it->second) == cls) yield(subst);
      return;
    }
    subst.emplace(var, cls);
    yield(subst);
    subst.erase(var);
    return;
  }
  auto sym = symbol_ids_.find(pat.op());
  if (sym == symbol_ids_.end()) return;
  for (const ENode& n : classes_[cls].nodes) {
    if (n.op != sym->second || n.atom != pat.is_atom() || n.children.size() != pat.arity())
      continue;
    std::function<void(size_t)> step = [&](size_t i) {
      if (i == n.children.size()) {
        yield(subst);
        return;
      }
      match_class(pat.arg(i), n.children[i], subst, [&](const Subst&) { step(i + 1); });
    };
    step(0);
  }
}

std::vector<Match> EGraph::ematch(const Term& pattern) const {
  std::vector<Match> out;
  std::set<std::pair<EClassId, Subst>> seen;
  std::vector<EClassId> candidates;
  if (is_variable(pattern)) {
    candidates = classes();
  } else {
    auto sym = symbol_ids_.find(pattern.op());
    if (sym == symbol_ids_.end() || sym->second >= by_op_.size()) return out;
    for (EClassId c : by_op_[sym->second]) candidates.push_back(find(c));
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  }
  for (EClassId c : candidates) {
    Subst s;
    match_class(pattern, c, s, [&](const Subst& m) {
      Subst canon;
      for (const auto& [k, v] : m) canon.emplace(k, find(v));
      if (seen.emplace(c, canon).second) out.push_back({c, std::move(canon)});
    });
  }
  return out;
}

EClassId EGraph::instantiate(const Term& pattern, const Subst& subst) {
  if (is_variable(pattern)) {
    auto it = subst.find(pattern.op().substr(1));
    if (it == subst.end()) throw Error("unbound pattern variable " + pattern.op());
    return find(it->second);
  }
  std::vector<EClassId> kids;
  for (const auto& a : pattern.args()) kids.push_back(instantiate(a, subst));
  return insert(pattern.op(), kids, pattern.is_atom());
}

SaturationReport EGraph::saturate(const std::vector<RewriteRule>& rules,
                                  const SaturationLimits& limits,
                                  const std::function<bool()>& goal) {
  using Clock = std::chrono::steady_clock;
  auto start = Clock::now();
  auto expired = [&] { return Clock::now() - start > limits.wall_clock; };
  SaturationReport report;
  std::map<std::string, size_t> slot;
  auto count = [&](const std::string& name) {
    auto [it, fresh] = slot.emplace(name, report.applied.size());
    if (fresh) report.applied.emplace_back(name, 0);
    ++report.applied[it->second].second;
  };
  rebuild();
  if (goal && goal()) {
    report.stop = StopReason::Goal;
    return report;
  }
  if (rules.empty()) return report;
  for (size_t iter = 0;; ++iter) {
    if (iter >= limits.max_iterations) {
      report.stop = StopReason::IterationLimit;
      break;
    }
    std::vector<std::vector<Match>> found(rules.size());
    bool timed_out = false;
    for (size_t r = 0; r < rules.size() && !timed_out; ++r) {
      for (auto& m : ematch(rules[r].lhs))
        if (!rules[r].guard || rules[r].guard(*this, m.subst)) found[r].push_back(std::move(m));
      timed_out = expired();
    }
    if (timed_out) {
      report.stop = StopReason::Timeout;
      break;
    }
    size_t nodes_before = num_nodes();
    size_t unions_before = report.unions;
    for (size_t r = 0; r < rules.size(); ++r) {
      for (const auto& m : found[r]) {
        size_t n0 = hashcons_.size();
        std::optional<EClassId> rhs =
            rules[r].apply ? rules[r].apply(*this, m.subst) : instantiate(rules[r].rhs, m.subst);
        bool changed = hashcons_.size() != n0;
        if (rhs && find(*rhs) != find(m.root)) {
          merge(*rhs, m.root);
          ++report.unions;
          changed = true;
        }
        if (changed) count(rules[r].name);
      }
      if (hashcons_.size() > limits.max_enodes) break;
    }
    rebuild();
    bool changed = report.unions != unions_before || num_nodes() != nodes_before;
    if (!changed) {
      report.stop = StopReason::Saturated;
      break;
    }
    ++report.iterations;
    if (goal && goal()) {
      report.stop = StopReason::Goal;
      break;
    }
    if (num_nodes() > limits.max_enodes) {
      report.stop = StopReason::NodeLimit;
      break;
    }
    if (expired()) {
      report.stop = StopReason::Timeout;
      break;
    }
  }
  return report;
}

// ---------------------------------------------------------------- extraction

void EGraph::compute_costs() const {
  if (costs_valid_ && cost_.size() == classes_.size()) return;
  cost_.assign(classes_.size(), kInfinite);
  best_.assign(classes_.size(), -1);
  auto node_cost = [&](const ENode& n) {
    // Tree size grows exponentially over shared token chains, so finite
    // costs saturate one below the sentinel.
    size_t c = 1;
    for (EClassId ch : n.children) {
      size_t k = cost_[find(ch)];
      if (k == kInfinite) return kInfinite;
      c = std::min(kInfinite - 1, c + k);
    }
    return c;
  };
  std::vector<EClassId> live = classes();
  for (bool changed = true; changed;) {
    changed = false;
    for (EClassId c : live) {
      const auto& ns = classes_[c].nodes;
      for (size_t i = 0; i < ns.size(); ++i) {
        size_t k = node_cost(canonicalize(ns[i]));
        if (k < cost_[c]) {
          cost_[c] = k;
          best_[c] = static_cast<int64_t>(i);
          changed = true;
        }
      }
    }
  }
  costs_valid_ = true;
}

Term EGraph::extract(EClassId id) const {
  compute_costs();
  std::unordered_map<EClassId, Term> memo;
  std::function<Term(EClassId)> go = [&](EClassId c) -> Term {
    c = find(c);
    auto it = memo.find(c);
    if (it != memo.end()) return it->second;
    if (best_[c] < 0) throw Error("class " + std::to_string(c) + " has no finite term");
    const ENode& n = classes_[c].nodes[best_[c]];
    Term t;
    if (n.atom) {
      t = Term::atom(symbols_[n.op]);
    } else {
      std::vector<Term> args;
      for (EClassId ch : n.children) args.push_back(go(ch));
      t = Term::make(symbols_[n.op], std::move(args));
    }
    memo.emplace(c, t);
    return t;
  };
  return go(id);
}

std::vector<Term> EGraph::extract_all(EClassId id, size_t limit) const {
  compute_costs();
  std::vector<Term> out;
  for (const ENode& n : nodes(id)) {
    if (out.size() >= limit) break;
    bool finite = true;
    for (EClassId ch : n.children) finite = finite && cost_[find(ch)] < kInfinite;
    if (!finite) continue;
    if (n.atom) {
      out.push_back(Term::atom(symbols_[n.op]));
      continue;
    }
    std::vector<Term> args;
    for (EClassId ch : n.children) args.push_back(extract(ch));
    out.push_back(Term::make(symbols_[n.op], std::move(args)));
  }
  return out;
}

std::string EGraph::dot() const {
  std::ostringstream out;
  out << "digraph egraph {\n  compound=true;\n  node [shape=ellipse];\n";
  for (EClassId c : classes()) {
    out << "  subgraph cluster_" << c << " {\n    style=dotted;\n    label=\"" << c << "\";\n";
    const auto& ns = classes_[c].nodes;
    for (size_t i = 0; i < ns.size(); ++i) {
      std::string label = symbols_[ns[i].op];
      std::string esc;
      for (char ch : label) {
        if (ch == '"' || ch == '\\') esc += '\\';
        esc += ch;
      }
      out << "    n" << c << "_" << i << " [label=\"" << esc << "\"];\n";
    }
    out << "  }\n";
  }
  for (EClassId c : classes()) {
    const auto& ns = classes_[c].nodes;
    for (size_t i = 0; i < ns.size(); ++i) {
      for (EClassId ch : ns[i].children) {
        EClassId k = find(ch);
        out << "  n" << c << "_" << i << " -> n" << k << "_0 [lhead=cluster_" << k << "];\n";
      }
    }
  }
  out << "}\n";
  return out.str();
}

EClassId construct_from_graph(EGraph& egraph, const DataflowGraph& graph) {
  return egraph.add(graph_to_term(graph));
}

}  // namespace hec
