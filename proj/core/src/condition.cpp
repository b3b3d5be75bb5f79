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


#include "hec/condition.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "hec/quasi_affine.hpp"

namespace hec {

std::string to_string(ConditionStatus s) {
  switch (s) {
    case ConditionStatus::Proven: return "proven";
    case ConditionStatus::Refuted: return "refuted";
    case ConditionStatus::Unknown: return "unknown";
  }
  return "unknown";
}

void ConditionResult::fail(const std::string& name, const std::string& why,
                           ConditionStatus s) {
  trace.push_back({name, why, s, "structural", std::nullopt});
  if (s == ConditionStatus::Refuted || status == ConditionStatus::Proven) status = s;
}

Term trip_count(const Term& m, const Term& n, int64_t k) {
  Term span = Term::make("add", {n, Term::make("mul", {m, Term::integer(-1)})});
  return normalize_affine(Term::make(
      "max", {Term::integer(0), Term::make("ceildiv", {span, Term::integer(k)})}));
}

namespace {

std::string clause_text(const Clause& c) {
  std::string s = c.lhs.str() + " == " + c.rhs.str();
  for (const auto& g : c.guards) s += " when " + g.str() + " > 0";
  return s;
}

// Evaluates one clause at a point; nothing when evaluation overflows.
std::optional<std::pair<bool, std::pair<int64_t, int64_t>>> eval_clause(
    const Clause& c, const std::function<int64_t(const Term&)>& leaf) {
  try {
    for (const auto& g : c.guards)
      if (eval_affine_term(g, leaf) <= 0) return std::make_pair(true, std::make_pair(0L, 0L));
    int64_t a = eval_affine_term(c.lhs, leaf);
    int64_t b = eval_affine_term(c.rhs, leaf);
    return std::make_pair(a == b, std::make_pair(a, b));
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

ConditionResult check_clauses(const std::vector<Clause>& clauses, const SymbolDomain& domain) {
  ConditionResult result;
  LeafBounds bounds = [&](const Term&) -> std::optional<Interval> {
    return Interval{domain.lo, domain.hi - 1};
  };
  std::vector<size_t> open;
  for (size_t i = 0; i < clauses.size(); ++i) {
    const Clause& c = clauses[i];
    ClauseTrace t{c.name, clause_text(c), ConditionStatus::Proven, "normalized", std::nullopt};
    bool proven = false;
    try {
      QuasiAffine diff = QuasiAffine::from_term(c.lhs) - QuasiAffine::from_term(c.rhs);
      proven = diff.is_constant() && diff.constant_part() == 0;
      if (!proven) {
        QuasiAffine s = simplify_with_bounds(diff, bounds);
        proven = s.is_constant() && s.constant_part() == 0;
      }
    } catch (const Error&) {
    }
    if (!proven) {
      t.status = ConditionStatus::Unknown;
      t.method = "pending";
      open.push_back(i);
    }
    result.trace.push_back(std::move(t));
  }
  if (open.empty()) return result;

  std::set<Term> symset;
  for (size_t i : open) {
    for (const auto& s : affine_leaves(clauses[i].lhs)) symset.insert(s);
    for (const auto& s : affine_leaves(clauses[i].rhs)) symset.insert(s);
    for (const auto& g : clauses[i].guards)
      for (const auto& s : affine_leaves(g)) symset.insert(s);
  }
  std::vector<Term> syms(symset.begin(), symset.end());
  std::vector<int64_t> point(syms.size(), domain.lo);
  auto leaf = [&](const Term& t) -> int64_t {
    auto it = std::lower_bound(syms.begin(), syms.end(), t);
    if (it == syms.end() || !(*it == t)) throw Error("unbound symbol " + t.str());
    return point[it - syms.begin()];
  };
  // Returns true when some open clause fails at the current point.
  auto test_point = [&]() {
    for (size_t i : open) {
      auto r = eval_clause(clauses[i], leaf);
      if (!r || r->first) continue;
      result.status = ConditionStatus::Refuted;
      for (size_t k = 0; k < syms.size(); ++k) result.witness[syms[k]] = point[k];
      result.trace[i].status = ConditionStatus::Refuted;
      result.trace[i].values = r->second;
      return true;
    }
    return false;
  };
  auto finish = [&](const char* method, ConditionStatus pass) {
    for (size_t i : open) {
      if (result.trace[i].status == ConditionStatus::Refuted) {
        result.trace[i].method = method;
        continue;
      }
      result.trace[i].status = result.status == ConditionStatus::Refuted ? ConditionStatus::Unknown : pass;
      result.trace[i].method = method;
    }
    if (result.status != ConditionStatus::Refuted) result.status = pass;
    return result;
  };

  const int64_t width = std::max<int64_t>(1, domain.hi - domain.lo);
  double total = 1;
  for (size_t k = 0; k < syms.size(); ++k) total *= double(width);
  if (total <= double(domain.exhaustive_limit)) {
    std::function<bool(size_t)> rec = [&](size_t k) {
      if (k == syms.size()) return test_point();
      for (int64_t v = domain.lo; v < domain.lo + width; ++v) {
        point[k] = v;
        if (rec(k + 1)) return true;
      }
      return false;
    };
    rec(0);
    return finish("exhaustive", ConditionStatus::Proven);
  }
  std::mt19937_64 rng(domain.seed);
  for (size_t s = 0; s < domain.samples; ++s) {
    for (size_t k = 0; k < syms.size(); ++k) {
      if (s < 17) {
        point[k] = std::min(domain.lo + static_cast<int64_t>(s), domain.lo + width - 1);
      } else if (s == 17) {
        point[k] = domain.lo + width - 1;
      } else {
        point[k] = domain.lo + static_cast<int64_t>(rng() % static_cast<uint64_t>(width));
      }
    }
    if (test_point()) break;
  }
  return finish("sampled", ConditionStatus::Unknown);
}

ConditionResult check_condition_symbolic(const Term& lhs, const Term& rhs,
                                         const SymbolDomain& domain) {
  return check_clauses({Clause{"identity", lhs, rhs, {}}}, domain);
}

}  // namespace hec
