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


#include "hec/dynamic_rules.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "hec/quasi_affine.hpp"

namespace hec {

std::string to_string(TransformKind k) {
  switch (k) {
    case TransformKind::Unrolling: return "unrolling";
    case TransformKind::Tiling: return "tiling";
    case TransformKind::Fusion: return "fusion";
    case TransformKind::Coalescing: return "coalescing";
  }
  return "unknown";
}

namespace {

bool is_op(const Term& t, const char* op) { return !t.is_atom() && t.op() == op; }

bool is_memory_op(const Term& t) {
  return !t.is_atom() && (t.op().rfind("load_", 0) == 0 || t.op().rfind("store_", 0) == 0);
}

std::optional<int> scope_depth(const Term& name, char prefix) {
  const std::string& s = name.op();
  if (!name.is_atom() || s.size() < 3 || s[0] != '%' || s[1] != prefix) return std::nullopt;
  int d = 0;
  for (size_t i = 2; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9') return std::nullopt;
    d = d * 10 + (s[i] - '0');
  }
  return d;
}

Term iv_name(int depth) { return Term::atom("%i" + std::to_string(depth)); }

Term affine_add(const Term& a, int64_t c) {
  if (c == 0) return a;
  return normalize_affine(Term::make("add", {a, Term::integer(c)}));
}

/// Renumbers induction and condition names at depth >= `from` by `delta`.
Term shift_depth(const Term& t, int from, int delta) {
  return t.rewrite([](const Term& x) -> std::optional<Term> {
    if (x.is_atom()) return x;
    return std::nullopt;
  }, [&](const Term& x) -> Term {
    if (is_op(x, "forvalue") && x.arity() == 4) {
      auto d = scope_depth(x.arg(3), 'i');
      if (d && *d >= from) {
        std::vector<Term> args = x.args();
        args[3] = iv_name(*d + delta);
        return Term::make("forvalue", std::move(args));
      }
    }
    if (is_op(x, "ifcond") && x.arity() >= 1) {
      auto d = scope_depth(x.args().back(), 'c');
      if (d && *d >= from) {
        std::vector<Term> args = x.args();
        args.back() = Term::atom("%c" + std::to_string(*d + delta));
        return Term::make("ifcond", std::move(args));
      }
    }
    return x;
  });
}

std::set<Term> written_memrefs(const Term& item) {
  std::set<Term> out;
  item.walk([&](const Term& t) {
    if (!t.is_atom() && t.op().rfind("store_", 0) == 0 && t.arity() == 3 && is_op(t.arg(1), "fanin"))
      out.insert(t.arg(1).arg(0));
    return !t.is_atom();
  });
  return out;
}

/// Concatenates copies of loop bodies into one block for the loop `iv`,
/// threading memory tokens from copy to copy.
class BodyBuilder {
 public:
  explicit BodyBuilder(Term iv) : iv_(std::move(iv)) {}

  void append(const Term& body, const Term& old_iv, const Term& value) {
    std::unordered_map<Term, Term, TermHash> memo;
    std::map<Term, Term> writers = last_writer_;
    std::function<Term(const Term&)> go = [&](const Term& t) -> Term {
      if (t == old_iv) return value;
      if (t.is_atom()) return t;
      auto it = memo.find(t);
      if (it != memo.end()) return it->second;
      std::vector<Term> args;
      size_t n = t.arity();
      bool entry_token = is_memory_op(t) && t.args().back() == old_iv;
      for (size_t i = 0; i < n; ++i) {
        if (entry_token && i + 1 == n) {
          const Term& fanin = t.arg(n == 2 ? 0 : 1);
          auto w = writers.find(fanin.arg(0));
          args.push_back(w == writers.end() ? iv_ : w->second);
        } else {
          args.push_back(go(t.arg(i)));
        }
      }
      Term r = Term::make(t.op(), std::move(args));
      memo.emplace(t, r);
      return r;
    };
    for (const auto& item : body.args()) {
      Term copy = normalize_affine(go(item));
      for (const auto& m : written_memrefs(copy)) last_writer_[m] = copy;
      items_.push_back(std::move(copy));
    }
  }

  Term block() const { return Term::make("block", items_); }

 private:
  Term iv_;
  std::vector<Term> items_;
  std::map<Term, Term> last_writer_;
};

void absorb(ConditionResult& result, const ConditionResult& arith) {
  for (const auto& t : arith.trace) result.trace.push_back(t);
  if (arith.status == ConditionStatus::Refuted) {
    result.status = ConditionStatus::Refuted;
    result.witness = arith.witness;
  } else if (arith.status == ConditionStatus::Unknown && result.status == ConditionStatus::Proven) {
    result.status = ConditionStatus::Unknown;
  }
}

}  // namespace

std::optional<LoopSignature> loop_signature(const Term& fc) {
  if (!is_op(fc, "forcontrol") || fc.arity() != 2) return std::nullopt;
  const Term& fv = fc.arg(0);
  if (!is_op(fv, "forvalue") || fv.arity() != 4 || !is_op(fc.arg(1), "block")) return std::nullopt;
  auto k = fv.arg(2).as_integer();
  auto d = scope_depth(fv.arg(3), 'i');
  if (!k || *k < 1 || !d) return std::nullopt;
  return LoopSignature{fc, fv, fv.arg(0), fv.arg(1), *k, fc.arg(1), *d};
}

Term make_loop(const Term& m, const Term& n, int64_t k, int depth, const Term& body,
               const Term& old_iv) {
  Term fv = Term::make("forvalue", {normalize_affine(m), normalize_affine(n), Term::integer(k),
                                    iv_name(depth)});
  return Term::make("forcontrol", {fv, normalize_affine(body.replace(old_iv, fv))});
}

Term replicate_body(const Term& body, const Term& old_iv, const Term& iv, int64_t count,
                    int64_t stride) {
  BodyBuilder b(iv);
  for (int64_t j = 0; j < count; ++j) b.append(body, old_iv, affine_add(iv, j * stride));
  return b.block();
}

bool body_is_replication(const Term& body1, const Term& iv1, const Term& body2,
                         const Term& iv2, int64_t factor, int64_t k2, const EGraph* egraph) {
  if (factor < 1 || body1.arity() != body2.arity() * static_cast<size_t>(factor)) return false;
  Term expected = replicate_body(body2, iv2, iv1, factor, k2);
  if (expected == body1) return true;
  if (!egraph) return false;
  auto a = egraph->lookup(expected);
  auto b = egraph->lookup(body1);
  return a && b && egraph->in_same_class(*a, *b);
}

ConditionResult check_unrolling(const LoopSignature& main, const LoopSignature& rem,
                                const SymbolDomain& domain, const EGraph* egraph) {
  if (main.k % rem.k != 0)
    throw NonIntegralFactor("step " + std::to_string(rem.k) + " does not divide " +
                            std::to_string(main.k));
  int64_t factor = main.k / rem.k;
  ConditionResult result;
  if (main.depth != rem.depth) {
    result.fail("nesting", "loops are at different depths", ConditionStatus::Unknown);
    return result;
  }
  Term tc1 = trip_count(main.m, main.n, main.k);
  Term tc2 = trip_count(rem.m, rem.n, rem.k);
  Term merged = trip_count(main.m, rem.n, rem.k);
  std::vector<Clause> clauses = {
      {"trip-count", merged, Term::make("add", {tc2, Term::make("mul", {tc1, Term::integer(factor)})}), {}},
      {"continuity", rem.m,
       normalize_affine(Term::make(
           "add", {main.m, Term::make("mul", {tc1, Term::integer(main.k)})})),
       {tc2}},
  };
  result = check_clauses(clauses, domain);
  if (!body_is_replication(main.body, main.iv, rem.body, rem.iv, factor, rem.k, egraph))
    result.fail("replication",
                "main body is not " + std::to_string(factor) + " copies of the remainder body",
                ConditionStatus::Unknown);
  return result;
}

ConditionResult check_tiling(const LoopSignature& outer, const LoopSignature& inner,
                             const LoopSignature& flat, const SymbolDomain& domain) {
  ConditionResult result;
  if (outer.body.arity() != 1 || !(outer.body.arg(0) == inner.control)) {
    result.fail("perfect-nest", "outer body is not exactly the inner loop", ConditionStatus::Unknown);
    return result;
  }
  if (outer.k % inner.k != 0) {
    result.fail("factor",
                "outer step " + std::to_string(outer.k) + " is not a multiple of inner step " +
                    std::to_string(inner.k),
                ConditionStatus::Refuted);
    return result;
  }
  if (!(normalize_affine(inner.m) == outer.iv))
    result.fail("inner-start", "inner loop does not start at the outer induction value",
                ConditionStatus::Unknown);
  Term step_end = affine_add(outer.iv, outer.k);
  Term guarded = normalize_affine(Term::make("min", {step_end, outer.n}));
  std::vector<Clause> clauses;
  if (normalize_affine(inner.n) == step_end) {
    // Without the min guard the last tile must end exactly at the bound.
    Term span = normalize_affine(Term::make(
        "max", {Term::integer(0),
                Term::make("add", {outer.n, Term::make("mul", {outer.m, Term::integer(-1)})})}));
    clauses.push_back({"whole-tiles", normalize_affine(Term::make("mod", {span, Term::integer(outer.k)})),
                       Term::integer(0), {}});
  } else if (!(normalize_affine(inner.n) == guarded)) {
    result.fail("inner-end", "inner bound is not min(outer + step, upper)", ConditionStatus::Unknown);
  }
  clauses.push_back({"flat-start", flat.m, outer.m, {}});
  clauses.push_back({"flat-end", flat.n, outer.n, {}});
  if (flat.k != inner.k) result.fail("flat-step", "flat step differs from inner step", ConditionStatus::Refuted);
  Term body = shift_depth(inner.body.replace(inner.iv, flat.iv), inner.depth + 1, -1);
  if (body.contains(outer.iv))
    result.fail("outer-use", "inner body uses the outer induction value", ConditionStatus::Unknown);
  else if (!(normalize_affine(body) == flat.body))
    result.fail("body", "flat body differs from the inner body", ConditionStatus::Unknown);
  absorb(result, check_clauses(clauses, domain));
  return result;
}

ConditionResult check_coalescing(const LoopSignature& outer, const LoopSignature& inner,
                                 const LoopSignature& flat, const SymbolDomain& domain) {
  ConditionResult result;
  if (outer.body.arity() != 1 || !(outer.body.arg(0) == inner.control)) {
    result.fail("perfect-nest", "outer body is not exactly the inner loop", ConditionStatus::Unknown);
    return result;
  }
  if (outer.k != 1 || inner.k != 1 || flat.k != 1) {
    result.fail("unit-steps", "coalescing needs unit steps", ConditionStatus::Unknown);
    return result;
  }
  auto n2 = inner.n.as_integer();
  if (!n2 || *n2 < 1 || !(outer.m == Term::integer(0)) || !(inner.m == Term::integer(0))) {
    result.fail("bounds", "needs zero starts and a constant positive inner extent",
                ConditionStatus::Unknown);
    return result;
  }
  Term total = normalize_affine(Term::make("mul", {outer.n, Term::integer(*n2)}));
  std::vector<Clause> clauses = {{"flat-start", flat.m, Term::integer(0), {}},
                                 {"flat-end", flat.n, total, {}}};
  Term quotient = normalize_affine(Term::make("floordiv", {flat.iv, Term::integer(*n2)}));
  Term remainder = normalize_affine(Term::make("mod", {flat.iv, Term::integer(*n2)}));
  BodyBuilder b(flat.iv);
  b.append(inner.body.replace(outer.iv, quotient), inner.iv, remainder);
  Term body = shift_depth(b.block(), inner.depth + 1, -1);
  if (!(normalize_affine(body) == flat.body))
    result.fail("body", "flat body is not the inner body over floordiv/mod", ConditionStatus::Unknown);
  absorb(result, check_clauses(clauses, domain));
  return result;
}

namespace {

struct Access {
  bool write = false;
  Term memref;
  std::vector<Term> index;
  Term op;
};

std::vector<Access> accesses(const Term& body) {
  std::vector<Access> out;
  body.walk([&](const Term& t) {
    if (is_memory_op(t)) {
      bool write = t.op()[0] == 's';
      const Term& fanin = t.arg(write ? 1 : 0);
      if (is_op(fanin, "fanin") && fanin.arity() >= 1)
        out.push_back({write, fanin.arg(0), {fanin.args().begin() + 1, fanin.args().end()}, t});
    }
    return !t.is_atom();
  });
  return out;
}

bool mentions_deeper_iv(const Term& t, int depth) {
  bool found = false;
  t.walk([&](const Term& x) {
    if (found) return false;
    if (is_op(x, "forvalue") && x.arity() == 4) {
      auto d = scope_depth(x.arg(3), 'i');
      if (!d || *d > depth) found = true;
    }
    return !x.is_atom();
  });
  return found;
}

struct Linear {
  int64_t coeff = 0;
  QuasiAffine rest;
};

std::optional<Linear> linearize(const Term& idx, const Term& iv, int depth) {
  try {
    QuasiAffine q = QuasiAffine::from_term(idx);
    Linear l{q.coefficient(iv), q - QuasiAffine::atom(iv) * q.coefficient(iv)};
    for (const auto& [atom, c] : l.rest.coefficients())
      if (atom.contains(iv) || mentions_deeper_iv(atom, depth)) return std::nullopt;
    return l;
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::string access_str(const Access& a) {
  std::string s = std::string(a.write ? "store " : "load ") + a.memref.str() + "[";
  for (size_t i = 0; i < a.index.size(); ++i) s += (i ? ", " : "") + a.index[i].str();
  return s + "]";
}

}  // namespace

std::string DependenceWitness::str() const {
  std::string s = first + " in the first loop conflicts with " + second + " in the second";
  if (distance) s += " at iteration distance " + std::to_string(*distance);
  return s;
}

std::optional<DependenceWitness> raw_violation(const Term& body1, const Term& iv1,
                                               const Term& body2, const Term& iv2) {
  int d1 = scope_depth(iv1.arg(3), 'i').value_or(0);
  auto a1 = accesses(body1);
  auto a2 = accesses(body2);
  for (const auto& x : a1) {
    for (const auto& y : a2) {
      if (!(x.write || y.write) || !(x.memref == y.memref)) continue;
      DependenceWitness w{x.memref.str(), access_str(x), access_str(y), std::nullopt};
      if (x.index.size() != y.index.size()) return w;
      // Solve x(iv1) == y(iv2) dimension by dimension for d = iv1 - iv2.
      bool disjoint = false;
      bool unknown = false;
      std::optional<int64_t> distance;
      for (size_t i = 0; i < x.index.size() && !disjoint && !unknown; ++i) {
        auto lx = linearize(x.index[i], iv1, d1);
        auto ly = linearize(y.index[i], iv2, d1);
        if (!lx || !ly || lx->coeff != ly->coeff) {
          unknown = true;
          break;
        }
        QuasiAffine diff = ly->rest - lx->rest;
        if (!diff.is_constant()) {
          unknown = true;
          break;
        }
        int64_t c = diff.constant_part();
        if (lx->coeff == 0) {
          disjoint = c != 0;
          continue;
        }
        if (c % lx->coeff != 0) {
          disjoint = true;
          continue;
        }
        int64_t d = c / lx->coeff;
        if (distance && *distance != d) disjoint = true;
        distance = d;
      }
      if (disjoint) continue;
      if (unknown || !distance || *distance > 0) {
        w.distance = unknown ? std::nullopt : distance;
        return w;
      }
    }
  }
  return std::nullopt;
}

ConditionResult check_fusion(const LoopSignature& loop1, const LoopSignature& loop2,
                             const LoopSignature& fused, const SymbolDomain& domain) {
  ConditionResult result;
  if (loop1.depth != loop2.depth || fused.depth != loop1.depth) {
    result.fail("nesting", "loops are at different depths", ConditionStatus::Unknown);
    return result;
  }
  int64_t step = loop1.k * loop2.k;
  if (fused.k != step) result.fail("step", "fused step is not k1 * k2", ConditionStatus::Refuted);
  std::vector<Clause> clauses = {
      {"start", loop1.m, loop2.m, {}},
      {"end", loop1.n, loop2.n, {}},
      {"fused-start", fused.m, loop1.m, {}},
      {"fused-end", fused.n, loop1.n, {}},
      {"trips-first", trip_count(loop1.m, loop1.n, loop1.k),
       normalize_affine(Term::make("mul", {trip_count(fused.m, fused.n, step), Term::integer(loop2.k)})),
       {}},
      {"trips-second", trip_count(loop2.m, loop2.n, loop2.k),
       normalize_affine(Term::make("mul", {trip_count(fused.m, fused.n, step), Term::integer(loop1.k)})),
       {}},
  };
  BodyBuilder b(fused.iv);
  for (int64_t j = 0; j < loop2.k; ++j) b.append(loop1.body, loop1.iv, affine_add(fused.iv, j * loop1.k));
  for (int64_t j = 0; j < loop1.k; ++j) b.append(loop2.body, loop2.iv, affine_add(fused.iv, j * loop2.k));
  if (!(b.block() == fused.body))
    result.fail("body", "fused body is not the replicated bodies in order", ConditionStatus::Unknown);
  if (auto w = raw_violation(loop1.body, loop1.iv, loop2.body, loop2.iv))
    result.fail("dependence", w->str(), ConditionStatus::Refuted);
  absorb(result, check_clauses(clauses, domain));
  return result;
}

// ---------------------------------------------------------------- candidates

std::string Candidate::describe() const {
  std::ostringstream out;
  out << to_string(kind) << " in program " << (side == 0 ? "A" : "B");
  for (const auto& l : loops) {
    auto sig = loop_signature(l);
    if (!sig) continue;
    out << " [" << sig->m.str() << ", " << sig->n.str() << ") step " << sig->k;
  }
  return out.str();
}

namespace {

std::optional<LoopSignature> sole_inner_loop(const LoopSignature& outer) {
  if (outer.body.arity() != 1) return std::nullopt;
  return loop_signature(outer.body.arg(0));
}

bool has_div_mod(const Term& t) {
  bool found = false;
  t.walk([&](const Term& x) {
    if (found) return false;
    if (is_op(x, "floordiv") || is_op(x, "mod")) found = true;
    return !x.is_atom();
  });
  return found;
}

bool pair_unrollable(const LoopSignature& a, const LoopSignature& b) {
  return a.k > b.k && a.k % b.k == 0 && a.body.arity() == b.body.arity() * static_cast<size_t>(a.k / b.k);
}

}  // namespace

std::vector<Candidate> find_candidates(const Term& a, const Term& b) {
  std::vector<Candidate> out;
  const Term* programs[2] = {&a, &b};
  for (int side = 0; side < 2; ++side) {
    const Term& self = *programs[side];
    const Term& other = *programs[1 - side];
    std::unordered_set<Term, TermHash> other_loops;
    other.walk([&](const Term& t) {
      if (is_op(t, "forcontrol")) other_loops.insert(t);
      return !t.is_atom();
    });
    bool other_divmod = has_div_mod(other);
    self.walk([&](const Term& blk) {
      if (blk.is_atom()) return false;
      if (!is_op(blk, "block")) return true;
      const auto& items = blk.args();
      std::set<size_t> in_pair;
      for (size_t i = 0; i + 1 < items.size(); ++i) {
        auto l1 = loop_signature(items[i]);
        auto l2 = loop_signature(items[i + 1]);
        if (!l1 || !l2) continue;
        if (other_loops.count(items[i]) && other_loops.count(items[i + 1])) continue;
        if (pair_unrollable(*l1, *l2)) {
          out.push_back({TransformKind::Unrolling, side, blk, i, {items[i], items[i + 1]}});
          in_pair.insert(i);
          in_pair.insert(i + 1);
        }
        if (l1->m == l2->m && l1->n == l2->n)
          out.push_back({TransformKind::Fusion, side, blk, i, {items[i], items[i + 1]}});
      }
      for (size_t i = 0; i < items.size(); ++i) {
        auto l = loop_signature(items[i]);
        if (!l || other_loops.count(items[i])) continue;
        if (l->k > 1 && l->body.arity() > 1 && !in_pair.count(i))
          out.push_back({TransformKind::Unrolling, side, blk, i, {items[i]}});
        auto inner = sole_inner_loop(*l);
        if (!inner) continue;
        if (normalize_affine(inner->m) == l->iv)
          out.push_back({TransformKind::Tiling, side, blk, i, {items[i]}});
        if (other_divmod && l->m == Term::integer(0) && inner->m == Term::integer(0) &&
            inner->n.as_integer() && l->k == 1 && inner->k == 1)
          out.push_back({TransformKind::Coalescing, side, blk, i, {items[i]}});
      }
      return true;
    });
  }
  return out;
}

std::vector<Candidate> find_candidates(const DataflowGraph& a, const DataflowGraph& b) {
  return find_candidates(graph_to_term(a), graph_to_term(b));
}

// ---------------------------------------------------------------- rules

namespace {

/// Splits a loop whose body is `factor` copies into the rolled loop.
std::optional<Term> roll_loop(const LoopSignature& l, int64_t factor, const EGraph* egraph) {
  if (l.k % factor != 0 || l.body.arity() % static_cast<size_t>(factor) != 0) return std::nullopt;
  size_t chunk = l.body.arity() / static_cast<size_t>(factor);
  Term first = Term::make("block", {l.body.args().begin(), l.body.args().begin() + chunk});
  int64_t k2 = l.k / factor;
  Term rolled = make_loop(l.m, l.n, k2, l.depth, first, l.iv);
  auto sig = loop_signature(rolled);
  if (!body_is_replication(l.body, l.iv, sig->body, sig->iv, factor, k2, egraph)) return std::nullopt;
  return rolled;
}

}  // namespace

RuleAttempt generate_rule(const Candidate& c, const SymbolDomain& domain, const EGraph* egraph) {
  RuleAttempt attempt{c, {}, std::nullopt};
  DynamicRule rule;
  rule.kind = c.kind;
  rule.provenance = c.loops;
  auto first = loop_signature(c.loops.at(0));
  if (!first) {
    attempt.condition.fail("shape", "not a loop", ConditionStatus::Unknown);
    return attempt;
  }
  switch (c.kind) {
    case TransformKind::Unrolling: {
      if (c.is_pair()) {
        auto rem = loop_signature(c.loops[1]);
        try {
          attempt.condition = check_unrolling(*first, *rem, domain, egraph);
        } catch (const NonIntegralFactor& e) {
          attempt.condition.fail("factor", e.what(), ConditionStatus::Unknown);
          return attempt;
        }
        rule.lhs = make_loop(first->m, rem->n, rem->k, rem->depth, rem->body, rem->iv);
        rule.rhs = Term::make("combine", {c.loops[0], c.loops[1]});
        rule.name = "unroll-x" + std::to_string(first->k / rem->k);
        break;
      }
      // A single loop: look for the largest factor whose copies roll up.
      std::optional<Term> rolled;
      int64_t factor = first->k;
      for (; factor >= 2 && !rolled; --factor) rolled = roll_loop(*first, factor, egraph);
      ++factor;
      if (!rolled) {
        attempt.condition.fail("replication", "body is not a replication", ConditionStatus::Unknown);
        return attempt;
      }
      auto sig = loop_signature(*rolled);
      attempt.condition = check_clauses(
          {{"trip-count", trip_count(sig->m, sig->n, sig->k),
            normalize_affine(Term::make(
                "mul", {trip_count(first->m, first->n, first->k), Term::integer(factor)})),
            {}}},
          domain);
      rule.lhs = *rolled;
      rule.rhs = c.loops[0];
      rule.name = "unroll-x" + std::to_string(factor);
      break;
    }
    case TransformKind::Tiling: {
      auto inner = sole_inner_loop(*first);
      Term body = shift_depth(inner->body.replace(inner->iv, Term::atom("%flat")), inner->depth + 1, -1);
      rule.lhs = make_loop(first->m, first->n, inner->k, first->depth, body, Term::atom("%flat"));
      attempt.condition = check_tiling(*first, *inner, *loop_signature(rule.lhs), domain);
      rule.rhs = c.loops[0];
      rule.name = "tile-x" + std::to_string(inner->k ? first->k / inner->k : 0);
      break;
    }
    case TransformKind::Fusion: {
      auto second = loop_signature(c.loops[1]);
      int64_t step = first->k * second->k;
      Term fv = Term::make("forvalue", {first->m, first->n, Term::integer(step), iv_name(first->depth)});
      BodyBuilder b(fv);
      for (int64_t j = 0; j < second->k; ++j) b.append(first->body, first->iv, affine_add(fv, j * first->k));
      for (int64_t j = 0; j < first->k; ++j) b.append(second->body, second->iv, affine_add(fv, j * second->k));
      rule.lhs = Term::make("forcontrol", {fv, b.block()});
      attempt.condition = check_fusion(*first, *second, *loop_signature(rule.lhs), domain);
      rule.rhs = Term::make("combine", {c.loops[0], c.loops[1]});
      rule.name = "fuse";
      break;
    }
    case TransformKind::Coalescing: {
      auto inner = sole_inner_loop(*first);
      int64_t n2 = *inner->n.as_integer();
      Term total = normalize_affine(Term::make("mul", {first->n, Term::integer(n2)}));
      Term fv = Term::make("forvalue", {Term::integer(0), total, Term::integer(1), iv_name(first->depth)});
      BodyBuilder b(fv);
      b.append(inner->body.replace(first->iv, normalize_affine(Term::make("floordiv", {fv, Term::integer(n2)}))),
               inner->iv, normalize_affine(Term::make("mod", {fv, Term::integer(n2)})));
      rule.lhs = Term::make("forcontrol", {fv, normalize_affine(shift_depth(b.block(), inner->depth + 1, -1))});
      attempt.condition = check_coalescing(*first, *inner, *loop_signature(rule.lhs), domain);
      rule.rhs = c.loops[0];
      rule.name = "coalesce-" + std::to_string(n2);
      break;
    }
  }
  rule.condition = attempt.condition;
  if (attempt.condition.status == ConditionStatus::Proven) attempt.rule = std::move(rule);
  return attempt;
}

}  // namespace hec
