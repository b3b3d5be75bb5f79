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

#include "hec/quasi_affine.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "hec/affine.hpp"

namespace hec {

namespace {

int64_t checked_add(int64_t a, int64_t b) {
  int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw Error("affine overflow");
  return r;
}

int64_t checked_mul(int64_t a, int64_t b) {
  int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw Error("affine overflow");
  return r;
}

std::optional<int64_t> divisor_of(const QuasiAffine& q) {
  if (!q.is_constant() || q.constant_part() <= 0) return std::nullopt;
  return q.constant_part();
}

bool single_atom(const QuasiAffine& q, std::string_view op, Term* out) {
  if (q.constant_part() != 0 || q.coefficients().size() != 1) return false;
  const auto& [atom, c] = *q.coefficients().begin();
  if (c != 1 || atom.is_atom() || atom.op() != op) return false;
  *out = atom;
  return true;
}

QuasiAffine min_max(std::vector<QuasiAffine> ops, bool is_min) {
  const char* label = is_min ? "min" : "max";
  std::vector<QuasiAffine> flat;
  for (auto& op : ops) {
    Term nested;
    if (single_atom(op, label, &nested)) {
      for (const auto& a : nested.args())
        flat.push_back(QuasiAffine::from_term(a));
    } else {
      flat.push_back(std::move(op));
    }
  }
  if (flat.empty()) throw Error(std::string(label) + " of no operands");
  std::vector<QuasiAffine> kept;
  for (auto& cand : flat) {
    bool drop = false;
    for (auto& k : kept) {
      QuasiAffine diff = cand - k;
      if (!diff.is_constant()) continue;
      int64_t d = diff.constant_part();
      if ((is_min && d < 0) || (!is_min && d > 0)) k = cand;
      drop = true;
      break;
    }
    if (!drop) kept.push_back(std::move(cand));
  }
  if (kept.size() == 1) return kept.front();
  std::vector<Term> terms;
  for (const auto& k : kept) terms.push_back(k.to_term());
  std::sort(terms.begin(), terms.end());
  return QuasiAffine::atom(Term::make(label, std::move(terms)));
}

}  // namespace

bool is_affine_label(std::string_view op) {
  return op == "add" || op == "mul" || op == "floordiv" || op == "ceildiv" ||
         op == "mod" || op == "min" || op == "max";
}

QuasiAffine QuasiAffine::constant(int64_t value) {
  QuasiAffine q;
  q.constant_ = value;
  return q;
}

QuasiAffine QuasiAffine::atom(const Term& atom) {
  if (auto v = atom.as_integer()) return constant(*v);
  QuasiAffine q;
  q.coeffs_.emplace(atom, 1);
  return q;
}

void QuasiAffine::add_term(const Term& atom, int64_t coeff) {
  if (coeff == 0) return;
  auto [it, inserted] = coeffs_.emplace(atom, coeff);
  if (inserted) return;
  it->second = checked_add(it->second, coeff);
  if (it->second == 0) coeffs_.erase(it);
}

int64_t QuasiAffine::coefficient(const Term& atom) const {
  auto it = coeffs_.find(atom);
  return it == coeffs_.end() ? 0 : it->second;
}

QuasiAffine QuasiAffine::operator+(const QuasiAffine& o) const {
  QuasiAffine r = *this;
  for (const auto& [a, c] : o.coeffs_) r.add_term(a, c);
  r.constant_ = checked_add(r.constant_, o.constant_);
  return r;
}

QuasiAffine QuasiAffine::operator-(const QuasiAffine& o) const {
  return *this + o * -1;
}

QuasiAffine QuasiAffine::operator*(int64_t k) const {
  QuasiAffine r;
  if (k == 0) return r;
  for (const auto& [a, c] : coeffs_) r.coeffs_.emplace(a, checked_mul(c, k));
  r.constant_ = checked_mul(constant_, k);
  return r;
}

QuasiAffine QuasiAffine::floordiv(const QuasiAffine& e, int64_t c) {
  if (c <= 0) throw Error("floordiv by non-positive constant");
  if (c == 1) return e;
  QuasiAffine quotient, rest;
  for (const auto& [a, coeff] : e.coeffs_) {
    int64_t q = floor_div(coeff, c);
    quotient.add_term(a, q);
    rest.add_term(a, coeff - q * c);
  }
  quotient.constant_ = floor_div(e.constant_, c);
  rest.constant_ = floor_mod(e.constant_, c);
  if (rest.is_constant()) return quotient;

  int64_t g = std::gcd(c, rest.constant_);
  for (const auto& [a, coeff] : rest.coeffs_) g = std::gcd(g, coeff);
  if (g > 1) {
    for (auto& [a, coeff] : rest.coeffs_) coeff /= g;
    rest.constant_ /= g;
    c /= g;
  }

  Term inner;
  if (rest.coeffs_.size() == 1 && rest.coeffs_.begin()->second == 1) {
    const Term& a = rest.coeffs_.begin()->first;
    if (!a.is_atom() && a.op() == "floordiv") {
      int64_t d = *a.arg(1).as_integer();
      QuasiAffine y = from_term(a.arg(0)) +
                      constant(checked_mul(rest.constant_, d));
      return quotient + floordiv(y, checked_mul(d, c));
    }
  }
  return quotient +
         atom(Term::make("floordiv", {rest.to_term(), Term::integer(c)}));
}

QuasiAffine QuasiAffine::ceildiv(const QuasiAffine& e, int64_t c) {
  return -floordiv(-e, c);
}

QuasiAffine QuasiAffine::mod(const QuasiAffine& e, int64_t c) {
  return e - floordiv(e, c) * c;
}

QuasiAffine QuasiAffine::min(std::vector<QuasiAffine> operands) {
  return min_max(std::move(operands), true);
}

QuasiAffine QuasiAffine::max(std::vector<QuasiAffine> operands) {
  return min_max(std::move(operands), false);
}

QuasiAffine QuasiAffine::from_term(const Term& t) {
  if (t.is_atom()) return atom(t);
  const std::string& op = t.op();
  if (op == "add") {
    QuasiAffine r;
    for (const auto& a : t.args()) r = r + from_term(a);
    return r;
  }
  if (op == "mul" && t.arity() >= 1) {
    QuasiAffine r = from_term(t.arg(0));
    for (size_t i = 1; i < t.arity(); ++i) {
      QuasiAffine f = from_term(t.arg(i));
      if (f.is_constant()) {
        r = r * f.constant_part();
      } else if (r.is_constant()) {
        r = f * r.constant_part();
      } else {
        return atom(Term::make("mul", {r.to_term(), f.to_term()}));
      }
    }
    return r;
  }
  if ((op == "floordiv" || op == "ceildiv" || op == "mod") && t.arity() == 2) {
    QuasiAffine lhs = from_term(t.arg(0));
    QuasiAffine rhs = from_term(t.arg(1));
    auto d = divisor_of(rhs);
    if (!d) return atom(Term::make(op, {lhs.to_term(), rhs.to_term()}));
    if (op == "floordiv") return floordiv(lhs, *d);
    if (op == "ceildiv") return ceildiv(lhs, *d);
    return mod(lhs, *d);
  }
  if ((op == "min" || op == "max") && t.arity() >= 1) {
    std::vector<QuasiAffine> ops;
    for (const auto& a : t.args()) ops.push_back(from_term(a));
    return op == "min" ? min(std::move(ops)) : max(std::move(ops));
  }
  std::vector<Term> args;
  args.reserve(t.arity());
  for (const auto& a : t.args()) args.push_back(normalize_affine(a));
  return atom(Term::make(op, std::move(args)));
}

Term QuasiAffine::to_term() const {
  std::optional<Term> acc;
  auto push = [&](Term t) {
    acc = acc ? Term::make("add", {*acc, std::move(t)}) : std::move(t);
  };
  for (const auto& [a, c] : coeffs_)
    push(c == 1 ? a : Term::make("mul", {a, Term::integer(c)}));
  if (constant_ != 0 || !acc) push(Term::integer(constant_));
  return *acc;
}

Term normalize_affine(const Term& term) {
  return term.rewrite(
      [](const Term& t) -> std::optional<Term> {
        if (t.is_atom()) return t;
        if (is_affine_label(t.op())) return QuasiAffine::from_term(t).to_term();
        return std::nullopt;
      });
}

namespace {

using i128 = __int128;
constexpr i128 kNegInf = -(static_cast<i128>(1) << 100);
constexpr i128 kPosInf = static_cast<i128>(1) << 100;

struct Range {
  i128 lo = kNegInf;
  i128 hi = kPosInf;
};

i128 clamp_inf(i128 v) { return std::clamp(v, kNegInf, kPosInf); }

bool finite(i128 v) { return v > kNegInf && v < kPosInf; }

Range scale(Range r, int64_t k) {
  if (k == 0) return {0, 0};
  auto mul = [&](i128 v) -> i128 {
    if (!finite(v)) return (v > 0) == (k > 0) ? kPosInf : kNegInf;
    return clamp_inf(v * k);
  };
  i128 a = mul(r.lo), b = mul(r.hi);
  return k > 0 ? Range{a, b} : Range{b, a};
}

Range add(Range a, Range b) {
  auto plus = [](i128 x, i128 y, i128 inf) -> i128 {
    if (!finite(x) || !finite(y)) return inf;
    return clamp_inf(x + y);
  };
  return {plus(a.lo, b.lo, kNegInf), plus(a.hi, b.hi, kPosInf)};
}

i128 floor_div128(i128 v, i128 d) {
  i128 q = v / d;
  if ((v % d != 0) && (v < 0)) --q;
  return q;
}

Range range_of(const QuasiAffine& e, const LeafBounds& leaf);

Range range_of_atom(const Term& a, const LeafBounds& leaf) {
  if (!a.is_atom() && a.op() == "floordiv") {
    Range inner = range_of(QuasiAffine::from_term(a.arg(0)), leaf);
    i128 d = *a.arg(1).as_integer();
    return {finite(inner.lo) ? floor_div128(inner.lo, d) : kNegInf,
            finite(inner.hi) ? floor_div128(inner.hi, d) : kPosInf};
  }
  if (!a.is_atom() && (a.op() == "min" || a.op() == "max")) {
    bool is_min = a.op() == "min";
    Range r = range_of(QuasiAffine::from_term(a.arg(0)), leaf);
    for (size_t i = 1; i < a.arity(); ++i) {
      Range o = range_of(QuasiAffine::from_term(a.arg(i)), leaf);
      r = is_min ? Range{std::min(r.lo, o.lo), std::min(r.hi, o.hi)}
                 : Range{std::max(r.lo, o.lo), std::max(r.hi, o.hi)};
    }
    return r;
  }
  if (auto b = leaf ? leaf(a) : std::nullopt) {
    return {b->bounded_below() ? i128(b->lo) : kNegInf,
            b->bounded_above() ? i128(b->hi) : kPosInf};
  }
  return {};
}

// Recognizes a*E + b*(E floordiv C) and a*(E floordiv d) + b*(E floordiv C)
// pairs that form a scaled modulo and bounds them exactly.
Range range_of(const QuasiAffine& e, const LeafBounds& leaf) {
  QuasiAffine rest = e;
  Range acc{0, 0};
  std::vector<std::pair<Term, int64_t>> divs;
  for (const auto& [a, c] : e.coefficients())
    if (!a.is_atom() && a.op() == "floordiv") divs.emplace_back(a, c);

  for (const auto& [f, beta] : divs) {
    if (rest.coefficient(f) != beta) continue;
    int64_t big = *f.arg(1).as_integer();
    QuasiAffine inner = QuasiAffine::from_term(f.arg(0));
    if (beta % big == 0) {
      int64_t alpha = -beta / big;
      bool present = !inner.is_constant();
      for (const auto& [a, c] : inner.coefficients())
        if (rest.coefficient(a) != alpha * c) present = false;
      if (present) {
        rest = rest - inner * alpha - QuasiAffine::atom(f) * beta;
        acc = add(acc, scale(Range{0, big - 1}, alpha));
        continue;
      }
    }
    for (const auto& [g, alpha] : divs) {
      if (g == f || rest.coefficient(g) != alpha) continue;
      int64_t d = *g.arg(1).as_integer();
      if (d >= big || big % d != 0 || !(g.arg(0) == f.arg(0))) continue;
      if (beta != -alpha * (big / d)) continue;
      rest = rest - QuasiAffine::atom(g) * alpha - QuasiAffine::atom(f) * beta;
      acc = add(acc, scale(Range{0, big / d - 1}, alpha));
      break;
    }
  }
  acc = add(acc, Range{rest.constant_part(), rest.constant_part()});
  for (const auto& [a, c] : rest.coefficients())
    acc = add(acc, scale(range_of_atom(a, leaf), c));
  return acc;
}

int64_t to_bound(i128 v) {
  if (v <= INT64_MIN || v <= kNegInf) return INT64_MIN;
  if (v >= INT64_MAX || v >= kPosInf) return INT64_MAX;
  return static_cast<int64_t>(v);
}

}  // namespace

Interval bounds_of(const QuasiAffine& e, const LeafBounds& leaf) {
  Range r = range_of(e, leaf);
  return {to_bound(r.lo), to_bound(r.hi)};
}

QuasiAffine simplify_with_bounds(const QuasiAffine& e, const LeafBounds& leaf) {
  QuasiAffine out = QuasiAffine::constant(e.constant_part());
  for (const auto& [a, c] : e.coefficients()) {
    QuasiAffine part = QuasiAffine::atom(a);
    if (!a.is_atom() && a.op() == "floordiv") {
      QuasiAffine inner =
          simplify_with_bounds(QuasiAffine::from_term(a.arg(0)), leaf);
      int64_t d = *a.arg(1).as_integer();
      Interval b = bounds_of(inner, leaf);
      if (b.bounded_below() && b.bounded_above() &&
          floor_div(b.lo, d) == floor_div(b.hi, d)) {
        part = QuasiAffine::constant(floor_div(b.lo, d));
      } else {
        part = QuasiAffine::floordiv(inner, d);
      }
    } else if (!a.is_atom() && (a.op() == "min" || a.op() == "max")) {
      bool is_min = a.op() == "min";
      std::vector<QuasiAffine> ops;
      for (const auto& x : a.args())
        ops.push_back(simplify_with_bounds(QuasiAffine::from_term(x), leaf));
      std::vector<bool> dropped(ops.size(), false);
      for (size_t i = 0; i < ops.size(); ++i) {
        for (size_t j = 0; j < ops.size() && !dropped[i]; ++j) {
          if (i == j || dropped[j]) continue;
          Interval diff = bounds_of(ops[j] - ops[i], leaf);
          // ops[j] never worse than ops[i]
          if (is_min ? (diff.bounded_above() && diff.hi <= 0)
                     : (diff.bounded_below() && diff.lo >= 0))
            dropped[i] = true;
        }
      }
      std::vector<QuasiAffine> kept;
      for (size_t i = 0; i < ops.size(); ++i)
        if (!dropped[i]) kept.push_back(ops[i]);
      part = is_min ? QuasiAffine::min(std::move(kept))
                    : QuasiAffine::max(std::move(kept));
    }
    out = out + part * c;
  }
  return out;
}

int64_t eval_affine_term(const Term& t,
                         const std::function<int64_t(const Term&)>& leaf) {
  if (auto v = t.as_integer()) return *v;
  if (t.is_atom() || !is_affine_label(t.op())) return leaf(t);
  const std::string& op = t.op();
  std::vector<int64_t> v;
  for (const auto& a : t.args()) v.push_back(eval_affine_term(a, leaf));
  if (op == "add") {
    int64_t r = 0;
    for (int64_t x : v) r = checked_add(r, x);
    return r;
  }
  if (op == "mul") {
    int64_t r = 1;
    for (int64_t x : v) r = checked_mul(r, x);
    return r;
  }
  if (op == "min") return *std::min_element(v.begin(), v.end());
  if (op == "max") return *std::max_element(v.begin(), v.end());
  if (v.size() != 2 || v[1] <= 0)
    throw Error("bad divisor in affine term " + t.str());
  if (op == "floordiv") return floor_div(v[0], v[1]);
  if (op == "ceildiv") return ceil_div(v[0], v[1]);
  return floor_mod(v[0], v[1]);
}

std::vector<Term> affine_leaves(const Term& term) {
  std::set<Term> out;
  std::function<void(const Term&)> walk = [&](const Term& t) {
    if (t.as_integer()) return;
    if (!t.is_atom() && is_affine_label(t.op())) {
      for (const auto& a : t.args()) walk(a);
      return;
    }
    out.insert(t);
  };
  walk(term);
  return {out.begin(), out.end()};
}

}  // namespace hec
