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

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "hec/term.hpp"

namespace hec {

/// True for the operator labels of index arithmetic inside terms:
/// add, mul, floordiv, ceildiv, mod, min, max.
bool is_affine_label(std::string_view op);

/// Canonical quasi-affine form: constant + sum of coefficient * atom.
///
/// Atoms are opaque terms (arguments, induction variables, loaded values)
/// or canonical `(floordiv X c)`, `(min ...)`, `(max ...)` terms. Modulo and
/// ceiling division are expressed through floordiv, so two expressions that
/// differ only by the usual floordiv/mod identities get the same form.
class QuasiAffine {
 public:
  QuasiAffine() = default;

  static QuasiAffine constant(int64_t value);
  static QuasiAffine atom(const Term& atom);
  /// Reads a term over the affine labels and normalizes it. Non-affine
  /// subterms become atoms after their own children are normalized.
  static QuasiAffine from_term(const Term& term);

  Term to_term() const;

  bool is_constant() const { return coeffs_.empty(); }
  int64_t constant_part() const { return constant_; }
  const std::map<Term, int64_t>& coefficients() const { return coeffs_; }
  int64_t coefficient(const Term& atom) const;

  QuasiAffine operator+(const QuasiAffine& o) const;
  QuasiAffine operator-(const QuasiAffine& o) const;
  QuasiAffine operator*(int64_t k) const;
  QuasiAffine operator-() const { return *this * -1; }
  bool operator==(const QuasiAffine& o) const = default;

  static QuasiAffine floordiv(const QuasiAffine& e, int64_t divisor);
  static QuasiAffine ceildiv(const QuasiAffine& e, int64_t divisor);
  static QuasiAffine mod(const QuasiAffine& e, int64_t divisor);
  static QuasiAffine min(std::vector<QuasiAffine> operands);
  static QuasiAffine max(std::vector<QuasiAffine> operands);

 private:
  void add_term(const Term& atom, int64_t coeff);

  std::map<Term, int64_t> coeffs_;
  int64_t constant_ = 0;
};

/// Normalizes every maximal affine subterm of `term`.
Term normalize_affine(const Term& term);

/// Closed integer interval; the int64 extremes stand for unbounded ends.
struct Interval {
  int64_t lo = INT64_MIN;
  int64_t hi = INT64_MAX;

  bool bounded_below() const { return lo != INT64_MIN; }
  bool bounded_above() const { return hi != INT64_MAX; }
};

/// Bounds of a leaf atom; nullopt means unbounded.
using LeafBounds = std::function<std::optional<Interval>(const Term&)>;

Interval bounds_of(const QuasiAffine& e, const LeafBounds& leaf);

/// Drops min/max operands that are dominated under the given leaf bounds and
/// folds floordiv atoms whose quotient is fixed by the bounds.
QuasiAffine simplify_with_bounds(const QuasiAffine& e, const LeafBounds& leaf);

/// Evaluates an affine term. `leaf` supplies values for atoms; throws Error
/// for an atom it cannot bind or on overflow.
int64_t eval_affine_term(const Term& term,
                         const std::function<int64_t(const Term&)>& leaf);

/// Atoms (non-affine leaves) occurring in an affine term, in term order.
std::vector<Term> affine_leaves(const Term& term);

}  // namespace hec
