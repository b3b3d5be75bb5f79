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
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hec/error.hpp"

namespace hec {

/// Integer division rounding toward negative infinity. `divisor` > 0.
int64_t floor_div(int64_t value, int64_t divisor);
/// Integer division rounding toward positive infinity. `divisor` > 0.
int64_t ceil_div(int64_t value, int64_t divisor);
/// Euclidean remainder in [0, divisor). `divisor` > 0.
int64_t floor_mod(int64_t value, int64_t divisor);

enum class AffineKind {
  Constant,
  Dim,
  Symbol,
  Add,
  Mul,
  FloorDiv,
  CeilDiv,
  Mod,
  Min,
  Max,
};

/// Immutable affine expression tree over dims `d_i` and symbols `s_i`.
///
/// Multiplication requires one constant side; floordiv, ceildiv and mod
/// require a positive constant divisor. Min and max take two or more
/// operands and are only produced for loop bounds.
class AffineExpr {
 public:
  AffineExpr() : AffineExpr(constant(0)) {}

  static AffineExpr constant(int64_t value);
  static AffineExpr dim(unsigned position);
  static AffineExpr symbol(unsigned position);
  static AffineExpr floor_div(AffineExpr lhs, int64_t divisor);
  static AffineExpr ceil_div(AffineExpr lhs, int64_t divisor);
  static AffineExpr mod(AffineExpr lhs, int64_t divisor);
  static AffineExpr min(std::vector<AffineExpr> operands);
  static AffineExpr max(std::vector<AffineExpr> operands);
  /// Throws hec::Error if neither side is constant.
  static AffineExpr mul(AffineExpr lhs, AffineExpr rhs);
  static AffineExpr add(AffineExpr lhs, AffineExpr rhs);

  AffineKind kind() const;
  /// Constant value, or the divisor / multiplier of a binary node's rhs.
  int64_t value() const;
  /// Dim or symbol position.
  unsigned position() const;
  const std::vector<AffineExpr>& operands() const;

  bool is_constant() const { return kind() == AffineKind::Constant; }
  bool contains_min_max() const;
  /// One past the highest dim/symbol position referenced.
  unsigned num_dims() const;
  unsigned num_symbols() const;

  /// MLIR-style rendering, e.g. `d0 + (s0 floordiv 2) * 2`.
  std::string str() const;
  using Namer = std::function<std::string(AffineKind, unsigned)>;
  /// Same rendering with caller-chosen names for dims and symbols.
  std::string str(const Namer& name) const;

  friend bool operator==(const AffineExpr& a, const AffineExpr& b);
  friend AffineExpr operator+(AffineExpr a, AffineExpr b) {
    return add(std::move(a), std::move(b));
  }
  friend AffineExpr operator-(AffineExpr a, AffineExpr b) {
    return add(std::move(a), mul(std::move(b), constant(-1)));
  }
  friend AffineExpr operator*(AffineExpr a, AffineExpr b) {
    return mul(std::move(a), std::move(b));
  }

 private:
  struct Node;
  explicit AffineExpr(std::shared_ptr<const Node> node)
      : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// `(d0, ..., dn)[s0, ..., sm] -> (results...)`.
struct AffineMap {
  unsigned num_dims = 0;
  unsigned num_symbols = 0;
  std::vector<AffineExpr> results;

  std::string str() const;
  friend bool operator==(const AffineMap&, const AffineMap&) = default;
};

/// Exact evaluation. Throws UnboundOperand when a referenced dim or symbol
/// has no binding and hec::Error on int64 overflow.
int64_t eval_affine_expr(const AffineExpr& expr, std::span<const int64_t> dims,
                         std::span<const int64_t> syms);

}  // namespace hec
