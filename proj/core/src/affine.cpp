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

#include "hec/affine.hpp"

#include <algorithm>
#include <cassert>

namespace hec {

int64_t floor_div(int64_t value, int64_t divisor) {
  assert(divisor > 0);
  int64_t q = value / divisor;
  if ((value % divisor) != 0 && value < 0) --q;
  return q;
}

int64_t ceil_div(int64_t value, int64_t divisor) {
  assert(divisor > 0);
  int64_t q = value / divisor;
  if ((value % divisor) != 0 && value > 0) ++q;
  return q;
}

int64_t floor_mod(int64_t value, int64_t divisor) {
  assert(divisor > 0);
  int64_t r = value % divisor;
  return r < 0 ? r + divisor : r;
}

struct AffineExpr::Node {
  AffineKind kind;
  int64_t value = 0;
  unsigned position = 0;
  std::vector<AffineExpr> operands;
};

namespace {

bool is_binary(AffineKind k) {
  return k == AffineKind::Add || k == AffineKind::Mul ||
         k == AffineKind::FloorDiv || k == AffineKind::CeilDiv ||
         k == AffineKind::Mod;
}

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

}  // namespace

AffineExpr AffineExpr::constant(int64_t value) {
  return AffineExpr(std::make_shared<Node>(Node{AffineKind::Constant, value, 0, {}}));
}

AffineExpr AffineExpr::dim(unsigned position) {
  return AffineExpr(
      std::make_shared<Node>(Node{AffineKind::Dim, 0, position, {}}));
}

AffineExpr AffineExpr::symbol(unsigned position) {
  return AffineExpr(
      std::make_shared<Node>(Node{AffineKind::Symbol, 0, position, {}}));
}

AffineExpr AffineExpr::add(AffineExpr lhs, AffineExpr rhs) {
  if (lhs.is_constant() && rhs.is_constant())
    return constant(checked_add(lhs.value(), rhs.value()));
  return AffineExpr(std::make_shared<Node>(
      Node{AffineKind::Add, 0, 0, {std::move(lhs), std::move(rhs)}}));
}

AffineExpr AffineExpr::mul(AffineExpr lhs, AffineExpr rhs) {
  if (lhs.is_constant() && rhs.is_constant())
    return constant(checked_mul(lhs.value(), rhs.value()));
  if (!lhs.is_constant() && !rhs.is_constant())
    throw Error("non-affine product: " + lhs.str() + " * " + rhs.str());
  return AffineExpr(std::make_shared<Node>(
      Node{AffineKind::Mul, 0, 0, {std::move(lhs), std::move(rhs)}}));
}

static void check_divisor(int64_t divisor) {
  if (divisor <= 0)
    throw Error("affine divisor must be a positive constant, got " +
                std::to_string(divisor));
}

AffineExpr AffineExpr::floor_div(AffineExpr lhs, int64_t divisor) {
  check_divisor(divisor);
  if (lhs.is_constant()) return constant(hec::floor_div(lhs.value(), divisor));
  return AffineExpr(std::make_shared<Node>(Node{
      AffineKind::FloorDiv, 0, 0, {std::move(lhs), constant(divisor)}}));
}

AffineExpr AffineExpr::ceil_div(AffineExpr lhs, int64_t divisor) {
  check_divisor(divisor);
  if (lhs.is_constant()) return constant(hec::ceil_div(lhs.value(), divisor));
  return AffineExpr(std::make_shared<Node>(Node{
      AffineKind::CeilDiv, 0, 0, {std::move(lhs), constant(divisor)}}));
}

AffineExpr AffineExpr::mod(AffineExpr lhs, int64_t divisor) {
  check_divisor(divisor);
  if (lhs.is_constant()) return constant(floor_mod(lhs.value(), divisor));
  return AffineExpr(std::make_shared<Node>(
      Node{AffineKind::Mod, 0, 0, {std::move(lhs), constant(divisor)}}));
}

AffineExpr AffineExpr::min(std::vector<AffineExpr> operands) {
  if (operands.empty()) throw Error("min of no operands");
  if (operands.size() == 1) return operands.front();
  return AffineExpr(std::make_shared<Node>(
      Node{AffineKind::Min, 0, 0, std::move(operands)}));
}

AffineExpr AffineExpr::max(std::vector<AffineExpr> operands) {
  if (operands.empty()) throw Error("max of no operands");
  if (operands.size() == 1) return operands.front();
  return AffineExpr(std::make_shared<Node>(
      Node{AffineKind::Max, 0, 0, std::move(operands)}));
}

AffineKind AffineExpr::kind() const { return node_->kind; }

int64_t AffineExpr::value() const {
  if (node_->kind == AffineKind::Constant) return node_->value;
  if (is_binary(node_->kind) && node_->operands[1].is_constant())
    return node_->operands[1].value();
  if (node_->kind == AffineKind::Mul && node_->operands[0].is_constant())
    return node_->operands[0].value();
  throw Error("affine expression has no constant value: " + str());
}

unsigned AffineExpr::position() const { return node_->position; }

const std::vector<AffineExpr>& AffineExpr::operands() const {
  return node_->operands;
}

bool AffineExpr::contains_min_max() const {
  if (kind() == AffineKind::Min || kind() == AffineKind::Max) return true;
  return std::any_of(operands().begin(), operands().end(),
                     [](const AffineExpr& e) { return e.contains_min_max(); });
}

unsigned AffineExpr::num_dims() const {
  if (kind() == AffineKind::Dim) return position() + 1;
  unsigned n = 0;
  for (const auto& op : operands()) n = std::max(n, op.num_dims());
  return n;
}

unsigned AffineExpr::num_symbols() const {
  if (kind() == AffineKind::Symbol) return position() + 1;
  unsigned n = 0;
  for (const auto& op : operands()) n = std::max(n, op.num_symbols());
  return n;
}

namespace {

bool is_atomic(const AffineExpr& e) {
  switch (e.kind()) {
    case AffineKind::Constant:
      return e.value() >= 0;
    case AffineKind::Dim:
    case AffineKind::Symbol:
    case AffineKind::Min:
    case AffineKind::Max:
      return true;
    default:
      return false;
  }
}

// `e * -1` as the rhs of an add prints as subtraction.
bool is_negation(const AffineExpr& e) {
  return e.kind() == AffineKind::Mul && e.operands()[1].is_constant() &&
         e.operands()[1].value() == -1 && !e.operands()[0].is_constant();
}

std::string render(const AffineExpr& e, const AffineExpr::Namer& name) {
  auto paren = [&](const AffineExpr& x) {
    return is_atomic(x) ? render(x, name) : "(" + render(x, name) + ")";
  };
  auto grouped = [&](const AffineExpr& x) {
    return x.kind() == AffineKind::Add ? "(" + render(x, name) + ")"
                                       : render(x, name);
  };
  const auto& ops = e.operands();
  switch (e.kind()) {
    case AffineKind::Constant:
      return std::to_string(e.value());
    case AffineKind::Dim:
    case AffineKind::Symbol:
      return name(e.kind(), e.position());
    case AffineKind::Add: {
      const AffineExpr& rhs = ops[1];
      if (rhs.is_constant() && rhs.value() < 0 && rhs.value() != INT64_MIN)
        return render(ops[0], name) + " - " + std::to_string(-rhs.value());
      if (is_negation(rhs))
        return render(ops[0], name) + " - " + grouped(rhs.operands()[0]);
      return render(ops[0], name) + " + " + grouped(rhs);
    }
    case AffineKind::Mul:
      return paren(ops[0]) + " * " + paren(ops[1]);
    case AffineKind::FloorDiv:
      return paren(ops[0]) + " floordiv " + render(ops[1], name);
    case AffineKind::CeilDiv:
      return paren(ops[0]) + " ceildiv " + render(ops[1], name);
    case AffineKind::Mod:
      return paren(ops[0]) + " mod " + render(ops[1], name);
    case AffineKind::Min:
    case AffineKind::Max: {
      std::string s = e.kind() == AffineKind::Min ? "min(" : "max(";
      for (size_t i = 0; i < ops.size(); ++i) {
        if (i) s += ", ";
        s += render(ops[i], name);
      }
      return s + ")";
    }
  }
  return "?";
}

}  // namespace

std::string AffineExpr::str() const {
  return render(*this, [](AffineKind k, unsigned pos) {
    return (k == AffineKind::Dim ? "d" : "s") + std::to_string(pos);
  });
}

std::string AffineExpr::str(const Namer& name) const {
  return render(*this, name);
}

bool operator==(const AffineExpr& a, const AffineExpr& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case AffineKind::Constant:
      return a.node_->value == b.node_->value;
    case AffineKind::Dim:
    case AffineKind::Symbol:
      return a.position() == b.position();
    default:
      return a.operands() == b.operands();
  }
}

std::string AffineMap::str() const {
  std::string s = "(";
  for (unsigned i = 0; i < num_dims; ++i) {
    if (i) s += ", ";
    s += "d" + std::to_string(i);
  }
  s += ")";
  if (num_symbols > 0) {
    s += "[";
    for (unsigned i = 0; i < num_symbols; ++i) {
      if (i) s += ", ";
      s += "s" + std::to_string(i);
    }
    s += "]";
  }
  s += " -> (";
  for (size_t i = 0; i < results.size(); ++i) {
    if (i) s += ", ";
    s += results[i].str();
  }
  return s + ")";
}

int64_t eval_affine_expr(const AffineExpr& expr, std::span<const int64_t> dims,
                         std::span<const int64_t> syms) {
  const auto& ops = expr.operands();
  switch (expr.kind()) {
    case AffineKind::Constant:
      return expr.value();
    case AffineKind::Dim:
      if (expr.position() >= dims.size()) throw UnboundOperand(expr.position());
      return dims[expr.position()];
    case AffineKind::Symbol:
      if (expr.position() >= syms.size())
        throw UnboundOperand(static_cast<unsigned>(dims.size()) +
                             expr.position());
      return syms[expr.position()];
    case AffineKind::Add:
      return checked_add(eval_affine_expr(ops[0], dims, syms),
                         eval_affine_expr(ops[1], dims, syms));
    case AffineKind::Mul:
      return checked_mul(eval_affine_expr(ops[0], dims, syms),
                         eval_affine_expr(ops[1], dims, syms));
    case AffineKind::FloorDiv:
      return floor_div(eval_affine_expr(ops[0], dims, syms), ops[1].value());
    case AffineKind::CeilDiv:
      return ceil_div(eval_affine_expr(ops[0], dims, syms), ops[1].value());
    case AffineKind::Mod:
      return floor_mod(eval_affine_expr(ops[0], dims, syms), ops[1].value());
    case AffineKind::Min:
    case AffineKind::Max: {
      int64_t best = eval_affine_expr(ops[0], dims, syms);
      for (size_t i = 1; i < ops.size(); ++i) {
        int64_t v = eval_affine_expr(ops[i], dims, syms);
        best = expr.kind() == AffineKind::Min ? std::min(best, v)
                                              : std::max(best, v);
      }
      return best;
    }
  }
  return 0;
}

}  // namespace hec
