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

#include "hec/corpus.hpp"

#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "hec/error.hpp"

namespace hec {

std::string to_string(Kernel k) {
  switch (k) {
    case Kernel::Gemm: return "gemm";
    case Kernel::Atax: return "atax";
    case Kernel::Mvt: return "mvt";
  }
  return "?";
}

namespace {

using Body = std::function<void(const std::string& iv)>;

class Emitter {
 public:
  explicit Emitter(int64_t n) : n_(n) {}

  std::string fresh(const std::string& prefix) { return prefix + std::to_string(next_++); }

  void line(const std::string& s) { body_ << std::string(indent_ * 2, ' ') << s << "\n"; }

  std::string offset(const std::string& iv, int64_t c) {
    if (c == 0) return iv;
    offsets_.insert(c);
    std::string name = fresh("%o");
    line(name + " = affine.apply #off" + std::to_string(c) + "(" + iv + ")");
    return name;
  }

  void open(const std::string& header) {
    line(header + " {");
    ++indent_;
  }
  void close() {
    --indent_;
    line("}");
  }

  /// A loop over [0, n) written according to `t`.
  void loop(const LoopTransform& t, const Body& body) {
    std::string iv = fresh("%i");
    switch (t.kind) {
      case LoopTransform::Kind::None:
        open("affine.for " + iv + " = 0 to " + std::to_string(n_));
        body(iv);
        close();
        return;
      case LoopTransform::Kind::Unroll:
      case LoopTransform::Kind::BrokenUnroll: {
        int64_t f = t.factor;
        int64_t main_hi = n_ - n_ % f;
        if (main_hi > 0) {
          open("affine.for " + iv + " = 0 to " + std::to_string(main_hi) + " step " + std::to_string(f));
          for (int64_t c = 0; c < f; ++c) body(offset(iv, c));
          close();
        }
        // The broken form skips the first leftover iteration.
        int64_t rem_lo = t.kind == LoopTransform::Kind::BrokenUnroll ? main_hi + 1 : main_hi;
        if (rem_lo < n_) {
          std::string rv = fresh("%i");
          open("affine.for " + rv + " = " + std::to_string(rem_lo) + " to " + std::to_string(n_));
          body(rv);
          close();
        }
        return;
      }
      case LoopTransform::Kind::Tile: {
        int64_t k = t.factor;
        std::string inner = fresh("%i");
        open("affine.for " + iv + " = 0 to " + std::to_string(n_) + " step " + std::to_string(k));
        if (n_ % k == 0) {
          plus_.insert(k);
          open("affine.for " + inner + " = #id(" + iv + ") to #plus" + std::to_string(k) + "(" + iv + ")");
        } else {
          tiles_.insert(k);
          open("affine.for " + inner + " = #id(" + iv + ") to min #tile" + std::to_string(k) + "(" + iv + ")");
        }
        body(inner);
        close();
        close();
        return;
      }
    }
  }

  std::string finish(const std::string& signature) const {
    std::ostringstream out;
    out << "#id = affine_map<(d0) -> (d0)>\n";
    for (int64_t c : offsets_) out << "#off" << c << " = affine_map<(d0) -> (d0 + " << c << ")>\n";
    for (int64_t k : plus_) out << "#plus" << k << " = affine_map<(d0) -> (d0 + " << k << ")>\n";
    for (int64_t k : tiles_)
      out << "#tile" << k << " = affine_map<(d0) -> (d0 + " << k << ", " << n_ << ")>\n";
    out << signature << " {\n" << body_.str() << "  return\n}\n";
    return out.str();
  }

 private:
  int64_t n_;
  int next_ = 0;
  int indent_ = 1;
  std::ostringstream body_;
  std::set<int64_t> offsets_;
  std::set<int64_t> plus_;
  std::set<int64_t> tiles_;
};

/// `dst[at] += lhs[l] * rhs[r]` over i32 elements.
void mac(Emitter& e, const std::string& dst, const std::string& at, const std::string& lhs,
         const std::string& l, const std::string& rhs, const std::string& r,
         const std::string& dst_type, const std::string& lhs_type, const std::string& rhs_type) {
  std::string a = e.fresh("%v"), b = e.fresh("%v"), c = e.fresh("%v"), p = e.fresh("%v"),
              s = e.fresh("%v");
  e.line(a + " = affine.load " + lhs + "[" + l + "] : " + lhs_type);
  e.line(b + " = affine.load " + rhs + "[" + r + "] : " + rhs_type);
  e.line(c + " = affine.load " + dst + "[" + at + "] : " + dst_type);
  e.line(p + " = arith.muli " + a + ", " + b + " : i32");
  e.line(s + " = arith.addi " + c + ", " + p + " : i32");
  e.line("affine.store " + s + ", " + dst + "[" + at + "] : " + dst_type);
}

}  // namespace

std::string kernel_source(Kernel kernel, int64_t n, LoopTransform t) {
  if (n <= 0) throw Error("kernel size must be positive");
  if (t.kind != LoopTransform::Kind::None && (t.factor < 1 || t.factor > n))
    throw Error("transform factor " + std::to_string(t.factor) + " outside [1, " + std::to_string(n) + "]");
  Emitter e(n);
  const std::string N = std::to_string(n);
  const std::string mat = "memref<" + N + "x" + N + "xi32>";
  const std::string vec = "memref<" + N + "xi32>";
  const bool tile = t.kind == LoopTransform::Kind::Tile;
  const LoopTransform none;
  const LoopTransform inner = tile ? none : t;
  const LoopTransform outer = tile ? t : none;
  switch (kernel) {
    case Kernel::Gemm:
      e.loop(none, [&](const std::string& i) {
        e.loop(outer, [&](const std::string& j) {
          e.loop(inner, [&](const std::string& k) {
            mac(e, "%arg2", i + ", " + j, "%arg0", i + ", " + k, "%arg1", k + ", " + j, mat, mat, mat);
          });
        });
      });
      return e.finish("func.func @gemm(%arg0: " + mat + ", %arg1: " + mat + ", %arg2: " + mat + ")");
    case Kernel::Atax:
      e.loop(outer, [&](const std::string& i) {
        std::string zero = e.fresh("%z");
        e.line(zero + " = arith.constant 0 : i32");
        e.line("affine.store " + zero + ", %arg3[" + i + "] : " + vec);
        e.loop(inner, [&](const std::string& j) {
          mac(e, "%arg3", i, "%arg0", i + ", " + j, "%arg1", j, vec, mat, vec);
        });
        e.loop(inner, [&](const std::string& j) {
          mac(e, "%arg2", j, "%arg0", i + ", " + j, "%arg3", i, vec, mat, vec);
        });
      });
      return e.finish("func.func @atax(%arg0: " + mat + ", %arg1: " + vec + ", %arg2: " + vec +
                      ", %arg3: " + vec + ")");
    case Kernel::Mvt:
      e.loop(outer, [&](const std::string& i) {
        e.loop(inner, [&](const std::string& j) {
          mac(e, "%arg1", i, "%arg0", i + ", " + j, "%arg3", j, vec, mat, vec);
        });
      });
      e.loop(none, [&](const std::string& i) {
        e.loop(inner, [&](const std::string& j) {
          mac(e, "%arg2", i, "%arg0", j + ", " + i, "%arg4", j, vec, mat, vec);
        });
      });
      return e.finish("func.func @mvt(%arg0: " + mat + ", %arg1: " + vec + ", %arg2: " + vec +
                      ", %arg3: " + vec + ", %arg4: " + vec + ")");
  }
  return {};
}

std::vector<CorpusPair> generated_corpus(int64_t n) {
  std::vector<CorpusPair> out;
  using K = LoopTransform::Kind;
  for (Kernel k : {Kernel::Gemm, Kernel::Atax, Kernel::Mvt}) {
    const std::string base = kernel_source(k, n);
    const std::string name = to_string(k);
    for (int64_t f = 2; f <= std::min<int64_t>(8, n); ++f)
      out.push_back({name + "_unroll" + std::to_string(f), base, kernel_source(k, n, {K::Unroll, f}),
                     VerdictKind::Equivalent});
    for (int64_t f : {2, 3, 4, 8, 16}) {
      // Factors beyond n get a kernel large enough to leave a partial tile.
      int64_t size = f <= n ? n : f + 2;
      out.push_back({name + "_tile" + std::to_string(f), size == n ? base : kernel_source(k, size),
                     kernel_source(k, size, {K::Tile, f}), VerdictKind::Equivalent});
    }
    for (int64_t f : {3, 4})
      if (f <= n && n % f != 0)
        out.push_back({name + "_broken_unroll" + std::to_string(f), base,
                       kernel_source(k, n, {K::BrokenUnroll, f}), VerdictKind::NotEquivalent});
  }
  return out;
}

void write_corpus(const std::vector<CorpusPair>& pairs, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& p : pairs) {
    std::ofstream(dir / (p.name + ".a.mlir")) << p.source_a;
    std::ofstream(dir / (p.name + ".b.mlir")) << p.source_b;
  }
}

}  // namespace hec
