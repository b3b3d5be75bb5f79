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
#include <filesystem>
#include <string>
#include <vector>

#include "hec/runner.hpp"

namespace hec {

enum class Kernel { Gemm, Atax, Mvt };
std::string to_string(Kernel k);

/// How the designated loop of a kernel is rewritten.
struct LoopTransform {
  enum class Kind { None, Unroll, Tile, BrokenUnroll };
  Kind kind = Kind::None;
  int64_t factor = 1;
};

/// Textual source of a kernel over `n`-element dimensions. Gemm transforms
/// its innermost loop when unrolling and its middle loop when tiling; atax
/// and mvt transform their inner loops or their first outer loop.
std::string kernel_source(Kernel kernel, int64_t n, LoopTransform transform = {});

struct CorpusPair {
  std::string name;
  std::string source_a;
  std::string source_b;
  VerdictKind expected = VerdictKind::Equivalent;
};

/// Generated pairs: unrolled (2..8), tiled (2..16) and broken variants of
/// each kernel.
std::vector<CorpusPair> generated_corpus(int64_t n = 10);

/// Writes each pair as `<name>.a.mlir` and `<name>.b.mlir`.
void write_corpus(const std::vector<CorpusPair>& pairs, const std::filesystem::path& dir);

}  // namespace hec
