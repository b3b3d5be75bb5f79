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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "hec/corpus.hpp"
#include "hec/frontend.hpp"
#include "hec/interpreter.hpp"

using namespace hec;

TEST(Corpus, AtLeastThirtyPairs) {
  auto pairs = generated_corpus();
  EXPECT_GE(pairs.size(), 30u);
  size_t broken = 0;
  for (const auto& p : pairs) broken += p.expected == VerdictKind::NotEquivalent;
  EXPECT_GT(broken, 0u);
}

TEST(Corpus, VerdictsMatchAndOracleAgrees) {
  for (const auto& p : generated_corpus()) {
    Function a = parse_module_text(p.source_a).functions.at(0);
    Function b = parse_module_text(p.source_b).functions.at(0);
    auto r = verify_functions(a, b);
    EXPECT_EQ(r.verdict.kind, p.expected) << p.name;
    DiffOptions o;
    o.samples = 200;
    bool diverges = differential_test(a, b, o).counterexample.has_value();
    // Equivalent verdicts must survive sampling; broken pairs must be caught.
    EXPECT_EQ(diverges, p.expected == VerdictKind::NotEquivalent) << p.name;
  }
}

TEST(Corpus, FactorOneUnrollIsIdentity) {
  for (Kernel k : {Kernel::Gemm, Kernel::Atax, Kernel::Mvt}) {
    Function a = parse_module_text(kernel_source(k, 8)).functions.at(0);
    Function b = parse_module_text(kernel_source(k, 8, {LoopTransform::Kind::Unroll, 1})).functions.at(0);
    auto r = verify_functions(a, b);
    EXPECT_EQ(r.verdict.kind, VerdictKind::Equivalent) << to_string(k);
    EXPECT_EQ(r.iterations, 0u) << to_string(k);
  }
}

TEST(Corpus, WriteCorpusRoundTrip) {
  auto dir = std::filesystem::temp_directory_path() / "hec_corpus_test";
  std::filesystem::remove_all(dir);
  auto pairs = generated_corpus();
  pairs.resize(2);
  write_corpus(pairs, dir);
  for (const auto& p : pairs) {
    std::ifstream in(dir / (p.name + ".a.mlir"));
    std::string text((std::istreambuf_iterator<char>(in)), {});
    EXPECT_EQ(text, p.source_a);
    EXPECT_TRUE(std::filesystem::exists(dir / (p.name + ".b.mlir")));
  }
  std::filesystem::remove_all(dir);
}
