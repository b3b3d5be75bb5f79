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

#include <fstream>
#include <sstream>
#include <string>

#include "hec/frontend.hpp"
#include "hec/graph.hpp"

namespace fixtures {

inline std::string corpus_path(const std::string& name) {
  return std::string(HEC_CORPUS_DIR) + "/" + name + ".mlir";
}

inline std::string corpus_text(const std::string& name) {
  std::ifstream in(corpus_path(name));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline hec::ProgramModule module(const std::string& name) {
  return hec::parse_module_file(corpus_path(name));
}

inline hec::Function function(const std::string& name) { return module(name).functions.at(0); }

inline hec::Term term(const std::string& name) {
  return hec::graph_to_term(hec::build_graph(function(name)));
}

inline const char* const kAllFiles[] = {
    "and_xor_baseline",      "and_xor_hoisted",
    "and_xor_demorgan",      "and_xor_tiled",
    "and_xor_unrolled",      "copy_loop",
    "copy_loop_nested_unroll", "counter_offset_range",
    "counter_offset_range_unrolled", "shift_copy_increment",
    "shift_copy_increment_fused",
};

}  // namespace fixtures
