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

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "hec/corpus.hpp"
#include "hec/frontend.hpp"
#include "hec/interpreter.hpp"
#include "hec/runner.hpp"

namespace {

constexpr int kExitUsage = 64;
constexpr int kExitData = 65;

int exit_code(hec::VerdictKind v) {
  switch (v) {
    case hec::VerdictKind::Equivalent: return 0;
    case hec::VerdictKind::NotEquivalent: return 1;
    case hec::VerdictKind::Unknown: return 2;
  }
  return 2;
}

/// Worst verdict first: not-equivalent, then unknown.
int combine_exit(int a, int b) {
  if (a == 1 || b == 1) return 1;
  return std::max(a, b);
}

bool use_color() {
  const char* env = std::getenv("HEC_COLOR");
  if (env && std::string(env) == "0") return false;
  return true;
}

std::string paint(const std::string& text, hec::VerdictKind v, bool color) {
  if (!color) return text;
  const char* code = v == hec::VerdictKind::Equivalent      ? "\033[32m"
                     : v == hec::VerdictKind::NotEquivalent ? "\033[31m"
                                                            : "\033[33m";
  return code + text + "\033[0m";
}

std::string memory_row(const std::vector<int64_t>& data) {
  std::ostringstream out;
  out << "[";
  for (size_t i = 0; i < data.size(); ++i) out << (i ? ", " : "") << data[i];
  out << "]";
  return out.str();
}

void print_human(std::ostream& out, const std::string& label, const hec::VerificationReport& r,
                 bool explain, bool color) {
  for (const auto& f : r.functions) {
    hec::VerificationReport one;
    one.verdict = f.verdict;
    one.dynamic_rules = f.dynamic_rules;
    one.e_classes = f.e_classes;
    one.wall_time_ms = f.wall_time_ms;
    out << label << "@" << f.name << ": " << paint(one.summary(), f.verdict.kind, color) << "\n";
    if (f.verdict.witness) {
      const auto& w = *f.verdict.witness;
      out << "  witness: " << w.text << "\n";
      if (!w.final_a.empty()) out << "  final A: " << memory_row(w.final_a) << "\n";
      if (!w.final_b.empty()) out << "  final B: " << memory_row(w.final_b) << "\n";
    }
    if (!explain) continue;
    for (const auto& e : f.rule_log) {
      out << "  round " << e.round << " " << hec::to_string(e.status) << " " << e.name << ": "
          << e.candidate << "\n";
      for (const auto& c : e.trace) {
        out << "    " << c.name << " " << hec::to_string(c.status) << " (" << c.method << ") " << c.text;
        if (c.values) out << "  [" << c.values->first << " vs " << c.values->second << "]";
        out << "\n";
      }
      for (const auto& [sym, v] : e.witness) out << "    at " << sym << " = " << v << "\n";
    }
  }
}

struct Job {
  std::string a;
  std::string b;
};

std::vector<Job> read_pairs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--pairs", "cannot open " + path);
  std::vector<Job> jobs;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    Job j;
    if (!(fields >> j.a)) continue;
    if (!(fields >> j.b)) throw CLI::ValidationError("--pairs", "line without a second file: " + line);
    jobs.push_back(j);
  }
  return jobs;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equivalence checker for affine loop programs"};
  app.set_version_flag("--version", "hec-verify 0.1.0");

  std::string path_a, path_b, rules_path, pairs_path, symbol_range, corpus_dir;
  bool json = false, dump_graph = false, dump_egraph = false, explain = false;
  size_t max_rounds = 10, enode_limit = 1000000, samples = 200, jobs = 1;
  double timeout = 600;
  uint64_t seed = 0;

  app.add_option("a", path_a, "First program")->check(CLI::ExistingFile);
  app.add_option("b", path_b, "Second program")->check(CLI::ExistingFile);
  app.add_flag("--json", json, "Print the report as JSON");
  app.add_option("--max-rounds", max_rounds, "Dynamic rule rounds")->check(CLI::PositiveNumber);
  app.add_option("--enode-limit", enode_limit, "E-node limit")->check(CLI::PositiveNumber);
  app.add_option("--timeout", timeout, "Wall clock limit in seconds")->check(CLI::PositiveNumber);
  app.add_option("--samples", samples, "Differential test samples")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Sampling seed");
  app.add_option("--symbol-range", symbol_range, "Symbol domain LO:HI of the condition checker");
  app.add_option("--rules", rules_path, "Extra rewrite rules")->check(CLI::ExistingFile);
  app.add_flag("--dump-graph", dump_graph, "Print both dataflow graphs");
  app.add_flag("--dump-egraph", dump_egraph, "Print the final e-graph as DOT");
  app.add_flag("--explain", explain, "Print every dynamic rule attempt");
  app.add_option("--pairs", pairs_path, "File of `a b` lines verified as a batch")->check(CLI::ExistingFile);
  app.add_option("--jobs", jobs, "Concurrent batch jobs")->check(CLI::PositiveNumber);
  app.add_option("--generate-corpus", corpus_dir, "Write the generated kernel pairs to a directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }
  const bool color = use_color() && !json;

  if (!corpus_dir.empty()) {
    auto pairs = hec::generated_corpus();
    hec::write_corpus(pairs, corpus_dir);
    std::cout << "wrote " << pairs.size() << " pairs to " << corpus_dir << "\n";
    return 0;
  }

  hec::RunnerConfig config;
  config.max_rounds = max_rounds;
  config.max_enodes = enode_limit;
  config.timeout = std::chrono::milliseconds(static_cast<int64_t>(timeout * 1000));
  config.samples = samples;
  config.seed = seed;
  config.domain.seed = seed;
  config.capture_dumps = dump_graph || dump_egraph;
  if (!symbol_range.empty()) {
    auto colon = symbol_range.find(':');
    try {
      if (colon == std::string::npos) throw std::invalid_argument("missing ':'");
      config.domain.lo = std::stoll(symbol_range.substr(0, colon));
      config.domain.hi = std::stoll(symbol_range.substr(colon + 1));
      if (config.domain.lo >= config.domain.hi) throw std::invalid_argument("empty range");
    } catch (const std::exception&) {
      std::cerr << "error: --symbol-range expects LO:HI with LO < HI\n";
      return kExitUsage;
    }
  }
  try {
    if (!rules_path.empty()) config.extra_rules = hec::parse_rules_file(rules_path);
  } catch (const hec::Error& e) {
    std::cerr << "error: " << rules_path << ": " << e.what() << "\n";
    return kExitUsage;
  }

  std::vector<Job> batch;
  try {
    if (!pairs_path.empty()) batch = read_pairs(pairs_path);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  if (pairs_path.empty()) {
    if (path_a.empty() || path_b.empty()) {
      std::cerr << "error: two program files are required\n" << app.help();
      return kExitUsage;
    }
    batch.push_back({path_a, path_b});
  }
  for (const auto& j : batch)
    for (const auto& p : {j.a, j.b})
      if (!std::filesystem::is_regular_file(p)) {
        std::cerr << "error: no such file: " << p << "\n";
        return kExitUsage;
      }

  std::vector<std::string> outputs(batch.size());
  std::vector<int> codes(batch.size(), 0);
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i; (i = next++) < batch.size();) {
      std::ostringstream out;
      try {
        auto report = hec::verify(batch[i].a, batch[i].b, config);
        codes[i] = exit_code(report.verdict.kind);
        if (json) {
          out << report.to_json() << "\n";
        } else {
          std::string label = batch.size() > 1 ? batch[i].a + " vs " + batch[i].b + " " : "";
          print_human(out, label, report, explain, color);
        }
        for (const auto& f : report.functions) {
          if (dump_graph) out << "// graph A @" << f.name << "\n" << f.graph_a << "// graph B @" << f.name << "\n" << f.graph_b;
          if (dump_egraph) out << f.egraph_dot;
        }
      } catch (const hec::Error& e) {
        out << "error: " << e.what() << "\n";
        codes[i] = kExitData;
      }
      outputs[i] = out.str();
    }
  };
  std::vector<std::thread> pool;
  for (size_t t = 1; t < std::min(jobs, batch.size()); ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  int rc = 0;
  for (size_t i = 0; i < batch.size(); ++i) {
    bool failed = codes[i] >= kExitUsage;
    (failed ? std::cerr : std::cout) << outputs[i];
    rc = (failed || rc >= kExitUsage) ? std::max(rc, codes[i]) : combine_exit(rc, codes[i]);
  }
  return rc;
}
