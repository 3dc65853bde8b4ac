// Copyright 2026 The chisub Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// chisub: offline indexing, top-k querying, benchmarking and generators.
//
//   chisub index <graph> -o <index>
//   chisub query <index> <query> [--k N] [--format text|json]
//   chisub bench <index> <graph> -o <report.csv>
//   chisub gen ba -o <graph> --n N --deg D --labels L
//   chisub gen queries <graph> -o <dir>
//
// Every option also reads CHISUB_<NAME> from the environment; flags win.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "CLI11.hpp"
#include "chisub/config.h"
#include "chisub/evalbench.h"
#include "chisub/graph.h"
#include "chisub/index.h"
#include "chisub/matcher.h"

namespace {

using namespace chisub;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct ProtocolFlags {
  std::vector<int> sizes = {3, 5, 7, 9, 11, 13};
  std::vector<std::string> noise = {"all"};
  int queries = 20;
  std::optional<int> noise_count;

  BenchmarkProtocol ToProtocol(const EngineConfig& config) const {
    BenchmarkProtocol p;
    p.sizes = sizes;
    p.noise_types.clear();
    for (const auto& name : noise) {
      if (name == "all") {
        p.noise_types.assign(kAllNoiseTypes.begin(), kAllNoiseTypes.end());
        continue;
      }
      auto type = ParseNoise(name);
      if (!type) throw std::invalid_argument(fmt::format("unknown noise type '{}'", name));
      p.noise_types.push_back(*type);
    }
    p.queries_per_cell = queries;
    p.noise_count = noise_count;
    p.master_seed = config.master_seed;
    p.k = config.k;
    p.threads = config.threads();
    p.Validate();
    return p;
  }
};

void AddProtocolFlags(CLI::App* cmd, ProtocolFlags& flags) {
  cmd->add_option("--sizes", flags.sizes, "Query sizes (odd, 3..13)")->delimiter(',');
  cmd->add_option("--noise", flags.noise, "Noise types: exact,nLabel,nVAdd,nVDel,nEAdd,nEDel or all")
      ->delimiter(',');
  cmd->add_option("--queries", flags.queries, "Queries per (noise type, size) cell");
  cmd->add_option("--noise-count", flags.noise_count, "Edits per noisy query (default: 1 or 2 at random)");
}

void PrintStats(const IndexSet& index, double seconds) {
  fmt::print("vertices {}\nedges {}\nlabels {}\n", index.graph.num_vertices(), index.graph.num_edges(),
             index.graph.LabelUniverse().size());
  fmt::print("psi {}\ndelta {}\nmax_dev {}\ntau {}\n", index.stats.psi, index.stats.delta,
             index.stats.max_dev, index.symbols.tau());
  fmt::print("pairs {}\nsampled {}\noffline_s {:.3f}\n", index.stats.pair_count,
             index.stats.sampled ? "true" : "false", seconds);
}

// Symbol table for a kappa override, or the index's own.
Matcher MakeMatcher(const IndexSet& index, const CLI::Option* kappa_opt, double kappa) {
  if (kappa_opt->count() == 0 && std::getenv("CHISUB_KAPPA") == nullptr) return Matcher(index);
  return Matcher(index, BuildSymbolTable(index.stats, kappa));
}

int Run(int argc, char** argv) {
  CLI::App app{"Top-k approximate subgraph matching by chi-square significance"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file with option defaults");

  EngineConfig config;
  std::optional<unsigned> threads;
  auto add_engine = [&](CLI::App* cmd) {
    cmd->add_option("--k", config.k, "Matches per query")->envname("CHISUB_K");
    cmd->add_option("--seed", config.master_seed, "Master RNG seed")->envname("CHISUB_SEED");
    cmd->add_option("--threads", threads, "Worker threads (0 = all cores)")->envname("CHISUB_THREADS");
  };

  // index
  auto* index_cmd = app.add_subcommand("index", "Build and persist the offline index of a graph");
  std::string graph_path, index_path, query_path, out_path;
  std::string semantics = "multiset";
  index_cmd->add_option("graph", graph_path, "Target graph file")->required();
  index_cmd->add_option("-o,--out", index_path, "Index file to write")->required();
  index_cmd->add_option("--gamma", config.gamma, "Penalty exponent")->envname("CHISUB_GAMMA");
  auto* index_kappa =
      index_cmd->add_option("--kappa", config.kappa, "Symbol step size")->envname("CHISUB_KAPPA");
  (void)index_kappa;
  index_cmd->add_option("--sample-pairs", config.sample_pairs, "Estimate the distribution from N pairs")
      ->envname("CHISUB_SAMPLE_PAIRS");
  index_cmd->add_option("--semantics", semantics, "Neighborhood comparison")
      ->check(CLI::IsMember({"multiset", "set"}))
      ->envname("CHISUB_SEMANTICS");
  add_engine(index_cmd);

  // query
  auto* query_cmd = app.add_subcommand("query", "Find the top-k matches of a query graph");
  std::string format = "text";
  std::string check_graph;
  query_cmd->add_option("index", index_path, "Index file")->required();
  query_cmd->add_option("query", query_path, "Query graph file")->required();
  auto* query_kappa = query_cmd->add_option("--kappa", config.kappa, "Override the symbol step size")
                          ->envname("CHISUB_KAPPA");
  query_cmd->add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"text", "json"}))
      ->envname("CHISUB_FORMAT");
  query_cmd->add_option("--graph", check_graph, "Verify the index against this graph file");
  add_engine(query_cmd);

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "Run the noisy-query accuracy/latency protocol");
  ProtocolFlags protocol_flags;
  bool redact_latency = false;
  bench_cmd->add_option("index", index_path, "Index file")->required();
  bench_cmd->add_option("graph", graph_path, "Target graph file the index was built from")->required();
  bench_cmd->add_option("-o,--out", out_path, "CSV report")->required();
  auto* bench_kappa = bench_cmd->add_option("--kappa", config.kappa, "Override the symbol step size")
                          ->envname("CHISUB_KAPPA");
  bench_cmd->add_flag("--redact-latency", redact_latency, "Write '-' for latency (byte-stable CSV)");
  AddProtocolFlags(bench_cmd, protocol_flags);
  add_engine(bench_cmd);

  // gen
  auto* gen_cmd = app.add_subcommand("gen", "Generate graphs and query corpora");
  gen_cmd->require_subcommand(1);
  auto* gen_ba = gen_cmd->add_subcommand("ba", "Barabasi-Albert graph with random labels");
  BarabasiAlbertParams ba;
  gen_ba->add_option("-o,--out", out_path, "Graph file to write")->required();
  gen_ba->add_option("--n", ba.n, "Vertices")->required();
  gen_ba->add_option("--deg", ba.avg_degree, "Average degree")->required();
  gen_ba->add_option("--labels", ba.num_labels, "Label alphabet size");
  gen_ba->add_flag("--unique-labels", ba.unique_labels, "Give every vertex its own label");
  gen_ba->add_option("--seed", config.master_seed, "RNG seed")->envname("CHISUB_SEED");
  auto* gen_queries = gen_cmd->add_subcommand("queries", "Exact and noisy query corpus from a graph");
  gen_queries->add_option("graph", graph_path, "Source graph")->required();
  gen_queries->add_option("-o,--out", out_path, "Output directory")->required();
  gen_queries->add_option("--seed", config.master_seed, "Master RNG seed")->envname("CHISUB_SEED");
  ProtocolFlags corpus_flags;
  AddProtocolFlags(gen_queries, corpus_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  config.thread_count = threads;
  config.mode = semantics == "set" ? NeighborhoodMode::kSet : NeighborhoodMode::kMultiset;
  config.Validate();

  if (*index_cmd) {
    LabeledGraph g = LoadGraph(graph_path);
    const auto start = std::chrono::steady_clock::now();
    IndexSet index = BuildIndexSet(std::move(g), config.ToIndexConfig());
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    SaveIndex(index, index_path);
    PrintStats(index, seconds);
    return kExitOk;
  }

  if (*query_cmd) {
    std::optional<LabeledGraph> expected;
    if (!check_graph.empty()) expected = LoadGraph(check_graph);
    const IndexSet index = LoadIndex(index_path, expected ? &*expected : nullptr);
    const LabeledGraph query = LoadGraph(query_path);
    const Matcher matcher = MakeMatcher(index, query_kappa, config.kappa);
    const auto start = std::chrono::steady_clock::now();
    const auto matches = matcher.TopK(query, {config.k, config.threads()});
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (format == "json") {
      WriteMatchesJson(std::cout, matches);
    } else {
      WriteMatchesText(std::cout, matches);
    }
    fmt::print(stderr, "latency_s {:.6f}\n", seconds);
    return kExitOk;
  }

  if (*bench_cmd) {
    const BenchmarkProtocol protocol = protocol_flags.ToProtocol(config);
    const LabeledGraph g = LoadGraph(graph_path);
    const IndexSet index = LoadIndex(index_path, &g);
    const Matcher matcher = MakeMatcher(index, bench_kappa, config.kappa);
    const auto corpus = GenerateQueryCorpus(index.graph, protocol);
    const BenchmarkReport report = RunBenchmark(matcher, index.graph, corpus, protocol);
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", out_path));
    WriteReportCsv(out, report, redact_latency);
    fmt::print(stderr, "queries {}\nmean_accuracy {:.4f}\nmean_latency_s {:.6f}\n",
               report.records.size(), report.mean_accuracy, report.mean_latency_s);
    for (NoiseType t : protocol.noise_types) {
      fmt::print(stderr, "accuracy[{}] {:.4f}\n", NoiseName(t), report.MeanAccuracy(t));
    }
    return kExitOk;
  }

  if (*gen_ba) {
    ba.seed = config.master_seed;
    SaveGraph(GenerateBarabasiAlbert(ba), out_path);
    return kExitOk;
  }

  if (*gen_queries) {
    const BenchmarkProtocol protocol = corpus_flags.ToProtocol(config);
    const LabeledGraph g = LoadGraph(graph_path);
    const auto corpus = GenerateQueryCorpus(g, protocol);
    WriteQueryCorpus(out_path, corpus);
    fmt::print(stderr, "wrote {} queries to {}\n", corpus.size(), out_path);
    return kExitOk;
  }
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return Run(argc, argv);
  } catch (const GraphParseError& e) {
    fmt::print(stderr, "error: parse failure: {}\n", e.what());
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitRuntime;
  }
}
