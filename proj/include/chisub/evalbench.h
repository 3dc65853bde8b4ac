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

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chisub/graph.h"
#include "chisub/index.h"
#include "chisub/matcher.h"

namespace chisub {

enum class NoiseType : uint8_t { kExact, kLabel, kVertexAdd, kVertexDelete, kEdgeAdd, kEdgeDelete };

inline constexpr std::array<NoiseType, 6> kAllNoiseTypes = {
    NoiseType::kExact,        NoiseType::kLabel,   NoiseType::kVertexAdd,
    NoiseType::kVertexDelete, NoiseType::kEdgeAdd, NoiseType::kEdgeDelete};

// "exact", "nLabel", "nVAdd", "nVDel", "nEAdd", "nEDel".
std::string_view NoiseName(NoiseType type);
std::optional<NoiseType> ParseNoise(std::string_view name);

struct QuerySpec {
  int size = 3;
  NoiseType noise = NoiseType::kExact;
  int noise_count = 0;  // 0 iff exact, else 1 or 2
  uint64_t seed = 0;

  // Throws std::invalid_argument when the invariants above do not hold.
  void Validate() const;
};

struct ExtractedQuery {
  LabeledGraph graph;
  std::vector<VertexId> provenance;  // query vertex -> target vertex
};

// Breadth-first growth from a random start until `size` vertices are
// visited; the query is the induced subgraph in visit order. Restarts from a
// fresh vertex (up to a bounded number of attempts) when the component is
// too small. Throws std::runtime_error if no start reaches `size`.
ExtractedQuery ExtractExactQuery(const LabeledGraph& g, int size, uint64_t seed);

struct PerturbResult {
  LabeledGraph graph;
  int applied = 0;
  std::vector<std::string> warnings;
};

// Applies spec.noise_count edits of spec.noise. Each edit keeps the query
// connected; impossible edits are skipped and reported in `warnings`.
// `label_universe` is the pool for relabeling and inserted vertices.
PerturbResult PerturbQuery(const LabeledGraph& query, const QuerySpec& spec,
                           std::span<const LabelId> label_universe);

// Fraction of the ground-truth query's edges whose endpoint-label pair is
// recovered by the match's induced edges, counted as multisets.
double EdgeRetrievalAccuracy(const LabeledGraph& ground_truth, const MatchResult& match,
                             const LabeledGraph& g);

struct BarabasiAlbertParams {
  uint32_t n = 1000;
  uint32_t avg_degree = 8;
  uint32_t num_labels = 20;
  uint64_t seed = 1;
  bool unique_labels = false;  // label i on vertex i, ignoring num_labels
};

// Preferential attachment with m = ceil(avg_degree / 2) edges per arriving
// vertex, seeded from m isolated vertices. Exactly m * (n - m) edges.
LabeledGraph GenerateBarabasiAlbert(const BarabasiAlbertParams& params);

struct BenchmarkProtocol {
  std::vector<int> sizes = {3, 5, 7, 9, 11, 13};
  std::vector<NoiseType> noise_types{kAllNoiseTypes.begin(), kAllNoiseTypes.end()};
  int queries_per_cell = 20;
  // Fixed edit count for noisy queries; when unset each query draws 1 or 2.
  std::optional<int> noise_count;
  uint64_t master_seed = 1;
  int k = 1;
  unsigned threads = 1;  // queries run concurrently when > 1

  void Validate() const;
};

struct QueryCase {
  int query_id = 0;
  QuerySpec spec;
  ExtractedQuery exact;
  LabeledGraph noisy;
  std::vector<std::string> warnings;
};

// The deterministic query corpus of a protocol: for each noise type, size
// and index, an exact base drawn from (master_seed, size, index) and its
// perturbation. Bases are shared across noise types.
std::vector<QueryCase> GenerateQueryCorpus(const LabeledGraph& g, const BenchmarkProtocol& protocol);

// Writes q<id>.graph (noisy query), q<id>.exact.graph and manifest.csv.
void WriteQueryCorpus(const std::filesystem::path& dir, std::span<const QueryCase> corpus);

struct QueryRecord {
  int query_id = 0;
  int size = 0;
  NoiseType noise = NoiseType::kExact;
  int noise_count = 0;
  uint64_t seed = 0;
  double accuracy = 0.0;
  double latency_s = 0.0;
  size_t matched_vertices = 0;
  size_t matched_edges = 0;
};

struct GroupSummary {
  NoiseType noise = NoiseType::kExact;
  int size = 0;
  size_t count = 0;
  double mean_accuracy = 0.0;
  double mean_latency_s = 0.0;
};

struct BenchmarkReport {
  std::vector<QueryRecord> records;  // ordered by query_id
  std::vector<GroupSummary> groups;  // ordered by (noise type, size)
  double mean_accuracy = 0.0;
  double mean_latency_s = 0.0;

  double MeanAccuracy(NoiseType noise) const;
};

// Runs every corpus query through the matcher and scores the top-1 match
// against the exact base. Latency covers the online phase only.
BenchmarkReport RunBenchmark(const Matcher& matcher, const LabeledGraph& g,
                             std::span<const QueryCase> corpus, const BenchmarkProtocol& protocol);
BenchmarkReport RunBenchmark(const IndexSet& index, const BenchmarkProtocol& protocol);

// Columns: query_id,size,noise_type,noise_count,seed,accuracy,latency_s,
// matched_vertices,matched_edges. With redact_latency the latency column is
// written as "-" so the file is byte-stable across runs.
void WriteReportCsv(std::ostream& out, const BenchmarkReport& report, bool redact_latency = false);

}  // namespace chisub
