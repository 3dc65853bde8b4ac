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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "chisub/graph.h"

namespace chisub {

// How a neighborhood N(u) = {u} ∪ adj(u) is compared: by label counts, or
// by label presence only.
enum class NeighborhoodMode : uint8_t { kMultiset = 0, kSet = 1 };

struct SimilarityParams {
  double gamma = 3.0;
  NeighborhoodMode mode = NeighborhoodMode::kMultiset;

  bool operator==(const SimilarityParams&) const = default;
};

// Label -> ascending vertex list.
struct InvertedLabelIndex {
  std::vector<std::vector<VertexId>> lists;

  std::span<const VertexId> Vertices(LabelId label) const {
    if (label >= lists.size()) return {};
    return lists[label];
  }
  bool operator==(const InvertedLabelIndex&) const = default;
};

// Per-vertex sorted multiset of neighbor labels.
struct LabelNeighborList {
  std::vector<uint64_t> offsets{0};
  std::vector<LabelId> labels;

  std::span<const LabelId> Labels(VertexId u) const {
    return {labels.data() + offsets[u], labels.data() + offsets[u + 1]};
  }
  bool operator==(const LabelNeighborList&) const = default;
};

// Dense per-vertex label counts over {u} ∪ adj(u). Labels with id >= width
// (present in a query but unknown to the target) are pooled: `foreign` holds
// their total count and `foreign_distinct` the number of distinct ones.
struct LabelCountVector {
  size_t width = 0;
  std::vector<uint32_t> counts;  // num_vertices x width, row-major
  std::vector<uint32_t> foreign;
  std::vector<uint32_t> foreign_distinct;

  size_t num_vertices() const { return foreign.size(); }
  std::span<const uint32_t> Row(VertexId u) const { return {counts.data() + u * width, width}; }
  uint32_t Foreign(VertexId u, NeighborhoodMode mode) const {
    return mode == NeighborhoodMode::kSet ? foreign_distinct[u] : foreign[u];
  }
  bool operator==(const LabelCountVector&) const = default;
};

struct GraphIndexes {
  InvertedLabelIndex il;
  LabelNeighborList lnl;
  LabelCountVector lcv;

  bool operator==(const GraphIndexes&) const = default;
};

// Builds IL, LNL and LCV. `width` defaults to the graph's dictionary size; a
// query is indexed with the target's width so rows are comparable.
GraphIndexes BuildIndexes(const LabeledGraph& g);
GraphIndexes BuildIndexes(const LabeledGraph& g, size_t width);

// Background distribution of vertex-pair similarity over ordered pairs u != w.
struct DistributionStats {
  double psi = 0.0;      // mean
  double delta = 0.0;    // sample std-dev, (P - 1) denominator
  double max_dev = 0.0;  // max |eta - psi| / delta, 0 when delta = 0
  uint64_t pair_count = 0;
  bool sampled = false;
  uint64_t seed = 0;

  bool operator==(const DistributionStats&) const = default;
};

struct DistributionOptions {
  // Uniformly sample this many ordered pairs (with replacement) instead of
  // enumerating all n(n-1). Values >= n(n-1) fall back to exact enumeration.
  std::optional<uint64_t> sample_pairs;
  uint64_t seed = 0;
  unsigned threads = 1;
};

class DegenerateStatsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Throws DegenerateStatsError for fewer than two vertices and
// std::invalid_argument for gamma < 1.
DistributionStats ComputeDistribution(const LabelCountVector& lcv, const SimilarityParams& params,
                                      const DistributionOptions& options = {});

// Discretized deviation buckets. probabilities[i] is Pr(symbol i + 1).
struct SymbolTable {
  double kappa = 0.0;
  std::vector<double> probabilities{1.0};

  size_t tau() const { return probabilities.size(); }
  bool operator==(const SymbolTable&) const = default;
};

// Number of symbols for a given maximum deviation, clamped to >= 1.
size_t SymbolCount(double max_dev, double kappa);

// Throws std::invalid_argument for kappa <= 0 or non-finite kappa.
SymbolTable BuildSymbolTable(const DistributionStats& stats, double kappa);

// Everything the online phase needs for one target graph.
struct IndexSet {
  LabeledGraph graph;
  GraphIndexes indexes;
  DistributionStats stats;
  SymbolTable symbols;
  SimilarityParams similarity;
  uint64_t graph_digest = 0;

  bool operator==(const IndexSet&) const = default;
};

struct IndexConfig {
  SimilarityParams similarity;
  double kappa = 0.001;
  DistributionOptions distribution;
};

IndexSet BuildIndexSet(LabeledGraph g, const IndexConfig& config);

class IndexFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DigestMismatchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr uint32_t kIndexFormatVersion = 1;

void SaveIndex(const IndexSet& index, const std::filesystem::path& path);
void WriteIndex(std::ostream& out, const IndexSet& index);

// Throws IndexFormatError on bad magic, version or truncation, and
// DigestMismatchError when the embedded graph does not hash to the stored
// digest or, if given, when `expected` differs from it.
IndexSet LoadIndex(const std::filesystem::path& path, const LabeledGraph* expected = nullptr);
IndexSet ReadIndex(std::istream& in, const LabeledGraph* expected = nullptr);

}  // namespace chisub
