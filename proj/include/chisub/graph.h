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
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace chisub {

using VertexId = uint32_t;
using LabelId = uint32_t;

inline constexpr VertexId kNoVertex = std::numeric_limits<VertexId>::max();

// Raised for malformed graph text. what() carries the offending line number.
class GraphParseError : public std::runtime_error {
 public:
  GraphParseError(size_t line, const std::string& message);
  size_t line() const { return line_; }

 private:
  size_t line_;
};

// Bijection between raw label tokens and dense ids 0..size()-1.
class LabelDictionary {
 public:
  LabelId Intern(std::string_view name);
  std::optional<LabelId> Find(std::string_view name) const;
  const std::string& Name(LabelId id) const { return names_.at(id); }
  size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

  bool operator==(const LabelDictionary& other) const { return names_ == other.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, LabelId> ids_;
};

struct Edge {
  VertexId u;
  VertexId w;

  auto operator<=>(const Edge&) const = default;
};

// Canonical (u < w), sorted, duplicate-free.
using EdgeList = std::vector<Edge>;

// Sorts each pair into u < w order, then sorts and removes duplicates.
void Canonicalize(EdgeList& edges);

// Undirected vertex-labeled graph in CSR form. Immutable once built.
class LabeledGraph {
 public:
  LabeledGraph() = default;

  // Builds from per-vertex labels and an edge list in any orientation.
  // Duplicates and reversed duplicates collapse; self-loops and endpoints
  // outside [0, labels.size()) throw std::invalid_argument.
  static LabeledGraph FromEdges(LabelDictionary dictionary, std::vector<LabelId> labels,
                                const EdgeList& edges);

  size_t num_vertices() const { return labels_.size(); }
  size_t num_edges() const { return neighbors_.size() / 2; }

  LabelId label(VertexId u) const { return labels_[u]; }
  std::span<const LabelId> labels() const { return labels_; }

  // Sorted ascending.
  std::span<const VertexId> neighbors(VertexId u) const {
    return {neighbors_.data() + offsets_[u], neighbors_.data() + offsets_[u + 1]};
  }
  // Bounds-checked neighbors(); throws std::out_of_range.
  std::span<const VertexId> Neighbors(VertexId u) const;
  size_t degree(VertexId u) const { return offsets_[u + 1] - offsets_[u]; }
  bool HasEdge(VertexId u, VertexId w) const;

  const LabelDictionary& dictionary() const { return dictionary_; }
  const std::string& LabelName(VertexId u) const { return dictionary_.Name(labels_[u]); }

  // Distinct labels present on at least one vertex, ascending.
  std::vector<LabelId> LabelUniverse() const;

  EdgeList Edges() const;

  std::span<const uint64_t> offsets() const { return offsets_; }
  std::span<const VertexId> adjacency() const { return neighbors_; }

  bool operator==(const LabeledGraph& other) const = default;

 private:
  LabelDictionary dictionary_;
  std::vector<LabelId> labels_;
  std::vector<uint64_t> offsets_{0};
  std::vector<VertexId> neighbors_;
};

// Re-expresses `g` over `base`: labels already in `base` keep their ids,
// unknown labels are appended after them. Structure is unchanged.
LabeledGraph AlignLabels(const LabeledGraph& g, const LabelDictionary& base);

// Induced subgraph on `vertices`; vertex i of the result is vertices[i].
LabeledGraph InducedSubgraph(const LabeledGraph& g, std::span<const VertexId> vertices);

// Text format:
//   # comment
//   t <n> <m>              (optional header, ignored)
//   v <id> <label> [deg]   (trailing degree ignored)
//   e <src> <dst>
// Ids are remapped to 0..n-1 in ascending input-id order.
LabeledGraph ParseGraph(std::istream& in, LabelDictionary dictionary = {});
LabeledGraph LoadGraph(const std::filesystem::path& path, LabelDictionary dictionary = {});

void WriteGraph(std::ostream& out, const LabeledGraph& g);
void SaveGraph(const LabeledGraph& g, const std::filesystem::path& path);

// FNV-1a over the label names and canonical edge list. Stable across
// platforms and independent of dictionary interning order.
uint64_t GraphDigest(const LabeledGraph& g);

// Connected components of g, each sorted ascending; components ordered by
// their smallest vertex.
std::vector<std::vector<VertexId>> ConnectedComponents(const LabeledGraph& g);

}  // namespace chisub
