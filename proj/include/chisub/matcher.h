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
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "chisub/graph.h"
#include "chisub/index.h"
#include "chisub/similarity.h"

namespace chisub {

struct CandidatePair {
  VertexId target = kNoVertex;
  VertexId query = kNoVertex;
  double score = 0.0;  // chi-square of the pair's symbol sequence
  double eta = 0.0;

  bool operator==(const CandidatePair&) const = default;
};

// Heap order: higher score, then higher eta, then lower query id, then lower
// target id.
bool Outranks(const CandidatePair& a, const CandidatePair& b);

struct MatchResult {
  // (query vertex, target vertex) in the order the pairs joined the match.
  std::vector<std::pair<VertexId, VertexId>> pairs;
  EdgeList matched_edges;
  double aggregate_score = 0.0;
  double seed_score = 0.0;
  int rank = 0;
  uint64_t heap_pushes = 0;

  std::optional<VertexId> TargetOf(VertexId query_vertex) const;
  std::vector<VertexId> Image() const;
};

// All (target, query) pairs with equal labels, grouped by query label, then
// query vertex, then ascending target vertex. Scores are left at zero.
std::vector<CandidatePair> GenerateCandidatePairs(const InvertedLabelIndex& target_il,
                                                  const InvertedLabelIndex& query_il);

// Fills score and eta of every pair. Result does not depend on `threads`.
void ScoreCandidates(std::span<CandidatePair> pairs, const ScoringContext& ctx, unsigned threads = 1);

// G edges with both endpoints in `image`, canonical.
EdgeList InducedEdges(const LabeledGraph& g, std::span<const VertexId> image);

struct MatchOptions {
  int k = 1;
  unsigned threads = 1;  // seed scoring workers
};

// Online phase against one offline IndexSet. Holds a reference to `index`.
class Matcher {
 public:
  explicit Matcher(const IndexSet& index);
  // Uses `symbols` in place of the index's own table (e.g. a different kappa
  // over the same background distribution).
  Matcher(const IndexSet& index, SymbolTable symbols);

  // Up to options.k matches; fewer once every seed's target is used up.
  // Throws std::invalid_argument for k < 1.
  std::vector<MatchResult> TopK(const LabeledGraph& query, const MatchOptions& options) const;

  const SymbolTable& symbols() const { return symbols_; }

 private:
  const IndexSet& index_;
  SymbolTable symbols_;
};

inline std::vector<MatchResult> TopKMatch(const IndexSet& index, const LabeledGraph& query,
                                          const MatchOptions& options) {
  return Matcher(index).TopK(query, options);
}

// Text form, one block per match:
//   <count> matches
//   match <rank> <aggregate-chi2>
//   m <query-id> <target-id>
//   me <src> <dst>
void WriteMatchesText(std::ostream& out, std::span<const MatchResult> matches);
void WriteMatchesJson(std::ostream& out, std::span<const MatchResult> matches);

}  // namespace chisub
