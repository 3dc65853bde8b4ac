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
#include <span>
#include <vector>

#include "chisub/graph.h"
#include "chisub/index.h"

namespace chisub {

// Neighborhood recall of a query vertex by a target vertex:
//   I = sum_l min(t[l], q[l]),  D = sum_l max(0, q[l] - t[l]) + query_foreign
//   eta = I / (I + D^gamma)
// 1 when D = 0 and I > 0, 0 when I = 0. Throws std::invalid_argument on
// mismatched widths. Under NeighborhoodMode::kSet counts are clipped to 1.
double VertexSimilarity(std::span<const uint32_t> target, std::span<const uint32_t> query,
                        const SimilarityParams& params, uint32_t query_foreign = 0);

// 1-based symbol index into a SymbolTable.
struct Symbol {
  uint32_t index = 1;

  auto operator<=>(const Symbol&) const = default;
};

// Maps a similarity to its deviation bucket. Values at or below the mean fold
// into symbol 1; deviations past the table's last bucket clamp to tau.
Symbol Symbolize(double eta, const DistributionStats& stats, const SymbolTable& table);

// Pearson statistic of the symbol counts against len * Pr(symbol).
// Throws std::invalid_argument on an empty sequence or out-of-range symbol.
double ChiSquare(std::span<const Symbol> sequence, const SymbolTable& table);

// Target graph, query graph (aligned to the target's dictionary) and the
// offline statistics needed to score (target, query) vertex pairs.
struct ScoringContext {
  const LabeledGraph& target;
  const LabelCountVector& target_lcv;
  const LabeledGraph& query;
  const LabelCountVector& query_lcv;
  const DistributionStats& stats;
  const SymbolTable& symbols;
  SimilarityParams params;

  double Eta(VertexId target_vertex, VertexId query_vertex) const {
    return VertexSimilarity(target_lcv.Row(target_vertex), query_lcv.Row(query_vertex), params,
                            query_lcv.Foreign(query_vertex, params.mode));
  }
};

struct NeighborPair {
  VertexId target = kNoVertex;  // kNoVertex when the query neighbor is unmatched
  VertexId query = kNoVertex;
  double eta = 0.0;

  bool operator==(const NeighborPair&) const = default;
};

// Greedy one-to-one assignment between adj(v) and adj(q), highest similarity
// first (ties: lower query id, then lower target id). Query neighbors left
// over once adj(v) is exhausted follow as unmatched entries, ascending by id.
std::vector<NeighborPair> GreedyNeighborMapping(const ScoringContext& ctx, VertexId v, VertexId q);

struct SymbolSequence {
  VertexId target = kNoVertex;
  VertexId query = kNoVertex;
  double eta = 0.0;  // similarity of the pair itself
  std::vector<Symbol> symbols;
};

// Symbol of (v, q) followed by one symbol per query neighbor in mapping
// order; unmatched query neighbors contribute symbol 1. Length deg(q) + 1.
SymbolSequence VertexSymbolSequence(const ScoringContext& ctx, VertexId v, VertexId q);

}  // namespace chisub
