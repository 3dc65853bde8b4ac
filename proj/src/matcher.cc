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

#include "chisub/matcher.h"

#include <algorithm>
#include <ostream>
#include <queue>
#include <stdexcept>

#include <fmt/format.h>
#include "json.hpp"

#include "chisub/parallel.h"

namespace chisub {

bool Outranks(const CandidatePair& a, const CandidatePair& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.eta != b.eta) return a.eta > b.eta;
  if (a.query != b.query) return a.query < b.query;
  return a.target < b.target;
}

std::optional<VertexId> MatchResult::TargetOf(VertexId query_vertex) const {
  for (const auto& [q, t] : pairs) {
    if (q == query_vertex) return t;
  }
  return std::nullopt;
}

std::vector<VertexId> MatchResult::Image() const {
  std::vector<VertexId> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(p.second);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<CandidatePair> GenerateCandidatePairs(const InvertedLabelIndex& target_il,
                                                  const InvertedLabelIndex& query_il) {
  std::vector<CandidatePair> out;
  const size_t shared = std::min(target_il.lists.size(), query_il.lists.size());
  size_t total = 0;
  for (LabelId l = 0; l < shared; ++l) total += target_il.lists[l].size() * query_il.lists[l].size();
  out.reserve(total);
  for (LabelId l = 0; l < shared; ++l) {
    for (VertexId q : query_il.lists[l]) {
      for (VertexId v : target_il.lists[l]) out.push_back({v, q, 0.0, 0.0});
    }
  }
  return out;
}

void ScoreCandidates(std::span<CandidatePair> pairs, const ScoringContext& ctx, unsigned threads) {
  ParallelChunks(pairs.size(), 256, threads, [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) {
      auto& p = pairs[i];
      const SymbolSequence seq = VertexSymbolSequence(ctx, p.target, p.query);
      p.eta = seq.eta;
      p.score = ChiSquare(seq.symbols, ctx.symbols);
    }
  });
}

EdgeList InducedEdges(const LabeledGraph& g, std::span<const VertexId> image) {
  std::vector<VertexId> sorted(image.begin(), image.end());
  std::sort(sorted.begin(), sorted.end());
  EdgeList out;
  for (VertexId u : sorted) {
    for (VertexId w : g.neighbors(u)) {
      if (u < w && std::binary_search(sorted.begin(), sorted.end(), w)) out.push_back({u, w});
    }
  }
  return out;
}

Matcher::Matcher(const IndexSet& index) : Matcher(index, index.symbols) {}

Matcher::Matcher(const IndexSet& index, SymbolTable symbols)
    : index_(index), symbols_(std::move(symbols)) {}

namespace {

struct HeapOrder {
  // std::priority_queue keeps the element for which no other compares
  // greater on top, so invert Outranks.
  bool operator()(const CandidatePair& a, const CandidatePair& b) const { return Outranks(b, a); }
};

using SecondaryHeap = std::priority_queue<CandidatePair, std::vector<CandidatePair>, HeapOrder>;

}  // namespace

std::vector<MatchResult> Matcher::TopK(const LabeledGraph& raw_query, const MatchOptions& options) const {
  if (options.k < 1) throw std::invalid_argument(fmt::format("k must be >= 1, got {}", options.k));
  const LabeledGraph& g = index_.graph;
  const LabeledGraph query = AlignLabels(raw_query, g.dictionary());
  const GraphIndexes query_ix = BuildIndexes(query, index_.indexes.lcv.width);
  const ScoringContext ctx{g,     index_.indexes.lcv, query, query_ix.lcv, index_.stats,
                           symbols_, index_.similarity};

  std::vector<CandidatePair> scored = GenerateCandidatePairs(index_.indexes.il, query_ix.il);
  ScoreCandidates(scored, ctx, options.threads);

  // Per query vertex, its candidates sorted by target id (generation order).
  const size_t nq = query.num_vertices();
  std::vector<std::span<const CandidatePair>> by_query(nq);
  for (size_t i = 0; i < scored.size();) {
    size_t j = i;
    while (j < scored.size() && scored[j].query == scored[i].query) ++j;
    by_query[scored[i].query] = std::span<const CandidatePair>(scored.data() + i, j - i);
    i = j;
  }
  auto lookup = [&](VertexId v, VertexId q) -> const CandidatePair* {
    auto list = by_query[q];
    auto it = std::lower_bound(list.begin(), list.end(), v,
                               [](const CandidatePair& p, VertexId t) { return p.target < t; });
    return (it != list.end() && it->target == v) ? &*it : nullptr;
  };

  // Seed scores never change, so the primary max-heap is a sorted array
  // consumed front to back with lazy skipping of done targets.
  std::vector<CandidatePair> primary = scored;
  std::sort(primary.begin(), primary.end(), Outranks);

  std::vector<bool> done(g.num_vertices(), false);
  std::vector<MatchResult> results;
  size_t cursor = 0;
  std::vector<VertexId> matched(nq, kNoVertex);

  while (static_cast<int>(results.size()) < options.k) {
    while (cursor < primary.size() && done[primary[cursor].target]) ++cursor;
    if (cursor == primary.size()) break;
    const CandidatePair seed = primary[cursor++];

    MatchResult m;
    m.seed_score = seed.score;
    std::fill(matched.begin(), matched.end(), kNoVertex);
    SecondaryHeap secondary;

    auto add = [&](const CandidatePair& p) {
      done[p.target] = true;
      matched[p.query] = p.target;
      m.pairs.emplace_back(p.query, p.target);
      m.aggregate_score += p.score;
      for (VertexId qn : query.neighbors(p.query)) {
        if (matched[qn] != kNoVertex) continue;
        for (VertexId vn : g.neighbors(p.target)) {
          if (done[vn] || g.label(vn) != query.label(qn)) continue;
          if (const CandidatePair* c = lookup(vn, qn)) {
            secondary.push(*c);
            ++m.heap_pushes;
          }
        }
      }
    };

    add(seed);
    while (!secondary.empty() && m.pairs.size() < nq) {
      const CandidatePair top = secondary.top();
      secondary.pop();
      if (done[top.target] || matched[top.query] != kNoVertex) continue;
      add(top);
    }

    const auto image = m.Image();
    m.matched_edges = InducedEdges(g, image);
    m.rank = static_cast<int>(results.size()) + 1;
    results.push_back(std::move(m));
  }
  return results;
}

void WriteMatchesText(std::ostream& out, std::span<const MatchResult> matches) {
  out << fmt::format("{} matches\n", matches.size());
  for (const auto& m : matches) {
    out << fmt::format("match {} {}\n", m.rank, m.aggregate_score);
    for (const auto& [q, t] : m.pairs) out << fmt::format("m {} {}\n", q, t);
    for (const auto& e : m.matched_edges) out << fmt::format("me {} {}\n", e.u, e.w);
  }
}

void WriteMatchesJson(std::ostream& out, std::span<const MatchResult> matches) {
  nlohmann::json doc;
  doc["matches"] = nlohmann::json::array();
  for (const auto& m : matches) {
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& [q, t] : m.pairs) pairs.push_back({{"query", q}, {"target", t}});
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& e : m.matched_edges) edges.push_back({e.u, e.w});
    doc["matches"].push_back({{"rank", m.rank},
                              {"aggregate_score", m.aggregate_score},
                              {"seed_score", m.seed_score},
                              {"pairs", std::move(pairs)},
                              {"edges", std::move(edges)}});
  }
  out << doc.dump(2) << '\n';
}

}  // namespace chisub
