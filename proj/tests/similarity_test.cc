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

#include "chisub/similarity.h"

#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "chisub/index.h"
#include "test_util.h"

namespace chisub {
namespace {

using testing::MakeGraph;

// Count vectors over a fixed alphabet A, B, C.
std::vector<uint32_t> Counts(uint32_t a, uint32_t b, uint32_t c) { return {a, b, c}; }

TEST(VertexSimilarityTest, Examples) {
  const SimilarityParams params;
  EXPECT_EQ(VertexSimilarity(Counts(1, 2, 0), Counts(1, 2, 0), params), 1.0);
  EXPECT_DOUBLE_EQ(VertexSimilarity(Counts(1, 1, 0), Counts(1, 1, 1), params), 2.0 / 3.0);
  EXPECT_EQ(VertexSimilarity(Counts(1, 0, 0), Counts(0, 1, 2), params), 0.0);
}

TEST(VertexSimilarityTest, ForeignLabelsCountAsMissing) {
  const SimilarityParams params;
  EXPECT_DOUBLE_EQ(VertexSimilarity(Counts(1, 1, 0), Counts(1, 1, 0), params, 1), 2.0 / 3.0);
  EXPECT_EQ(VertexSimilarity(Counts(1, 1, 0), Counts(0, 0, 0), params, 2), 0.0);
}

TEST(VertexSimilarityTest, SetModeClipsCounts) {
  const SimilarityParams set_mode{3.0, NeighborhoodMode::kSet};
  EXPECT_EQ(VertexSimilarity(Counts(1, 1, 0), Counts(1, 3, 0), set_mode), 1.0);
  EXPECT_LT(VertexSimilarity(Counts(1, 1, 0), Counts(1, 3, 0), {}), 1.0);
}

TEST(VertexSimilarityTest, GammaPenalty) {
  // D = 1: every gamma gives 2 / 3.
  for (double gamma : {1.0, 2.0, 3.0, 4.5}) {
    EXPECT_DOUBLE_EQ(VertexSimilarity(Counts(1, 1, 0), Counts(1, 1, 1), {gamma}), 2.0 / 3.0);
  }
  // D >= 2: strictly decreasing in gamma.
  double prev = 1.0;
  for (double gamma : {1.0, 1.5, 2.0, 3.0, 4.0}) {
    const double eta = VertexSimilarity(Counts(1, 1, 0), Counts(1, 1, 3), {gamma});
    EXPECT_LT(eta, prev);
    prev = eta;
  }
}

TEST(VertexSimilarityTest, WidthMismatchThrows) {
  EXPECT_THROW(VertexSimilarity(Counts(1, 0, 0), std::vector<uint32_t>{1, 0}, {}), std::invalid_argument);
}

TEST(VertexSimilarityTest, RangeAndRecallAsymmetry) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<uint32_t> count(0, 3);
  std::uniform_int_distribution<size_t> pos(0, 5);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<uint32_t> t(6), q(6);
    for (auto& c : t) c = count(rng);
    for (auto& c : q) c = count(rng);
    const double gamma = 1.0 + trial % 4;
    const double eta = VertexSimilarity(t, q, {gamma});
    ASSERT_GE(eta, 0.0);
    ASSERT_LE(eta, 1.0);
    bool covered = std::accumulate(q.begin(), q.end(), 0u) > 0;
    for (size_t i = 0; i < 6; ++i) covered = covered && t[i] >= q[i];
    EXPECT_EQ(eta == 1.0, covered);

    auto more_target = t;
    ++more_target[pos(rng)];
    EXPECT_GE(VertexSimilarity(more_target, q, {gamma}), eta);

    // A query label the target lacks entirely.
    const size_t l = pos(rng);
    if (t[l] == 0 && eta > 0.0) {
      auto more_query = q;
      ++more_query[l];
      EXPECT_LT(VertexSimilarity(t, more_query, {gamma}), eta);
    }
  }
}

DistributionStats Stats(double psi, double delta, double max_dev) {
  DistributionStats s;
  s.psi = psi;
  s.delta = delta;
  s.max_dev = max_dev;
  return s;
}

TEST(SymbolizeTest, FoldsBelowMeanAndNearMean) {
  const auto stats = Stats(0.2, 0.1, 9.0);
  const SymbolTable table = BuildSymbolTable(stats, 0.5);
  EXPECT_EQ(Symbolize(0.05, stats, table).index, 1u);
  EXPECT_EQ(Symbolize(0.2, stats, table).index, 1u);
  EXPECT_EQ(Symbolize(0.34, stats, table).index, 1u);  // t = 1.4 < 1.5
  EXPECT_EQ(Symbolize(0.9, Stats(0.2, 0.0, 0.0), table).index, 1u);
}

TEST(SymbolizeTest, IntervalExample) {
  const auto stats = Stats(0.2, 0.1, 9.0);
  const SymbolTable table = BuildSymbolTable(stats, 0.5);
  EXPECT_EQ(Symbolize(0.38, stats, table).index, 2u);  // t = 1.8 in [1.5, 2.0)
}

TEST(SymbolizeTest, BoundariesBelongToTheUpperBucket) {
  // psi = 0, delta = 0.25 makes t = 4 * eta exact in binary.
  const auto stats = Stats(0.0, 0.25, 10.0);
  const SymbolTable table = BuildSymbolTable(stats, 0.5);
  EXPECT_EQ(Symbolize(0.375, stats, table).index, 2u);  // t = 1.5
  EXPECT_EQ(Symbolize(0.5, stats, table).index, 3u);    // t = 2.0
  EXPECT_EQ(Symbolize(0.625, stats, table).index, 4u);  // t = 2.5
}

TEST(SymbolizeTest, ClampsBeyondTable) {
  const auto stats = Stats(0.1, 0.1, 2.0);
  const SymbolTable table = BuildSymbolTable(stats, 0.5);
  ASSERT_EQ(table.tau(), 2u);
  EXPECT_EQ(Symbolize(1.0, stats, table).index, 2u);  // t = 9
}

TEST(SymbolizeTest, PartitionMatchesLinearScan) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const double psi = unit(rng) * 0.5;
    const double delta = 0.01 + unit(rng) * 0.3;
    const double kappa = std::pow(10.0, -3.0 + 3.0 * unit(rng));
    const auto stats = Stats(psi, delta, (1.0 - psi) / delta);
    const SymbolTable table = BuildSymbolTable(stats, kappa);
    const double eta = unit(rng);
    ASSERT_EQ(Symbolize(eta, stats, table).index,
              testing::OracleSymbol(eta, psi, delta, kappa, table.tau()))
        << eta << " " << psi << " " << delta << " " << kappa;
  }
}

SymbolTable TwoSymbolTable() { return BuildSymbolTable(Stats(0.2, 0.1, 2.0), 0.5); }

std::vector<Symbol> Seq(std::initializer_list<uint32_t> ids) {
  std::vector<Symbol> out;
  for (uint32_t i : ids) out.push_back({i});
  return out;
}

TEST(ChiSquareTest, AllSecondSymbol) {
  EXPECT_NEAR(ChiSquare(Seq({2, 2, 2, 2}), TwoSymbolTable()), 260.0 / 7.0, 1e-9);
}

TEST(ChiSquareTest, ZeroOnExactFit) {
  SymbolTable table;
  table.probabilities = {0.75, 0.25};
  EXPECT_EQ(ChiSquare(Seq({1, 2, 1, 1}), table), 0.0);
  EXPECT_GT(ChiSquare(Seq({1, 2, 2, 1}), table), 0.0);
}

TEST(ChiSquareTest, SingleSymbolTable) {
  SymbolTable table;
  EXPECT_EQ(ChiSquare(Seq({1, 1, 1}), table), 0.0);
}

TEST(ChiSquareTest, Errors) {
  EXPECT_THROW(ChiSquare({}, TwoSymbolTable()), std::invalid_argument);
  EXPECT_THROW(ChiSquare(Seq({3}), TwoSymbolTable()), std::invalid_argument);
  EXPECT_THROW(ChiSquare(Seq({0}), TwoSymbolTable()), std::invalid_argument);
}

TEST(ChiSquareTest, SparseAndDensePathsMatchOracle) {
  std::mt19937_64 rng(12);
  for (double max_dev : {1.5, 3.0, 20.0}) {
    const SymbolTable table = BuildSymbolTable(Stats(0.1, 0.1, max_dev), 0.01);
    std::uniform_int_distribution<uint32_t> pick(1, static_cast<uint32_t>(table.tau()));
    for (size_t len : {1, 4, 9, 40}) {
      std::vector<Symbol> seq;
      std::vector<uint32_t> raw;
      for (size_t i = 0; i < len; ++i) {
        const uint32_t s = i % 2 == 0 ? 1 : pick(rng);
        seq.push_back({s});
        raw.push_back(s);
      }
      const double oracle = testing::OracleChiSquare(raw, table.probabilities);
      EXPECT_NEAR(ChiSquare(seq, table), oracle, 1e-9 * std::max(1.0, oracle));
      EXPECT_GE(ChiSquare(seq, table), 0.0);
    }
  }
}

// Target: v1(A) - {v2(B), v3(C), v4(D)} with v2 - E, v3 - F.
// Query:  q1(A) - {q2(B), q3(C), q4(D)} with q2 - E, q3 - F, G and q4 - H, I.
// v2 recalls q2 fully, v3 misses G, v4 misses H and I.
struct ScoringFixture {
  LabeledGraph target = MakeGraph({"A", "B", "C", "D", "E", "F"}, {{0, 1}, {0, 2}, {0, 3}, {1, 4}, {2, 5}});
  LabeledGraph raw_query = MakeGraph({"A", "B", "C", "D", "E", "F", "G", "H", "I"},
                                     {{0, 1}, {0, 2}, {0, 3}, {1, 4}, {2, 5}, {2, 6}, {3, 7}, {3, 8}});
  LabeledGraph query = AlignLabels(raw_query, target.dictionary());
  GraphIndexes target_ix = BuildIndexes(target);
  GraphIndexes query_ix = BuildIndexes(query, target.dictionary().size());
  DistributionStats stats = Stats(0.2, 0.1, 9.0);
  SymbolTable symbols = BuildSymbolTable(stats, 0.5);

  ScoringContext Context() const {
    return {target, target_ix.lcv, query, query_ix.lcv, stats, symbols, {}};
  }
};

TEST(GreedyNeighborMappingTest, TwoHopExample) {
  const ScoringFixture f;
  const ScoringContext ctx = f.Context();
  const auto mapping = GreedyNeighborMapping(ctx, 0, 0);
  ASSERT_EQ(mapping.size(), 3u);
  EXPECT_EQ(mapping[0], (NeighborPair{1, 1, 1.0}));
  EXPECT_EQ(mapping[1].target, 2u);
  EXPECT_EQ(mapping[1].query, 2u);
  EXPECT_DOUBLE_EQ(mapping[1].eta, 0.75);
  EXPECT_EQ(mapping[2].target, 3u);
  EXPECT_EQ(mapping[2].query, 3u);
  EXPECT_DOUBLE_EQ(mapping[2].eta, 0.2);

  const SymbolSequence seq = VertexSymbolSequence(ctx, 0, 0);
  ASSERT_EQ(seq.symbols.size(), 4u);
  EXPECT_GE(seq.symbols[1], seq.symbols[2]);
  EXPECT_GE(seq.symbols[2], seq.symbols[3]);
  EXPECT_EQ(seq.symbols[3].index, 1u);  // 0.2 is the mean
}

TEST(GreedyNeighborMappingTest, ExhaustedTargetNeighbors) {
  const ScoringFixture f;
  // One target neighbor against three query neighbors.
  const LabeledGraph leaf_target = MakeGraph({"A", "B"}, {{0, 1}});
  const auto t_ix = BuildIndexes(leaf_target);
  const LabeledGraph q = AlignLabels(MakeGraph({"A", "B", "B", "B"}, {{0, 1}, {0, 2}, {0, 3}}),
                                     leaf_target.dictionary());
  const auto q_ix = BuildIndexes(q, leaf_target.dictionary().size());
  const ScoringContext small{leaf_target, t_ix.lcv, q, q_ix.lcv, f.stats, f.symbols, {}};
  const auto mapping = GreedyNeighborMapping(small, 0, 0);
  ASSERT_EQ(mapping.size(), 3u);
  EXPECT_EQ(mapping[0].target, 1u);
  EXPECT_EQ(mapping[0].query, 1u);  // equal eta, lower query id first
  EXPECT_EQ(mapping[1], (NeighborPair{kNoVertex, 2, 0.0}));
  EXPECT_EQ(mapping[2], (NeighborPair{kNoVertex, 3, 0.0}));
  EXPECT_EQ(VertexSymbolSequence(small, 0, 0).symbols.size(), 4u);
}

TEST(GreedyNeighborMappingTest, TiesAreDeterministic) {
  // Four interchangeable leaves on both sides.
  const LabeledGraph g = MakeGraph({"A", "B", "B", "B", "B"}, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
  const auto ix = BuildIndexes(g);
  const DistributionStats stats = Stats(0.2, 0.1, 9.0);
  const SymbolTable symbols = BuildSymbolTable(stats, 0.5);
  const ScoringContext ctx{g, ix.lcv, g, ix.lcv, stats, symbols, {}};
  const auto mapping = GreedyNeighborMapping(ctx, 0, 0);
  ASSERT_EQ(mapping.size(), 4u);
  for (VertexId i = 0; i < 4; ++i) {
    EXPECT_EQ(mapping[i].query, i + 1);
    EXPECT_EQ(mapping[i].target, i + 1);
  }
}

TEST(VertexSymbolSequenceTest, IsolatedQueryVertex) {
  const ScoringFixture f;
  const LabeledGraph q = AlignLabels(MakeGraph({"A"}, {}), f.target.dictionary());
  const auto q_ix = BuildIndexes(q, f.target.dictionary().size());
  const ScoringContext ctx{f.target, f.target_ix.lcv, q, q_ix.lcv, f.stats, f.symbols, {}};
  const SymbolSequence seq = VertexSymbolSequence(ctx, 0, 0);
  ASSERT_EQ(seq.symbols.size(), 1u);
  EXPECT_EQ(seq.eta, 1.0);
}

TEST(VertexSymbolSequenceTest, TwoHopCopyGivesTopSymbolEverywhere) {
  const ScoringFixture f;
  // The target itself, queried against itself at v1: every neighbor is recalled.
  const ScoringContext ctx{f.target, f.target_ix.lcv, f.target, f.target_ix.lcv, f.stats, f.symbols, {}};
  const SymbolSequence seq = VertexSymbolSequence(ctx, 0, 0);
  const Symbol top = Symbolize(1.0, f.stats, f.symbols);
  ASSERT_GE(f.symbols.tau(), 2u);
  EXPECT_GT(top.index, 1u);
  for (Symbol s : seq.symbols) EXPECT_EQ(s, top);
}

TEST(VertexSymbolSequenceTest, MatchesMultisetOracleOnRandomPairs) {
  std::mt19937_64 rng(21);
  int checked = 0;
  for (uint64_t seed = 0; checked < 100; ++seed) {
    const LabeledGraph target = testing::RandomGraph(30, 0.15, 5, seed);
    const LabeledGraph raw_query = testing::RandomGraph(8, 0.35, 6, seed + 1000);
    const LabeledGraph query = AlignLabels(raw_query, target.dictionary());
    const auto t_ix = BuildIndexes(target);
    const auto q_ix = BuildIndexes(query, target.dictionary().size());
    const double gamma = 1.0 + seed % 3;
    const double kappa = seed % 2 == 0 ? 0.05 : 0.3;
    const DistributionStats stats = ComputeDistribution(t_ix.lcv, {gamma});
    const SymbolTable symbols = BuildSymbolTable(stats, kappa);
    const ScoringContext ctx{target, t_ix.lcv, query, q_ix.lcv, stats, symbols, {gamma}};
    std::uniform_int_distribution<VertexId> pick_v(0, 29), pick_q(0, 7);
    for (int i = 0; i < 10; ++i, ++checked) {
      const VertexId v = pick_v(rng);
      const VertexId q = pick_q(rng);
      const auto oracle = testing::OracleSequence(target, v, raw_query, q, gamma, stats.psi, stats.delta,
                                                  kappa, symbols.tau());
      const SymbolSequence seq = VertexSymbolSequence(ctx, v, q);
      ASSERT_EQ(seq.symbols.size(), oracle.size());
      for (size_t j = 0; j < oracle.size(); ++j) EXPECT_EQ(seq.symbols[j].index, oracle[j]);
      EXPECT_NEAR(ChiSquare(seq.symbols, symbols), testing::OracleChiSquare(oracle, symbols.probabilities),
                  1e-9 * std::max(1.0, ChiSquare(seq.symbols, symbols)));
    }
  }
}

}  // namespace
}  // namespace chisub
