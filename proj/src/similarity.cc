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

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

namespace chisub {

namespace {

double Penalty(uint64_t unrecalled, double gamma) {
  const double d = static_cast<double>(unrecalled);
  if (gamma == 1.0) return d;
  if (gamma == 2.0) return d * d;
  if (gamma == 3.0) return d * d * d;
  return std::pow(d, gamma);
}

}  // namespace

double VertexSimilarity(std::span<const uint32_t> target, std::span<const uint32_t> query,
                        const SimilarityParams& params, uint32_t query_foreign) {
  if (target.size() != query.size()) {
    throw std::invalid_argument(
        fmt::format("label count vectors differ in width ({} vs {})", target.size(), query.size()));
  }
  uint64_t recalled = 0;
  uint64_t unrecalled = query_foreign;
  if (params.mode == NeighborhoodMode::kMultiset) {
    for (size_t l = 0; l < target.size(); ++l) {
      const uint32_t t = target[l];
      const uint32_t q = query[l];
      recalled += std::min(t, q);
      unrecalled += q > t ? q - t : 0;
    }
  } else {
    for (size_t l = 0; l < target.size(); ++l) {
      const bool t = target[l] != 0;
      const bool q = query[l] != 0;
      recalled += (t && q) ? 1 : 0;
      unrecalled += (q && !t) ? 1 : 0;
    }
  }
  if (recalled == 0) return 0.0;
  if (unrecalled == 0) return 1.0;
  const double i = static_cast<double>(recalled);
  return i / (i + Penalty(unrecalled, params.gamma));
}

Symbol Symbolize(double eta, const DistributionStats& stats, const SymbolTable& table) {
  if (!(stats.delta > 0.0) || !(eta > stats.psi)) return {1};
  const double kappa = table.kappa;
  const double t = (eta - stats.psi) / stats.delta;
  const auto tau = static_cast<uint32_t>(table.tau());
  if (tau == 1 || t < 1.0 + kappa) return {1};
  // Symbol i covers [1 + (i-1)k, 1 + ik). The floor estimate can land one
  // off at a boundary, so settle it against the exact bounds.
  const double guess = std::floor((t - 1.0) / kappa) + 1.0;
  auto i = static_cast<uint32_t>(std::clamp(guess, 2.0, static_cast<double>(tau)));
  while (i > 2 && t < 1.0 + static_cast<double>(i - 1) * kappa) --i;
  while (i < tau && t >= 1.0 + static_cast<double>(i) * kappa) ++i;
  return {i};
}

double ChiSquare(std::span<const Symbol> sequence, const SymbolTable& table) {
  if (sequence.empty()) throw std::invalid_argument("chi-square of an empty symbol sequence");
  const size_t tau = table.tau();
  for (Symbol s : sequence) {
    if (s.index < 1 || s.index > tau) {
      throw std::invalid_argument(fmt::format("symbol {} outside table of {} symbols", s.index, tau));
    }
  }
  const double len = static_cast<double>(sequence.size());
  auto term = [&](double observed, double p) {
    const double expected = len * p;
    if (expected <= 0.0) {
      return observed > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    }
    const double diff = observed - expected;
    return diff * diff / expected;
  };

  constexpr size_t kDenseLimit = 64;
  if (tau <= kDenseLimit || tau <= sequence.size()) {
    std::vector<uint32_t> counts(tau, 0);
    for (Symbol s : sequence) ++counts[s.index - 1];
    double chi = 0.0;
    for (size_t i = 0; i < tau; ++i) chi += term(counts[i], table.probabilities[i]);
    return chi;
  }

  // Sparse: at least one symbol is unobserved, and each unobserved symbol i
  // contributes exactly its expected count len * p_i.
  std::vector<uint32_t> ids;
  ids.reserve(sequence.size());
  for (Symbol s : sequence) ids.push_back(s.index);
  std::sort(ids.begin(), ids.end());
  double chi = 0.0;
  double observed_mass = 0.0;
  for (size_t i = 0; i < ids.size();) {
    size_t j = i;
    while (j < ids.size() && ids[j] == ids[i]) ++j;
    const double p = table.probabilities[ids[i] - 1];
    chi += term(static_cast<double>(j - i), p);
    observed_mass += p;
    i = j;
  }
  return chi + len * std::max(0.0, 1.0 - observed_mass);
}

std::vector<NeighborPair> GreedyNeighborMapping(const ScoringContext& ctx, VertexId v, VertexId q) {
  const auto target_adj = ctx.target.neighbors(v);
  const auto query_adj = ctx.query.neighbors(q);

  std::vector<NeighborPair> all;
  all.reserve(target_adj.size() * query_adj.size());
  for (VertexId qn : query_adj) {
    for (VertexId tn : target_adj) all.push_back({tn, qn, ctx.Eta(tn, qn)});
  }
  std::sort(all.begin(), all.end(), [](const NeighborPair& a, const NeighborPair& b) {
    if (a.eta != b.eta) return a.eta > b.eta;
    if (a.query != b.query) return a.query < b.query;
    return a.target < b.target;
  });

  const size_t want = std::min(target_adj.size(), query_adj.size());
  std::vector<NeighborPair> out;
  out.reserve(query_adj.size());
  std::vector<bool> target_used(target_adj.size(), false);
  std::vector<bool> query_used(query_adj.size(), false);
  auto pos = [](std::span<const VertexId> adj, VertexId x) {
    return static_cast<size_t>(std::lower_bound(adj.begin(), adj.end(), x) - adj.begin());
  };
  for (const auto& p : all) {
    if (out.size() == want) break;
    const size_t ti = pos(target_adj, p.target);
    const size_t qi = pos(query_adj, p.query);
    if (target_used[ti] || query_used[qi]) continue;
    target_used[ti] = true;
    query_used[qi] = true;
    out.push_back(p);
  }
  for (size_t qi = 0; qi < query_adj.size(); ++qi) {
    if (!query_used[qi]) out.push_back({kNoVertex, query_adj[qi], 0.0});
  }
  return out;
}

SymbolSequence VertexSymbolSequence(const ScoringContext& ctx, VertexId v, VertexId q) {
  SymbolSequence seq;
  seq.target = v;
  seq.query = q;
  seq.eta = ctx.Eta(v, q);
  seq.symbols.reserve(ctx.query.degree(q) + 1);
  seq.symbols.push_back(Symbolize(seq.eta, ctx.stats, ctx.symbols));
  for (const auto& p : GreedyNeighborMapping(ctx, v, q)) {
    seq.symbols.push_back(p.target == kNoVertex ? Symbol{1} : Symbolize(p.eta, ctx.stats, ctx.symbols));
  }
  return seq;
}

}  // namespace chisub
