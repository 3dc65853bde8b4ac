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

// Fixture builders and brute-force reference implementations for the unit
// and acceptance tests. The references work on label names and explicit
// multisets and share no code with the library's index structures.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "chisub/graph.h"
#include "chisub/index.h"

namespace chisub::testing {

using LabelBag = std::map<std::string, int>;

inline LabeledGraph MakeGraph(const std::vector<std::string>& labels,
                              const std::vector<std::pair<VertexId, VertexId>>& edges) {
  LabelDictionary dict;
  std::vector<LabelId> ids;
  for (const auto& l : labels) ids.push_back(dict.Intern(l));
  EdgeList el;
  for (auto [u, w] : edges) el.push_back({u, w});
  return LabeledGraph::FromEdges(std::move(dict), std::move(ids), el);
}

// Erdos-Renyi style graph with `num_labels` labels named "L0".."L{k-1}".
inline LabeledGraph RandomGraph(uint32_t n, double edge_prob, uint32_t num_labels, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<uint32_t> pick_label(0, num_labels - 1);
  std::bernoulli_distribution coin(edge_prob);
  std::vector<std::string> labels;
  for (uint32_t i = 0; i < n; ++i) labels.push_back("L" + std::to_string(pick_label(rng)));
  std::vector<std::pair<VertexId, VertexId>> edges;
  for (uint32_t u = 0; u < n; ++u) {
    for (uint32_t w = u + 1; w < n; ++w) {
      if (coin(rng)) edges.emplace_back(u, w);
    }
  }
  return MakeGraph(labels, edges);
}

// Labels of u and of every neighbor, by name.
inline LabelBag NeighborhoodBag(const LabeledGraph& g, VertexId u) {
  LabelBag bag;
  ++bag[g.LabelName(u)];
  for (VertexId w : g.neighbors(u)) ++bag[g.LabelName(w)];
  return bag;
}

inline double OracleSimilarity(LabelBag target, LabelBag query, double gamma, bool set_mode = false) {
  if (set_mode) {
    for (auto& [l, c] : target) c = 1;
    for (auto& [l, c] : query) c = 1;
  }
  double recalled = 0;
  double missing = 0;
  for (const auto& [l, c] : query) {
    auto it = target.find(l);
    const int have = it == target.end() ? 0 : it->second;
    recalled += std::min(have, c);
    missing += std::max(0, c - have);
  }
  if (recalled == 0) return 0.0;
  return recalled / (recalled + std::pow(missing, gamma));
}

struct OracleStats {
  double psi = 0;
  double delta = 0;
  double max_dev = 0;
};

inline OracleStats OracleDistribution(const LabeledGraph& g, double gamma, bool set_mode = false) {
  std::vector<LabelBag> bags;
  for (VertexId u = 0; u < g.num_vertices(); ++u) bags.push_back(NeighborhoodBag(g, u));
  std::vector<double> etas;
  for (VertexId u = 0; u < g.num_vertices(); ++u) {
    for (VertexId w = 0; w < g.num_vertices(); ++w) {
      if (u != w) etas.push_back(OracleSimilarity(bags[u], bags[w], gamma, set_mode));
    }
  }
  OracleStats s;
  long double sum = 0;
  for (double e : etas) sum += e;
  s.psi = static_cast<double>(sum / etas.size());
  long double sq = 0;
  for (double e : etas) sq += (e - s.psi) * (e - s.psi);
  s.delta = etas.size() > 1 ? std::sqrt(static_cast<double>(sq / (etas.size() - 1))) : 0.0;
  if (s.delta > 0) {
    for (double e : etas) s.max_dev = std::max(s.max_dev, std::abs(e - s.psi) / s.delta);
  }
  return s;
}

inline size_t OracleTau(double max_dev, double kappa) {
  if (max_dev <= 1.0) return 1;
  return std::max<size_t>(1, static_cast<size_t>(std::ceil((max_dev - 1.0) / kappa)));
}

// Pr(symbol i), i = 1..tau, straight from the bucket bound formula.
inline std::vector<double> OracleProbabilities(size_t tau, double kappa) {
  std::vector<double> p(tau, 0.0);
  double tail = 0;
  for (size_t i = 2; i <= tau; ++i) {
    const double lo = 1.0 + (i - 1) * kappa;
    const double hi = 1.0 + i * kappa;
    p[i - 1] = 0.5 * (1.0 / (lo * lo) - 1.0 / (hi * hi));
    tail += p[i - 1];
  }
  p[0] = 1.0 - tail;
  return p;
}

// Linear scan over the half-open buckets.
inline uint32_t OracleSymbol(double eta, double psi, double delta, double kappa, size_t tau) {
  if (delta <= 0 || eta <= psi) return 1;
  const double t = (eta - psi) / delta;
  if (t < 1.0 + kappa) return 1;
  for (size_t i = 2; i <= tau; ++i) {
    if (t >= 1.0 + (i - 1) * kappa && t < 1.0 + i * kappa) return static_cast<uint32_t>(i);
  }
  return static_cast<uint32_t>(tau);
}

inline double OracleChiSquare(const std::vector<uint32_t>& symbols, const std::vector<double>& probs) {
  const double len = static_cast<double>(symbols.size());
  double chi = 0;
  for (size_t i = 1; i <= probs.size(); ++i) {
    const double observed = static_cast<double>(std::count(symbols.begin(), symbols.end(), i));
    const double expected = len * probs[i - 1];
    chi += (observed - expected) * (observed - expected) / expected;
  }
  return chi;
}

// Symbol sequence of (v in g, q in query) by explicit enumeration: score all
// neighbor pairs, sort, take greedily, pad with symbol 1.
inline std::vector<uint32_t> OracleSequence(const LabeledGraph& g, VertexId v, const LabeledGraph& query,
                                            VertexId q, double gamma, double psi, double delta,
                                            double kappa, size_t tau) {
  auto eta = [&](VertexId a, VertexId b) {
    return OracleSimilarity(NeighborhoodBag(g, a), NeighborhoodBag(query, b), gamma);
  };
  std::vector<uint32_t> out{OracleSymbol(eta(v, q), psi, delta, kappa, tau)};
  struct Cand {
    double eta;
    VertexId qn, vn;
  };
  std::vector<Cand> cands;
  for (VertexId vn : g.neighbors(v)) {
    for (VertexId qn : query.neighbors(q)) cands.push_back({eta(vn, qn), qn, vn});
  }
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (a.eta != b.eta) return a.eta > b.eta;
    if (a.qn != b.qn) return a.qn < b.qn;
    return a.vn < b.vn;
  });
  std::vector<bool> used_v(g.num_vertices()), used_q(query.num_vertices());
  for (const auto& c : cands) {
    if (used_v[c.vn] || used_q[c.qn]) continue;
    used_v[c.vn] = used_q[c.qn] = true;
    out.push_back(OracleSymbol(c.eta, psi, delta, kappa, tau));
  }
  while (out.size() < query.degree(q) + 1) out.push_back(1);
  return out;
}

// All injective, label- and edge-preserving embeddings of `query` into `g`
// (subgraph monomorphisms), by plain backtracking. Stops after `limit`.
inline std::vector<std::vector<VertexId>> OracleEmbeddings(const LabeledGraph& query, const LabeledGraph& g,
                                                           size_t limit = 1000) {
  std::vector<std::vector<VertexId>> found;
  std::vector<VertexId> map(query.num_vertices(), kNoVertex);
  std::vector<bool> used(g.num_vertices(), false);
  std::function<void(VertexId)> extend = [&](VertexId q) {
    if (found.size() >= limit) return;
    if (q == query.num_vertices()) {
      found.push_back(map);
      return;
    }
    for (VertexId v = 0; v < g.num_vertices(); ++v) {
      if (used[v] || g.LabelName(v) != query.LabelName(q)) continue;
      bool ok = true;
      for (VertexId qn : query.neighbors(q)) {
        if (qn < q && !g.HasEdge(v, map[qn])) ok = false;
      }
      if (!ok) continue;
      used[v] = true;
      map[q] = v;
      extend(q + 1);
      used[v] = false;
      map[q] = kNoVertex;
    }
  };
  extend(0);
  return found;
}

}  // namespace chisub::testing
