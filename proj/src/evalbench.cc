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

#include "chisub/evalbench.h"

#include <algorithm>
#include <chrono>
#include <deque>
#include <fstream>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "chisub/parallel.h"

namespace chisub {

namespace {

constexpr std::array<std::string_view, 6> kNoiseNames = {"exact", "nLabel", "nVAdd",
                                                         "nVDel", "nEAdd",  "nEDel"};

// Uniform index in [0, n).
size_t Pick(std::mt19937_64& rng, size_t n) {
  return std::uniform_int_distribution<size_t>(0, n - 1)(rng);
}

}  // namespace

std::string_view NoiseName(NoiseType type) { return kNoiseNames[static_cast<size_t>(type)]; }

std::optional<NoiseType> ParseNoise(std::string_view name) {
  for (size_t i = 0; i < kNoiseNames.size(); ++i) {
    if (kNoiseNames[i] == name) return static_cast<NoiseType>(i);
  }
  return std::nullopt;
}

void QuerySpec::Validate() const {
  if (size < 1) throw std::invalid_argument(fmt::format("query size must be positive, got {}", size));
  if (noise == NoiseType::kExact) {
    if (noise_count != 0) throw std::invalid_argument("exact queries carry no noise edits");
  } else if (noise_count < 1 || noise_count > 2) {
    throw std::invalid_argument(
        fmt::format("{} needs 1 or 2 edits, got {}", NoiseName(noise), noise_count));
  }
}

ExtractedQuery ExtractExactQuery(const LabeledGraph& g, int size, uint64_t seed) {
  if (size < 1) throw std::invalid_argument(fmt::format("query size must be positive, got {}", size));
  const size_t n = g.num_vertices();
  const auto want = static_cast<size_t>(size);
  if (want > n) {
    throw std::runtime_error(fmt::format("graph has {} vertices, cannot extract {}", n, size));
  }
  constexpr int kMaxAttempts = 100;
  std::mt19937_64 rng(seed);
  std::vector<char> visited(n, 0);
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    const auto start = static_cast<VertexId>(Pick(rng, n));
    std::vector<VertexId> order{start};
    visited[start] = 1;
    std::deque<VertexId> frontier{start};
    std::vector<VertexId> adj;
    while (!frontier.empty() && order.size() < want) {
      const VertexId u = frontier.front();
      frontier.pop_front();
      adj.assign(g.neighbors(u).begin(), g.neighbors(u).end());
      std::shuffle(adj.begin(), adj.end(), rng);
      for (VertexId w : adj) {
        if (visited[w]) continue;
        visited[w] = 1;
        order.push_back(w);
        frontier.push_back(w);
        if (order.size() == want) break;
      }
    }
    for (VertexId u : order) visited[u] = 0;
    if (order.size() == want) return {InducedSubgraph(g, order), std::move(order)};
  }
  throw std::runtime_error(
      fmt::format("no start vertex reached {} vertices after {} attempts", size, kMaxAttempts));
}

namespace {

// Small editable graph for perturbation; ids stay dense.
struct EditableGraph {
  std::vector<LabelId> labels;
  std::set<Edge> edges;

  size_t n() const { return labels.size(); }

  std::vector<std::vector<VertexId>> Adjacency() const {
    std::vector<std::vector<VertexId>> adj(n());
    for (const auto& e : edges) {
      adj[e.u].push_back(e.w);
      adj[e.w].push_back(e.u);
    }
    return adj;
  }

  // Components ignoring vertex `skip_vertex` and edge `skip_edge`.
  std::vector<std::vector<VertexId>> Components(VertexId skip_vertex = kNoVertex,
                                                std::optional<Edge> skip_edge = {}) const {
    auto adj = Adjacency();
    std::vector<char> seen(n(), 0);
    std::vector<std::vector<VertexId>> out;
    for (VertexId s = 0; s < n(); ++s) {
      if (seen[s] || s == skip_vertex) continue;
      std::vector<VertexId> comp{s}, stack{s};
      seen[s] = 1;
      while (!stack.empty()) {
        VertexId u = stack.back();
        stack.pop_back();
        for (VertexId w : adj[u]) {
          if (seen[w] || w == skip_vertex) continue;
          if (skip_edge && Edge{std::min(u, w), std::max(u, w)} == *skip_edge) continue;
          seen[w] = 1;
          comp.push_back(w);
          stack.push_back(w);
        }
      }
      out.push_back(std::move(comp));
    }
    return out;
  }

  void RemoveVertex(VertexId v) {
    std::set<Edge> kept;
    for (const auto& e : edges) {
      if (e.u == v || e.w == v) continue;
      kept.insert({e.u > v ? e.u - 1 : e.u, e.w > v ? e.w - 1 : e.w});
    }
    edges = std::move(kept);
    labels.erase(labels.begin() + v);
  }

  void KeepLargestComponent() {
    auto comps = Components();
    if (comps.size() <= 1) return;
    auto largest = std::max_element(comps.begin(), comps.end(), [](const auto& a, const auto& b) {
      return a.size() < b.size();
    });
    std::vector<char> keep(n(), 0);
    for (VertexId u : *largest) keep[u] = 1;
    for (VertexId v = static_cast<VertexId>(n()); v-- > 0;) {
      if (!keep[v]) RemoveVertex(v);
    }
  }
};

}  // namespace

PerturbResult PerturbQuery(const LabeledGraph& query, const QuerySpec& spec,
                           std::span<const LabelId> label_universe) {
  spec.Validate();
  EditableGraph eg;
  eg.labels.assign(query.labels().begin(), query.labels().end());
  for (const auto& e : query.Edges()) eg.edges.insert(e);
  std::mt19937_64 rng(spec.seed);
  PerturbResult result;
  std::vector<char> relabeled(eg.n(), 0);

  for (int edit = 0; edit < spec.noise_count; ++edit) {
    auto skip = [&](std::string why) {
      result.warnings.push_back(fmt::format("{} edit {} skipped: {}", NoiseName(spec.noise), edit + 1, why));
    };
    switch (spec.noise) {
      case NoiseType::kExact:
        break;
      case NoiseType::kLabel: {
        std::vector<VertexId> fresh;
        for (VertexId v = 0; v < eg.n(); ++v) {
          if (!relabeled[v]) fresh.push_back(v);
        }
        if (fresh.empty()) {
          skip("every vertex already relabeled");
          continue;
        }
        const VertexId v = fresh[Pick(rng, fresh.size())];
        std::vector<LabelId> options;
        for (LabelId l : label_universe) {
          if (l != eg.labels[v]) options.push_back(l);
        }
        if (options.empty()) {
          skip("label universe has no alternative label");
          continue;
        }
        eg.labels[v] = options[Pick(rng, options.size())];
        relabeled[v] = 1;
        ++result.applied;
        break;
      }
      case NoiseType::kVertexAdd: {
        if (eg.n() == 0 || label_universe.empty()) {
          skip("nothing to attach to");
          continue;
        }
        const auto v = static_cast<VertexId>(eg.n());
        const auto anchor = static_cast<VertexId>(Pick(rng, eg.n()));
        eg.labels.push_back(label_universe[Pick(rng, label_universe.size())]);
        eg.edges.insert({anchor, v});
        ++result.applied;
        break;
      }
      case NoiseType::kVertexDelete: {
        if (eg.n() <= 1) {
          skip("query too small");
          continue;
        }
        std::vector<VertexId> safe;
        for (VertexId v = 0; v < eg.n(); ++v) {
          if (eg.Components(v).size() == 1) safe.push_back(v);
        }
        const bool fallback = safe.empty();
        const VertexId v = fallback ? static_cast<VertexId>(Pick(rng, eg.n())) : safe[Pick(rng, safe.size())];
        eg.RemoveVertex(v);
        if (fallback) eg.KeepLargestComponent();
        ++result.applied;
        break;
      }
      case NoiseType::kEdgeAdd: {
        std::vector<Edge> missing;
        for (VertexId u = 0; u < eg.n(); ++u) {
          for (VertexId w = u + 1; w < eg.n(); ++w) {
            if (!eg.edges.count({u, w})) missing.push_back({u, w});
          }
        }
        if (missing.empty()) {
          skip("query is complete");
          continue;
        }
        eg.edges.insert(missing[Pick(rng, missing.size())]);
        ++result.applied;
        break;
      }
      case NoiseType::kEdgeDelete: {
        if (eg.edges.empty()) {
          skip("query has no edges");
          continue;
        }
        std::vector<Edge> all(eg.edges.begin(), eg.edges.end());
        std::vector<Edge> safe;
        for (const auto& e : all) {
          if (eg.Components(kNoVertex, e).size() == 1) safe.push_back(e);
        }
        const bool fallback = safe.empty();
        const Edge e = fallback ? all[Pick(rng, all.size())] : safe[Pick(rng, safe.size())];
        eg.edges.erase(e);
        if (fallback) eg.KeepLargestComponent();
        ++result.applied;
        break;
      }
    }
  }
  EdgeList edges(eg.edges.begin(), eg.edges.end());
  result.graph = LabeledGraph::FromEdges(query.dictionary(), std::move(eg.labels), edges);
  return result;
}

double EdgeRetrievalAccuracy(const LabeledGraph& ground_truth, const MatchResult& match,
                             const LabeledGraph& g) {
  if (match.pairs.empty()) return 0.0;
  using LabelPair = std::pair<std::string, std::string>;
  auto key = [](const std::string& a, const std::string& b) {
    return a < b ? LabelPair{a, b} : LabelPair{b, a};
  };
  if (ground_truth.num_edges() == 0) {
    for (const auto& [q, t] : match.pairs) {
      for (VertexId u = 0; u < ground_truth.num_vertices(); ++u) {
        if (ground_truth.LabelName(u) == g.LabelName(t)) return 1.0;
      }
    }
    return 0.0;
  }
  std::map<LabelPair, int> retrieved;
  for (const auto& e : match.matched_edges) ++retrieved[key(g.LabelName(e.u), g.LabelName(e.w))];
  size_t hit = 0;
  for (const auto& e : ground_truth.Edges()) {
    auto it = retrieved.find(key(ground_truth.LabelName(e.u), ground_truth.LabelName(e.w)));
    if (it != retrieved.end() && it->second > 0) {
      --it->second;
      ++hit;
    }
  }
  return static_cast<double>(hit) / static_cast<double>(ground_truth.num_edges());
}

LabeledGraph GenerateBarabasiAlbert(const BarabasiAlbertParams& params) {
  const uint32_t m = (params.avg_degree + 1) / 2;
  if (m < 1) throw std::invalid_argument("avg_degree must be at least 1");
  if (params.n <= m) {
    throw std::invalid_argument(fmt::format("n = {} must exceed m = {}", params.n, m));
  }
  if (!params.unique_labels && params.num_labels < 1) {
    throw std::invalid_argument("num_labels must be at least 1");
  }
  std::mt19937_64 rng(params.seed);

  LabelDictionary dict;
  std::vector<LabelId> labels(params.n);
  if (params.unique_labels) {
    for (uint32_t v = 0; v < params.n; ++v) labels[v] = dict.Intern(fmt::format("L{}", v));
  } else {
    for (uint32_t l = 0; l < params.num_labels; ++l) dict.Intern(fmt::format("L{}", l));
  }

  EdgeList edges;
  edges.reserve(static_cast<size_t>(m) * (params.n - m));
  std::vector<VertexId> repeated;
  std::vector<VertexId> targets(m);
  for (uint32_t i = 0; i < m; ++i) targets[i] = i;
  for (VertexId source = m; source < params.n; ++source) {
    for (VertexId t : targets) edges.push_back({t, source});
    repeated.insert(repeated.end(), targets.begin(), targets.end());
    repeated.insert(repeated.end(), m, source);
    std::set<VertexId> chosen;
    while (chosen.size() < m) chosen.insert(repeated[Pick(rng, repeated.size())]);
    targets.assign(chosen.begin(), chosen.end());
  }
  if (!params.unique_labels) {
    for (auto& l : labels) l = static_cast<LabelId>(Pick(rng, params.num_labels));
  }
  return LabeledGraph::FromEdges(std::move(dict), std::move(labels), edges);
}

void BenchmarkProtocol::Validate() const {
  if (sizes.empty() || noise_types.empty()) throw std::invalid_argument("empty benchmark protocol");
  for (int s : sizes) {
    if (s < 3 || s > 13 || s % 2 == 0) {
      throw std::invalid_argument(fmt::format("query size {} not in {{3, 5, ..., 13}}", s));
    }
  }
  if (queries_per_cell < 1) throw std::invalid_argument("queries_per_cell must be positive");
  if (noise_count && (*noise_count < 1 || *noise_count > 2)) {
    throw std::invalid_argument("noise_count must be 1 or 2");
  }
  if (k < 1) throw std::invalid_argument("k must be >= 1");
}

std::vector<QueryCase> GenerateQueryCorpus(const LabeledGraph& g, const BenchmarkProtocol& protocol) {
  protocol.Validate();
  const auto universe = g.LabelUniverse();
  std::map<std::pair<int, int>, ExtractedQuery> bases;
  std::vector<QueryCase> corpus;
  for (NoiseType noise : protocol.noise_types) {
    for (int size : protocol.sizes) {
      for (int i = 0; i < protocol.queries_per_cell; ++i) {
        const uint64_t base_seed = DeriveSeed(protocol.master_seed, size, i);
        auto it = bases.find({size, i});
        if (it == bases.end()) {
          it = bases.emplace(std::pair{size, i}, ExtractExactQuery(g, size, base_seed)).first;
        }
        QueryCase qc;
        qc.query_id = static_cast<int>(corpus.size());
        qc.spec.size = size;
        qc.spec.noise = noise;
        qc.spec.seed = base_seed;
        qc.exact = it->second;
        if (noise == NoiseType::kExact) {
          qc.noisy = qc.exact.graph;
        } else {
          const auto type = static_cast<uint64_t>(noise);
          qc.spec.noise_count = protocol.noise_count.value_or(
              static_cast<int>(DeriveSeed(base_seed, type, 1) % 2) + 1);
          QuerySpec edit = qc.spec;
          edit.seed = DeriveSeed(base_seed, type);
          auto perturbed = PerturbQuery(qc.exact.graph, edit, universe);
          qc.noisy = std::move(perturbed.graph);
          qc.warnings = std::move(perturbed.warnings);
        }
        corpus.push_back(std::move(qc));
      }
    }
  }
  return corpus;
}

void WriteQueryCorpus(const std::filesystem::path& dir, std::span<const QueryCase> corpus) {
  std::filesystem::create_directories(dir);
  std::ofstream manifest(dir / "manifest.csv");
  if (!manifest) throw std::runtime_error(fmt::format("cannot write manifest in '{}'", dir.string()));
  manifest << "query_id,size,noise_type,noise_count,seed,file,exact_file,provenance\n";
  for (const auto& qc : corpus) {
    const std::string file = fmt::format("q{:04d}.graph", qc.query_id);
    const std::string exact_file = fmt::format("q{:04d}.exact.graph", qc.query_id);
    SaveGraph(qc.noisy, dir / file);
    SaveGraph(qc.exact.graph, dir / exact_file);
    manifest << fmt::format("{},{},{},{},{},{},{},{}\n", qc.query_id, qc.spec.size,
                            NoiseName(qc.spec.noise), qc.spec.noise_count, qc.spec.seed, file,
                            exact_file, fmt::join(qc.exact.provenance, " "));
  }
  manifest.flush();
  if (!manifest) throw std::runtime_error("manifest write failed");
}

double BenchmarkReport::MeanAccuracy(NoiseType noise) const {
  double sum = 0.0;
  size_t count = 0;
  for (const auto& r : records) {
    if (r.noise != noise) continue;
    sum += r.accuracy;
    ++count;
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

BenchmarkReport RunBenchmark(const Matcher& matcher, const LabeledGraph& g,
                             std::span<const QueryCase> corpus, const BenchmarkProtocol& protocol) {
  BenchmarkReport report;
  report.records.resize(corpus.size());
  const bool parallel_queries = ResolveThreads(protocol.threads) > 1;
  const MatchOptions options{protocol.k, parallel_queries ? 1u : protocol.threads};
  ParallelChunks(corpus.size(), 1, protocol.threads, [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) {
      const auto& qc = corpus[i];
      const auto start = std::chrono::steady_clock::now();
      const auto matches = matcher.TopK(qc.noisy, options);
      const auto stop = std::chrono::steady_clock::now();
      QueryRecord& r = report.records[i];
      r.query_id = qc.query_id;
      r.size = qc.spec.size;
      r.noise = qc.spec.noise;
      r.noise_count = qc.spec.noise_count;
      r.seed = qc.spec.seed;
      r.latency_s = std::chrono::duration<double>(stop - start).count();
      if (!matches.empty()) {
        r.accuracy = EdgeRetrievalAccuracy(qc.exact.graph, matches.front(), g);
        r.matched_vertices = matches.front().pairs.size();
        r.matched_edges = matches.front().matched_edges.size();
      }
    }
  });

  std::map<std::pair<NoiseType, int>, GroupSummary> groups;
  double acc = 0.0, lat = 0.0;
  for (const auto& r : report.records) {
    auto& grp = groups[{r.noise, r.size}];
    grp.noise = r.noise;
    grp.size = r.size;
    ++grp.count;
    grp.mean_accuracy += r.accuracy;
    grp.mean_latency_s += r.latency_s;
    acc += r.accuracy;
    lat += r.latency_s;
  }
  for (auto& [key, grp] : groups) {
    grp.mean_accuracy /= static_cast<double>(grp.count);
    grp.mean_latency_s /= static_cast<double>(grp.count);
    report.groups.push_back(grp);
  }
  if (!report.records.empty()) {
    report.mean_accuracy = acc / static_cast<double>(report.records.size());
    report.mean_latency_s = lat / static_cast<double>(report.records.size());
  }
  return report;
}

BenchmarkReport RunBenchmark(const IndexSet& index, const BenchmarkProtocol& protocol) {
  const auto corpus = GenerateQueryCorpus(index.graph, protocol);
  return RunBenchmark(Matcher(index), index.graph, corpus, protocol);
}

void WriteReportCsv(std::ostream& out, const BenchmarkReport& report, bool redact_latency) {
  out << "query_id,size,noise_type,noise_count,seed,accuracy,latency_s,matched_vertices,matched_edges\n";
  for (const auto& r : report.records) {
    out << fmt::format("{},{},{},{},{},{},{},{},{}\n", r.query_id, r.size, NoiseName(r.noise),
                       r.noise_count, r.seed, r.accuracy,
                       redact_latency ? std::string("-") : fmt::format("{:.6f}", r.latency_s),
                       r.matched_vertices, r.matched_edges);
  }
}

}  // namespace chisub
