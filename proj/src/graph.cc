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

#include "chisub/graph.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

namespace chisub {

GraphParseError::GraphParseError(size_t line, const std::string& message)
    : std::runtime_error(fmt::format("line {}: {}", line, message)), line_(line) {}

LabelId LabelDictionary::Intern(std::string_view name) {
  auto it = ids_.find(std::string(name));
  if (it != ids_.end()) return it->second;
  auto id = static_cast<LabelId>(names_.size());
  names_.emplace_back(name);
  ids_.emplace(names_.back(), id);
  return id;
}

std::optional<LabelId> LabelDictionary::Find(std::string_view name) const {
  auto it = ids_.find(std::string(name));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

void Canonicalize(EdgeList& edges) {
  for (auto& e : edges) {
    if (e.u > e.w) std::swap(e.u, e.w);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
}

LabeledGraph LabeledGraph::FromEdges(LabelDictionary dictionary, std::vector<LabelId> labels,
                                     const EdgeList& edges) {
  const size_t n = labels.size();
  for (LabelId l : labels) {
    if (l >= dictionary.size()) {
      throw std::invalid_argument(fmt::format("label id {} not in dictionary", l));
    }
  }
  EdgeList canon = edges;
  for (const auto& e : canon) {
    if (e.u >= n || e.w >= n) {
      throw std::invalid_argument(fmt::format("edge ({}, {}) references a vertex >= {}", e.u, e.w, n));
    }
    if (e.u == e.w) throw std::invalid_argument(fmt::format("self-loop on vertex {}", e.u));
  }
  Canonicalize(canon);

  LabeledGraph g;
  g.dictionary_ = std::move(dictionary);
  g.labels_ = std::move(labels);
  std::vector<uint64_t> degree(n, 0);
  for (const auto& e : canon) {
    ++degree[e.u];
    ++degree[e.w];
  }
  g.offsets_.assign(n + 1, 0);
  for (size_t u = 0; u < n; ++u) g.offsets_[u + 1] = g.offsets_[u] + degree[u];
  g.neighbors_.resize(g.offsets_[n]);
  std::vector<uint64_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  // canon is sorted by (u, w): row x receives its smaller neighbors (as w)
  // before its larger ones (as u), each group ascending.
  for (const auto& e : canon) {
    g.neighbors_[cursor[e.u]++] = e.w;
    g.neighbors_[cursor[e.w]++] = e.u;
  }
  return g;
}

std::span<const VertexId> LabeledGraph::Neighbors(VertexId u) const {
  if (u >= num_vertices()) {
    throw std::out_of_range(fmt::format("vertex {} out of range (n = {})", u, num_vertices()));
  }
  return neighbors(u);
}

bool LabeledGraph::HasEdge(VertexId u, VertexId w) const {
  auto adj = neighbors(u);
  return std::binary_search(adj.begin(), adj.end(), w);
}

std::vector<LabelId> LabeledGraph::LabelUniverse() const {
  std::vector<LabelId> out(labels_.begin(), labels_.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

EdgeList LabeledGraph::Edges() const {
  EdgeList out;
  out.reserve(num_edges());
  for (VertexId u = 0; u < num_vertices(); ++u) {
    for (VertexId w : neighbors(u)) {
      if (u < w) out.push_back({u, w});
    }
  }
  return out;
}

LabeledGraph AlignLabels(const LabeledGraph& g, const LabelDictionary& base) {
  if (g.dictionary() == base) return g;
  LabelDictionary dict = base;
  std::vector<LabelId> labels(g.num_vertices());
  for (VertexId u = 0; u < g.num_vertices(); ++u) labels[u] = dict.Intern(g.LabelName(u));
  return LabeledGraph::FromEdges(std::move(dict), std::move(labels), g.Edges());
}

LabeledGraph InducedSubgraph(const LabeledGraph& g, std::span<const VertexId> vertices) {
  std::unordered_map<VertexId, VertexId> local;
  std::vector<LabelId> labels;
  labels.reserve(vertices.size());
  for (VertexId u : vertices) {
    local.emplace(u, static_cast<VertexId>(labels.size()));
    labels.push_back(g.label(u));
  }
  EdgeList edges;
  for (VertexId u : vertices) {
    for (VertexId w : g.neighbors(u)) {
      auto it = local.find(w);
      if (it != local.end() && u < w) edges.push_back({local[u], it->second});
    }
  }
  return LabeledGraph::FromEdges(g.dictionary(), std::move(labels), edges);
}

namespace {

std::vector<std::string_view> Tokenize(std::string_view line) {
  std::vector<std::string_view> tokens;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

uint64_t ParseId(std::string_view token, size_t line) {
  uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw GraphParseError(line, fmt::format("expected a non-negative integer, got '{}'", token));
  }
  return value;
}

}  // namespace

LabeledGraph ParseGraph(std::istream& in, LabelDictionary dictionary) {
  struct PendingEdge {
    uint64_t u, w;
    size_t line;
  };
  std::map<uint64_t, LabelId> vertex_labels;
  std::vector<PendingEdge> pending;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto tokens = Tokenize(line);
    if (tokens.empty() || tokens[0][0] == '#') continue;
    const auto kind = tokens[0];
    if (kind == "t") continue;
    if (kind == "v") {
      if (tokens.size() < 3) throw GraphParseError(line_no, "vertex line is missing its label");
      if (tokens.size() > 4) throw GraphParseError(line_no, "trailing tokens on vertex line");
      uint64_t id = ParseId(tokens[1], line_no);
      if (tokens.size() == 4) ParseId(tokens[3], line_no);
      if (!vertex_labels.emplace(id, dictionary.Intern(tokens[2])).second) {
        throw GraphParseError(line_no, fmt::format("vertex {} declared twice", id));
      }
    } else if (kind == "e") {
      if (tokens.size() != 3) throw GraphParseError(line_no, "edge line needs exactly two endpoints");
      uint64_t u = ParseId(tokens[1], line_no);
      uint64_t w = ParseId(tokens[2], line_no);
      if (u == w) throw GraphParseError(line_no, fmt::format("self-loop on vertex {}", u));
      pending.push_back({u, w, line_no});
    } else {
      throw GraphParseError(line_no, fmt::format("unknown record type '{}'", kind));
    }
  }

  if (vertex_labels.size() > std::numeric_limits<VertexId>::max()) {
    throw GraphParseError(line_no, "too many vertices");
  }
  std::unordered_map<uint64_t, VertexId> dense;
  std::vector<LabelId> labels;
  labels.reserve(vertex_labels.size());
  for (const auto& [id, label] : vertex_labels) {
    dense.emplace(id, static_cast<VertexId>(labels.size()));
    labels.push_back(label);
  }
  EdgeList edges;
  edges.reserve(pending.size());
  for (const auto& e : pending) {
    auto iu = dense.find(e.u);
    auto iw = dense.find(e.w);
    if (iu == dense.end() || iw == dense.end()) {
      throw GraphParseError(e.line, fmt::format("edge endpoint {} is not a declared vertex",
                                                iu == dense.end() ? e.u : e.w));
    }
    edges.push_back({iu->second, iw->second});
  }
  return LabeledGraph::FromEdges(std::move(dictionary), std::move(labels), edges);
}

LabeledGraph LoadGraph(const std::filesystem::path& path, LabelDictionary dictionary) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open graph file '{}'", path.string()));
  return ParseGraph(in, std::move(dictionary));
}

void WriteGraph(std::ostream& out, const LabeledGraph& g) {
  for (VertexId u = 0; u < g.num_vertices(); ++u) out << "v " << u << ' ' << g.LabelName(u) << '\n';
  for (const auto& e : g.Edges()) out << "e " << e.u << ' ' << e.w << '\n';
}

void SaveGraph(const LabeledGraph& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(fmt::format("cannot write graph file '{}'", path.string()));
  WriteGraph(out, g);
  out.flush();
  if (!out) throw std::runtime_error(fmt::format("write failed for '{}'", path.string()));
}

namespace {

struct Fnv1a {
  uint64_t state = 0xcbf29ce484222325ULL;

  void Byte(uint8_t b) {
    state ^= b;
    state *= 0x100000001b3ULL;
  }
  void U64(uint64_t v) {
    for (int i = 0; i < 8; ++i) Byte(static_cast<uint8_t>(v >> (8 * i)));
  }
  void Str(std::string_view s) {
    U64(s.size());
    for (char c : s) Byte(static_cast<uint8_t>(c));
  }
};

}  // namespace

uint64_t GraphDigest(const LabeledGraph& g) {
  Fnv1a h;
  h.U64(g.num_vertices());
  for (VertexId u = 0; u < g.num_vertices(); ++u) h.Str(g.LabelName(u));
  h.U64(g.num_edges());
  for (const auto& e : g.Edges()) {
    h.U64(e.u);
    h.U64(e.w);
  }
  return h.state;
}

std::vector<std::vector<VertexId>> ConnectedComponents(const LabeledGraph& g) {
  const size_t n = g.num_vertices();
  std::vector<bool> seen(n, false);
  std::vector<std::vector<VertexId>> out;
  std::vector<VertexId> stack;
  for (VertexId s = 0; s < n; ++s) {
    if (seen[s]) continue;
    std::vector<VertexId> comp;
    stack.push_back(s);
    seen[s] = true;
    while (!stack.empty()) {
      VertexId u = stack.back();
      stack.pop_back();
      comp.push_back(u);
      for (VertexId w : g.neighbors(u)) {
        if (!seen[w]) {
          seen[w] = true;
          stack.push_back(w);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

}  // namespace chisub
