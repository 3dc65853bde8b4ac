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

#include "chisub/index.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <random>

#include <fmt/format.h>

#include "chisub/parallel.h"
#include "chisub/similarity.h"

namespace chisub {

GraphIndexes BuildIndexes(const LabeledGraph& g) { return BuildIndexes(g, g.dictionary().size()); }

GraphIndexes BuildIndexes(const LabeledGraph& g, size_t width) {
  const size_t n = g.num_vertices();
  GraphIndexes out;

  out.il.lists.resize(std::max(width, g.dictionary().size()));
  for (VertexId u = 0; u < n; ++u) out.il.lists[g.label(u)].push_back(u);

  out.lnl.offsets.assign(n + 1, 0);
  out.lnl.labels.reserve(g.adjacency().size());
  for (VertexId u = 0; u < n; ++u) {
    for (VertexId w : g.neighbors(u)) out.lnl.labels.push_back(g.label(w));
    std::sort(out.lnl.labels.begin() + out.lnl.offsets[u], out.lnl.labels.end());
    out.lnl.offsets[u + 1] = out.lnl.labels.size();
  }

  auto& lcv = out.lcv;
  lcv.width = width;
  lcv.counts.assign(n * width, 0);
  lcv.foreign.assign(n, 0);
  lcv.foreign_distinct.assign(n, 0);
  std::vector<LabelId> unknown;
  for (VertexId u = 0; u < n; ++u) {
    unknown.clear();
    auto bump = [&](LabelId l) {
      if (l < width) {
        ++lcv.counts[u * width + l];
      } else {
        unknown.push_back(l);
      }
    };
    bump(g.label(u));
    for (LabelId l : out.lnl.Labels(u)) bump(l);
    std::sort(unknown.begin(), unknown.end());
    lcv.foreign[u] = static_cast<uint32_t>(unknown.size());
    lcv.foreign_distinct[u] =
        static_cast<uint32_t>(std::unique(unknown.begin(), unknown.end()) - unknown.begin());
  }
  return out;
}

namespace {

// Count, mean, M2 (sum of squared deviations), min, max of a group.
struct Moments {
  uint64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();

  static Moments Of(std::span<const double> values) {
    Moments m;
    if (values.empty()) return m;
    m.count = values.size();
    double sum = 0.0;
    for (double v : values) {
      sum += v;
      m.min = std::min(m.min, v);
      m.max = std::max(m.max, v);
    }
    m.mean = sum / static_cast<double>(m.count);
    for (double v : values) m.m2 += (v - m.mean) * (v - m.mean);
    return m;
  }

  void Merge(const Moments& other) {
    if (other.count == 0) return;
    if (count == 0) {
      *this = other;
      return;
    }
    const double na = static_cast<double>(count);
    const double nb = static_cast<double>(other.count);
    const double n = na + nb;
    const double d = other.mean - mean;
    mean += d * nb / n;
    m2 += other.m2 + d * d * na * nb / n;
    count += other.count;
    min = std::min(min, other.min);
    max = std::max(max, other.max);
  }
};

DistributionStats Finish(const Moments& m) {
  DistributionStats s;
  s.pair_count = m.count;
  if (m.max == m.min) {
    s.psi = m.max;
    return s;
  }
  s.psi = m.mean;
  s.delta = std::sqrt(m.m2 / static_cast<double>(m.count - 1));
  s.max_dev = s.delta > 0.0 ? std::max(m.max - s.psi, s.psi - m.min) / s.delta : 0.0;
  return s;
}

constexpr size_t kRowsPerChunk = 32;
constexpr size_t kPairsPerSampleChunk = 1 << 14;

}  // namespace

DistributionStats ComputeDistribution(const LabelCountVector& lcv, const SimilarityParams& params,
                                      const DistributionOptions& options) {
  const uint64_t n = lcv.num_vertices();
  if (n < 2) {
    throw DegenerateStatsError(fmt::format("distribution needs at least 2 vertices, got {}", n));
  }
  if (!(params.gamma >= 1.0) || !std::isfinite(params.gamma)) {
    throw std::invalid_argument(fmt::format("gamma must be >= 1, got {}", params.gamma));
  }
  const uint64_t total = n * (n - 1);
  auto eta = [&](uint64_t u, uint64_t w) {
    return VertexSimilarity(lcv.Row(static_cast<VertexId>(u)), lcv.Row(static_cast<VertexId>(w)),
                            params, lcv.Foreign(static_cast<VertexId>(w), params.mode));
  };

  if (options.sample_pairs && *options.sample_pairs == 0) {
    throw std::invalid_argument("sample_pairs must be positive");
  }
  const bool sampled = options.sample_pairs && *options.sample_pairs < total;

  Moments all;
  if (!sampled) {
    std::vector<Moments> rows(n);
    ParallelChunks(n, kRowsPerChunk, options.threads, [&](size_t begin, size_t end) {
      std::vector<double> buf;
      buf.reserve(n - 1);
      for (size_t u = begin; u < end; ++u) {
        buf.clear();
        for (uint64_t w = 0; w < n; ++w) {
          if (w != u) buf.push_back(eta(u, w));
        }
        rows[u] = Moments::Of(buf);
      }
    });
    for (const auto& r : rows) all.Merge(r);
  } else {
    const uint64_t p = *options.sample_pairs;
    const size_t num_chunks = (p + kPairsPerSampleChunk - 1) / kPairsPerSampleChunk;
    std::vector<Moments> chunks(num_chunks);
    ParallelChunks(num_chunks, 1, options.threads, [&](size_t begin, size_t end) {
      std::vector<double> buf;
      for (size_t c = begin; c < end; ++c) {
        const uint64_t lo = c * kPairsPerSampleChunk;
        const uint64_t hi = std::min<uint64_t>(p, lo + kPairsPerSampleChunk);
        std::mt19937_64 rng(DeriveSeed(options.seed, c));
        std::uniform_int_distribution<uint64_t> pick(0, total - 1);
        buf.clear();
        for (uint64_t i = lo; i < hi; ++i) {
          const uint64_t r = pick(rng);
          const uint64_t u = r / (n - 1);
          uint64_t w = r % (n - 1);
          if (w >= u) ++w;
          buf.push_back(eta(u, w));
        }
        chunks[c] = Moments::Of(buf);
      }
    });
    for (const auto& ch : chunks) all.Merge(ch);
  }

  DistributionStats stats = Finish(all);
  stats.sampled = sampled;
  stats.seed = options.seed;
  return stats;
}

size_t SymbolCount(double max_dev, double kappa) {
  const double raw = std::ceil((max_dev - 1.0) / kappa);
  if (!(raw >= 1.0)) return 1;
  // Guard against absurd tables from a tiny kappa on a heavy-tailed graph.
  constexpr double kMaxSymbols = 1e8;
  if (raw > kMaxSymbols) {
    throw std::invalid_argument(
        fmt::format("kappa {} yields {} symbols; increase kappa", kappa, raw));
  }
  return static_cast<size_t>(raw);
}

SymbolTable BuildSymbolTable(const DistributionStats& stats, double kappa) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) {
    throw std::invalid_argument(fmt::format("kappa must be > 0, got {}", kappa));
  }
  const size_t tau = SymbolCount(stats.max_dev, kappa);
  SymbolTable table;
  table.kappa = kappa;
  table.probabilities.assign(tau, 0.0);
  // Kahan-summed tail mass of symbols 2..tau.
  double tail = 0.0, carry = 0.0;
  for (size_t i = 2; i <= tau; ++i) {
    const double lo = 1.0 + static_cast<double>(i - 1) * kappa;
    const double hi = 1.0 + static_cast<double>(i) * kappa;
    const double p = 0.5 * (1.0 / (lo * lo) - 1.0 / (hi * hi));
    table.probabilities[i - 1] = p;
    const double y = p - carry;
    const double t = tail + y;
    carry = (t - tail) - y;
    tail = t;
  }
  table.probabilities[0] = 1.0 - tail;
  return table;
}

IndexSet BuildIndexSet(LabeledGraph g, const IndexConfig& config) {
  IndexSet out;
  out.indexes = BuildIndexes(g);
  out.stats = ComputeDistribution(out.indexes.lcv, config.similarity, config.distribution);
  out.symbols = BuildSymbolTable(out.stats, config.kappa);
  out.similarity = config.similarity;
  out.graph_digest = GraphDigest(g);
  out.graph = std::move(g);
  return out;
}

// ---------------------------------------------------------------------------
// Binary persistence. All integers little-endian fixed width, reals as the
// IEEE-754 bit pattern in a u64.

namespace {

constexpr char kMagic[8] = {'C', 'H', 'S', 'Q', 'I', 'D', 'X', '\0'};

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void U8(uint8_t v) { out_.put(static_cast<char>(v)); }
  void U32(uint32_t v) {
    for (int i = 0; i < 4; ++i) U8(static_cast<uint8_t>(v >> (8 * i)));
  }
  void U64(uint64_t v) {
    for (int i = 0; i < 8; ++i) U8(static_cast<uint8_t>(v >> (8 * i)));
  }
  void F64(double v) { U64(std::bit_cast<uint64_t>(v)); }
  void Str(const std::string& s) {
    U32(static_cast<uint32_t>(s.size()));
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  template <typename T>
  void U32s(const std::vector<T>& v) {
    U64(v.size());
    for (auto x : v) U32(static_cast<uint32_t>(x));
  }
  void U64s(const std::vector<uint64_t>& v) {
    U64(v.size());
    for (auto x : v) U64(x);
  }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  uint8_t U8() {
    char c;
    if (!in_.get(c)) throw IndexFormatError("index file is truncated");
    return static_cast<uint8_t>(c);
  }
  uint32_t U32() {
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(U8()) << (8 * i);
    return v;
  }
  uint64_t U64() {
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(U8()) << (8 * i);
    return v;
  }
  double F64() { return std::bit_cast<double>(U64()); }
  std::string Str() {
    const uint32_t len = U32();
    std::string s(len, '\0');
    if (!in_.read(s.data(), len)) throw IndexFormatError("index file is truncated");
    return s;
  }
  uint64_t Length(uint64_t limit) {
    const uint64_t len = U64();
    if (len > limit) throw IndexFormatError(fmt::format("implausible length {} in index file", len));
    return len;
  }
  template <typename T>
  std::vector<T> U32s(uint64_t limit) {
    std::vector<T> v(Length(limit));
    for (auto& x : v) x = static_cast<T>(U32());
    return v;
  }
  std::vector<uint64_t> U64s(uint64_t limit) {
    std::vector<uint64_t> v(Length(limit));
    for (auto& x : v) x = U64();
    return v;
  }

 private:
  std::istream& in_;
};

constexpr uint64_t kMaxLength = uint64_t{1} << 40;

}  // namespace

void WriteIndex(std::ostream& out, const IndexSet& index) {
  Writer w(out);
  out.write(kMagic, sizeof(kMagic));
  w.U32(kIndexFormatVersion);
  w.U64(index.graph_digest);
  w.F64(index.similarity.gamma);
  w.F64(index.symbols.kappa);
  w.U8(static_cast<uint8_t>(index.similarity.mode));

  const auto& g = index.graph;
  w.U64(g.dictionary().size());
  for (const auto& name : g.dictionary().names()) w.Str(name);
  w.U64(g.num_vertices());
  for (LabelId l : g.labels()) w.U32(l);
  EdgeList edges = g.Edges();
  w.U64(edges.size());
  for (const auto& e : edges) {
    w.U32(e.u);
    w.U32(e.w);
  }

  const auto& ix = index.indexes;
  w.U64(ix.il.lists.size());
  for (const auto& list : ix.il.lists) w.U32s(list);
  w.U64s(ix.lnl.offsets);
  w.U32s(ix.lnl.labels);
  w.U64(ix.lcv.width);
  w.U32s(ix.lcv.counts);
  w.U32s(ix.lcv.foreign);
  w.U32s(ix.lcv.foreign_distinct);

  const auto& s = index.stats;
  w.F64(s.psi);
  w.F64(s.delta);
  w.F64(s.max_dev);
  w.U64(s.pair_count);
  w.U8(s.sampled ? 1 : 0);
  w.U64(s.seed);

  w.U64(index.symbols.probabilities.size());
  for (double p : index.symbols.probabilities) w.F64(p);
}

void SaveIndex(const IndexSet& index, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write index file '{}'", path.string()));
  WriteIndex(out, index);
  out.flush();
  if (!out) throw std::runtime_error(fmt::format("write failed for '{}'", path.string()));
}

IndexSet ReadIndex(std::istream& in, const LabeledGraph* expected) {
  char magic[sizeof(kMagic)];
  if (!in.read(magic, sizeof(magic)) || !std::equal(magic, magic + sizeof(magic), kMagic)) {
    throw IndexFormatError("not an index file (bad magic bytes)");
  }
  Reader r(in);
  const uint32_t version = r.U32();
  if (version != kIndexFormatVersion) {
    throw IndexFormatError(
        fmt::format("index format version {} unsupported (expected {})", version, kIndexFormatVersion));
  }
  IndexSet index;
  index.graph_digest = r.U64();
  index.similarity.gamma = r.F64();
  index.symbols.kappa = r.F64();
  const uint8_t mode = r.U8();
  if (mode > 1) throw IndexFormatError("unknown neighborhood mode");
  index.similarity.mode = static_cast<NeighborhoodMode>(mode);

  LabelDictionary dict;
  const uint64_t num_labels = r.Length(kMaxLength);
  for (uint64_t i = 0; i < num_labels; ++i) {
    if (dict.Intern(r.Str()) != i) throw IndexFormatError("duplicate label in dictionary");
  }
  std::vector<LabelId> labels = r.U32s<LabelId>(kMaxLength);
  const uint64_t num_edges = r.Length(kMaxLength);
  EdgeList edges(num_edges);
  for (auto& e : edges) {
    e.u = r.U32();
    e.w = r.U32();
  }
  try {
    index.graph = LabeledGraph::FromEdges(std::move(dict), std::move(labels), edges);
  } catch (const std::invalid_argument& e) {
    throw IndexFormatError(fmt::format("corrupt graph section: {}", e.what()));
  }

  auto& ix = index.indexes;
  ix.il.lists.resize(r.Length(kMaxLength));
  for (auto& list : ix.il.lists) list = r.U32s<VertexId>(kMaxLength);
  ix.lnl.offsets = r.U64s(kMaxLength);
  ix.lnl.labels = r.U32s<LabelId>(kMaxLength);
  ix.lcv.width = r.Length(kMaxLength);
  ix.lcv.counts = r.U32s<uint32_t>(kMaxLength);
  ix.lcv.foreign = r.U32s<uint32_t>(kMaxLength);
  ix.lcv.foreign_distinct = r.U32s<uint32_t>(kMaxLength);

  auto& s = index.stats;
  s.psi = r.F64();
  s.delta = r.F64();
  s.max_dev = r.F64();
  s.pair_count = r.U64();
  s.sampled = r.U8() != 0;
  s.seed = r.U64();

  index.symbols.probabilities.resize(r.Length(kMaxLength));
  for (double& p : index.symbols.probabilities) p = r.F64();

  const size_t n = index.graph.num_vertices();
  if (ix.lnl.offsets.size() != n + 1 || ix.lcv.foreign.size() != n ||
      ix.lcv.foreign_distinct.size() != n ||
      ix.lcv.counts.size() != n * ix.lcv.width || index.symbols.probabilities.empty()) {
    throw IndexFormatError("index sections are inconsistent with the graph");
  }
  if (GraphDigest(index.graph) != index.graph_digest) {
    throw DigestMismatchError("embedded graph does not match the stored digest");
  }
  if (expected != nullptr && GraphDigest(*expected) != index.graph_digest) {
    throw DigestMismatchError(
        fmt::format("graph digest {:016x} does not match index digest {:016x}", GraphDigest(*expected),
                    index.graph_digest));
  }
  return index;
}

IndexSet LoadIndex(const std::filesystem::path& path, const LabeledGraph* expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot open index file '{}'", path.string()));
  return ReadIndex(in, expected);
}

}  // namespace chisub
