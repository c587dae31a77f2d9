#include "fppcm/graph.hpp"

#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

#include "fppcm/rng.hpp"

namespace fppcm {

namespace {
constexpr HalfEdge kUnpaired = std::numeric_limits<HalfEdge>::max();
}

std::vector<std::int64_t> fix_parity(std::vector<std::int64_t> degrees) {
  if (degrees.empty()) return degrees;
  const std::int64_t total = std::accumulate(degrees.begin(), degrees.end(), std::int64_t{0});
  if (total % 2 != 0) ++degrees.back();
  return degrees;
}

void HalfEdgeGraph::index() {
  const std::size_t n = degrees_.size();
  offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i)
    offsets_[i + 1] = offsets_[i] + static_cast<HalfEdge>(degrees_[i]);
  owner_.resize(offsets_[n]);
  for (std::size_t i = 0; i < n; ++i)
    for (HalfEdge s = offsets_[i]; s < offsets_[i + 1]; ++s) owner_[s] = static_cast<Vertex>(i);
  edge_id_.assign(mate_.size(), 0);
  edge_lo_.clear();
  edge_lo_.reserve(mate_.size() / 2);
  for (HalfEdge s = 0; s < mate_.size(); ++s) {
    if (s < mate_[s]) {
      edge_id_[s] = edge_id_[mate_[s]] = static_cast<std::uint32_t>(edge_lo_.size());
      edge_lo_.push_back(s);
    }
  }
}

namespace {

std::vector<std::int64_t> checked_degrees(std::span<const std::int64_t> degrees) {
  if (degrees.empty()) throw std::invalid_argument("configuration model: empty degree sequence");
  std::int64_t total = 0;
  for (std::int64_t d : degrees) {
    if (d < 1) throw std::invalid_argument(fmt::format("configuration model: degree {} < 1", d));
    total += d;
  }
  if (total + 1 >= static_cast<std::int64_t>(kUnpaired) ||
      degrees.size() >= std::numeric_limits<Vertex>::max())
    throw std::invalid_argument("configuration model: graph exceeds 32-bit half-edge indexing");
  return fix_parity({degrees.begin(), degrees.end()});
}

}  // namespace

HalfEdgeGraph HalfEdgeGraph::build(std::span<const std::int64_t> degrees, std::uint64_t seed) {
  HalfEdgeGraph g;
  g.degrees_ = checked_degrees(degrees);
  const auto total = static_cast<std::size_t>(
      std::accumulate(g.degrees_.begin(), g.degrees_.end(), std::int64_t{0}));

  std::vector<HalfEdge> pool(total);
  std::vector<HalfEdge> pos(total);
  std::iota(pool.begin(), pool.end(), HalfEdge{0});
  std::iota(pos.begin(), pos.end(), HalfEdge{0});
  auto remove = [&](HalfEdge x) {
    const HalfEdge i = pos[x];
    const HalfEdge moved = pool.back();
    pool[i] = moved;
    pos[moved] = i;
    pool.pop_back();
  };

  Rng rng(seed);
  g.mate_.assign(total, kUnpaired);
  for (HalfEdge s = 0; s < total; ++s) {
    if (g.mate_[s] != kUnpaired) continue;
    remove(s);
    const HalfEdge t = pool[uniform_index(rng, pool.size())];
    remove(t);
    g.mate_[s] = t;
    g.mate_[t] = s;
  }
  g.index();
  return g;
}

HalfEdgeGraph HalfEdgeGraph::from_pairing(std::vector<std::int64_t> degrees,
                                          std::vector<HalfEdge> mate) {
  HalfEdgeGraph g;
  g.degrees_ = checked_degrees(degrees);
  if (g.degrees_ != degrees)
    throw std::invalid_argument("from_pairing: degree sum must be even");
  const auto total = static_cast<std::size_t>(
      std::accumulate(g.degrees_.begin(), g.degrees_.end(), std::int64_t{0}));
  if (mate.size() != total) throw std::invalid_argument("from_pairing: pairing size mismatch");
  for (HalfEdge s = 0; s < total; ++s)
    if (mate[s] >= total || mate[s] == s || mate[mate[s]] != s)
      throw std::invalid_argument("from_pairing: not a fixed-point-free involution");
  g.mate_ = std::move(mate);
  g.index();
  return g;
}

std::vector<std::pair<Vertex, Vertex>> HalfEdgeGraph::edge_list() const {
  std::vector<std::pair<Vertex, Vertex>> out;
  out.reserve(edge_lo_.size());
  for (HalfEdge s : edge_lo_) out.emplace_back(owner_[s], owner_[mate_[s]]);
  return out;
}

std::optional<std::uint32_t> graph_distance(const HalfEdgeGraph& g, Vertex u, Vertex v) {
  if (u >= g.num_vertices() || v >= g.num_vertices())
    throw std::out_of_range("graph_distance: vertex out of range");
  if (u == v) return 0;
  constexpr std::uint32_t unseen = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> dist(g.num_vertices(), unseen);
  std::vector<Vertex> frontier{u};
  dist[u] = 0;
  for (std::size_t head = 0; head < frontier.size(); ++head) {
    const Vertex x = frontier[head];
    for (HalfEdge s = g.first(x); s < g.last(x); ++s) {
      const Vertex y = g.owner(g.mate(s));
      if (dist[y] != unseen) continue;
      dist[y] = dist[x] + 1;
      if (y == v) return dist[y];
      frontier.push_back(y);
    }
  }
  return std::nullopt;
}

namespace {

void enumerate_rec(std::vector<HalfEdge>& mate, std::vector<Matching>& out) {
  HalfEdge s = 0;
  while (s < mate.size() && mate[s] != kUnpaired) ++s;
  if (s == mate.size()) {
    Matching m;
    for (HalfEdge a = 0; a < mate.size(); ++a)
      if (a < mate[a]) m.pairs.emplace_back(a, mate[a]);
    out.push_back(std::move(m));
    return;
  }
  for (HalfEdge t = s + 1; t < mate.size(); ++t) {
    if (mate[t] != kUnpaired) continue;
    mate[s] = t;
    mate[t] = s;
    enumerate_rec(mate, out);
    mate[s] = mate[t] = kUnpaired;
  }
}

}  // namespace

std::vector<Matching> enumerate_matchings(std::span<const std::int64_t> degrees) {
  const auto fixed = checked_degrees(degrees);
  const std::int64_t total = std::accumulate(fixed.begin(), fixed.end(), std::int64_t{0});
  if (total > kMatchingEnumerationLimit)
    throw std::invalid_argument(fmt::format(
        "enumerate_matchings: L_n={} exceeds the enumeration limit {}", total,
        kMatchingEnumerationLimit));
  std::vector<HalfEdge> mate(static_cast<std::size_t>(total), kUnpaired);
  std::vector<Matching> out;
  enumerate_rec(mate, out);
  return out;
}

void write_edge_list(std::ostream& out, const HalfEdgeGraph& g) {
  for (auto [a, b] : g.edge_list()) out << fmt::format("{} {}\n", a + 1, b + 1);
}

void write_degree_sequence(std::ostream& out, std::span<const std::int64_t> degrees) {
  for (std::int64_t d : degrees) out << d << '\n';
}

}  // namespace fppcm
