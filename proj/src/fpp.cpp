#include "fppcm/fpp.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>
#include <tuple>

#include <fmt/format.h>

namespace fppcm {

WeightAssignment assign_weights(const HalfEdgeGraph& g, const ExcessWeightLaw& law,
                                WeightMode mode, std::uint64_t seed, double base) {
  WeightAssignment w;
  w.mode = mode;
  w.base = base;
  const std::size_t count = mode == WeightMode::PerEdge ? g.num_edges() : g.num_half_edges();
  w.excess.resize(count);
  Rng rng(seed);
  for (double& x : w.excess) x = law.sample(rng);
  return w;
}

namespace {

constexpr Vertex kNoVertex = std::numeric_limits<Vertex>::max();

void check_vertices(const HalfEdgeGraph& g, Vertex u, Vertex v) {
  if (u >= g.num_vertices() || v >= g.num_vertices())
    throw std::out_of_range("weight_distance: vertex out of range");
}

// Lexicographic comparison of the two root paths ending in a and b, which have equal length.
bool lex_less(const std::vector<Vertex>& pred, Vertex a, Vertex b) {
  while (a != b) {
    if (pred[a] == pred[b]) return a < b;
    a = pred[a];
    b = pred[b];
  }
  return false;
}

}  // namespace

std::optional<PathResult> weight_distance(const HalfEdgeGraph& g, const WeightAssignment& w,
                                          Vertex u, Vertex v) {
  check_vertices(g, u, v);
  if (u == v) return PathResult{0.0, 0, {u}};

  const std::size_t n = g.num_vertices();
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<std::uint32_t> hops(n, 0);
  std::vector<Vertex> pred(n, kNoVertex);
  std::vector<std::uint8_t> settled(n, 0);

  using Entry = std::tuple<double, std::uint32_t, Vertex>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  dist[u] = 0.0;
  heap.emplace(0.0, 0, u);

  while (!heap.empty()) {
    const auto [dx, hx, x] = heap.top();
    heap.pop();
    if (settled[x] || dx != dist[x] || hx != hops[x]) continue;
    settled[x] = 1;
    if (x == v) break;
    for (HalfEdge s = g.first(x); s < g.last(x); ++s) {
      const Vertex y = g.owner(g.mate(s));
      if (y == x || settled[y]) continue;
      const double dy = dx + w.edge_weight(g, s);
      const std::uint32_t hy = hx + 1;
      if (dy < dist[y] || (dy == dist[y] && hy < hops[y])) {
        dist[y] = dy;
        hops[y] = hy;
        pred[y] = x;
        heap.emplace(dy, hy, y);
      } else if (dy == dist[y] && hy == hops[y] && lex_less(pred, x, pred[y])) {
        pred[y] = x;
      }
    }
  }
  if (!settled[v]) return std::nullopt;

  PathResult out;
  out.weight = dist[v];
  out.hops = hops[v];
  for (Vertex x = v; x != kNoVertex; x = pred[x]) out.path.push_back(x);
  std::reverse(out.path.begin(), out.path.end());
  return out;
}

std::optional<PathResult> brute_force_distance(const HalfEdgeGraph& g, const WeightAssignment& w,
                                               Vertex u, Vertex v) {
  check_vertices(g, u, v);
  if (g.num_vertices() > kBruteForceVertexLimit)
    throw std::invalid_argument(fmt::format("brute_force_distance: n={} exceeds limit {}",
                                            g.num_vertices(), kBruteForceVertexLimit));
  if (u == v) return PathResult{0.0, 0, {u}};

  std::optional<PathResult> best;
  std::vector<Vertex> path{u};
  std::vector<std::uint8_t> on_path(g.num_vertices(), 0);
  on_path[u] = 1;

  auto better = [](const PathResult& a, const PathResult& b) {
    if (a.weight != b.weight) return a.weight < b.weight;
    if (a.hops != b.hops) return a.hops < b.hops;
    return a.path < b.path;
  };

  std::function<void(Vertex, double)> extend = [&](Vertex x, double acc) {
    for (HalfEdge s = g.first(x); s < g.last(x); ++s) {
      const Vertex y = g.owner(g.mate(s));
      if (on_path[y]) continue;
      const double total = acc + w.edge_weight(g, s);
      path.push_back(y);
      if (y == v) {
        PathResult candidate{total, static_cast<std::uint32_t>(path.size() - 1), path};
        if (!best || better(candidate, *best)) best = std::move(candidate);
      } else {
        on_path[y] = 1;
        extend(y, total);
        on_path[y] = 0;
      }
      path.pop_back();
    }
  };
  extend(u, 0.0);
  return best;
}

}  // namespace fppcm
