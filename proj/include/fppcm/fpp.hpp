#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fppcm/distributions.hpp"
#include "fppcm/graph.hpp"

namespace fppcm {

enum class WeightMode { PerEdge, PerHalfEdge };

/// Edge weights a + X_e (per edge) or a + X_s1 + X_s2 (per half-edge).
struct WeightAssignment {
  WeightMode mode = WeightMode::PerEdge;
  double base = 1.0;
  /// Indexed by edge id in PerEdge mode, by half-edge in PerHalfEdge mode.
  std::vector<double> excess;

  double edge_weight(const HalfEdgeGraph& g, HalfEdge s) const {
    if (mode == WeightMode::PerEdge) return base + excess[g.edge_id(s)];
    // Lower half-edge first so both directions round identically.
    const HalfEdge t = g.mate(s);
    return s < t ? base + excess[s] + excess[t] : base + excess[t] + excess[s];
  }
};

/// I.i.d. excess weights, drawn in edge-id or half-edge order.
WeightAssignment assign_weights(const HalfEdgeGraph& g, const ExcessWeightLaw& law,
                                WeightMode mode, std::uint64_t seed, double base = 1.0);

struct PathResult {
  double weight = 0.0;
  std::uint32_t hops = 0;
  std::vector<Vertex> path;  // u ... v
};

/// Smallest-weight u-v path. Ties: smaller hopcount, then lexicographically smaller
/// vertex sequence. Weights are accumulated from u in path order.
std::optional<PathResult> weight_distance(const HalfEdgeGraph& g, const WeightAssignment& w,
                                          Vertex u, Vertex v);

/// Largest graph accepted by brute_force_distance.
inline constexpr std::size_t kBruteForceVertexLimit = 10;

/// Exhaustive search over simple paths with the same tie-breaking contract.
std::optional<PathResult> brute_force_distance(const HalfEdgeGraph& g, const WeightAssignment& w,
                                               Vertex u, Vertex v);

}  // namespace fppcm
