#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace fppcm {

using Vertex = std::uint32_t;
using HalfEdge = std::uint32_t;

/// Raises the last degree by one when the total is odd.
std::vector<std::int64_t> fix_parity(std::vector<std::int64_t> degrees);

/// Configuration-model multigraph stored as an involution on half-edges.
///
/// Half-edges of vertex i occupy the contiguous block [first(i), first(i+1)).
/// Self-loops and multi-edges are kept. Immutable once built.
class HalfEdgeGraph {
 public:
  /// Uniform random perfect matching by sequential pairing: the lowest unpaired
  /// half-edge is paired with a uniformly chosen other unpaired half-edge.
  /// Odd totals are fixed first (see fix_parity).
  static HalfEdgeGraph build(std::span<const std::int64_t> degrees, std::uint64_t seed);

  /// Graph with a prescribed pairing; `degrees` must already have an even sum.
  static HalfEdgeGraph from_pairing(std::vector<std::int64_t> degrees,
                                    std::vector<HalfEdge> mate);

  std::size_t num_vertices() const noexcept { return degrees_.size(); }
  std::size_t num_half_edges() const noexcept { return mate_.size(); }
  std::size_t num_edges() const noexcept { return mate_.size() / 2; }

  std::span<const std::int64_t> degrees() const noexcept { return degrees_; }
  std::int64_t degree(Vertex v) const { return degrees_[v]; }
  HalfEdge first(Vertex v) const { return offsets_[v]; }
  HalfEdge last(Vertex v) const { return offsets_[v + 1]; }

  HalfEdge mate(HalfEdge s) const { return mate_[s]; }
  Vertex owner(HalfEdge s) const { return owner_[s]; }
  /// Edges are numbered by increasing lower half-edge index.
  std::uint32_t edge_id(HalfEdge s) const { return edge_id_[s]; }
  /// Lower half-edge of edge e.
  HalfEdge edge_half_edge(std::uint32_t e) const { return edge_lo_[e]; }

  /// (owner(lo), owner(hi)) per edge in edge-id order.
  std::vector<std::pair<Vertex, Vertex>> edge_list() const;

 private:
  HalfEdgeGraph() = default;
  void index();

  std::vector<std::int64_t> degrees_;
  std::vector<HalfEdge> offsets_;
  std::vector<HalfEdge> mate_;
  std::vector<Vertex> owner_;
  std::vector<std::uint32_t> edge_id_;
  std::vector<HalfEdge> edge_lo_;
};

/// Breadth-first hop distance; nullopt when u and v are disconnected.
std::optional<std::uint32_t> graph_distance(const HalfEdgeGraph& g, Vertex u, Vertex v);

/// A set of disjoint half-edge pairs (s1,s2),(s3,s4),...
struct Matching {
  std::vector<std::pair<HalfEdge, HalfEdge>> pairs;
  friend bool operator==(const Matching&, const Matching&) = default;
};

/// Largest total degree accepted by enumerate_matchings.
inline constexpr std::int64_t kMatchingEnumerationLimit = 12;

/// All (L-1)!! perfect matchings of the (parity-fixed) half-edges, each exactly once,
/// with pairs listed as (lower, higher) and sorted by lower index.
std::vector<Matching> enumerate_matchings(std::span<const std::int64_t> degrees);

/// "u v" per line, 1-based, one line per edge (loops once).
void write_edge_list(std::ostream& out, const HalfEdgeGraph& g);
/// One degree per line.
void write_degree_sequence(std::ostream& out, std::span<const std::int64_t> degrees);

}  // namespace fppcm
