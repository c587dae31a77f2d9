#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fppcm/distributions.hpp"
#include "fppcm/fpp.hpp"
#include "fppcm/graph.hpp"

namespace fppcm {

/// Degree-dependent retention p(d), nonincreasing in d, with an optional
/// weight-threshold view xi_d = F_X^{-1}(p(d)).
class PercolationPolicy {
 public:
  /// Lower-bound family p(d) >= b exp(-c (log d)^gamma).
  struct LowerBound {
    double b = 1.0;
    double c = 1.0;
    double gamma = 0.5;
  };

  static PercolationPolicy constant(double p);
  /// p(d) = min(1, exp(-Cp (log d)^gamma_p)).
  static PercolationPolicy stretched_exponential(double Cp, double gamma_p);

  double retention(double d) const;
  bool has_threshold() const noexcept { return threshold_law_.has_value(); }
  /// xi_d; throws when the policy carries no threshold law.
  double threshold(double d) const;
  /// xi_d given log d, for degrees past the double range.
  double threshold_at_log(double log_d) const;
  const std::optional<ExcessWeightLaw>& threshold_law() const noexcept { return threshold_law_; }
  const std::optional<LowerBound>& lower_bound() const noexcept { return lower_bound_; }
  double Cp() const noexcept { return Cp_; }
  double gamma_p() const noexcept { return gamma_p_; }

 private:
  friend PercolationPolicy policy_from_excess_law(const ExcessWeightLaw&, double, double);
  PercolationPolicy() = default;

  bool constant_ = true;
  double p_ = 1.0;
  double Cp_ = 0.0;
  double gamma_p_ = 0.5;
  std::optional<LowerBound> lower_bound_;
  std::optional<ExcessWeightLaw> threshold_law_;
};

/// p(d) = exp(-Cp (log d)^gamma_p) and xi_d = F_X^{-1}(p(d)).
PercolationPolicy policy_from_excess_law(const ExcessWeightLaw& law, double Cp, double gamma_p);

/// Result of either percolation. Induced edges are the base edges whose two
/// half-edges are both kept; discarded half-edges stand for artificial
/// degree-1 vertices and are never materialized.
struct PercolatedGraph {
  std::shared_ptr<const HalfEdgeGraph> base;
  std::vector<std::uint8_t> regular;  // per half-edge (all 1 for edge percolation)
  std::vector<std::uint8_t> kept;     // per half-edge, symmetric under mate
  std::vector<std::int64_t> dr;       // regular half-edges per vertex
  std::vector<std::int64_t> drr;      // regular half-edges paired to regular ones

  std::int64_t degree(Vertex v) const { return drr[v]; }
  std::size_t num_edges() const;
  /// Induced multigraph edges in base edge-id order.
  std::vector<std::pair<Vertex, Vertex>> edge_list() const;
};

/// Deterministic core of half-edge percolation: given the pairing and the regular flags.
PercolatedGraph percolate_with_flags(std::shared_ptr<const HalfEdgeGraph> g,
                                     std::vector<std::uint8_t> regular);
/// Deterministic core of edge percolation: given the per-edge keep mask (edge-id order).
PercolatedGraph percolate_with_edge_mask(std::shared_ptr<const HalfEdgeGraph> g,
                                         std::span<const std::uint8_t> keep_edge);

/// Each half-edge is regular independently with probability p(d_owner), then all
/// L_n half-edges are paired uniformly. The pairing uses `seed` exactly as
/// HalfEdgeGraph::build does, so p = 1 reproduces build(degrees, seed).
PercolatedGraph half_edge_percolate(std::span<const std::int64_t> degrees,
                                    const PercolationPolicy& policy, std::uint64_t seed);

/// Keeps edge (u,v) independently with probability p(d_u) p(d_v).
PercolatedGraph edge_percolate(std::shared_ptr<const HalfEdgeGraph> g,
                               const PercolationPolicy& policy, std::uint64_t seed);

/// Half-edge s is regular iff X_s <= xi_{d(owner(s))}. Needs per-half-edge weights.
PercolatedGraph thinning_view_percolate(std::shared_ptr<const HalfEdgeGraph> g,
                                        const WeightAssignment& w,
                                        const PercolationPolicy& policy);

/// Probability that the ordered pairs of `m` are formed by the sequential pairing
/// and all 2k half-edges are regular:
///   prod_i p(s_i) * prod_{i=1..k} 1/(L_n - 2i + 1).
double matching_probability(const Matching& m, std::span<const std::int64_t> degrees,
                            const PercolationPolicy& policy);

/// Induced multigraph as a sorted list of (min, max) vertex pairs.
using InducedEdgeSet = std::vector<std::pair<Vertex, Vertex>>;
using InducedLaw = std::map<InducedEdgeSet, double>;

/// Exact law of the induced multigraph under half-edge percolation, by
/// enumerating every matching and every regular-flag pattern.
InducedLaw exact_half_edge_law(std::span<const std::int64_t> degrees,
                               const PercolationPolicy& policy);
/// Same for edge percolation, enumerating every matching and every keep pattern.
InducedLaw exact_edge_law(std::span<const std::int64_t> degrees, const PercolationPolicy& policy);
double total_variation(const InducedLaw& a, const InducedLaw& b);

struct TailCheckReport {
  bool pass = true;
  std::optional<std::int64_t> first_violation;
  std::vector<std::string> failure_lines;  // one per violating x
  std::string summary;                     // "PASS x0=.. alpha=.. c=.."
};

/// Checks 1 - F_n(x) >= c x^{-(tau-1) + C (log x)^{gamma-1}} for every integer x
/// in [x0, n^alpha].
TailCheckReport empirical_tail_check(std::span<const std::int64_t> degrees, double tau,
                                     double gamma, double C, double c_const, std::int64_t x0,
                                     double alpha);

}  // namespace fppcm
