#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "fppcm/distributions.hpp"
#include "fppcm/fpp.hpp"
#include "fppcm/graph.hpp"
#include "fppcm/percolation.hpp"

namespace fppcm {

/// Degree thresholds y_0 = k, y_{i+1} = y_i^{1/(tau-2+B(log y_i)^{gamma-1})},
/// generated until y_i >= n^alpha. b_n is the index of that first crossing.
struct LayerSchedule {
  std::int64_t k = 0;
  double tau = 2.5;
  double gamma = 0.5;
  double B = 0.1;
  double n = 0.0;
  double alpha = 0.6;
  /// B (log k)^{gamma-1}; the exponent denominators all lie in [tau-2, tau-2+delta].
  double delta = 0.0;
  std::vector<double> log_y;
  std::vector<double> y;
  std::size_t b_n = 0;

  double core_degree() const;  // n^alpha
  /// min(y_i, n^alpha): the degree a vertex needs to count as being in layer i.
  double threshold(std::size_t i) const;
};

/// Throws std::invalid_argument on bad parameters, naming the least admissible k
/// when tau-2+B(log k)^{gamma-1} >= 1.
LayerSchedule make_schedule(std::int64_t k, double tau, double gamma, double B, double n,
                            double alpha);

/// Smallest integer k >= 3 with tau-2+B(log k)^{gamma-1} < 1.
std::int64_t minimal_admissible_k(double tau, double gamma, double B);

/// M_k^{-1} = prod_{j>=0} (1 + (tau-2+delta)^{j(1-gamma)} B (log k)^{gamma-1}/(tau-2)),
/// truncated once a factor moves the product by less than 1e-12.
double schedule_product_constant(const LayerSchedule& s);

struct RefinedBound {
  double delta = 0.0;  // 1 - M_k
  std::vector<double> log_bound;  // log of (y_0^{1-delta})^{(tau-2)^{-i}}
};

/// Lower bound y_i >= (y_0^{1-delta})^{(tau-2)^{-i}} with delta = 1 - M_k; checked index-wise.
RefinedBound refined_lower_bound(const LayerSchedule& s);

/// exp(-g_i), g_i = y_{i+1} y_i [1 - F(y_{i+1})] / (n beta), for i = 0..b_n-1.
/// Without an explicit law the tail is x^{-(tau-1)} with the schedule's tau.
std::vector<double> attachment_failure_bound(const LayerSchedule& s, double Ln_over_n,
                                             const std::optional<DegreeLaw>& law = std::nullopt);

enum class PathStatus { ReachedCore, Stuck };

struct LayerPath {
  std::vector<Vertex> vertices;
  std::vector<std::int64_t> degrees;
  std::vector<std::size_t> layers;  // largest i with degree >= threshold(i)
  /// Excess weights of the two half-edges of each traversed edge, in path order.
  /// Per-edge weights report (X_e, 0).
  std::vector<std::pair<double, double>> excess;
  PathStatus status = PathStatus::Stuck;

  double total_excess() const;
};

/// Greedy walk toward the core: from a vertex in layer i, step to the neighbor of
/// maximum degree (ties: least edge weight, then lowest id). The walk is Stuck if
/// that neighbor does not reach layer i+1 and ReachedCore once degree >= n^alpha.
/// Self-loops are never followed.
LayerPath greedy_layer_path(const PercolatedGraph& pg, Vertex start, const LayerSchedule& s,
                            const WeightAssignment* weights = nullptr);
LayerPath greedy_layer_path(const HalfEdgeGraph& g, Vertex start, const LayerSchedule& s,
                            const WeightAssignment* weights = nullptr);

struct ExcessBudget {
  std::vector<double> terms;  // xi_{y_i}, i = 0..b_n
  double total = 0.0;
  double last_term_share = 0.0;
  /// Sum of xi_{y_i} over i > b_n along the continued recursion, as far as it was followed.
  double continuation = 0.0;
  /// True when the continued terms fell below 1e-12 of the total.
  bool cauchy = false;
};

/// sum_{i=0}^{b_n} xi_{y_i}. When the policy's threshold law is explosive the
/// continuation must settle (cauchy), otherwise std::logic_error.
ExcessBudget excess_budget(const LayerSchedule& s, const PercolationPolicy& policy);

/// Deterministic bound on the excess along a greedy path in the thinning view:
/// 2 * budget + 2 (xi_{n^alpha} - xi_{y_{b_n}}).
double path_excess_bound(const LayerSchedule& s, const PercolationPolicy& policy);

/// Rows "i y_i xi_{y_i} exp(-g_i)"; the last row has no g.
void write_schedule_table(std::ostream& out, const LayerSchedule& s,
                          const PercolationPolicy* policy, double Ln_over_n);

}  // namespace fppcm
