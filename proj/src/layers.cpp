#include "fppcm/layers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

#include "fppcm/law_config.hpp"

namespace fppcm {

namespace {

constexpr double kLogTolerance = 1e-12;
constexpr double kProductTolerance = 1e-12;
constexpr std::size_t kMaxContinuation = 4096;

double exponent_denominator(const LayerSchedule& s, double log_y) {
  return s.tau - 2.0 + s.B * std::pow(log_y, s.gamma - 1.0);
}

void check_invariant(bool ok, const std::string& what) {
  if (!ok) throw std::logic_error("layer schedule invariant violated: " + what);
}

}  // namespace

double LayerSchedule::core_degree() const { return std::pow(n, alpha); }

double LayerSchedule::threshold(std::size_t i) const { return std::min(y.at(i), core_degree()); }

std::int64_t minimal_admissible_k(double tau, double gamma, double B) {
  const double log_k = std::pow(B / (3.0 - tau), 1.0 / (1.0 - gamma));
  const double guess = std::exp(log_k);
  if (!(guess < 9.0e18)) return std::numeric_limits<std::int64_t>::max();
  auto k = std::max<std::int64_t>(3, static_cast<std::int64_t>(std::floor(guess)) - 1);
  auto ok = [&](std::int64_t c) {
    return tau - 2.0 + B * std::pow(std::log(static_cast<double>(c)), gamma - 1.0) < 1.0;
  };
  while (!ok(k)) ++k;
  return k;
}

LayerSchedule make_schedule(std::int64_t k, double tau, double gamma, double B, double n,
                            double alpha) {
  if (k < 3) throw std::invalid_argument(fmt::format("make_schedule: k={} < 3", k));
  if (!(tau > 2.0 && tau < 3.0))
    throw std::invalid_argument(fmt::format("make_schedule: tau={} outside (2,3)", tau));
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument(fmt::format("make_schedule: gamma={} outside (0,1)", gamma));
  if (!(B > 0.0)) throw std::invalid_argument("make_schedule: B must be > 0");
  if (!(alpha > 0.5)) throw std::invalid_argument("make_schedule: alpha must be > 1/2");
  if (!(n >= 2.0)) throw std::invalid_argument("make_schedule: n must be >= 2");

  LayerSchedule s;
  s.k = k;
  s.tau = tau;
  s.gamma = gamma;
  s.B = B;
  s.n = n;
  s.alpha = alpha;
  const double log_k = std::log(static_cast<double>(k));
  s.delta = B * std::pow(log_k, gamma - 1.0);
  if (!(tau - 2.0 + s.delta < 1.0))
    throw std::invalid_argument(fmt::format(
        "make_schedule: tau-2+B(log k)^(gamma-1) = {} >= 1 so the schedule does not increase; "
        "the least admissible k is {}",
        tau - 2.0 + s.delta, minimal_admissible_k(tau, gamma, B)));

  const double log_core = alpha * std::log(n);
  s.log_y.push_back(log_k);
  while (s.log_y.back() < log_core) {
    const double t = s.log_y.back();
    s.log_y.push_back(t / exponent_denominator(s, t));
  }
  s.b_n = s.log_y.size() - 1;
  s.y.reserve(s.log_y.size());
  for (double t : s.log_y) s.y.push_back(std::exp(t));
  s.y.front() = static_cast<double>(k);

  // Monotonicity and the sandwich k^{(1/(tau-2+delta))^i} <= y_i <= k^{(1/(tau-2))^i}, in log space.
  for (std::size_t i = 0; i < s.log_y.size(); ++i) {
    const double slack = kLogTolerance * static_cast<double>(i + 1) * s.log_y[i];
    const double lower = log_k * std::pow(1.0 / (tau - 2.0 + s.delta), static_cast<double>(i));
    const double upper = log_k * std::pow(1.0 / (tau - 2.0), static_cast<double>(i));
    check_invariant(s.log_y[i] >= lower - slack, fmt::format("lower sandwich at i={}", i));
    check_invariant(s.log_y[i] <= upper + slack, fmt::format("upper sandwich at i={}", i));
    if (i > 0) check_invariant(s.log_y[i] > s.log_y[i - 1], fmt::format("monotone at i={}", i));
  }
  return s;
}

double schedule_product_constant(const LayerSchedule& s) {
  const double ratio = std::pow(s.tau - 2.0 + s.delta, 1.0 - s.gamma);
  const double scale = s.delta / (s.tau - 2.0);
  double product = 1.0;
  double geometric = 1.0;
  for (int j = 0; j < 100000; ++j) {
    const double factor = 1.0 + geometric * scale;
    product *= factor;
    if (factor - 1.0 < kProductTolerance) break;
    geometric *= ratio;
  }
  return product;
}

RefinedBound refined_lower_bound(const LayerSchedule& s) {
  RefinedBound out;
  const double M = 1.0 / schedule_product_constant(s);
  out.delta = 1.0 - M;
  const double log_k = s.log_y.front();
  for (std::size_t i = 0; i < s.log_y.size(); ++i) {
    const double bound = M * log_k * std::pow(1.0 / (s.tau - 2.0), static_cast<double>(i));
    const double slack = kLogTolerance * static_cast<double>(i + 1) * s.log_y[i];
    check_invariant(s.log_y[i] >= bound - slack, fmt::format("refined lower bound at i={}", i));
    out.log_bound.push_back(bound);
  }
  return out;
}

std::vector<double> attachment_failure_bound(const LayerSchedule& s, double Ln_over_n,
                                             const std::optional<DegreeLaw>& law) {
  if (!(Ln_over_n > 0.0)) throw std::invalid_argument("attachment_failure_bound: beta must be > 0");
  auto log_tail = [&](double log_x) {
    if (law) return std::log(law->survival(std::exp(log_x)));
    return -(s.tau - 1.0) * log_x;
  };
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < s.log_y.size(); ++i) {
    const double log_g = s.log_y[i + 1] + s.log_y[i] + log_tail(s.log_y[i + 1]) -
                         std::log(s.n * Ln_over_n);
    out.push_back(std::exp(-std::exp(log_g)));
  }
  const double total = std::accumulate(out.begin(), out.end(), 0.0);
  check_invariant(std::isfinite(total), "attachment failure sum not finite");
  return out;
}

// ------------------------------------------------------------ greedy walk

double LayerPath::total_excess() const {
  double total = 0.0;
  for (auto [a, b] : excess) total += a + b;
  return total;
}

namespace {

std::size_t layer_of(const LayerSchedule& s, double degree) {
  std::size_t i = 0;
  while (i + 1 < s.y.size() && degree >= s.threshold(i + 1)) ++i;
  return i;
}

template <class Degree, class Usable>
LayerPath greedy_walk(const HalfEdgeGraph& g, Vertex start, const LayerSchedule& s,
                      const WeightAssignment* weights, Degree degree, Usable usable) {
  if (start >= g.num_vertices()) throw std::out_of_range("greedy_layer_path: start out of range");
  if (static_cast<double>(degree(start)) < s.threshold(0))
    throw std::invalid_argument(fmt::format("greedy_layer_path: start degree {} below y_0={}",
                                            degree(start), s.k));
  const double core = s.core_degree();
  LayerPath path;
  Vertex x = start;
  for (;;) {
    const auto dx = degree(x);
    path.vertices.push_back(x);
    path.degrees.push_back(dx);
    path.layers.push_back(layer_of(s, static_cast<double>(dx)));
    if (static_cast<double>(dx) >= core) {
      path.status = PathStatus::ReachedCore;
      return path;
    }

    HalfEdge best = 0;
    bool found = false;
    std::int64_t best_degree = -1;
    double best_weight = 0.0;
    Vertex best_vertex = 0;
    for (HalfEdge h = g.first(x); h < g.last(x); ++h) {
      if (!usable(h)) continue;
      const Vertex y = g.owner(g.mate(h));
      if (y == x) continue;
      const std::int64_t dy = degree(y);
      const double wy = weights ? weights->edge_weight(g, h) : 0.0;
      if (!found || dy > best_degree ||
          (dy == best_degree && (wy < best_weight || (wy == best_weight && y < best_vertex)))) {
        found = true;
        best = h;
        best_degree = dy;
        best_weight = wy;
        best_vertex = y;
      }
    }
    const std::size_t next_layer = path.layers.back() + 1;
    if (!found || static_cast<double>(best_degree) < s.threshold(next_layer)) {
      path.status = PathStatus::Stuck;
      return path;
    }
    if (weights && weights->mode == WeightMode::PerHalfEdge)
      path.excess.emplace_back(weights->excess[best], weights->excess[g.mate(best)]);
    else if (weights)
      path.excess.emplace_back(weights->excess[g.edge_id(best)], 0.0);
    else
      path.excess.emplace_back(0.0, 0.0);
    x = best_vertex;
  }
}

}  // namespace

LayerPath greedy_layer_path(const PercolatedGraph& pg, Vertex start, const LayerSchedule& s,
                            const WeightAssignment* weights) {
  return greedy_walk(
      *pg.base, start, s, weights, [&](Vertex v) { return pg.drr[v]; },
      [&](HalfEdge h) { return pg.kept[h] != 0; });
}

LayerPath greedy_layer_path(const HalfEdgeGraph& g, Vertex start, const LayerSchedule& s,
                            const WeightAssignment* weights) {
  return greedy_walk(
      g, start, s, weights, [&](Vertex v) { return g.degree(v); },
      [](HalfEdge) { return true; });
}

// ------------------------------------------------------------ budget

ExcessBudget excess_budget(const LayerSchedule& s, const PercolationPolicy& policy) {
  ExcessBudget out;
  for (double t : s.log_y) out.terms.push_back(policy.threshold_at_log(t));
  out.total = std::accumulate(out.terms.begin(), out.terms.end(), 0.0);
  out.last_term_share = out.total > 0.0 ? out.terms.back() / out.total : 0.0;

  double t = s.log_y.back();
  for (std::size_t j = 0; j < kMaxContinuation; ++j) {
    t = t / exponent_denominator(s, t);
    if (!std::isfinite(t)) break;
    const double term = policy.threshold_at_log(t);
    out.continuation += term;
    if (term <= kProductTolerance * out.total) {
      out.cauchy = true;
      break;
    }
  }
  if (out.total == 0.0) out.cauchy = true;

  const auto& law = policy.threshold_law();
  if (law && !out.cauchy &&
      explosiveness_check(*law, 1.0, 1e-3, 1e12).verdict == Verdict::Explosive)
    throw std::logic_error(fmt::format(
        "excess budget: series for the explosive law {} did not settle", law->name()));
  return out;
}

double path_excess_bound(const LayerSchedule& s, const PercolationPolicy& policy) {
  const double budget = excess_budget(s, policy).total;
  const double slack =
      policy.threshold(s.core_degree()) - policy.threshold_at_log(s.log_y.back());
  return 2.0 * budget + 2.0 * std::max(0.0, slack);
}

void write_schedule_table(std::ostream& out, const LayerSchedule& s,
                          const PercolationPolicy* policy, double Ln_over_n) {
  const auto g = attachment_failure_bound(s, Ln_over_n);
  out << "i y_i xi_{y_i} exp(-g_i)\n";
  for (std::size_t i = 0; i < s.y.size(); ++i) {
    const std::string xi =
        policy && policy->has_threshold() ? format_decimal(policy->threshold_at_log(s.log_y[i]))
                                          : std::string("-");
    const std::string fail = i < g.size() ? format_decimal(g[i]) : std::string("-");
    out << fmt::format("{} {} {} {}\n", i, format_decimal(s.y[i]), xi, fail);
  }
}

}  // namespace fppcm
