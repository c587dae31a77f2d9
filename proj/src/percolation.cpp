#include "fppcm/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include <fmt/format.h>

#include "fppcm/law_config.hpp"
#include "fppcm/rng.hpp"

namespace fppcm {

// ------------------------------------------------------------ policy

PercolationPolicy PercolationPolicy::constant(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("percolation: p outside [0,1]");
  PercolationPolicy policy;
  policy.constant_ = true;
  policy.p_ = p;
  return policy;
}

PercolationPolicy PercolationPolicy::stretched_exponential(double Cp, double gamma_p) {
  if (!(Cp > 0.0)) throw std::invalid_argument("percolation: Cp must be > 0");
  if (!(gamma_p > 0.0 && gamma_p < 1.0))
    throw std::invalid_argument(fmt::format("percolation: gamma_p={} outside (0,1)", gamma_p));
  PercolationPolicy policy;
  policy.constant_ = false;
  policy.Cp_ = Cp;
  policy.gamma_p_ = gamma_p;
  policy.lower_bound_ = LowerBound{1.0, Cp, gamma_p};
  return policy;
}

double PercolationPolicy::retention(double d) const {
  if (constant_) return p_;
  if (d <= 1.0) return 1.0;
  return std::min(1.0, std::exp(-Cp_ * std::pow(std::log(d), gamma_p_)));
}

double PercolationPolicy::threshold(double d) const {
  if (!threshold_law_) throw std::logic_error("percolation: policy has no threshold view");
  return threshold_at_log(d <= 1.0 ? 0.0 : std::log(d));
}

double PercolationPolicy::threshold_at_log(double log_d) const {
  if (!threshold_law_) throw std::logic_error("percolation: policy has no threshold view");
  if (constant_) return threshold_law_->quantile(p_);
  if (log_d <= 0.0) return threshold_law_->quantile(1.0);
  return threshold_law_->quantile_from_log(-Cp_ * std::pow(log_d, gamma_p_));
}

PercolationPolicy policy_from_excess_law(const ExcessWeightLaw& law, double Cp, double gamma_p) {
  PercolationPolicy policy = PercolationPolicy::stretched_exponential(Cp, gamma_p);
  policy.threshold_law_ = law;
  return policy;
}

// ------------------------------------------------------------ percolated graph

std::size_t PercolatedGraph::num_edges() const {
  return static_cast<std::size_t>(std::accumulate(drr.begin(), drr.end(), std::int64_t{0}) / 2);
}

std::vector<std::pair<Vertex, Vertex>> PercolatedGraph::edge_list() const {
  std::vector<std::pair<Vertex, Vertex>> out;
  for (std::uint32_t e = 0; e < base->num_edges(); ++e) {
    const HalfEdge s = base->edge_half_edge(e);
    if (kept[s]) out.emplace_back(base->owner(s), base->owner(base->mate(s)));
  }
  return out;
}

namespace {

void count_degrees(PercolatedGraph& pg) {
  const HalfEdgeGraph& g = *pg.base;
  pg.dr.assign(g.num_vertices(), 0);
  pg.drr.assign(g.num_vertices(), 0);
  for (HalfEdge s = 0; s < g.num_half_edges(); ++s) {
    pg.dr[g.owner(s)] += pg.regular[s];
    pg.drr[g.owner(s)] += pg.kept[s];
  }
}

// p(d) evaluated once per distinct degree.
std::vector<double> half_edge_retention(const HalfEdgeGraph& g, const PercolationPolicy& policy) {
  std::unordered_map<std::int64_t, double> memo;
  std::vector<double> p(g.num_vertices());
  for (Vertex v = 0; v < g.num_vertices(); ++v) {
    auto [it, fresh] = memo.try_emplace(g.degree(v), 0.0);
    if (fresh) it->second = policy.retention(static_cast<double>(g.degree(v)));
    p[v] = it->second;
  }
  return p;
}

}  // namespace

PercolatedGraph percolate_with_flags(std::shared_ptr<const HalfEdgeGraph> g,
                                     std::vector<std::uint8_t> regular) {
  if (regular.size() != g->num_half_edges())
    throw std::invalid_argument("percolate_with_flags: flag count mismatch");
  PercolatedGraph pg;
  pg.base = std::move(g);
  pg.regular = std::move(regular);
  pg.kept.resize(pg.regular.size());
  for (HalfEdge s = 0; s < pg.regular.size(); ++s)
    pg.kept[s] = pg.regular[s] && pg.regular[pg.base->mate(s)];
  count_degrees(pg);
  return pg;
}

PercolatedGraph percolate_with_edge_mask(std::shared_ptr<const HalfEdgeGraph> g,
                                         std::span<const std::uint8_t> keep_edge) {
  if (keep_edge.size() != g->num_edges())
    throw std::invalid_argument("percolate_with_edge_mask: mask size mismatch");
  PercolatedGraph pg;
  pg.base = std::move(g);
  pg.regular.assign(pg.base->num_half_edges(), 1);
  pg.kept.resize(pg.base->num_half_edges());
  for (HalfEdge s = 0; s < pg.kept.size(); ++s) pg.kept[s] = keep_edge[pg.base->edge_id(s)] ? 1 : 0;
  count_degrees(pg);
  return pg;
}

PercolatedGraph half_edge_percolate(std::span<const std::int64_t> degrees,
                                    const PercolationPolicy& policy, std::uint64_t seed) {
  auto g = std::make_shared<const HalfEdgeGraph>(HalfEdgeGraph::build(degrees, seed));
  const auto p = half_edge_retention(*g, policy);
  Rng rng(derive_seed(seed, 0x666c616773ULL));
  std::vector<std::uint8_t> regular(g->num_half_edges());
  for (HalfEdge s = 0; s < regular.size(); ++s) regular[s] = uniform01(rng) < p[g->owner(s)];
  return percolate_with_flags(std::move(g), std::move(regular));
}

PercolatedGraph edge_percolate(std::shared_ptr<const HalfEdgeGraph> g,
                               const PercolationPolicy& policy, std::uint64_t seed) {
  const auto p = half_edge_retention(*g, policy);
  Rng rng(seed);
  std::vector<std::uint8_t> keep(g->num_edges());
  for (std::uint32_t e = 0; e < keep.size(); ++e) {
    const HalfEdge s = g->edge_half_edge(e);
    keep[e] = uniform01(rng) < p[g->owner(s)] * p[g->owner(g->mate(s))];
  }
  return percolate_with_edge_mask(std::move(g), keep);
}

PercolatedGraph thinning_view_percolate(std::shared_ptr<const HalfEdgeGraph> g,
                                        const WeightAssignment& w,
                                        const PercolationPolicy& policy) {
  if (w.mode != WeightMode::PerHalfEdge || w.excess.size() != g->num_half_edges())
    throw std::invalid_argument("thinning_view_percolate: needs per-half-edge weights");
  if (!policy.has_threshold())
    throw std::invalid_argument("thinning_view_percolate: policy has no threshold view");
  std::unordered_map<std::int64_t, double> xi;
  std::vector<std::uint8_t> regular(g->num_half_edges());
  for (HalfEdge s = 0; s < regular.size(); ++s) {
    const std::int64_t d = g->degree(g->owner(s));
    auto [it, fresh] = xi.try_emplace(d, 0.0);
    if (fresh) it->second = policy.threshold(static_cast<double>(d));
    regular[s] = w.excess[s] <= it->second;
  }
  return percolate_with_flags(std::move(g), std::move(regular));
}

// ------------------------------------------------------------ matching law

double matching_probability(const Matching& m, std::span<const std::int64_t> degrees,
                            const PercolationPolicy& policy) {
  const auto fixed = fix_parity({degrees.begin(), degrees.end()});
  const std::int64_t total = std::accumulate(fixed.begin(), fixed.end(), std::int64_t{0});
  std::vector<double> owner_p;
  owner_p.reserve(static_cast<std::size_t>(total));
  for (std::int64_t d : fixed)
    for (std::int64_t j = 0; j < d; ++j) owner_p.push_back(policy.retention(static_cast<double>(d)));

  std::vector<std::uint8_t> used(owner_p.size(), 0);
  double prob = 1.0;
  std::int64_t i = 0;
  for (auto [a, b] : m.pairs) {
    ++i;
    for (HalfEdge s : {a, b}) {
      if (s >= owner_p.size()) throw std::invalid_argument("matching_probability: half-edge out of range");
      if (used[s]) throw std::invalid_argument("matching_probability: overlapping half-edges");
      used[s] = 1;
      prob *= owner_p[s];
    }
    prob /= static_cast<double>(total - 2 * i + 1);
  }
  return prob;
}

namespace {

InducedEdgeSet canonical_edges(const PercolatedGraph& pg) {
  InducedEdgeSet edges = pg.edge_list();
  for (auto& [a, b] : edges)
    if (a > b) std::swap(a, b);
  std::sort(edges.begin(), edges.end());
  return edges;
}

std::vector<HalfEdge> mate_of(const Matching& m, std::size_t total) {
  std::vector<HalfEdge> mate(total);
  for (auto [a, b] : m.pairs) {
    mate[a] = b;
    mate[b] = a;
  }
  return mate;
}

}  // namespace

InducedLaw exact_half_edge_law(std::span<const std::int64_t> degrees,
                               const PercolationPolicy& policy) {
  const auto fixed = fix_parity({degrees.begin(), degrees.end()});
  const auto matchings = enumerate_matchings(fixed);
  const double per_matching = 1.0 / static_cast<double>(matchings.size());
  InducedLaw law;
  for (const Matching& m : matchings) {
    auto g = std::make_shared<const HalfEdgeGraph>(
        HalfEdgeGraph::from_pairing(fixed, mate_of(m, m.pairs.size() * 2)));
    const auto p = half_edge_retention(*g, policy);
    const std::size_t total = g->num_half_edges();
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << total); ++mask) {
      double prob = per_matching;
      std::vector<std::uint8_t> regular(total);
      for (HalfEdge s = 0; s < total; ++s) {
        regular[s] = (mask >> s) & 1U;
        prob *= regular[s] ? p[g->owner(s)] : 1.0 - p[g->owner(s)];
      }
      if (prob == 0.0) continue;
      law[canonical_edges(percolate_with_flags(g, std::move(regular)))] += prob;
    }
  }
  return law;
}

InducedLaw exact_edge_law(std::span<const std::int64_t> degrees, const PercolationPolicy& policy) {
  const auto fixed = fix_parity({degrees.begin(), degrees.end()});
  const auto matchings = enumerate_matchings(fixed);
  const double per_matching = 1.0 / static_cast<double>(matchings.size());
  InducedLaw law;
  for (const Matching& m : matchings) {
    auto g = std::make_shared<const HalfEdgeGraph>(
        HalfEdgeGraph::from_pairing(fixed, mate_of(m, m.pairs.size() * 2)));
    const auto p = half_edge_retention(*g, policy);
    const std::size_t edges = g->num_edges();
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << edges); ++mask) {
      double prob = per_matching;
      std::vector<std::uint8_t> keep(edges);
      for (std::uint32_t e = 0; e < edges; ++e) {
        const HalfEdge s = g->edge_half_edge(e);
        const double pe = p[g->owner(s)] * p[g->owner(g->mate(s))];
        keep[e] = (mask >> e) & 1U;
        prob *= keep[e] ? pe : 1.0 - pe;
      }
      if (prob == 0.0) continue;
      law[canonical_edges(percolate_with_edge_mask(g, keep))] += prob;
    }
  }
  return law;
}

double total_variation(const InducedLaw& a, const InducedLaw& b) {
  double tv = 0.0;
  for (const auto& [k, pa] : a) {
    auto it = b.find(k);
    tv += std::abs(pa - (it == b.end() ? 0.0 : it->second));
  }
  for (const auto& [k, pb] : b)
    if (!a.contains(k)) tv += pb;
  return 0.5 * tv;
}

// ------------------------------------------------------------ tail check

TailCheckReport empirical_tail_check(std::span<const std::int64_t> degrees, double tau,
                                     double gamma, double C, double c_const, std::int64_t x0,
                                     double alpha) {
  if (degrees.empty()) throw std::invalid_argument("empirical_tail_check: empty sequence");
  if (!(alpha > 0.5 && alpha < 1.0 / (tau - 1.0)))
    throw std::invalid_argument(
        fmt::format("empirical_tail_check: alpha={} outside (1/2, 1/(tau-1))", alpha));
  std::vector<std::int64_t> sorted(degrees.begin(), degrees.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  const auto x_hi = static_cast<std::int64_t>(std::floor(std::pow(n, alpha)));

  TailCheckReport report;
  for (std::int64_t x = std::max<std::int64_t>(x0, 2); x <= x_hi; ++x) {
    const double xd = static_cast<double>(x);
    const auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), x);
    const double observed = static_cast<double>(above) / n;
    const double required =
        c_const * std::pow(xd, -(tau - 1.0) + C * std::pow(std::log(xd), gamma - 1.0));
    if (observed < required) {
      if (!report.first_violation) report.first_violation = x;
      report.pass = false;
      report.failure_lines.push_back(fmt::format("x={} observed={} required={}", x,
                                                 format_decimal(observed),
                                                 format_decimal(required)));
    }
  }
  report.summary = fmt::format("{} x0={} alpha={} c={}", report.pass ? "PASS" : "FAIL", x0,
                               format_decimal(alpha), format_decimal(c_const));
  return report;
}

}  // namespace fppcm
