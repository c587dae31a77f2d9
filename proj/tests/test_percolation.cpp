#include <doctest.h>

#include <cmath>
#include <random>
#include <map>
#include <memory>
#include <vector>

#include "fppcm/distributions.hpp"
#include "fppcm/graph.hpp"
#include "fppcm/percolation.hpp"

using namespace fppcm;

namespace {

// Every set of disjoint half-edge pairs on L half-edges.
void partial_matchings(std::size_t L, std::size_t from, std::vector<std::uint8_t>& used,
                       Matching& current, std::vector<Matching>& out) {
  out.push_back(current);
  for (HalfEdge a = static_cast<HalfEdge>(from); a < L; ++a) {
    if (used[a]) continue;
    for (HalfEdge b = a + 1; b < L; ++b) {
      if (used[b]) continue;
      used[a] = used[b] = 1;
      current.pairs.emplace_back(a, b);
      partial_matchings(L, a + 1, used, current, out);
      current.pairs.pop_back();
      used[a] = used[b] = 0;
    }
  }
}

// P(all pairs of m are edges and all their half-edges are regular), by counting
// the perfect matchings that contain m.
double matching_oracle(const Matching& m, const std::vector<std::int64_t>& degrees,
                       const PercolationPolicy& policy) {
  const auto fixed = fix_parity(degrees);
  const auto all = enumerate_matchings(fixed);
  std::size_t containing = 0;
  for (const auto& full : all) {
    bool ok = true;
    for (const auto& p : m.pairs)
      ok = ok && std::find(full.pairs.begin(), full.pairs.end(), p) != full.pairs.end();
    containing += ok;
  }
  double prob = static_cast<double>(containing) / static_cast<double>(all.size());
  std::vector<Vertex> owner;
  for (std::size_t v = 0; v < fixed.size(); ++v)
    for (std::int64_t j = 0; j < fixed[v]; ++j) owner.push_back(static_cast<Vertex>(v));
  for (auto [a, b] : m.pairs)
    prob *= policy.retention(static_cast<double>(fixed[owner[a]])) *
            policy.retention(static_cast<double>(fixed[owner[b]]));
  return prob;
}

InducedEdgeSet canonical(const PercolatedGraph& pg) {
  auto e = pg.edge_list();
  for (auto& [a, b] : e)
    if (a > b) std::swap(a, b);
  std::sort(e.begin(), e.end());
  return e;
}

}  // namespace

TEST_CASE("matching probability equals the fraction of matchings containing it") {
  const auto policy = PercolationPolicy::stretched_exponential(0.5, 0.5);
  for (const std::vector<std::int64_t>& d :
       {std::vector<std::int64_t>{2, 2}, {1, 3}, {3, 2, 1}, {2, 2, 2, 2}, {1, 1, 1, 1, 1, 1}, {5, 3}}) {
    const auto fixed = fix_parity(d);
    std::size_t L = 0;
    for (auto x : fixed) L += static_cast<std::size_t>(x);
    std::vector<std::uint8_t> used(L, 0);
    Matching current;
    std::vector<Matching> all;
    partial_matchings(L, 0, used, current, all);
    for (const auto& m : all) {
      const double oracle = matching_oracle(m, d, policy);
      REQUIRE(matching_probability(m, d, policy) == doctest::Approx(oracle).epsilon(1e-12));
    }
  }
  Matching overlapping;
  overlapping.pairs = {{0, 1}, {1, 2}};
  CHECK_THROWS(matching_probability(overlapping, std::vector<std::int64_t>{2, 2}, policy));
}

TEST_CASE("half-edge and edge percolation have the same exact law") {
  const auto policy = PercolationPolicy::stretched_exponential(0.7, 0.5);
  for (const std::vector<std::int64_t>& d :
       {std::vector<std::int64_t>{2, 2}, {1, 2, 3}, {4, 2}, {1, 1, 1, 1, 2}, {3, 3, 2}}) {
    const auto a = exact_half_edge_law(d, policy);
    const auto b = exact_edge_law(d, policy);
    double mass = 0.0;
    for (const auto& [k, p] : a) mass += p;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(total_variation(a, b) <= 1e-12);
  }
}

TEST_CASE("sampled percolations follow the exact law") {
  const std::vector<std::int64_t> d{2, 2, 1, 1};
  const auto policy = PercolationPolicy::constant(0.6);
  const auto exact = exact_half_edge_law(d, policy);
  const int reps = 40000;
  InducedLaw he, ed;
  for (int s = 0; s < reps; ++s) {
    he[canonical(half_edge_percolate(d, policy, s))] += 1.0 / reps;
    auto g = std::make_shared<const HalfEdgeGraph>(HalfEdgeGraph::build(d, s));
    ed[canonical(edge_percolate(g, policy, s + 99991))] += 1.0 / reps;
  }
  // Sampling noise on ~10 outcomes at 4e4 draws keeps TV near 0.01.
  CHECK(total_variation(exact, he) < 0.02);
  CHECK(total_variation(exact, ed) < 0.02);
}

TEST_CASE("retention one reproduces the configuration model") {
  const auto d = sample_degrees(DegreeLaw::pure_power(2.5), 3000, 4);
  const auto pg = half_edge_percolate(d, PercolationPolicy::constant(1.0), 77);
  const auto g = HalfEdgeGraph::build(d, 77);
  for (HalfEdge s = 0; s < g.num_half_edges(); ++s) REQUIRE(pg.base->mate(s) == g.mate(s));
  for (Vertex v = 0; v < g.num_vertices(); ++v) REQUIRE(pg.drr[v] == g.degree(v));
  CHECK(pg.num_edges() == g.num_edges());
  const auto none = half_edge_percolate(d, PercolationPolicy::constant(0.0), 77);
  CHECK(none.num_edges() == 0);
}

TEST_CASE("degree counts are nested and consistent with the edge list") {
  const auto d = sample_degrees(DegreeLaw::pure_power(2.5), 5000, 8);
  const auto policy = PercolationPolicy::stretched_exponential(1.0, 0.7);
  for (const auto& pg :
       {half_edge_percolate(d, policy, 3),
        edge_percolate(std::make_shared<const HalfEdgeGraph>(HalfEdgeGraph::build(d, 3)), policy, 5)}) {
    std::vector<std::int64_t> from_edges(d.size(), 0);
    for (auto [a, b] : pg.edge_list()) {
      ++from_edges[a];
      ++from_edges[b];
    }
    for (Vertex v = 0; v < d.size(); ++v) {
      REQUIRE(pg.drr[v] <= pg.dr[v]);
      REQUIRE(pg.dr[v] <= pg.base->degree(v));
      REQUIRE(pg.drr[v] == from_edges[v]);
    }
  }
}

TEST_CASE("regular half-edges appear at rate p(d)") {
  const auto d = sample_degrees(DegreeLaw::pure_power(2.5), 50000, 21);
  const auto policy = PercolationPolicy::stretched_exponential(1.0, 0.6);
  const auto pg = half_edge_percolate(d, policy, 12);
  double expected = 0.0, observed = 0.0, var = 0.0;
  for (HalfEdge s = 0; s < pg.regular.size(); ++s) {
    const double p = policy.retention(static_cast<double>(pg.base->degree(pg.base->owner(s))));
    expected += p;
    var += p * (1 - p);
    observed += pg.regular[s];
  }
  CHECK(std::abs(observed - expected) < 5 * std::sqrt(var));
}

TEST_CASE("d^r given d is binomial(d, p(d))") {
  // Chi-square over 1e5 trials at fixed degree 6.
  const std::vector<std::int64_t> d{6, 6, 6, 6, 6};
  const auto policy = PercolationPolicy::stretched_exponential(0.4, 0.5);
  const double p = policy.retention(6.0);
  std::vector<double> counts(7, 0.0);
  const int trials = 20000;
  for (int s = 0; s < trials; ++s) {
    const auto pg = half_edge_percolate(d, policy, s);
    for (auto r : pg.dr) counts[static_cast<std::size_t>(r)] += 1.0;
  }
  const double total = 5.0 * trials;
  double chi2 = 0.0, binom = std::pow(1 - p, 6);
  for (int k = 0; k <= 6; ++k) {
    const double e = total * binom;
    chi2 += (counts[k] - e) * (counts[k] - e) / e;
    binom *= (6 - k) / double(k + 1) * p / (1 - p);
  }
  CHECK(chi2 < 22.46);  // 0.999 quantile, 6 degrees of freedom
}

TEST_CASE("full matchings with all flags regular sum to the product of retentions") {
  const std::vector<std::int64_t> d{3, 2, 1, 2};
  const auto policy = PercolationPolicy::stretched_exponential(0.9, 0.5);
  double sum = 0.0;
  for (const auto& m : enumerate_matchings(d)) sum += matching_probability(m, d, policy);
  double product = 1.0;
  for (auto x : fix_parity(d))
    product *= std::pow(policy.retention(static_cast<double>(x)), static_cast<double>(x));
  CHECK(sum == doctest::Approx(product).epsilon(1e-12));
}

TEST_CASE("binomial concentration") {
  // P(R outside [E R/2, 2 E R]) <= 2 exp(-E R/8) for R ~ Bin(100, 1/2).
  Rng rng(1);
  std::binomial_distribution<int> bin(100, 0.5);
  int outside = 0;
  const int trials = 1000000;
  for (int i = 0; i < trials; ++i) {
    const int r = bin(rng);
    outside += r < 25 || r > 100;
  }
  CHECK(outside / double(trials) <= 2 * std::exp(-50.0 / 8.0));
}

TEST_CASE("thinning view keeps half-edges with X below the threshold") {
  const auto law = ExcessWeightLaw::uniform01();
  const auto policy = policy_from_excess_law(law, 1.0, 0.7);
  const auto d = sample_degrees(DegreeLaw::pure_power(2.5), 20000, 2);
  auto g = std::make_shared<const HalfEdgeGraph>(HalfEdgeGraph::build(d, 2));
  const auto w = assign_weights(*g, law, WeightMode::PerHalfEdge, 3);
  const auto pg = thinning_view_percolate(g, w, policy);
  double expected = 0.0, observed = 0.0;
  for (HalfEdge s = 0; s < g->num_half_edges(); ++s) {
    const double deg = static_cast<double>(g->degree(g->owner(s)));
    REQUIRE(static_cast<bool>(pg.regular[s]) == (w.excess[s] <= policy.threshold(deg)));
    expected += policy.retention(deg);
    observed += pg.regular[s];
  }
  CHECK(std::abs(observed - expected) < 5 * std::sqrt(expected));
  // uniform01: xi_d = p(d)
  CHECK(policy.threshold(50.0) == doctest::Approx(policy.retention(50.0)).epsilon(1e-12));

  const auto per_edge = assign_weights(*g, law, WeightMode::PerEdge, 3);
  CHECK_THROWS(thinning_view_percolate(g, per_edge, policy));
  CHECK_THROWS(thinning_view_percolate(g, w, PercolationPolicy::stretched_exponential(1.0, 0.7)));
}

TEST_CASE("policy shape and parameter checks") {
  const auto policy = PercolationPolicy::stretched_exponential(1.0, 0.737);
  double last = 1.0;
  for (double deg = 2; deg < 1e6; deg *= 1.7) {
    const double p = policy.retention(deg);
    CHECK(p <= last);
    CHECK(p > 0.0);
    const auto lb = *policy.lower_bound();
    CHECK(p >= lb.b * std::exp(-lb.c * std::pow(std::log(deg), lb.gamma)));
    last = p;
  }
  CHECK_THROWS(PercolationPolicy::stretched_exponential(1.0, 1.0));
  CHECK_THROWS(PercolationPolicy::stretched_exponential(0.0, 0.5));
  CHECK_THROWS(PercolationPolicy::constant(1.5));
  // gamma_p = |log alpha|/|log(tau-2)| lies in (0,1) whenever alpha in (tau-2, 1)
  for (double tau : {2.1, 2.5, 2.9})
    for (double alpha = tau - 2.0 + 0.01; alpha < 1.0; alpha += 0.05) {
      const double gp = std::abs(std::log(alpha)) / std::abs(std::log(tau - 2.0));
      CHECK(gp > 0.0);
      CHECK(gp < 1.0);
    }
}

TEST_CASE("empirical tail check") {
  const auto d = sample_degrees(DegreeLaw::pure_power(2.5), 100000, 6);
  // The bound carries the factor exp(C (log x)^gamma) over a pure power, so c must
  // absorb exp(-(log x)^0.5) ~ 0.08 at the top of the range.
  // At the top of [2, n^0.55] about 7.5 vertices remain above x, so c stays small.
  const auto ok = empirical_tail_check(d, 2.5, 0.5, 1.0, 0.02, 2, 0.55);
  CHECK(ok.pass);
  CHECK(ok.summary == "PASS x0=2 alpha=0.55 c=0.02");
  CHECK_FALSE(empirical_tail_check(d, 2.5, 0.5, 1.0, 0.5, 2, 0.6).pass);
  const std::vector<std::int64_t> flat(1000, 2);
  const auto bad = empirical_tail_check(flat, 2.5, 0.5, 1.0, 0.05, 3, 0.6);
  CHECK_FALSE(bad.pass);
  CHECK(bad.first_violation == 3);
  CHECK(bad.failure_lines.size() == 61);  // x = 3..63, 63 = floor(1000^0.6)
  CHECK(bad.summary.rfind("FAIL", 0) == 0);
  CHECK_THROWS(empirical_tail_check(d, 2.5, 0.5, 1.0, 0.5, 2, 0.45));
  CHECK_THROWS(empirical_tail_check(d, 2.5, 0.5, 1.0, 0.5, 2, 0.7));
}
