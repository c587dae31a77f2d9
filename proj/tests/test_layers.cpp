#include <doctest.h>

#include <cmath>
#include <memory>
#include <sstream>
#include <vector>

#include "fppcm/distributions.hpp"
#include "fppcm/graph.hpp"
#include "fppcm/layers.hpp"
#include "fppcm/percolation.hpp"

using namespace fppcm;

namespace {

double gamma_p(double alpha, double tau) {
  return std::abs(std::log(alpha)) / std::abs(std::log(tau - 2.0));
}

// Hub 0 of degree `hub`, satellites 1..hub of degree 3 (hub edge plus two pendants).
HalfEdgeGraph hub_and_satellites(int hub) {
  std::vector<std::int64_t> degrees{hub};
  for (int i = 0; i < hub; ++i) degrees.push_back(3);
  for (int i = 0; i < 2 * hub; ++i) degrees.push_back(1);
  std::vector<HalfEdge> mate(static_cast<std::size_t>(hub + 3 * hub + 2 * hub));
  const auto sat = [&](int i) { return static_cast<HalfEdge>(hub + 3 * i); };
  const auto pendant = [&](int j) { return static_cast<HalfEdge>(4 * hub + j); };
  for (int i = 0; i < hub; ++i) {
    mate[i] = sat(i);
    mate[sat(i)] = i;
    for (int j = 1; j <= 2; ++j) {
      mate[sat(i) + j] = pendant(2 * i + j - 1);
      mate[pendant(2 * i + j - 1)] = sat(i) + j;
    }
  }
  return HalfEdgeGraph::from_pairing(degrees, mate);
}

}  // namespace

TEST_CASE("B -> 0 gives the closed form k^{(1/(tau-2))^i}") {
  const auto s = make_schedule(4, 2.5, 0.5, 1e-9, 1e9, 0.6);
  const std::vector<double> expected{4, 16, 256, 65536};
  for (std::size_t i = 0; i < expected.size(); ++i)
    CHECK(s.y[i] == doctest::Approx(expected[i]).epsilon(1e-6));
  CHECK(s.y.front() == 4.0);
}

TEST_CASE("first step of the k=16 schedule and its sandwich") {
  const auto s = make_schedule(16, 2.5, 0.5, 0.1, 1e6, 0.6);
  const double delta = 0.1 * std::pow(std::log(16.0), -0.5);
  const double y1 = std::pow(16.0, 1.0 / (0.5 + delta));
  CHECK(s.delta == doctest::Approx(delta).epsilon(1e-14));
  CHECK(s.y[1] == doctest::Approx(y1).epsilon(1e-12));
  CHECK(s.y[1] >= std::pow(16.0, 1.0 / (0.5 + delta)) * (1 - 1e-12));
  CHECK(s.y[1] <= 256.0);
}

TEST_CASE("schedule bounds over the reference grid") {
  for (std::int64_t k : {16, 64, 256})
    for (double tau : {2.2, 2.5, 2.8})
      for (double n : {1e4, 1e6, 1e12, 1e30}) {
        CAPTURE(k);
        CAPTURE(tau);
        const auto s = make_schedule(k, tau, 0.5, 0.1, n, 0.6);
        REQUIRE(s.log_y.back() >= 0.6 * std::log(n));
        if (s.b_n > 0) REQUIRE(s.log_y[s.b_n - 1] < 0.6 * std::log(n));
        const double lo = std::log(static_cast<double>(k));
        for (std::size_t i = 0; i < s.y.size(); ++i) {
          const double di = static_cast<double>(i);
          CHECK(s.log_y[i] >= lo * std::pow(1.0 / (tau - 2.0 + s.delta), di) * (1 - 1e-12));
          CHECK(s.log_y[i] <= lo * std::pow(1.0 / (tau - 2.0), di) * (1 + 1e-12));
        }
        const auto refined = refined_lower_bound(s);
        CHECK(refined.delta > 0.0);
        CHECK(refined.delta < 1.0);
        for (std::size_t i = 0; i < s.y.size(); ++i)
          CHECK(s.log_y[i] >= refined.log_bound[i] * (1 - 1e-12));
      }
}

TEST_CASE("b_n stays below log log n / |log(tau-2)|") {
  for (double n : {1e4, 1e5, 1e6}) {
    const auto s = make_schedule(256, 2.5, 0.5, 0.1, n, 0.6);
    CHECK(static_cast<double>(s.b_n) <= std::log(std::log(n)) / std::abs(std::log(0.5)));
  }
  CHECK(make_schedule(256, 2.5, 0.5, 1e-9, 1e6, 0.6).b_n <= 3);
}

TEST_CASE("schedule product constant matches a long direct product") {
  const auto s = make_schedule(64, 2.5, 0.5, 0.1, 1e6, 0.6);
  double product = 1.0;
  for (int j = 0; j < 5000; ++j)
    product *= 1.0 + std::pow(0.5 + s.delta, j * 0.5) * 0.1 * std::pow(std::log(64.0), -0.5) / 0.5;
  CHECK(schedule_product_constant(s) == doctest::Approx(product).epsilon(1e-11));
  // delta -> 0 as B -> 0: the refined bound meets the upper family.
  const auto flat = make_schedule(64, 2.5, 0.5, 1e-12, 1e6, 0.6);
  CHECK(refined_lower_bound(flat).delta < 1e-10);
}

TEST_CASE("inadmissible k names the least admissible one") {
  const std::int64_t least = minimal_admissible_k(2.8, 0.5, 0.3);
  auto ok = [](std::int64_t k) { return 0.8 + 0.3 / std::sqrt(std::log(double(k))) < 1.0; };
  CHECK(ok(least));
  CHECK_FALSE(ok(least - 1));
  try {
    make_schedule(least - 1, 2.8, 0.5, 0.3, 1e6, 0.6);
    FAIL("expected an error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find(std::to_string(least)) != std::string::npos);
  }
  CHECK_NOTHROW(make_schedule(least, 2.8, 0.5, 0.3, 1e6, 0.6));
  CHECK_THROWS(make_schedule(2, 2.5, 0.5, 0.1, 1e6, 0.6));
  CHECK_THROWS(make_schedule(16, 2.5, 0.5, 0.1, 1e6, 0.5));
}

TEST_CASE("attachment failure bound") {
  const auto s = make_schedule(16, 2.5, 0.5, 0.1, 1e6, 0.6);
  const double beta = 3.6;
  const auto bound = attachment_failure_bound(s, beta);
  REQUIRE(bound.size() == s.b_n);
  const double g0 = s.y[1] * s.y[0] * std::pow(s.y[1], -1.5) / (1e6 * beta);
  CHECK(bound[0] == doctest::Approx(std::exp(-g0)).epsilon(1e-12));

  const auto far = make_schedule(16, 2.5, 0.5, 0.1, 1e30, 0.6);
  for (double b : attachment_failure_bound(far, beta)) CHECK(b > 0.999999);

  double last = 1e300;
  for (std::int64_t k : {16, 32, 64, 128, 256}) {
    const auto bk = attachment_failure_bound(make_schedule(k, 2.5, 0.5, 0.1, 1e6, 0.6), beta);
    double sum = 0.0;
    for (double b : bk) sum += b;
    CHECK(sum < last);
    last = sum;
  }
}

TEST_CASE("greedy path: satellite to hub") {
  const auto g = hub_and_satellites(40);
  const double n = static_cast<double>(g.num_vertices());
  const auto s = make_schedule(3, 2.5, 0.5, 0.1, n, 0.6);
  const auto path = greedy_layer_path(g, 5, s);
  CHECK(path.status == PathStatus::ReachedCore);
  CHECK(path.vertices == std::vector<Vertex>{5, 0});
  CHECK(path.degrees == std::vector<std::int64_t>{3, 40});
  CHECK_THROWS(greedy_layer_path(g, 100, s));  // pendant, degree 1
}

TEST_CASE("greedy path: ties go to the lighter edge, then the lower id") {
  // Vertex 0 (degree 3) sees 1 and 2, both of degree 8, and a pendant.
  std::vector<std::int64_t> d{3, 8, 8};
  d.resize(3 + 15, 1);
  std::vector<HalfEdge> mate(34);
  auto pair = [&](HalfEdge a, HalfEdge b) { mate[a] = b; mate[b] = a; };
  pair(0, 3);
  pair(1, 11);
  pair(2, 19);
  for (HalfEdge j = 0; j < 7; ++j) {
    pair(4 + j, 20 + j);
    pair(12 + j, 27 + j);
  }
  const auto g = HalfEdgeGraph::from_pairing(d, mate);
  const auto s = make_schedule(3, 2.5, 0.5, 0.1, 1e6, 0.6);
  WeightAssignment w;
  w.excess.assign(g.num_edges(), 0.0);
  w.excess[g.edge_id(0)] = 0.7;  // 0-1 weighs 1.7
  w.excess[g.edge_id(1)] = 0.2;  // 0-2 weighs 1.2
  auto path = greedy_layer_path(g, 0, s, &w);
  CHECK(path.vertices == std::vector<Vertex>{0, 2});
  CHECK(path.excess.front().first == 0.2);
  // From 2 only lower degrees remain, so the walk stops short of the core.
  CHECK(path.status == PathStatus::Stuck);
  w.excess[g.edge_id(0)] = 0.2;
  path = greedy_layer_path(g, 0, s, &w);
  CHECK(path.vertices == std::vector<Vertex>{0, 1});
}

TEST_CASE("greedy paths climb and follow percolated edges") {
  const double n = 50000;
  const auto law = ExcessWeightLaw::uniform01();
  const auto policy = policy_from_excess_law(law, 0.1, gamma_p(0.55, 2.5));
  const auto d = sample_degrees(DegreeLaw::pure_power(2.5), static_cast<std::size_t>(n), 4);
  auto g = std::make_shared<const HalfEdgeGraph>(HalfEdgeGraph::build(d, 4));
  const auto w = assign_weights(*g, law, WeightMode::PerHalfEdge, 5);
  const auto pg = thinning_view_percolate(g, w, policy);
  const auto s = make_schedule(16, 2.5, 0.5, 0.1, n, 0.55);
  const double bound = path_excess_bound(s, policy);
  int checked = 0;
  for (Vertex v = 0; v < g->num_vertices(); ++v) {
    if (pg.drr[v] < 16) continue;
    const auto path = greedy_layer_path(pg, v, s, &w);
    for (std::size_t i = 1; i < path.vertices.size(); ++i) {
      REQUIRE(path.degrees[i] > path.degrees[i - 1]);
      REQUIRE(path.layers[i] > path.layers[i - 1]);
      bool adjacent = false;
      for (HalfEdge h = g->first(path.vertices[i - 1]); h < g->last(path.vertices[i - 1]); ++h)
        adjacent = adjacent || (pg.kept[h] && g->owner(g->mate(h)) == path.vertices[i]);
      REQUIRE(adjacent);
    }
    if (path.status == PathStatus::ReachedCore) REQUIRE(path.total_excess() <= bound);
    ++checked;
  }
  CHECK(checked > 50);
}

TEST_CASE("Stuck fraction falls as k grows") {
  // Five n = 1e5 instances, 200 uniform starts each with percolated degree >= k.
  const double n = 1e5, alpha = 0.55;
  const auto law = ExcessWeightLaw::uniform01();
  const auto policy = policy_from_excess_law(law, 0.1, gamma_p(alpha, 2.5));
  double stuck16 = 0, starts16 = 0, stuck64 = 0, starts64 = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto d = sample_degrees(DegreeLaw::pure_power(2.5), static_cast<std::size_t>(n), seed);
    auto g = std::make_shared<const HalfEdgeGraph>(HalfEdgeGraph::build(d, seed));
    const auto w = assign_weights(*g, law, WeightMode::PerHalfEdge, seed + 7);
    const auto pg = thinning_view_percolate(g, w, policy);
    for (std::int64_t k : {16, 64}) {
      const auto s = make_schedule(k, 2.5, 0.5, 0.1, n, alpha);
      std::vector<Vertex> eligible;
      for (Vertex v = 0; v < g->num_vertices(); ++v)
        if (pg.drr[v] >= k) eligible.push_back(v);
      Rng rng(seed * 1000 + static_cast<std::uint64_t>(k));
      for (int i = 0; i < 200 && !eligible.empty(); ++i) {
        const auto v = eligible[uniform_index(rng, eligible.size())];
        const bool stuck = greedy_layer_path(pg, v, s, &w).status == PathStatus::Stuck;
        (k == 16 ? stuck16 : stuck64) += stuck;
        (k == 16 ? starts16 : starts64) += 1;
      }
    }
  }
  MESSAGE("stuck fraction k=16: " << stuck16 / starts16 << "  k=64: " << stuck64 / starts64);
  CHECK(stuck64 / starts64 < stuck16 / starts16);
}

TEST_CASE("excess budget") {
  const double tau = 2.5, alpha = 0.6;
  const auto s = make_schedule(256, tau, 0.5, 0.1, 1e9, alpha);
  const auto zero = excess_budget(s, policy_from_excess_law(ExcessWeightLaw::zero(), 1.0, 0.5));
  CHECK(zero.total == 0.0);

  const double gp = gamma_p(alpha, tau);
  const auto uniform = excess_budget(s, policy_from_excess_law(ExcessWeightLaw::uniform01(), 1.0, gp));
  double direct = 0.0;
  for (double t : s.log_y) direct += std::exp(-std::pow(t, gp));
  CHECK(uniform.total == doctest::Approx(direct).epsilon(1e-12));
  CHECK(uniform.last_term_share < 0.10);
  CHECK(uniform.cauchy);

  // Conservative law: the budget keeps growing with the schedule and never settles.
  const auto conservative =
      policy_from_excess_law(ExcessWeightLaw::double_exponential(), 1.0, gp);
  double last = 0.0;
  std::size_t last_b = 0;
  for (double n : {1e4, 1e8, 1e16, 1e32, 1e64}) {
    const auto sn = make_schedule(16, tau, 0.5, 0.1, n, alpha);
    const auto b = excess_budget(sn, conservative);
    CHECK(sn.b_n > last_b);
    CHECK(b.total > last);
    CHECK_FALSE(b.cauchy);
    last = b.total;
    last_b = sn.b_n;
  }
}

TEST_CASE("schedule table") {
  const auto s = make_schedule(16, 2.5, 0.5, 0.1, 1e4, 0.6);
  const auto policy = policy_from_excess_law(ExcessWeightLaw::uniform01(), 1.0, 0.737);
  std::ostringstream out;
  write_schedule_table(out, s, &policy, 3.6);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "i y_i xi_{y_i} exp(-g_i)");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == s.y.size());
  CHECK(out.str().find("\n0 16 ") != std::string::npos);
}
