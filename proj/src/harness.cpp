#include "fppcm/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <memory>
#include <optional>
#include <ostream>

#include <fmt/format.h>

#include "fppcm/graph.hpp"
#include "fppcm/layers.hpp"
#include "fppcm/parallel.hpp"
#include "fppcm/percolation.hpp"
#include "fppcm/rng.hpp"

namespace fppcm {

namespace {

enum SeedTag : std::uint64_t { kDegrees = 1, kPairing = 2, kWeights = 3, kPair = 4, kAuxWeights = 5 };

constexpr std::uint64_t kMaxResamples = 100000;

struct SizeContext {
  std::int64_t n = 0;
  double centering = 0.0;
  std::optional<LayerSchedule> schedule;
  std::optional<PercolationPolicy> policy;
  double budget = 0.0;
};

// First vertex in BFS order from u whose percolated degree reaches `threshold`.
std::optional<Vertex> first_layer_vertex(const PercolatedGraph& pg, Vertex u, double threshold) {
  const HalfEdgeGraph& g = *pg.base;
  std::vector<std::uint8_t> seen(g.num_vertices(), 0);
  std::vector<Vertex> queue{u};
  seen[u] = 1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const Vertex x = queue[head];
    if (static_cast<double>(pg.drr[x]) >= threshold) return x;
    for (HalfEdge s = g.first(x); s < g.last(x); ++s) {
      const Vertex y = g.owner(g.mate(s));
      if (!seen[y]) {
        seen[y] = 1;
        queue.push_back(y);
      }
    }
  }
  return std::nullopt;
}

ExperimentRecord run_replication(const ExperimentConfig& cfg, const SizeContext& ctx,
                                 std::size_t rep) {
  ExperimentRecord r;
  r.n = ctx.n;
  r.rep = rep;
  r.seed = replication_seed(cfg.seed, static_cast<std::uint64_t>(ctx.n), rep);

  const auto degrees =
      sample_degrees(cfg.degree_law, static_cast<std::size_t>(ctx.n), derive_seed(r.seed, kDegrees));
  auto g = std::make_shared<const HalfEdgeGraph>(
      HalfEdgeGraph::build(degrees, derive_seed(r.seed, kPairing)));
  const auto w = assign_weights(*g, cfg.excess_law, cfg.mode, derive_seed(r.seed, kWeights));

  Rng pick(derive_seed(r.seed, kPair));
  std::optional<std::uint32_t> D;
  for (;;) {
    r.u = static_cast<Vertex>(uniform_index(pick, g->num_vertices()));
    r.v = static_cast<Vertex>(uniform_index(pick, g->num_vertices()));
    if (r.u != r.v && (D = graph_distance(*g, r.u, r.v))) break;
    if (++r.resamples > kMaxResamples)
      throw std::runtime_error(fmt::format("n={} rep={}: no connected pair found", ctx.n, rep));
  }
  const auto best = weight_distance(*g, w, r.u, r.v);
  if (!best) throw InvariantError("weight_distance found no path between connected vertices");
  r.D = *D;
  r.H = best->hops;
  r.W = best->weight;
  r.centering = ctx.centering;
  r.residual_D = static_cast<double>(r.D) - r.centering;
  r.residual_H = static_cast<double>(r.H) - r.centering;
  r.residual_W = r.W - r.centering;
  if (!(r.D <= r.H && static_cast<double>(r.H) <= r.W))
    throw InvariantError(fmt::format("n={} rep={}: D={} H={} W={} breaks D <= H <= W", ctx.n, rep,
                                     r.D, r.H, r.W));

  if (ctx.schedule) {
    const LayerSchedule& s = *ctx.schedule;
    r.b_n = s.b_n;
    r.budget = ctx.budget;
    // The thinning view needs one excess per half-edge; edge mode draws them separately.
    const WeightAssignment half_edge_w =
        cfg.mode == WeightMode::PerHalfEdge
            ? w
            : assign_weights(*g, cfg.excess_law, WeightMode::PerHalfEdge,
                             derive_seed(r.seed, kAuxWeights));
    const auto pg = thinning_view_percolate(g, half_edge_w, *ctx.policy);
    const auto start = first_layer_vertex(pg, r.u, s.threshold(0));
    r.stuck = true;
    if (start) {
      const auto path = greedy_layer_path(pg, *start, s, &half_edge_w);
      r.stuck = path.status == PathStatus::Stuck;
      r.path_excess = path.total_excess();
    }
  }
  return r;
}

std::string csv_double(double x) { return fmt::format("{}", x); }

}  // namespace

double ExperimentConfig::gamma_p() const {
  return std::abs(std::log(alpha)) / std::abs(std::log(degree_law.tau() - 2.0));
}

void ExperimentConfig::validate() const {
  if (n_grid.empty()) throw std::invalid_argument("config: empty n grid");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 16) throw std::invalid_argument(fmt::format("config: n={} < 16", n_grid[i]));
    if (i > 0 && n_grid[i] <= n_grid[i - 1])
      throw std::invalid_argument("config: n grid must be strictly ascending");
  }
  if (reps < 1) throw std::invalid_argument("config: reps must be >= 1");
  const double tau = degree_law.tau();
  if (degree_law.family() == DegreeFamily::Table)
    throw std::invalid_argument("config: experiments need a power-law degree family");
  if (!(tau > 2.0 && tau < 3.0))
    throw std::invalid_argument(fmt::format("config: tau={} outside (2,3)", tau));
  if (diagnostics) {
    if (!(alpha > tau - 2.0 && alpha < 1.0 && alpha > 0.5))
      throw std::invalid_argument(
          fmt::format("config: alpha={} must lie in (max(1/2, tau-2), 1)", alpha));
    if (!(Cp > 0.0)) throw std::invalid_argument("config: Cp must be > 0");
    make_schedule(k, tau, degree_law.gamma(), B, static_cast<double>(n_grid.front()), alpha);
  }
}

double centering(double n, double tau) {
  return 2.0 * std::log(std::log(n)) / std::abs(std::log(tau - 2.0));
}

std::vector<ExperimentRecord> run_fluctuation_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<SizeContext> contexts;
  for (std::int64_t n : cfg.n_grid) {
    SizeContext ctx;
    ctx.n = n;
    ctx.centering = centering(static_cast<double>(n), cfg.degree_law.tau());
    if (cfg.diagnostics) {
      ctx.schedule = make_schedule(cfg.k, cfg.degree_law.tau(), cfg.degree_law.gamma(), cfg.B,
                                   static_cast<double>(n), cfg.alpha);
      ctx.policy = policy_from_excess_law(cfg.excess_law, cfg.Cp, cfg.gamma_p());
      ctx.budget = excess_budget(*ctx.schedule, *ctx.policy).total;
    }
    contexts.push_back(std::move(ctx));
  }

  std::vector<ExperimentRecord> records(contexts.size() * cfg.reps);
  parallel_for(
      records.size(),
      [&](std::size_t i) { records[i] = run_replication(cfg, contexts[i / cfg.reps], i % cfg.reps); },
      cfg.threads);
  return records;
}

void write_records_csv(std::ostream& out, std::span<const ExperimentRecord> records) {
  out << "#fppcm-v1\n";
  out << "n,rep,seed,u,v,resamples,D,H,W,centering,residual_D,residual_H,residual_W,b_n,budget,"
         "stuck,path_excess\n";
  for (const auto& r : records)
    out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.n, r.rep, r.seed,
                       r.u, r.v, r.resamples, r.D, r.H, csv_double(r.W), csv_double(r.centering),
                       csv_double(r.residual_D), csv_double(r.residual_H),
                       csv_double(r.residual_W), r.b_n, csv_double(r.budget), r.stuck ? 1 : 0,
                       csv_double(r.path_excess));
}

double nearest_rank(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("nearest_rank: empty input");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("nearest_rank: p outside [0,1]");
  std::sort(values.begin(), values.end());
  const double count = static_cast<double>(values.size());
  // The small offset keeps products such as 0.07 * 100 = 7.000000000000001 on rank 7.
  auto rank = static_cast<std::size_t>(std::ceil(p * count - 1e-9 * count));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  return values[rank - 1];
}

std::vector<QuantileRow> quantile_summary(std::span<const ExperimentRecord> records,
                                          std::span<const double> probs) {
  if (records.empty()) throw std::invalid_argument("quantile_summary: no records");
  std::vector<std::int64_t> sizes;
  for (const auto& r : records) sizes.push_back(r.n);
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());

  std::vector<QuantileRow> rows;
  for (std::int64_t n : sizes) {
    std::vector<double> d, h, w;
    for (const auto& r : records) {
      if (r.n != n) continue;
      d.push_back(r.residual_D);
      h.push_back(r.residual_H);
      w.push_back(r.residual_W);
    }
    for (double p : probs)
      rows.push_back({n, p, nearest_rank(d, p), nearest_rank(h, p), nearest_rank(w, p)});
  }
  return rows;
}

DichotomySummary summarize_dichotomy(std::span<const ExperimentRecord> explosive,
                                     std::span<const ExperimentRecord> conservative,
                                     const DichotomyBands& bands) {
  std::vector<std::int64_t> grid_e, grid_c;
  for (const auto& r : explosive)
    if (grid_e.empty() || grid_e.back() != r.n) grid_e.push_back(r.n);
  for (const auto& r : conservative)
    if (grid_c.empty() || grid_c.back() != r.n) grid_c.push_back(r.n);
  if (grid_e != grid_c || grid_e.empty())
    throw std::invalid_argument("dichotomy: the two experiments use different n grids");

  DichotomySummary s;
  s.records = explosive.size() + conservative.size();
  auto residuals = [](std::span<const ExperimentRecord> recs, std::int64_t n) {
    std::vector<double> w;
    for (const auto& r : recs)
      if (r.n == n) w.push_back(r.residual_W);
    return w;
  };
  for (auto recs : {explosive, conservative})
    for (const auto& r : recs)
      if (!(r.D <= r.H && static_cast<double>(r.H) <= r.W)) s.ordering_ok = false;

  for (std::int64_t n : grid_e) {
    const auto e = residuals(explosive, n);
    const auto c = residuals(conservative, n);
    DichotomyRow row;
    row.n = n;
    row.centering = explosive.front().centering;
    for (const auto& r : explosive)
      if (r.n == n) row.centering = r.centering;
    row.explosive_median = nearest_rank(e, 0.5);
    row.explosive_iqr = nearest_rank(e, 0.75) - nearest_rank(e, 0.25);
    row.conservative_median = nearest_rank(c, 0.5);
    row.conservative_iqr = nearest_rank(c, 0.75) - nearest_rank(c, 0.25);
    s.rows.push_back(row);
  }

  s.conservative_increasing = s.rows.size() >= 2;
  for (std::size_t i = 1; i < s.rows.size(); ++i)
    if (!(s.rows[i].conservative_median > s.rows[i - 1].conservative_median))
      s.conservative_increasing = false;

  double med_lo = s.rows.front().explosive_median, med_hi = med_lo;
  double iqr_lo = s.rows.front().explosive_iqr, iqr_hi = iqr_lo;
  for (const auto& row : s.rows) {
    med_lo = std::min(med_lo, row.explosive_median);
    med_hi = std::max(med_hi, row.explosive_median);
    iqr_lo = std::min(iqr_lo, row.explosive_iqr);
    iqr_hi = std::max(iqr_hi, row.explosive_iqr);
  }
  s.explosive_median_spread = med_hi - med_lo;
  s.explosive_iqr_ratio = iqr_lo > 0.0 ? iqr_hi / iqr_lo : std::numeric_limits<double>::infinity();
  s.explosive_within_band = s.explosive_iqr_ratio <= bands.explosive_iqr_ratio &&
                            s.explosive_median_spread <= bands.explosive_median_band;
  return s;
}

DichotomySummary run_dichotomy_comparison(const ExperimentConfig& explosive,
                                          const ExperimentConfig& conservative,
                                          const DichotomyBands& bands) {
  if (explosive.n_grid != conservative.n_grid)
    throw std::invalid_argument("dichotomy: the two configs use different n grids");
  if (explosive.reps != conservative.reps)
    throw std::invalid_argument("dichotomy: the two configs use different replication counts");
  if (explosive.degree_law.tau() != conservative.degree_law.tau())
    throw std::invalid_argument("dichotomy: the two configs use different tau");
  const auto e = run_fluctuation_experiment(explosive);
  const auto c = run_fluctuation_experiment(conservative);
  return summarize_dichotomy(e, c, bands);
}

nlohmann::ordered_json to_json(const DichotomySummary& s) {
  nlohmann::ordered_json j;
  j["records"] = s.records;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : s.rows) {
    nlohmann::ordered_json r;
    r["n"] = row.n;
    r["centering"] = row.centering;
    r["explosive_median"] = row.explosive_median;
    r["explosive_iqr"] = row.explosive_iqr;
    r["conservative_median"] = row.conservative_median;
    r["conservative_iqr"] = row.conservative_iqr;
    j["rows"].push_back(r);
  }
  j["conservative_increasing"] = s.conservative_increasing;
  j["explosive_median_spread"] = s.explosive_median_spread;
  j["explosive_iqr_ratio"] = s.explosive_iqr_ratio;
  j["explosive_within_band"] = s.explosive_within_band;
  j["ordering_ok"] = s.ordering_ok;
  j["pass"] = s.pass();
  return j;
}

std::vector<std::int64_t> parse_n_list(const std::string& text) {
  std::vector<std::int64_t> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string item = text.substr(pos, comma - pos);
    // Accept plain integers and exact powers written as 1e5.
    double value = 0.0;
    auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (ec != std::errc{} || end != item.data() + item.size() || value != std::floor(value) ||
        value < 1.0 || value > 4.0e9)
      throw std::invalid_argument(fmt::format("bad n value '{}'", item));
    out.push_back(static_cast<std::int64_t>(value));
    pos = comma + 1;
  }
  return out;
}

ExperimentConfig apply_config(const ConfigDocument& doc, ExperimentConfig cfg) {
  auto find = [&](const std::string& section) -> const ConfigSection* {
    auto it = doc.find(section);
    return it == doc.end() ? nullptr : &it->second;
  };
  auto number = [](const std::string& key, const std::string& value) {
    double x = 0.0;
    auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), x);
    if (ec != std::errc{} || end != value.data() + value.size())
      throw std::invalid_argument(fmt::format("config: '{}' is not a number for {}", value, key));
    return x;
  };
  auto count = [&](const std::string& key, const std::string& value) {
    const double x = number(key, value);
    if (x < 0.0 || x != std::floor(x))
      throw std::invalid_argument(fmt::format("config: {} must be a nonnegative integer", key));
    return x;
  };

  if (const auto* top = find("")) {
    for (const auto& [key, value] : *top) {
      if (key == "n") cfg.n_grid = parse_n_list(value);
      else if (key == "reps") cfg.reps = static_cast<std::size_t>(count(key, value));
      else if (key == "seed") cfg.seed = std::stoull(value);
      else if (key == "mode") {
        if (value == "edge") cfg.mode = WeightMode::PerEdge;
        else if (value == "halfedge") cfg.mode = WeightMode::PerHalfEdge;
        else throw std::invalid_argument(fmt::format("config: unknown mode '{}'", value));
      } else if (key == "Cp") cfg.Cp = number(key, value);
      else if (key == "alpha") cfg.alpha = number(key, value);
      else if (key == "k") cfg.k = static_cast<std::int64_t>(count(key, value));
      else if (key == "B") cfg.B = number(key, value);
      else if (key == "diagnostics") cfg.diagnostics = value == "true" || value == "1";
      else if (key == "threads") cfg.threads = static_cast<unsigned>(count(key, value));
      else throw std::invalid_argument(fmt::format("config: unknown key '{}'", key));
    }
  }
  if (const auto* degree = find("degree")) cfg.degree_law = degree_law_from_section(*degree);
  if (const auto* weight = find("weight")) cfg.excess_law = weight_law_from_section(*weight);
  return cfg;
}

}  // namespace fppcm
