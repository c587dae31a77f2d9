#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fppcm/distributions.hpp"
#include "fppcm/fpp.hpp"
#include "fppcm/law_config.hpp"

namespace fppcm {

/// Raised when a computed record or summary breaks a structural invariant.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct ExperimentConfig {
  std::vector<std::int64_t> n_grid{10000};
  std::size_t reps = 1;
  DegreeLaw degree_law = DegreeLaw::pure_power(2.5);
  ExcessWeightLaw excess_law = ExcessWeightLaw::uniform01();
  WeightMode mode = WeightMode::PerEdge;
  double Cp = 1.0;
  double alpha = 0.6;
  std::int64_t k = 16;
  double B = 0.1;
  std::uint64_t seed = 1;
  /// Layer-path diagnostics (b_n, budget, stuck, path_excess); off leaves them zero.
  bool diagnostics = true;
  unsigned threads = 0;

  /// gamma_p = |log alpha| / |log(tau-2)|.
  double gamma_p() const;
  /// Throws std::invalid_argument.
  void validate() const;
};

struct ExperimentRecord {
  std::int64_t n = 0;
  std::size_t rep = 0;
  std::uint64_t seed = 0;
  Vertex u = 0;
  Vertex v = 0;
  std::uint64_t resamples = 0;
  std::uint32_t D = 0;
  std::uint32_t H = 0;
  double W = 0.0;
  double centering = 0.0;
  double residual_D = 0.0;
  double residual_H = 0.0;
  double residual_W = 0.0;
  std::size_t b_n = 0;
  double budget = 0.0;
  bool stuck = false;
  double path_excess = 0.0;
};

/// 2 log log n / |log(tau-2)|.
double centering(double n, double tau);

/// One record per (n, replication), ordered by n then replication. Replication i
/// at size n uses seed master ^ mix64(mix64(n) ^ i).
std::vector<ExperimentRecord> run_fluctuation_experiment(const ExperimentConfig& cfg);

/// Header comment "#fppcm-v1", a header row, then one row per record.
void write_records_csv(std::ostream& out, std::span<const ExperimentRecord> records);

struct QuantileRow {
  std::int64_t n = 0;
  double prob = 0.0;
  double residual_D = 0.0;
  double residual_H = 0.0;
  double residual_W = 0.0;
};

/// Nearest-rank quantile: the ceil(p N)-th smallest value (the smallest for p = 0).
double nearest_rank(std::vector<double> values, double p);
/// Per-n quantiles of each residual.
std::vector<QuantileRow> quantile_summary(std::span<const ExperimentRecord> records,
                                          std::span<const double> probs);

struct DichotomyBands {
  double explosive_iqr_ratio = 1.5;  // max/min of the explosive IQR across the grid
  double explosive_median_band = 1.0;  // max - min of the explosive medians
};

struct DichotomyRow {
  std::int64_t n = 0;
  double centering = 0.0;
  double explosive_median = 0.0;
  double explosive_iqr = 0.0;
  double conservative_median = 0.0;
  double conservative_iqr = 0.0;
};

struct DichotomySummary {
  std::vector<DichotomyRow> rows;
  bool conservative_increasing = false;
  double explosive_median_spread = 0.0;
  double explosive_iqr_ratio = 0.0;
  bool explosive_within_band = false;
  bool ordering_ok = true;
  std::size_t records = 0;

  bool pass() const { return conservative_increasing && explosive_within_band && ordering_ok; }
};

/// Runs both experiments and compares median and IQR of residual_W per n.
DichotomySummary run_dichotomy_comparison(const ExperimentConfig& explosive,
                                          const ExperimentConfig& conservative,
                                          const DichotomyBands& bands = {});
DichotomySummary summarize_dichotomy(std::span<const ExperimentRecord> explosive,
                                     std::span<const ExperimentRecord> conservative,
                                     const DichotomyBands& bands = {});
nlohmann::ordered_json to_json(const DichotomySummary& s);

/// Applies keys of a config document on top of `base`:
/// top level n, reps, seed, mode, Cp, alpha, k, B, diagnostics; sections [degree] and [weight].
ExperimentConfig apply_config(const ConfigDocument& doc, ExperimentConfig base);

std::vector<std::int64_t> parse_n_list(const std::string& text);

}  // namespace fppcm
