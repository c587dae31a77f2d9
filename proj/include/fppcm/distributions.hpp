#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "fppcm/rng.hpp"

namespace fppcm {

enum class DegreeFamily { PurePower, CorrectedPower, Table };

/// I.i.d. degree law with F(1) = 0.
///
/// PurePower samples D = max(2, ceil((1-U)^{-1/(tau-1)})), so P(D > x) = x^{-(tau-1)}
/// at every integer x >= 2. CorrectedPower replaces the survival function by
/// S(x) = x^{-(tau-1)} exp(-C (log x)^gamma), which sits on the lower edge of the
/// power-law envelope. Table is an explicit pmf on integers >= 2, used for
/// small hand-checkable cases.
class DegreeLaw {
 public:
  static DegreeLaw pure_power(double tau, double gamma = 0.5, double C = 1.0);
  static DegreeLaw corrected_power(double tau, double gamma, double C);
  static DegreeLaw table(std::map<std::int64_t, double> pmf);

  DegreeFamily family() const noexcept { return family_; }
  double tau() const noexcept { return tau_; }
  double gamma() const noexcept { return gamma_; }
  double C() const noexcept { return C_; }
  std::int64_t min_degree() const noexcept { return min_degree_; }
  const std::map<std::int64_t, double>& table_pmf() const noexcept { return table_; }

  /// P(D > x).
  double survival(double x) const;
  double pmf(std::int64_t k) const;
  double mean() const;
  /// sum_{y > x} P(D > y), for integer x >= 0.
  double tail_sum(std::int64_t x) const;
  /// Inverse-CDF transform of a uniform U in [0,1).
  std::int64_t quantile(double u) const;
  std::int64_t sample(Rng& rng) const { return quantile(uniform01(rng)); }

  /// Checks x^{-tau+1-C(log x)^{gamma-1}} <= 1-F(x) <= x^{-tau+1+C(log x)^{gamma-1}}
  /// at every integer x in [x_lo, x_hi]. Table laws have no envelope and return false.
  bool within_envelope(std::int64_t x_lo, std::int64_t x_hi) const;

 private:
  DegreeLaw() = default;
  double continuous_survival(double x) const;  // S(x) for real x >= 1

  DegreeFamily family_ = DegreeFamily::PurePower;
  double tau_ = 2.5;
  double gamma_ = 0.5;
  double C_ = 1.0;
  std::int64_t min_degree_ = 2;
  std::map<std::int64_t, double> table_;
  double mean_ = 0.0;
};

/// n i.i.d. degrees, deterministic given the seed.
std::vector<std::int64_t> sample_degrees(const DegreeLaw& law, std::size_t n,
                                         std::uint64_t seed);

/// Offspring law B with P(B = k) = (k+1) P(D = k+1) / E[D].
///
/// The pmf is held explicitly on [0, head) and the remaining mass P(B >= head) is
/// kept analytically, so nothing is lost to truncation; sampling past the head
/// inverts the exact tail formula. A law can also be given directly as a pmf.
class SizeBiasedLaw {
 public:
  static SizeBiasedLaw from_pmf(std::vector<double> pmf);

  double pmf(std::int64_t k) const;
  /// P(B >= k).
  double tail(std::int64_t k) const;
  double head_mass() const noexcept { return head_mass_; }
  double tail_mass() const noexcept { return tail_mass_; }
  std::int64_t head_size() const noexcept { return static_cast<std::int64_t>(pmf_.size()); }
  std::int64_t sample(Rng& rng) const;

  /// Values past this are reported as this value.
  static constexpr std::int64_t max_value = std::int64_t{1} << 62;

 private:
  friend SizeBiasedLaw size_biased(const DegreeLaw&, std::int64_t);
  SizeBiasedLaw() = default;
  double analytic_tail(std::int64_t k) const;

  std::vector<double> pmf_;
  std::vector<double> survival_;  // survival_[k] = P(B > k) for k < head
  double head_mass_ = 1.0;
  double tail_mass_ = 0.0;
  bool has_source_ = false;
  DegreeLaw source_ = DegreeLaw::pure_power(2.5);
};

SizeBiasedLaw size_biased(const DegreeLaw& law, std::int64_t truncation = 1 << 16);

enum class WeightFamily { Zero, Uniform01, Exponential, Power, DoubleExponential, Table };

/// Result of bounding the criterion integral beyond the truncation point.
struct TailCertificate {
  enum class Kind { Convergent, Divergent, None };
  Kind kind = Kind::None;
  double bound = 0.0;  // majorant of the remaining integral when Convergent
};

/// Excess-weight law X with inf supp(X) = 0.
///
/// Zero       point mass at 0 (degenerate; tests only)
/// Uniform01  F(x) = x on [0,1]
/// Exponential(rate)
/// Power(beta)           F(x) = x^beta on [0,1]
/// DoubleExponential(upper)  F(x) = exp(e^{1/upper} - e^{1/x}) on (0, upper]
/// Table      piecewise-linear CDF through the knots (x_j, F_j), x_0 = 0
class ExcessWeightLaw {
 public:
  static ExcessWeightLaw zero();
  static ExcessWeightLaw uniform01();
  static ExcessWeightLaw exponential(double rate = 1.0);
  static ExcessWeightLaw power(double beta);
  static ExcessWeightLaw double_exponential(double upper = 1.0);
  static ExcessWeightLaw table(std::vector<std::pair<double, double>> knots);

  WeightFamily family() const noexcept { return family_; }
  std::string name() const;
  /// Named parameters in a stable order.
  std::vector<std::pair<std::string, double>> parameters() const;

  double cdf(double x) const;
  /// Generalized inverse inf{t : F(t) >= y}; F^{-1}(0) = 0.
  double quantile(double y) const;
  /// quantile(exp(log_y)) without underflow for very negative log_y.
  double quantile_from_log(double log_y) const;
  double sample(Rng& rng) const { return quantile(uniform01_open_closed(rng)); }
  /// sup supp(X); +inf for unbounded laws.
  double upper_endpoint() const;

  /// Bound on the integral of F^{-1}(e^{-Cu})/u over [T, inf).
  TailCertificate criterion_tail(double C, double T) const;

 private:
  ExcessWeightLaw() = default;

  WeightFamily family_ = WeightFamily::Uniform01;
  double param_ = 1.0;
  std::vector<std::pair<double, double>> knots_;
};

enum class Verdict { Explosive, Conservative, Inconclusive };
std::string to_string(Verdict v);

struct ExplosivenessVerdict {
  Verdict verdict = Verdict::Inconclusive;
  double integral = 0.0;     // quadrature over [1/eps, tail_cut]
  double truncation = 0.0;   // tail_cut
  double error_bound = 0.0;  // quadrature error + tail majorant; +inf when divergent/unknown
};

/// Decides convergence of int_{1/eps}^inf F_X^{-1}(e^{-Cu}) du/u.
ExplosivenessVerdict explosiveness_check(const ExcessWeightLaw& law, double C, double eps,
                                         double tail_cut);

}  // namespace fppcm
