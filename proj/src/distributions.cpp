#include "fppcm/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <fmt/format.h>

namespace fppcm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::int64_t kMaxDegree = std::int64_t{1} << 62;
// Below this point tail sums are accumulated term by term; above, Euler-Maclaurin.
constexpr std::int64_t kEulerMaclaurinStart = 1000;

void check_power_parameters(double tau, double gamma, double C) {
  if (!(tau > 2.0 && tau < 3.0))
    throw std::invalid_argument(fmt::format("degree law: tau={} outside (2,3)", tau));
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument(fmt::format("degree law: gamma={} outside (0,1)", gamma));
  if (!(C > 0.0)) throw std::invalid_argument(fmt::format("degree law: C={} must be > 0", C));
}

}  // namespace

// ---------------------------------------------------------------- DegreeLaw

DegreeLaw DegreeLaw::pure_power(double tau, double gamma, double C) {
  check_power_parameters(tau, gamma, C);
  DegreeLaw law;
  law.family_ = DegreeFamily::PurePower;
  law.tau_ = tau;
  law.gamma_ = gamma;
  law.C_ = C;
  law.mean_ = 2.0 + law.tail_sum(1);
  return law;
}

DegreeLaw DegreeLaw::corrected_power(double tau, double gamma, double C) {
  check_power_parameters(tau, gamma, C);
  DegreeLaw law;
  law.family_ = DegreeFamily::CorrectedPower;
  law.tau_ = tau;
  law.gamma_ = gamma;
  law.C_ = C;
  law.mean_ = 2.0 + law.tail_sum(1);
  return law;
}

DegreeLaw DegreeLaw::table(std::map<std::int64_t, double> pmf) {
  if (pmf.empty()) throw std::invalid_argument("degree table: empty pmf");
  double total = 0.0;
  for (auto [k, p] : pmf) {
    if (k < 2) throw std::invalid_argument("degree table: support must be >= 2 (F(1) = 0)");
    if (!(p >= 0.0)) throw std::invalid_argument("degree table: negative probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument(fmt::format("degree table: pmf sums to {}", total));
  DegreeLaw law;
  law.family_ = DegreeFamily::Table;
  law.table_ = std::move(pmf);
  law.min_degree_ = law.table_.begin()->first;
  law.mean_ = 0.0;
  for (auto [k, p] : law.table_) law.mean_ += static_cast<double>(k) * p;
  return law;
}

double DegreeLaw::continuous_survival(double x) const {
  if (x <= 1.0) return 1.0;
  const double t = std::log(x);
  const double s = tau_ - 1.0;
  if (family_ == DegreeFamily::PurePower) return std::exp(-s * t);
  return std::exp(-s * t - C_ * std::pow(t, gamma_));
}

double DegreeLaw::survival(double x) const {
  if (family_ == DegreeFamily::Table) {
    double s = 0.0;
    for (auto it = table_.upper_bound(static_cast<std::int64_t>(std::floor(x)));
         it != table_.end(); ++it)
      s += it->second;
    return x < static_cast<double>(min_degree_) ? 1.0 : s;
  }
  if (x < 2.0) return 1.0;
  return continuous_survival(std::floor(x));
}

double DegreeLaw::pmf(std::int64_t k) const {
  if (family_ == DegreeFamily::Table) {
    auto it = table_.find(k);
    return it == table_.end() ? 0.0 : it->second;
  }
  if (k < 2) return 0.0;
  if (k == 2) return 1.0 - continuous_survival(2.0);
  return continuous_survival(static_cast<double>(k - 1)) -
         continuous_survival(static_cast<double>(k));
}

double DegreeLaw::mean() const { return mean_; }

double DegreeLaw::tail_sum(std::int64_t x) const {
  if (x < 0) throw std::invalid_argument("tail_sum: x must be >= 0");
  if (family_ == DegreeFamily::Table) {
    double total = 0.0;
    const std::int64_t top = table_.rbegin()->first;
    for (std::int64_t y = x + 1; y < top; ++y) total += survival(static_cast<double>(y));
    return total;
  }
  if (x == 0) return 1.0 + tail_sum(1);

  const std::int64_t m = std::max<std::int64_t>(x + 1, kEulerMaclaurinStart);
  double head = 0.0;
  for (std::int64_t y = x + 1; y < m; ++y) head += continuous_survival(static_cast<double>(y));

  const double s = tau_ - 1.0;
  const double M = static_cast<double>(m);
  const double f = continuous_survival(M);
  double integral = 0.0;
  double fprime = 0.0;
  double fthird = 0.0;
  if (family_ == DegreeFamily::PurePower) {
    integral = M * f / (s - 1.0);
    fprime = -s * f / M;
    fthird = -s * (s + 1.0) * (s + 2.0) * f / (M * M * M);
  } else {
    const double g = gamma_;
    const double c = C_;
    auto integrand = [s, g, c](double t) { return std::exp((1.0 - s) * t - c * std::pow(t, g)); };
    integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        integrand, std::log(M), kInf, 20, 1e-12);
    const double t = std::log(M);
    fprime = f * (-s - c * g * std::pow(t, g - 1.0)) / M;
  }
  return head + integral + 0.5 * f - fprime / 12.0 + fthird / 720.0;
}

std::int64_t DegreeLaw::quantile(double u) const {
  if (!(u >= 0.0 && u < 1.0)) throw std::invalid_argument("degree quantile: u outside [0,1)");
  if (family_ == DegreeFamily::Table) {
    double cum = 0.0;
    for (auto [k, p] : table_) {
      cum += p;
      if (cum > u) return k;
    }
    return table_.rbegin()->first;
  }
  const double s = tau_ - 1.0;
  const double q = 1.0 - u;
  double v = 0.0;
  if (family_ == DegreeFamily::PurePower) {
    v = std::pow(q, -1.0 / s);
  } else {
    const double r = -std::log(q);
    if (r <= 0.0) return 2;
    const double g = gamma_;
    const double c = C_;
    auto h = [s, g, c, r](double t) { return s * t + c * std::pow(t, g) - r; };
    std::uintmax_t iters = 200;
    auto [lo, hi] = boost::math::tools::toms748_solve(
        h, 0.0, r / s, -r, c * std::pow(r / s, g), boost::math::tools::eps_tolerance<double>(52),
        iters);
    v = std::exp(0.5 * (lo + hi));
  }
  if (!(v < static_cast<double>(kMaxDegree))) return kMaxDegree;
  return std::max<std::int64_t>(2, static_cast<std::int64_t>(std::ceil(v)));
}

bool DegreeLaw::within_envelope(std::int64_t x_lo, std::int64_t x_hi) const {
  if (family_ == DegreeFamily::Table) return false;
  constexpr double rel = 1e-12;
  for (std::int64_t x = std::max<std::int64_t>(x_lo, 2); x <= x_hi; ++x) {
    const double xd = static_cast<double>(x);
    const double corr = C_ * std::pow(std::log(xd), gamma_ - 1.0);
    const double lo = std::pow(xd, -tau_ + 1.0 - corr);
    const double hi = std::pow(xd, -tau_ + 1.0 + corr);
    const double sv = survival(xd);
    if (sv < lo * (1.0 - rel) || sv > hi * (1.0 + rel)) return false;
  }
  return true;
}

std::vector<std::int64_t> sample_degrees(const DegreeLaw& law, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample_degrees: n must be >= 1");
  Rng rng(seed);
  std::vector<std::int64_t> out(n);
  for (auto& d : out) d = law.sample(rng);
  return out;
}

// ------------------------------------------------------------ SizeBiasedLaw

SizeBiasedLaw size_biased(const DegreeLaw& law, std::int64_t truncation) {
  if (law.family() != DegreeFamily::Table && !(law.tau() > 2.0))
    throw std::invalid_argument("size_biased: infinite-mean degree law");
  if (truncation < 2) throw std::invalid_argument("size_biased: truncation must be >= 2");

  SizeBiasedLaw b;
  const double mean = law.mean();
  std::int64_t head = truncation;
  if (law.family() == DegreeFamily::Table) head = law.table_pmf().rbegin()->first;

  b.pmf_.resize(static_cast<std::size_t>(head));
  for (std::int64_t k = 0; k < head; ++k)
    b.pmf_[static_cast<std::size_t>(k)] =
        static_cast<double>(k + 1) * law.pmf(k + 1) / mean;

  b.source_ = law;
  b.has_source_ = law.family() != DegreeFamily::Table;
  b.tail_mass_ = b.has_source_ ? b.analytic_tail(head) : 0.0;

  // Renormalize head + tail to one.
  double head_total = 0.0;
  for (double p : b.pmf_) head_total += p;
  const double z = head_total + b.tail_mass_;
  for (double& p : b.pmf_) p /= z;
  b.tail_mass_ /= z;
  b.head_mass_ = head_total / z;

  b.survival_.resize(b.pmf_.size());
  double acc = b.tail_mass_;
  for (std::size_t k = b.pmf_.size(); k-- > 0;) {
    b.survival_[k] = acc;
    acc += b.pmf_[k];
  }
  return b;
}

SizeBiasedLaw SizeBiasedLaw::from_pmf(std::vector<double> pmf) {
  if (pmf.empty()) throw std::invalid_argument("offspring pmf: empty");
  double total = 0.0;
  for (double p : pmf) {
    if (!(p >= 0.0)) throw std::invalid_argument("offspring pmf: negative probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("offspring pmf: must sum to 1");
  SizeBiasedLaw b;
  b.pmf_ = std::move(pmf);
  b.survival_.resize(b.pmf_.size());
  double acc = 0.0;
  for (std::size_t k = b.pmf_.size(); k-- > 0;) {
    b.survival_[k] = acc;
    acc += b.pmf_[k];
  }
  b.head_mass_ = 1.0;
  b.tail_mass_ = 0.0;
  return b;
}

double SizeBiasedLaw::analytic_tail(std::int64_t k) const {
  // P(B >= k) = [(k+1) P(D > k) + sum_{y>k} P(D > y)] / E[D]
  const double kd = static_cast<double>(k);
  return ((kd + 1.0) * source_.survival(kd) + source_.tail_sum(k)) / source_.mean();
}

double SizeBiasedLaw::pmf(std::int64_t k) const {
  if (k < 0) return 0.0;
  if (k < head_size()) return pmf_[static_cast<std::size_t>(k)];
  if (!has_source_) return 0.0;
  const double scale = tail_mass_ / analytic_tail(head_size());
  return scale * static_cast<double>(k + 1) * source_.pmf(k + 1) / source_.mean();
}

double SizeBiasedLaw::tail(std::int64_t k) const {
  if (k <= 0) return 1.0;
  if (k <= head_size()) return survival_[static_cast<std::size_t>(k - 1)];
  if (!has_source_) return 0.0;
  const double scale = tail_mass_ / analytic_tail(head_size());
  return scale * analytic_tail(k);
}

std::int64_t SizeBiasedLaw::sample(Rng& rng) const {
  // B = min{k : P(B > k) < v}, v uniform on (0,1].
  const double v = uniform01_open_closed(rng);
  auto it = std::partition_point(survival_.begin(), survival_.end(),
                                 [v](double s) { return s >= v; });
  if (it != survival_.end()) return static_cast<std::int64_t>(it - survival_.begin());
  if (!has_source_) return head_size() - 1;

  std::int64_t lo = head_size() - 1;  // P(B > lo) >= v
  std::int64_t hi = head_size();
  while (tail(hi + 1) >= v) {
    lo = hi;
    if (hi >= max_value / 2) return max_value;
    hi *= 2;
  }
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (tail(mid + 1) >= v)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

// ---------------------------------------------------------- ExcessWeightLaw

ExcessWeightLaw ExcessWeightLaw::zero() {
  ExcessWeightLaw law;
  law.family_ = WeightFamily::Zero;
  return law;
}

ExcessWeightLaw ExcessWeightLaw::uniform01() {
  ExcessWeightLaw law;
  law.family_ = WeightFamily::Uniform01;
  return law;
}

ExcessWeightLaw ExcessWeightLaw::exponential(double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("exponential: rate must be > 0");
  ExcessWeightLaw law;
  law.family_ = WeightFamily::Exponential;
  law.param_ = rate;
  return law;
}

ExcessWeightLaw ExcessWeightLaw::power(double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("power: beta must be > 0");
  ExcessWeightLaw law;
  law.family_ = WeightFamily::Power;
  law.param_ = beta;
  return law;
}

ExcessWeightLaw ExcessWeightLaw::double_exponential(double upper) {
  if (!(upper > 0.0 && upper < 700.0))
    throw std::invalid_argument("double-exponential: upper must lie in (0, 700)");
  ExcessWeightLaw law;
  law.family_ = WeightFamily::DoubleExponential;
  law.param_ = upper;
  return law;
}

ExcessWeightLaw ExcessWeightLaw::table(std::vector<std::pair<double, double>> knots) {
  if (knots.size() < 2) throw std::invalid_argument("weight table: need at least two knots");
  if (knots.front().first != 0.0) throw std::invalid_argument("weight table: first knot must be x=0");
  for (std::size_t j = 1; j < knots.size(); ++j) {
    if (!(knots[j].first > knots[j - 1].first))
      throw std::invalid_argument("weight table: x must be strictly increasing");
    if (knots[j].second < knots[j - 1].second)
      throw std::invalid_argument("weight table: F must be nondecreasing");
  }
  if (knots.front().second < 0.0 || knots.back().second != 1.0)
    throw std::invalid_argument("weight table: F must start >= 0 and end at 1");
  if (!(knots[1].second > 0.0))
    throw std::invalid_argument("weight table: F must be positive right of 0 (inf supp = 0)");
  ExcessWeightLaw law;
  law.family_ = WeightFamily::Table;
  law.knots_ = std::move(knots);
  return law;
}

std::string ExcessWeightLaw::name() const {
  switch (family_) {
    case WeightFamily::Zero: return "zero";
    case WeightFamily::Uniform01: return "uniform01";
    case WeightFamily::Exponential: return "exponential";
    case WeightFamily::Power: return "power";
    case WeightFamily::DoubleExponential: return "double-exponential";
    case WeightFamily::Table: return "table";
  }
  return "?";
}

std::vector<std::pair<std::string, double>> ExcessWeightLaw::parameters() const {
  switch (family_) {
    case WeightFamily::Exponential: return {{"rate", param_}};
    case WeightFamily::Power: return {{"beta", param_}};
    case WeightFamily::DoubleExponential: return {{"upper", param_}};
    case WeightFamily::Table: {
      std::vector<std::pair<std::string, double>> out;
      for (std::size_t j = 0; j < knots_.size(); ++j) {
        out.emplace_back(fmt::format("x{}", j), knots_[j].first);
        out.emplace_back(fmt::format("F{}", j), knots_[j].second);
      }
      return out;
    }
    default: return {};
  }
}

double ExcessWeightLaw::cdf(double x) const {
  if (x < 0.0) return 0.0;
  switch (family_) {
    case WeightFamily::Zero: return 1.0;
    case WeightFamily::Uniform01: return std::min(x, 1.0);
    case WeightFamily::Exponential: return -std::expm1(-param_ * x);
    case WeightFamily::Power: return x >= 1.0 ? 1.0 : std::pow(x, param_);
    case WeightFamily::DoubleExponential:
      if (x >= param_) return 1.0;
      if (x == 0.0) return 0.0;
      return std::exp(std::exp(1.0 / param_) - std::exp(1.0 / x));
    case WeightFamily::Table: {
      if (x >= knots_.back().first) return 1.0;
      auto it = std::upper_bound(knots_.begin(), knots_.end(), x,
                                 [](double v, const auto& k) { return v < k.first; });
      const auto& [x1, f1] = *it;
      const auto& [x0, f0] = *(it - 1);
      return f0 + (f1 - f0) * (x - x0) / (x1 - x0);
    }
  }
  return 0.0;
}

double ExcessWeightLaw::quantile(double y) const {
  if (!(y >= 0.0 && y <= 1.0)) throw std::invalid_argument("weight quantile: y outside [0,1]");
  if (y == 0.0) return 0.0;
  if (family_ == WeightFamily::Table) {
    if (y <= knots_.front().second) return 0.0;
    auto it = std::lower_bound(knots_.begin(), knots_.end(), y,
                               [](const auto& k, double v) { return k.second < v; });
    const auto& [x1, f1] = *it;
    const auto& [x0, f0] = *(it - 1);
    return std::min(x1, x0 + (y - f0) / (f1 - f0) * (x1 - x0));
  }
  return quantile_from_log(std::log(y));
}

double ExcessWeightLaw::quantile_from_log(double log_y) const {
  if (log_y > 0.0) throw std::invalid_argument("weight quantile: log y must be <= 0");
  if (log_y == -kInf) return 0.0;
  switch (family_) {
    case WeightFamily::Zero: return 0.0;
    case WeightFamily::Uniform01: return std::exp(log_y);
    case WeightFamily::Exponential: return -std::log1p(-std::exp(log_y)) / param_;
    case WeightFamily::Power: return std::exp(log_y / param_);
    case WeightFamily::DoubleExponential:
      return 1.0 / std::log(std::exp(1.0 / param_) - log_y);
    case WeightFamily::Table: return quantile(std::exp(log_y));
  }
  return 0.0;
}

double ExcessWeightLaw::upper_endpoint() const {
  switch (family_) {
    case WeightFamily::Zero: return 0.0;
    case WeightFamily::Uniform01: return 1.0;
    case WeightFamily::Exponential: return kInf;
    case WeightFamily::Power: return 1.0;
    case WeightFamily::DoubleExponential: return param_;
    case WeightFamily::Table: return knots_.back().first;
  }
  return kInf;
}

TailCertificate ExcessWeightLaw::criterion_tail(double C, double T) const {
  using Kind = TailCertificate::Kind;
  const double ct = C * T;
  const double decay = std::exp(-ct) / ct;  // majorant of int_T^inf e^{-Cu}/u du
  switch (family_) {
    case WeightFamily::Zero: return {Kind::Convergent, 0.0};
    case WeightFamily::Uniform01: return {Kind::Convergent, decay};
    case WeightFamily::Power:
      // int e^{-Cu/beta}/u du <= beta e^{-CT/beta}/(CT)
      return {Kind::Convergent, param_ * std::exp(-ct / param_) / ct};
    case WeightFamily::Exponential:
      // -log(1-y)/rate <= 2y/rate for y <= 1/2
      if (ct < std::log(2.0)) return {};
      return {Kind::Convergent, 2.0 * decay / param_};
    case WeightFamily::DoubleExponential:
      // 1/(u log(e^{1/upper} + Cu)) >= 1/(u log(2Cu)) once Cu >= e^{1/upper}; log-log divergent.
      if (ct < std::exp(1.0 / param_)) return {};
      return {Kind::Divergent, kInf};
    case WeightFamily::Table: {
      const auto [x1, f1] = knots_[1];
      const double f0 = knots_[0].second;
      if (f0 > 0.0 && std::exp(-ct) <= f0) return {Kind::Convergent, 0.0};
      if (f0 == 0.0 && std::exp(-ct) <= f1) return {Kind::Convergent, x1 / f1 * decay};
      return {};
    }
  }
  return {};
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Explosive: return "Explosive";
    case Verdict::Conservative: return "Conservative";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

ExplosivenessVerdict explosiveness_check(const ExcessWeightLaw& law, double C, double eps,
                                         double tail_cut) {
  if (!(C > 0.0)) throw std::invalid_argument("explosiveness_check: C must be > 0");
  if (!(eps > 0.0)) throw std::invalid_argument("explosiveness_check: eps must be > 0");
  if (!(tail_cut > 1.0 / eps))
    throw std::invalid_argument("explosiveness_check: tail_cut must exceed 1/eps");

  // du/u = dt with u = e^t keeps the slowly decaying cases smooth.
  auto integrand = [&law, C](double t) { return law.quantile_from_log(-C * std::exp(t)); };
  double quad_error = 0.0;
  const double integral = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      integrand, std::log(1.0 / eps), std::log(tail_cut), 20, 1e-6, &quad_error);

  ExplosivenessVerdict out;
  out.integral = integral;
  out.truncation = tail_cut;
  const TailCertificate cert = law.criterion_tail(C, tail_cut);
  switch (cert.kind) {
    case TailCertificate::Kind::Convergent:
      out.verdict = Verdict::Explosive;
      out.error_bound = quad_error + cert.bound;
      break;
    case TailCertificate::Kind::Divergent:
      out.verdict = Verdict::Conservative;
      out.error_bound = kInf;
      break;
    case TailCertificate::Kind::None:
      out.verdict = Verdict::Inconclusive;
      out.error_bound = kInf;
      break;
  }
  return out;
}

}  // namespace fppcm
