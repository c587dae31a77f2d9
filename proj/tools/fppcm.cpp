// Command-line front end. Every option is collected as text first so that a
// --config file can override it by key before anything is interpreted.

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "fppcm/bp.hpp"
#include "fppcm/distributions.hpp"
#include "fppcm/harness.hpp"
#include "fppcm/law_config.hpp"
#include "fppcm/layers.hpp"
#include "fppcm/percolation.hpp"

namespace {

using namespace fppcm;

constexpr int kConfigError = 1;
constexpr int kInvariantFailure = 2;

using Values = std::map<std::string, std::string>;

struct Command {
  CLI::App* app = nullptr;
  Values values;
  std::function<int(const Values&, const ConfigDocument&)> run;
};

void add(Command& c, const std::string& name, const std::string& fallback, const std::string& help) {
  c.values[name] = fallback;
  c.app->add_option("--" + name, c.values[name], help)->capture_default_str();
}

double real(const Values& v, const std::string& key) {
  const std::string& text = v.at(key);
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size())
    throw std::invalid_argument(fmt::format("--{}: '{}' is not a number", key, text));
  return x;
}

std::uint64_t integer(const Values& v, const std::string& key) {
  const double x = real(v, key);
  if (x < 0.0 || x != std::floor(x) || x > 1.8e19)
    throw std::invalid_argument(fmt::format("--{} must be a nonnegative integer", key));
  return static_cast<std::uint64_t>(x);
}

std::vector<double> real_list(const Values& v, const std::string& key) {
  std::vector<double> out;
  std::stringstream in(v.at(key));
  std::string item;
  while (std::getline(in, item, ',')) {
    Values one{{key, item}};
    out.push_back(real(one, key));
  }
  if (out.empty()) throw std::invalid_argument(fmt::format("--{} is empty", key));
  return out;
}

DegreeLaw degree_law(const Values& v, const ConfigDocument& doc) {
  if (auto it = doc.find("degree"); it != doc.end()) return degree_law_from_section(it->second);
  const std::string& family = v.at("degree");
  if (family == "pure-power") return DegreeLaw::pure_power(real(v, "tau"), real(v, "gamma"), real(v, "C"));
  if (family == "corrected-power")
    return DegreeLaw::corrected_power(real(v, "tau"), real(v, "gamma"), real(v, "C"));
  throw std::invalid_argument(fmt::format("--degree: unknown family '{}'", family));
}

ExcessWeightLaw weight_law(const Values& v, const ConfigDocument& doc, const std::string& key) {
  if (auto it = doc.find(key); it != doc.end()) return weight_law_from_section(it->second);
  return parse_weight_spec(v.at(key));
}

// Writes to --out when given, otherwise to stdout.
void emit(const Values& v, const std::function<void(std::ostream&)>& body) {
  const std::string& path = v.at("out");
  if (path.empty() || path == "-") {
    body(std::cout);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error(fmt::format("cannot write '{}'", path));
  body(file);
  if (!file) throw std::runtime_error(fmt::format("write to '{}' failed", path));
}

void add_degree_options(Command& c) {
  add(c, "degree", "pure-power", "degree family: pure-power | corrected-power");
  add(c, "tau", "2.5", "power-law exponent in (2,3)");
  add(c, "gamma", "0.5", "slowly-varying exponent in (0,1)");
  add(c, "C", "1", "slowly-varying constant");
}

void add_experiment_options(Command& c) {
  add_degree_options(c);
  add(c, "n", "10000", "comma-separated graph sizes, ascending");
  add(c, "weight", "uniform01", "excess law family[:name=value,...]");
  add(c, "mode", "edge", "weight mode: edge | halfedge");
  add(c, "reps", "10", "replications per size");
  add(c, "seed", "1", "master seed");
  add(c, "Cp", "1", "percolation constant");
  add(c, "alpha", "0.6", "core exponent");
  add(c, "k", "16", "first layer degree y_0");
  add(c, "B", "0.1", "schedule constant");
  add(c, "diagnostics", "1", "layer-path diagnostics: 1 | 0");
  add(c, "threads", "0", "worker threads (0 = all cores)");
  add(c, "out", "", "output path (default stdout)");
}

ExperimentConfig experiment_config(const Values& v, const ConfigDocument& doc,
                                   const std::string& weight_key) {
  ExperimentConfig cfg;
  cfg.n_grid = parse_n_list(v.at("n"));
  cfg.reps = integer(v, "reps");
  cfg.degree_law = degree_law(v, doc);
  cfg.excess_law = weight_law(v, doc, weight_key);
  const std::string& mode = v.at("mode");
  if (mode == "edge") cfg.mode = WeightMode::PerEdge;
  else if (mode == "halfedge") cfg.mode = WeightMode::PerHalfEdge;
  else throw std::invalid_argument(fmt::format("--mode: unknown mode '{}'", mode));
  cfg.seed = integer(v, "seed");
  cfg.Cp = real(v, "Cp");
  cfg.alpha = real(v, "alpha");
  cfg.k = static_cast<std::int64_t>(integer(v, "k"));
  cfg.B = real(v, "B");
  cfg.diagnostics = v.at("diagnostics") == "1" || v.at("diagnostics") == "true";
  cfg.threads = static_cast<unsigned>(integer(v, "threads"));
  cfg.validate();
  return cfg;
}

int run_simulate(const Values& v, const ConfigDocument& doc) {
  const auto cfg = experiment_config(v, doc, "weight");
  const auto records = run_fluctuation_experiment(cfg);
  emit(v, [&](std::ostream& out) { write_records_csv(out, records); });
  return 0;
}

int run_dichotomy(const Values& v, const ConfigDocument& doc) {
  const auto explosive = experiment_config(v, doc, "weight");
  const auto conservative = experiment_config(v, doc, "conservative-weight");
  DichotomyBands bands;
  bands.explosive_iqr_ratio = real(v, "iqr-ratio");
  bands.explosive_median_band = real(v, "median-band");
  const auto summary = run_dichotomy_comparison(explosive, conservative, bands);
  emit(v, [&](std::ostream& out) { out << to_json(summary).dump(2) << '\n'; });
  return summary.pass() ? 0 : kInvariantFailure;
}

int run_check_explosive(const Values& v, const ConfigDocument& doc) {
  const auto law = weight_law(v, doc, "weight");
  const auto result =
      explosiveness_check(law, real(v, "crit-C"), real(v, "eps"), real(v, "tail-cut"));
  nlohmann::ordered_json j;
  j["law"] = law.name();
  j["C"] = real(v, "crit-C");
  j["verdict"] = to_string(result.verdict);
  j["integral"] = result.integral;
  j["truncation"] = result.truncation;
  j["error_bound"] = std::isfinite(result.error_bound) ? nlohmann::ordered_json(result.error_bound)
                                                       : nlohmann::ordered_json("inf");
  emit(v, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
  return 0;
}

// Every degree sequence with entries >= 1 and total <= max_total, in lexicographic order.
void compositions(std::int64_t remaining, std::vector<std::int64_t>& prefix,
                  std::vector<std::vector<std::int64_t>>& out) {
  if (!prefix.empty()) out.push_back(prefix);
  for (std::int64_t d = 1; d <= remaining; ++d) {
    prefix.push_back(d);
    compositions(remaining - d, prefix, out);
    prefix.pop_back();
  }
}

int run_percolation_equiv(const Values& v, const ConfigDocument&) {
  const auto probs = real_list(v, "p");
  const auto max_total = static_cast<std::int64_t>(integer(v, "max-L"));
  if (max_total > kMatchingEnumerationLimit)
    throw std::invalid_argument(fmt::format("--max-L must be <= {}", kMatchingEnumerationLimit));
  std::vector<std::vector<std::int64_t>> sequences;
  std::vector<std::int64_t> prefix;
  compositions(max_total, prefix, sequences);

  bool ok = true;
  const double tolerance = real(v, "tolerance");
  std::ostringstream body;
  body << "degrees,p,tv\n";
  for (double p : probs) {
    const auto policy = PercolationPolicy::constant(p);
    for (const auto& seq : sequences) {
      const auto fixed = fix_parity(seq);
      std::int64_t total = 0;
      for (auto d : fixed) total += d;
      if (total > max_total) continue;
      const double tv =
          total_variation(exact_half_edge_law(seq, policy), exact_edge_law(seq, policy));
      if (!(tv <= tolerance)) ok = false;
      std::string name;
      for (std::size_t i = 0; i < seq.size(); ++i) name += (i ? " " : "") + std::to_string(seq[i]);
      body << fmt::format("{},{},{}\n", name, p, tv);
    }
  }
  emit(v, [&](std::ostream& out) { out << body.str(); });
  return ok ? 0 : kInvariantFailure;
}

int run_schedule(const Values& v, const ConfigDocument& doc) {
  const auto law = degree_law(v, doc);
  const auto s = make_schedule(static_cast<std::int64_t>(integer(v, "k")), law.tau(), law.gamma(),
                               real(v, "B"), real(v, "n"), real(v, "alpha"));
  refined_lower_bound(s);
  const double gamma_p = std::abs(std::log(s.alpha)) / std::abs(std::log(s.tau - 2.0));
  const auto policy = policy_from_excess_law(weight_law(v, doc, "weight"), real(v, "Cp"), gamma_p);
  const double beta = v.at("beta").empty() ? law.mean() : real(v, "beta");
  emit(v, [&](std::ostream& out) { write_schedule_table(out, s, &policy, beta); });
  return 0;
}

int run_bp_probe(const Values& v, const ConfigDocument& doc) {
  const auto offspring = size_biased(degree_law(v, doc));
  const auto lifetime = weight_law(v, doc, "weight");
  const auto horizons = real_list(v, "horizons");
  const auto cap = integer(v, "cap");
  const auto reps = integer(v, "reps");
  const auto freq = explosion_probe(offspring, lifetime, horizons, cap, reps, integer(v, "seed"));
  emit(v, [&](std::ostream& out) { write_probe_csv(out, horizons, reps, cap, freq); });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"First-passage percolation on configuration-model graphs"};
  app.require_subcommand(1);
  std::string config_path;
  std::vector<std::unique_ptr<Command>> commands;

  auto command = [&](const std::string& name, const std::string& help, auto run) {
    auto c = std::make_unique<Command>();
    c->app = app.add_subcommand(name, help);
    c->app->add_option("--config", config_path, "plain-text config; its keys override flags");
    c->run = run;
    commands.push_back(std::move(c));
    return commands.back().get();
  };

  auto* simulate = command("simulate", "fluctuation experiment, one CSV row per replication",
                           run_simulate);
  add_experiment_options(*simulate);

  auto* dichotomy = command("dichotomy", "explosive vs conservative residual comparison (JSON)",
                            run_dichotomy);
  add_experiment_options(*dichotomy);
  add(*dichotomy, "conservative-weight", "double-exponential", "conservative excess law");
  add(*dichotomy, "iqr-ratio", "1.5", "allowed max/min ratio of the explosive IQR");
  add(*dichotomy, "median-band", "1", "allowed spread of the explosive medians");

  auto* check = command("check-explosive", "integral criterion verdict (JSON)", run_check_explosive);
  add(*check, "weight", "uniform01", "excess law family[:name=value,...]");
  add(*check, "crit-C", "1", "constant C in the criterion");
  add(*check, "eps", "0.001", "lower cut 1/eps of the integral");
  add(*check, "tail-cut", "1e12", "upper end of the quadrature");
  add(*check, "out", "", "output path (default stdout)");

  auto* equiv = command("percolation-equiv",
                        "exact TV distance between half-edge and edge percolation",
                        run_percolation_equiv);
  add(*equiv, "p", "0.3,0.5,1", "comma-separated constant retention probabilities");
  add(*equiv, "max-L", "8", "largest total degree enumerated");
  add(*equiv, "tolerance", "1e-9", "largest accepted TV distance");
  add(*equiv, "out", "", "output path (default stdout)");

  auto* schedule = command("schedule", "layer schedule table", run_schedule);
  add_degree_options(*schedule);
  add(*schedule, "k", "16", "first layer degree y_0");
  add(*schedule, "B", "0.1", "schedule constant");
  add(*schedule, "n", "1000000", "graph size");
  add(*schedule, "alpha", "0.6", "core exponent");
  add(*schedule, "Cp", "1", "percolation constant");
  add(*schedule, "weight", "uniform01", "excess law for xi");
  add(*schedule, "beta", "", "L_n/n (default E[D])");
  add(*schedule, "out", "", "output path (default stdout)");

  auto* probe = command("bp-probe", "branching-process CapHit frequencies (CSV)", run_bp_probe);
  add_degree_options(*probe);
  add(*probe, "weight", "uniform01", "lifetime law family[:name=value,...]");
  add(*probe, "horizons", "0.25,0.5,1", "comma-separated horizons");
  add(*probe, "cap", "1000000", "population cap");
  add(*probe, "reps", "500", "replications");
  add(*probe, "seed", "1", "master seed");
  add(*probe, "out", "", "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    for (auto& c : commands) {
      if (!c->app->parsed()) continue;
      ConfigDocument doc;
      if (!config_path.empty()) {
        doc = read_config_file(config_path);
        if (auto top = doc.find(""); top != doc.end()) {
          for (const auto& [key, value] : top->second) {
            auto it = c->values.find(key);
            if (it == c->values.end())
              throw std::invalid_argument(fmt::format("config: unknown key '{}'", key));
            it->second = value;
          }
        }
      }
      return c->run(c->values, doc);
    }
  } catch (const std::logic_error& e) {
    // invalid_argument derives from logic_error but is a configuration problem.
    if (dynamic_cast<const std::invalid_argument*>(&e) != nullptr) {
      std::cerr << "error: " << e.what() << '\n';
      return kConfigError;
    }
    std::cerr << "invariant failure: " << e.what() << '\n';
    return kInvariantFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return kConfigError;
}
