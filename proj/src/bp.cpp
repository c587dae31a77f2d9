#include "fppcm/bp.hpp"

#include <algorithm>
#include <functional>
#include <ostream>
#include <queue>
#include <stdexcept>

#include <fmt/format.h>

#include "fppcm/parallel.hpp"
#include "fppcm/rng.hpp"

namespace fppcm {

BranchingRun simulate_bp(const SizeBiasedLaw& offspring, const ExcessWeightLaw& lifetime,
                         double horizon, std::uint64_t cap, std::uint64_t seed,
                         double lifetime_shift) {
  if (!(horizon > 0.0)) throw std::invalid_argument("simulate_bp: horizon must be > 0");
  if (cap < 1) throw std::invalid_argument("simulate_bp: cap must be >= 1");
  if (!(lifetime_shift >= 0.0)) throw std::invalid_argument("simulate_bp: negative lifetime shift");

  Rng rng(seed);
  BranchingRun run;
  std::priority_queue<double, std::vector<double>, std::greater<>> deaths;
  const double root_death = lifetime_shift + lifetime.sample(rng);
  if (root_death <= horizon) deaths.push(root_death);

  while (!deaths.empty()) {
    const double t = deaths.top();
    deaths.pop();
    ++run.deaths;
    const auto children = static_cast<std::uint64_t>(offspring.sample(rng));
    if (children > cap - std::min(cap, run.births)) {
      run.births += std::min(children, cap + 1);
      run.outcome = BranchingOutcome::CapHit;
      run.hit_time = t;
      return run;
    }
    run.births += children;
    for (std::uint64_t c = 0; c < children; ++c) {
      const double death = t + lifetime_shift + lifetime.sample(rng);
      if (death <= horizon) deaths.push(death);
    }
  }
  return run;
}

std::vector<double> explosion_probe(const SizeBiasedLaw& offspring,
                                    const ExcessWeightLaw& lifetime,
                                    std::span<const double> horizons, std::uint64_t cap,
                                    std::size_t reps, std::uint64_t seed,
                                    double lifetime_shift) {
  if (horizons.empty()) throw std::invalid_argument("explosion_probe: empty horizon grid");
  if (reps < 1) throw std::invalid_argument("explosion_probe: reps must be >= 1");
  const double top = *std::max_element(horizons.begin(), horizons.end());

  std::vector<BranchingRun> runs(reps);
  parallel_for(reps, [&](std::size_t r) {
    runs[r] = simulate_bp(offspring, lifetime, top, cap, derive_seed(seed, r), lifetime_shift);
  });

  std::vector<double> freq;
  for (double t : horizons) {
    const auto hits = std::count_if(runs.begin(), runs.end(), [&](const BranchingRun& run) {
      return run.outcome == BranchingOutcome::CapHit && run.hit_time <= t;
    });
    freq.push_back(static_cast<double>(hits) / static_cast<double>(reps));
  }

  // Larger horizons can only add hits; the sorted grid must show that.
  std::vector<std::pair<double, double>> by_t;
  for (std::size_t i = 0; i < horizons.size(); ++i) by_t.emplace_back(horizons[i], freq[i]);
  std::sort(by_t.begin(), by_t.end());
  for (std::size_t i = 1; i < by_t.size(); ++i)
    if (by_t[i].second < by_t[i - 1].second)
      throw std::logic_error("explosion_probe: frequency decreased with the horizon");
  return freq;
}

void write_probe_csv(std::ostream& out, std::span<const double> horizons, std::size_t reps,
                     std::uint64_t cap, std::span<const double> frequencies) {
  if (horizons.size() != frequencies.size())
    throw std::invalid_argument("write_probe_csv: size mismatch");
  out << "horizon,reps,cap,cap_hit_frequency\n";
  for (std::size_t i = 0; i < horizons.size(); ++i)
    out << fmt::format("{},{},{},{}\n", horizons[i], reps, cap, frequencies[i]);
}

}  // namespace fppcm
