#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "fppcm/distributions.hpp"

namespace fppcm {

enum class BranchingOutcome { CapHit, ExtinctOrQuiet };

/// One run of the age-dependent branching process: the root is born at time 0,
/// every individual lives shift + X time units and at death produces an
/// offspring count drawn from the offspring law.
struct BranchingRun {
  BranchingOutcome outcome = BranchingOutcome::ExtinctOrQuiet;
  double hit_time = 0.0;      // death time that pushed births past the cap (CapHit only)
  std::uint64_t births = 1;   // individuals born by the end of the run, root included
  std::uint64_t deaths = 0;   // deaths processed (all at times <= horizon)
};

/// Only deaths at times <= horizon are processed. The run is a CapHit as soon as
/// births exceed cap. Lifetimes of all children are drawn whether or not they fall
/// inside the horizon, so the run at horizon t is a prefix of the run at any t' > t.
BranchingRun simulate_bp(const SizeBiasedLaw& offspring, const ExcessWeightLaw& lifetime,
                         double horizon, std::uint64_t cap, std::uint64_t seed,
                         double lifetime_shift = 0.0);

/// CapHit frequency per horizon over reps replications (replication r uses
/// derive_seed(seed, r)). Each replication is simulated once at the largest
/// horizon; it counts for horizon t when its hit time is <= t.
std::vector<double> explosion_probe(const SizeBiasedLaw& offspring,
                                    const ExcessWeightLaw& lifetime,
                                    std::span<const double> horizons, std::uint64_t cap,
                                    std::size_t reps, std::uint64_t seed,
                                    double lifetime_shift = 0.0);

/// CSV "horizon,reps,cap,cap_hit_frequency".
void write_probe_csv(std::ostream& out, std::span<const double> horizons, std::size_t reps,
                     std::uint64_t cap, std::span<const double> frequencies);

}  // namespace fppcm
