#pragma once

// Quenched Monte Carlo of the pair (G_n, X_n) in a fixed environment.
// Each step first draws G_n from row G_{n-1} of Q, then moves X up with
// probability p^(G_n) at the current site.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "rswalk/envgen.hpp"
#include "rswalk/model.hpp"
#include "rswalk/rng.hpp"

namespace rswalk {

struct WalkState {
  std::size_t g = 0;
  long x = 0;
};

/// One step of the walk, consuming two uniforms from rng.
WalkState step(const RegimeModel& model, const EnvRealization& e, WalkState s, Rng& rng);

struct Trajectory {
  WalkState start;
  std::uint64_t seed = 0;
  std::size_t stride = 1;
  /// States at n = 0, stride, 2 stride, ..., and at the final step.
  std::vector<std::size_t> n;
  std::vector<WalkState> states;
};

/// Deterministic per seed. Throws WindowError when the walk leaves the
/// realized window of a non-regenerable environment.
Trajectory run(const RegimeModel& model, const EnvRealization& e, WalkState start,
               std::size_t n_steps, std::uint64_t seed, std::size_t stride = 1);

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t replicates = 0;  ///< replicates entering the estimate
  std::size_t censored = 0;    ///< replicates excluded for reaching the horizon
  std::uint64_t seed = 0;
};

/// Mean and standard error (sample standard deviation / sqrt(n)).
McEstimate summarize(const std::vector<double>& values, std::uint64_t seed);

/// Runs body(rep) for rep in [0, replicates) on worker threads; results are
/// stored by replicate index so aggregation does not depend on scheduling.
void parallel_replicates(std::size_t replicates, const std::function<void(std::size_t)>& body);

/// Final displacement X_n - X_0 after n_steps, per replicate, with replicate
/// seeds derive_seed(seed, rep).
std::vector<double> final_displacements(const RegimeModel& model, const EnvRealization& e,
                                        WalkState start, std::size_t n_steps,
                                        std::size_t replicates, std::uint64_t seed);

McEstimate mc_drift(const RegimeModel& model, const EnvRealization& e, WalkState start,
                    std::size_t n_steps, std::size_t replicates, std::uint64_t seed);

struct HitRecord {
  bool hit = false;
  bool censored = false;
  std::size_t regime = 0;  ///< G at the hitting time
  std::size_t time = 0;
};

/// First passage to target within horizon steps. With a window, stepping
/// onto or beyond either edge ends the run as a miss, which matches the
/// killed boundary of the solver. Censored runs are excluded from the
/// estimate and counted separately.
struct McHitting {
  McEstimate estimate;
  std::size_t hits = 0;
  std::vector<HitRecord> records;
};

McHitting mc_hitting(const RegimeModel& model, const EnvRealization& e, WalkState start,
                     long target, std::size_t horizon, std::size_t replicates, std::uint64_t seed,
                     std::optional<Window> window = std::nullopt);

struct RegimeAtHit {
  std::vector<double> frequency;
  std::vector<double> std_error;
  std::size_t hits = 0;
  std::size_t censored = 0;
};

RegimeAtHit regime_at_hit(const RegimeModel& model, const EnvRealization& e, WalkState start,
                          long target, std::size_t horizon, std::size_t replicates,
                          std::uint64_t seed, std::optional<Window> window = std::nullopt);

}  // namespace rswalk
