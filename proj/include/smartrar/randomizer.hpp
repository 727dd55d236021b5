#pragma once

#include <vector>

#include "smartrar/config.hpp"
#include "smartrar/posterior.hpp"
#include "smartrar/regime_value.hpp"
#include "smartrar/rng.hpp"
#include "smartrar/trial_model.hpp"

namespace smartrar {

// Assignment probabilities in force during one week. pi1 is indexed by
// stage-1 arm position; pi2 is row-major [stage1_pos][stage2_pos], each row
// the stage-2 distribution for non-responders whose stage-1 arm is the row.
struct RandomizationTable {
  int week = 0;
  std::vector<double> pi1;
  std::vector<double> pi2;

  int cell(int i1, int i2, int k2) const { return i1 * k2 + i2; }
};

// Equal randomization at both stages (1/k1 and 1/k2 exactly).
RandomizationTable uniform_table(const ArmSets& arms, int week);

// Fraction of draws under which each stage-1 arm starts the best regime.
// Ties inside a draw go to the lexicographically smallest position, matching
// optimal_regime_pos.
std::vector<double> stage1_optimality_probs(const std::vector<ThetaDraw>& draws);

// Fraction of draws under which each stage-2 arm is best for non-responders
// from stage-1 position i1 (same draws, so the two stages stay coherent).
std::vector<double> stage2_optimality_probs(const std::vector<ThetaDraw>& draws, int i1);

// rho^psi, renormalized. psi = 0 gives the uniform distribution (0^0 = 1);
// for psi > 0, zero entries stay zero.
std::vector<double> damp_and_normalize(const std::vector<double>& rho, double psi);

// Constrains a probability vector to [lo, hi] per entry while preserving the
// total and the ranking. Entries below lo are raised to exactly lo and the
// remainder rescaled; entries above hi are then capped at exactly hi and the
// surplus redistributed proportionally. Throws if the bounds are infeasible
// for the vector's length (needs lo*k <= 1 <= hi*k).
std::vector<double> clip_and_renormalize(std::vector<double> probs, double lo, double hi);

// The full pipeline for one week: counts from the observable dataset,
// posteriors, config.posterior_draws joint draws, optimality probabilities,
// damping at psi_at(week), clipping. During burn-in — until the week count of
// enrolled subjects reaches config.burn_in_count strictly before `week` — and
// always under the equal scheme, returns the exact uniform table. Requires
// config.arms to be resolved (non-empty).
RandomizationTable build_tables(const std::vector<SubjectRecord>& dataset, int week,
                                const TrialConfig& config, Rng& rng);

}  // namespace smartrar
