#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "smartrar/config.hpp"
#include "smartrar/randomizer.hpp"
#include "smartrar/regime_value.hpp"
#include "smartrar/rng.hpp"
#include "smartrar/trial_model.hpp"

namespace smartrar {

struct EnrolledSubject {
  int id = 0;
  int week = 0;
};

// n subjects with enrollment weeks uniform on {1,...,t_enroll}, ids in draw
// order, returned sorted by week (ties by id).
std::vector<EnrolledSubject> draw_enrollment(int n, int t_enroll, Rng& rng);

// Outcome and (for stages 1 and 2) response-marker indicator of one stage.
struct StageOutcome {
  int y = 0;
  std::optional<int> r;
};

// Draws one stage of a subject's trajectory under the generative model. Arms
// are given by id and resolved through scenario.arms; a2 is required for
// stages 2 and 3. prior_pcr is the latent outcome of the previous stage:
// successes are durable, so prior_pcr = 1 forces y = 1 without consuming
// randomness. Stage 3 has no response marker.
StageOutcome simulate_stage(const ScenarioSpec& scenario, int stage, int a1,
                            std::optional<int> a2, int prior_pcr, Rng& rng);

// Generation-side latent outcomes, kept for invariant checks (-1 where the
// subject never reached the stage).
struct LatentOutcomes {
  int y1 = -1;
  int y2 = -1;
  int y3 = -1;
};

struct TrialResult {
  std::vector<SubjectRecord> records;      // indexed by subject id, complete
  std::vector<LatentOutcomes> latent;      // aligned with records
  RandomizationTable final_table;          // table in force at the last assignment
  std::vector<RandomizationTable> weekly;  // one per week 1..t_end if collected
};

// Simulates one complete trial: uniform enrollment, weekly randomization-table
// updates (lazy unless collect_weekly), stage-1 assignment at the enrollment
// week, stage-2 assignment for non-responders offsets.stage1_eval weeks later,
// outcomes realized and recorded per config.offsets. All randomness derives
// from trial_seed, so results are bit-identical across runs regardless of
// which optional outputs are collected. If config.arms is empty it resolves to
// scenario.arms; otherwise it may restrict to a subset of the scenario's arms.
TrialResult run_trial(const ScenarioSpec& scenario, const TrialConfig& config,
                      std::uint64_t trial_seed, bool collect_weekly = false);

// The arms a trial with this config under this scenario would use.
ArmSets resolved_arms(const TrialConfig& config, const ScenarioSpec& scenario);

}  // namespace smartrar
