#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "smartrar/config.hpp"
#include "smartrar/regime_value.hpp"
#include "smartrar/trial_model.hpp"

namespace smartrar {

// Dataset CSV: header
//   id,enroll_week,a1,pi1,r1,y1,a2,pi2,r2,y2,y3,
//   week_r1,week_y1,week_a2,week_r2,week_y2,week_y3
// Optional fields are empty when absent; event weeks print -1 when the event
// never occurs. Probabilities round-trip exactly.
void write_dataset_csv(const std::vector<SubjectRecord>& dataset, std::ostream& out);
void write_dataset_csv(const std::vector<SubjectRecord>& dataset, const std::string& path);
std::vector<SubjectRecord> read_dataset_csv(std::istream& in);
std::vector<SubjectRecord> read_dataset_csv(const std::string& path);

// Scenario JSON: name, stage1_arms, stage2_arms, p1, p2 (rows per stage-1
// arm), p3, lambda_sens, lambda_spec.
ScenarioSpec load_scenario(const std::string& path);
ScenarioSpec parse_scenario(const std::string& json_text);

// Config JSON: n_subjects, t_enroll, t_end, burn_in_count, posterior_draws,
// clip_lo, clip_hi, offsets{...}; optional arms{stage1,stage2} and scheme
// label. Missing fields keep their defaults.
TrialConfig load_config(const std::string& path);
TrialConfig parse_config(const std::string& json_text);

// Arm grid implied by a bare dataset: the distinct a1 / a2 values seen,
// in ascending order (used when no scenario file accompanies a CSV).
ArmSets infer_arms(const std::vector<SubjectRecord>& dataset);

}  // namespace smartrar
