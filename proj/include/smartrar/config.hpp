#pragma once

#include "smartrar/scheme.hpp"
#include "smartrar/trial_model.hpp"

namespace smartrar {

// Weeks after enrollment at which trajectory events happen. Interim response
// markers are observed at the evaluation weeks; outcomes enter the dataset at
// the recording weeks.
struct EventOffsets {
  int stage1_eval = 12;  // y1 realized, r1 observed, stage-2 assignment made
  int y1_record = 13;    // y1 recorded for stage-1 responders
  int stage2_eval = 25;  // y2 realized, r2 observed
  int y2_record = 26;    // y2 recorded for stage-2 responders
  int y3_record = 38;    // y3 realized and recorded for stage-2 non-responders

  void validate() const;
};

// Full design of one trial.
struct TrialConfig {
  ArmSets arms;            // may be left empty and resolved from the scenario
  int n_subjects = 200;
  int t_enroll = 130;      // enrollment weeks are uniform on {1,...,t_enroll}
  int t_end = 143;         // last week; also the damping ramp horizon
  int burn_in_count = 20;  // enrollments before adaptation may start
  int posterior_draws = 1000;  // M, posterior draws per table update
  RandomizationScheme scheme{};
  double clip_lo = 0.05;
  double clip_hi = 0.95;
  EventOffsets offsets{};

  void validate() const;
};

}  // namespace smartrar
