#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "smartrar/config.hpp"
#include "smartrar/estimators.hpp"
#include "smartrar/regime_value.hpp"
#include "smartrar/scheme.hpp"
#include "smartrar/simulator.hpp"

namespace smartrar {

// The regimes reports are organized around for a scenario.
struct ReportedTruth {
  std::vector<Regime> optima_set;   // every regime within 1e-12 of the best value
  std::vector<Regime> report_rows;  // rows for per-optimum metrics; collapses to
                                    // the designated regime when all regimes tie
  Regime designated;                // lexicographically first optimum
  Regime worst;                     // lexicographically first minimizer
  double value_designated = 0.0;
};
ReportedTruth reported_truth(const ScenarioSpec& scenario);

struct ExperimentPlan {
  ScenarioSpec scenario;
  TrialConfig config;  // .scheme is ignored; `schemes` below drives the runs
  std::vector<RandomizationScheme> schemes;
  int replicates = 1000;
  std::uint64_t seed = 0;
  bool collect_trajectory = false;

  void validate() const;
};

// Per-replicate in-trial summary. Vectors align with ReportedTruth::report_rows.
struct InTrialSummary {
  double mean_pcr = 0.0;
  std::vector<double> consist_opt;
  double consist_worst = 0.0;
  std::vector<double> final_pi1_opt;
  std::vector<double> final_pi2_opt;
  std::vector<double> traj_pi1;  // designated optimum's table entries per week
  std::vector<double> traj_pi2;  // (present only when weekly tables were kept)
};
InTrialSummary summarize_in_trial(const TrialResult& result, const ReportedTruth& truth,
                                  const ArmSets& arms);

// Per-replicate post-trial summary for one estimator.
struct MethodReplicate {
  bool ok = false;
  std::string failed_cell;  // which denominator was empty when !ok
  double estimate = 0.0;    // for the designated optimal regime
  double se = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  bool correct = false;  // identified regime lies in the optima set
  double z = 0.0;        // (estimate - truth) / se
};
// Condenses one replicate's per-regime estimates (enumeration order).
MethodReplicate summarize_method(const std::vector<RegimeEstimate>& estimates,
                                 const ReportedTruth& truth);

struct ReplicateSummary {
  InTrialSummary in_trial;
  MethodReplicate bayes, plugin, weighted;
};

// One full replicate: simulate the trial, summarize in-trial behavior, run
// all three estimators on the final dataset. Estimator empty-cell failures
// mark the method excluded rather than throwing.
ReplicateSummary run_replicate(const ScenarioSpec& scenario, const TrialConfig& config,
                               const ReportedTruth& truth, std::uint64_t trial_seed,
                               bool collect_trajectory);

// Monte-Carlo aggregates for one estimator under one scheme. Excluded
// replicates do not enter any average.
struct EstimatorMetrics {
  std::string method;
  long included = 0;
  long excluded = 0;
  double mc_mean = 0.0;
  double coverage = 0.0;
  double ci_length = 0.0;
  double prop_correct = 0.0;
  double mse = 0.0;
  double zscore_mean = 0.0;
  double rel_eff_vs_bayes = 0.0;
  double rel_eff_vs_sr = 0.0;  // NaN unless the plan included the SR scheme
};
EstimatorMetrics post_trial_metrics(const std::vector<MethodReplicate>& replicates,
                                    EstimatorKind method, double truth_value);

struct SchemeMetrics {
  RandomizationScheme scheme;
  std::string label;
  double overall_pcr = 0.0;
  std::vector<double> consist_opt;  // aligned with ReportedTruth::report_rows
  double consist_worst = 0.0;
  std::vector<double> final_pi1_opt;
  std::vector<double> final_pi2_opt;
  EstimatorMetrics bayes, plugin, weighted;
  std::vector<double> traj_pi1, traj_pi2;  // per-week MC means when collected
  // Per-replicate estimator summaries, kept for the z-score outputs.
  std::vector<MethodReplicate> replicates_bayes, replicates_plugin, replicates_weighted;
};

// MC means of in-trial summaries, written into `out`'s in-trial fields.
void reduce_in_trial(const std::vector<InTrialSummary>& summaries, SchemeMetrics& out);

// Convenience for tests: summarize + reduce complete trial results.
SchemeMetrics in_trial_metrics(const std::vector<TrialResult>& results,
                               const ScenarioSpec& scenario);

struct MetricsReport {
  std::string scenario_name;
  ReportedTruth truth;
  int replicates = 0;
  int n_subjects = 0;
  std::uint64_t seed = 0;
  std::vector<SchemeMetrics> schemes;
};

// Runs the full plan: for each scheme, `replicates` independent trials on
// derived seed streams, reduced in replicate order. Deterministic for a given
// plan and seed, regardless of thread count. run_experiment distributes
// replicates over OpenMP threads (SMARTRAR_THREADS overrides the team size);
// run_experiment_serial is the plain-loop reference implementation kept for
// testing and benchmarking — the two produce identical reports.
MetricsReport run_experiment(const ExperimentPlan& plan);
MetricsReport run_experiment_serial(const ExperimentPlan& plan);

}  // namespace smartrar
