#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "smartrar/harness.hpp"
#include "test_support.hpp"

using namespace smartrar;
using testsup::responder_record;
using testsup::stage2_nonresponder_record;
using testsup::stage2_responder_record;

namespace {

ExperimentPlan small_plan(int scenario_idx) {
  ExperimentPlan plan;
  plan.scenario = testsup::make_scenario(scenario_idx);
  plan.config = testsup::make_config(60);
  plan.config.posterior_draws = 200;
  plan.schemes = {parse_scheme_label("SR"), parse_scheme_label("TS(1)")};
  plan.replicates = 6;
  plan.seed = 12;
  return plan;
}

bool metrics_equal(const EstimatorMetrics& a, const EstimatorMetrics& b) {
  const auto same = [](double x, double y) { return x == y || (std::isnan(x) && std::isnan(y)); };
  return a.included == b.included && a.excluded == b.excluded && same(a.mc_mean, b.mc_mean) &&
         same(a.coverage, b.coverage) && same(a.ci_length, b.ci_length) &&
         same(a.prop_correct, b.prop_correct) && same(a.mse, b.mse) &&
         same(a.zscore_mean, b.zscore_mean) && same(a.rel_eff_vs_bayes, b.rel_eff_vs_bayes) &&
         same(a.rel_eff_vs_sr, b.rel_eff_vs_sr);
}

bool schemes_equal(const SchemeMetrics& a, const SchemeMetrics& b) {
  return a.label == b.label && a.overall_pcr == b.overall_pcr &&
         a.consist_opt == b.consist_opt && a.consist_worst == b.consist_worst &&
         a.final_pi1_opt == b.final_pi1_opt && a.final_pi2_opt == b.final_pi2_opt &&
         metrics_equal(a.bayes, b.bayes) && metrics_equal(a.plugin, b.plugin) &&
         metrics_equal(a.weighted, b.weighted) && a.traj_pi1 == b.traj_pi1 &&
         a.traj_pi2 == b.traj_pi2;
}

}  // namespace

TEST_CASE("reported truth: unique, tied, and fully flat scenarios") {
  const ReportedTruth s3 = reported_truth(testsup::make_scenario(3));
  CHECK(s3.optima_set == std::vector<Regime>{Regime{0, 0}});
  CHECK(s3.report_rows == std::vector<Regime>{Regime{0, 0}});
  CHECK(s3.designated == Regime{0, 0});
  CHECK(s3.worst == Regime{1, 2});
  CHECK(std::abs(s3.value_designated - 0.712) < 5.01e-4);

  const ReportedTruth s5 = reported_truth(testsup::make_scenario(5));
  CHECK(s5.optima_set == std::vector<Regime>{Regime{0, 0}, Regime{0, 1}});
  CHECK(s5.report_rows == s5.optima_set);  // both optima get report rows
  CHECK(s5.designated == Regime{0, 0});

  // All six regimes tie: keep a single row for the designated regime.
  const ReportedTruth s0 = reported_truth(testsup::make_scenario(0));
  CHECK(s0.optima_set.size() == 6);
  CHECK(s0.report_rows == std::vector<Regime>{Regime{0, 0}});
  CHECK(s0.designated == Regime{0, 0});
}

TEST_CASE("in-trial summary on a hand-built trial") {
  const ScenarioSpec s = testsup::make_scenario(3);
  const ReportedTruth truth = reported_truth(s);

  TrialResult result;
  result.records.push_back(responder_record(0, 1, 0, 0.5, 1));   // consistent with {0,0}
  result.records.push_back(stage2_nonresponder_record(1, 2, 1, 0.5, 2, 0.25, 0));  // worst
  result.records.push_back(stage2_responder_record(2, 3, 0, 0.5, 0, 0.25, 1));     // {0,0}
  result.records.push_back(responder_record(3, 4, 1, 0.5, 0));   // consistent with {1,*}
  result.final_table.week = 40;
  result.final_table.pi1 = {0.8, 0.2};
  result.final_table.pi2 = {0.6, 0.3, 0.1, 0.2, 0.3, 0.5};

  const InTrialSummary sum = summarize_in_trial(result, truth, s.arms);
  CHECK(sum.mean_pcr == doctest::Approx(0.5).epsilon(1e-15));     // outcomes 1,0,1,0
  CHECK(sum.consist_opt[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(sum.consist_worst == doctest::Approx(0.5).epsilon(1e-15));  // subjects 1 and 3
  CHECK(sum.final_pi1_opt[0] == 0.8);
  CHECK(sum.final_pi2_opt[0] == 0.6);
  CHECK(sum.traj_pi1.empty());  // no weekly tables collected
}

TEST_CASE("method summary reads the designated regime and checks the argmax") {
  const ReportedTruth truth = reported_truth(testsup::make_scenario(5));
  std::vector<RegimeEstimate> ests;
  for (const Regime& r : enumerate_regimes(testsup::make_scenario(5).arms)) {
    RegimeEstimate e;
    e.regime = r;
    e.estimate = (r == Regime{0, 1}) ? 0.70 : 0.40;  // the tied non-designated optimum wins
    e.se = 0.10;
    e.ci_lo = e.estimate - 0.196;
    e.ci_hi = e.estimate + 0.196;
    ests.push_back(e);
  }
  const MethodReplicate m = summarize_method(ests, truth);
  CHECK(m.ok);
  CHECK(m.estimate == 0.40);  // designated regime {0,0}'s estimate
  CHECK(m.correct);           // identified {0,1} lies in the optima set
  CHECK(m.z == doctest::Approx((0.40 - truth.value_designated) / 0.10).epsilon(1e-12));

  std::vector<RegimeEstimate> missing(ests.begin() + 1, ests.end());
  CHECK_THROWS_AS(summarize_method(missing, truth), std::invalid_argument);
}

TEST_CASE("post-trial metrics average the included replicates only") {
  const double truth_value = 0.712;
  std::vector<MethodReplicate> reps(3);
  reps[0].ok = true;
  reps[0].estimate = 0.70;
  reps[0].ci_lo = 0.60;
  reps[0].ci_hi = 0.80;  // covers
  reps[0].correct = true;
  reps[0].z = -0.5;
  reps[1].ok = true;
  reps[1].estimate = 0.60;
  reps[1].ci_lo = 0.55;
  reps[1].ci_hi = 0.65;  // misses
  reps[1].correct = false;
  reps[1].z = -2.0;
  reps[2].ok = false;  // excluded entirely

  const EstimatorMetrics m = post_trial_metrics(reps, EstimatorKind::plugin, truth_value);
  CHECK(m.method == "plugin");
  CHECK(m.included == 2);
  CHECK(m.excluded == 1);
  CHECK(m.mc_mean == doctest::Approx(0.65).epsilon(1e-15));
  CHECK(m.coverage == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(m.ci_length == doctest::Approx(0.15).epsilon(1e-12));
  CHECK(m.prop_correct == doctest::Approx(0.5).epsilon(1e-15));
  const double expect_mse = ((0.70 - truth_value) * (0.70 - truth_value) +
                             (0.60 - truth_value) * (0.60 - truth_value)) / 2.0;
  CHECK(m.mse == doctest::Approx(expect_mse).epsilon(1e-12));
  CHECK(m.zscore_mean == doctest::Approx(-1.25).epsilon(1e-15));
}

TEST_CASE("in-trial reduction averages componentwise") {
  InTrialSummary a, b;
  a.mean_pcr = 0.4;
  b.mean_pcr = 0.6;
  a.consist_opt = {0.2};
  b.consist_opt = {0.4};
  a.consist_worst = 0.1;
  b.consist_worst = 0.3;
  a.final_pi1_opt = {0.7};
  b.final_pi1_opt = {0.9};
  a.final_pi2_opt = {0.5};
  b.final_pi2_opt = {0.7};
  a.traj_pi1 = {0.5, 0.6};
  b.traj_pi1 = {0.7, 0.8};
  a.traj_pi2 = {0.3, 0.4};
  b.traj_pi2 = {0.5, 0.6};
  SchemeMetrics out;
  reduce_in_trial({a, b}, out);
  CHECK(out.overall_pcr == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(out.consist_opt[0] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(out.consist_worst == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(out.final_pi1_opt[0] == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(out.final_pi2_opt[0] == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(out.traj_pi1[1] == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(out.traj_pi2[0] == doctest::Approx(0.4).epsilon(1e-15));
}

TEST_CASE("one replicate produces coherent, reproducible summaries") {
  const ScenarioSpec s = testsup::make_scenario(3);
  TrialConfig config = testsup::make_config();  // n = 200 under SR: cells well filled
  const ReportedTruth truth = reported_truth(s);

  const ReplicateSummary a = run_replicate(s, config, truth, 777, false);
  CHECK(a.bayes.ok);
  CHECK(a.plugin.ok);
  CHECK(a.weighted.ok);
  CHECK(a.in_trial.mean_pcr > 0.3);
  CHECK(a.in_trial.mean_pcr < 0.8);
  CHECK(a.bayes.estimate > 0.0);
  CHECK(a.bayes.estimate < 1.0);
  CHECK(std::abs(a.plugin.estimate - a.weighted.estimate) <= 1e-12);  // equal randomization

  const ReplicateSummary b = run_replicate(s, config, truth, 777, false);
  CHECK(a.plugin.estimate == b.plugin.estimate);
  CHECK(a.plugin.se == b.plugin.se);
  CHECK(a.bayes.estimate == b.bayes.estimate);
  CHECK(a.weighted.ci_lo == b.weighted.ci_lo);
  CHECK(a.in_trial.mean_pcr == b.in_trial.mean_pcr);
}

TEST_CASE("experiment runs are deterministic and thread-agnostic") {
  const ExperimentPlan plan = small_plan(3);
  const MetricsReport serial = run_experiment_serial(plan);
  const MetricsReport parallel = run_experiment(plan);
  const MetricsReport again = run_experiment(plan);

  REQUIRE(serial.schemes.size() == 2);
  REQUIRE(parallel.schemes.size() == 2);
  for (std::size_t i = 0; i < serial.schemes.size(); ++i) {
    CHECK(schemes_equal(serial.schemes[i], parallel.schemes[i]));
    CHECK(schemes_equal(parallel.schemes[i], again.schemes[i]));
  }
}

TEST_CASE("relative efficiencies use bayes and the equal-randomization column") {
  ExperimentPlan plan = small_plan(2);
  plan.replicates = 8;
  const MetricsReport report = run_experiment(plan);
  const SchemeMetrics& sr = report.schemes[0];
  const SchemeMetrics& ts = report.schemes[1];
  REQUIRE(sr.label == "SR");
  REQUIRE(ts.label == "TS(1)");

  CHECK(sr.bayes.rel_eff_vs_bayes == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ts.bayes.rel_eff_vs_bayes == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sr.plugin.rel_eff_vs_bayes ==
        doctest::Approx(sr.bayes.mse / sr.plugin.mse).epsilon(1e-12));

  CHECK(sr.bayes.rel_eff_vs_sr == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sr.plugin.rel_eff_vs_sr == doctest::Approx(1.0).epsilon(1e-12));
  // The weighted column is referenced to the plugin estimator under SR,
  // where the two coincide as estimators.
  CHECK(sr.weighted.rel_eff_vs_sr ==
        doctest::Approx(sr.plugin.mse / sr.weighted.mse).epsilon(1e-12));
  CHECK(ts.plugin.rel_eff_vs_sr ==
        doctest::Approx(sr.plugin.mse / ts.plugin.mse).epsilon(1e-12));
  CHECK(ts.weighted.rel_eff_vs_sr ==
        doctest::Approx(sr.plugin.mse / ts.weighted.mse).epsilon(1e-12));

  // Without an SR column the cross-scheme reference is undefined.
  ExperimentPlan no_sr = plan;
  no_sr.schemes = {parse_scheme_label("TS(1)")};
  no_sr.replicates = 3;
  const MetricsReport r2 = run_experiment(no_sr);
  CHECK(std::isnan(r2.schemes[0].plugin.rel_eff_vs_sr));
  CHECK(std::isnan(r2.schemes[0].bayes.rel_eff_vs_sr));
  CHECK(r2.schemes[0].bayes.rel_eff_vs_bayes == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("trajectory collection yields weekly MC means in the report") {
  ExperimentPlan plan = small_plan(3);
  plan.schemes = {parse_scheme_label("TS(1)")};
  plan.replicates = 3;
  plan.collect_trajectory = true;
  const MetricsReport report = run_experiment(plan);
  const SchemeMetrics& sm = report.schemes[0];
  REQUIRE(sm.traj_pi1.size() == static_cast<std::size_t>(plan.config.t_end));
  REQUIRE(sm.traj_pi2.size() == static_cast<std::size_t>(plan.config.t_end));
  // Burn-in weeks are exactly uniform in every replicate.
  CHECK(sm.traj_pi1[0] == 0.5);
  CHECK(sm.traj_pi2[0] == doctest::Approx(1.0 / 3).epsilon(1e-15));
  for (double p : sm.traj_pi1) {
    CHECK(p >= plan.config.clip_lo - 1e-12);
    CHECK(p <= plan.config.clip_hi + 1e-12);
  }
}

TEST_CASE("plan validation rejects degenerate settings") {
  ExperimentPlan plan = small_plan(1);
  plan.schemes.clear();
  CHECK_THROWS_AS(plan.validate(), std::invalid_argument);
  ExperimentPlan plan2 = small_plan(1);
  plan2.replicates = 0;
  CHECK_THROWS_AS(plan2.validate(), std::invalid_argument);
}
