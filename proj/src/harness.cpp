#include "smartrar/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace smartrar {

namespace {

// Substream tag off the trial seed for the posterior-estimation draws
// (tags 1-3 belong to the simulator).
constexpr std::uint64_t kSeedBayes = 4;

bool contains(const std::vector<Regime>& set, const Regime& r) {
  return std::find(set.begin(), set.end(), r) != set.end();
}

int threads_from_env() {
#ifdef _OPENMP
  if (const char* env = std::getenv("SMARTRAR_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace

ReportedTruth reported_truth(const ScenarioSpec& scenario) {
  ReportedTruth t;
  t.optima_set = true_optimal_regimes(scenario);
  t.designated = t.optima_set.front();
  t.worst = true_worst_regime(scenario);
  t.value_designated = true_regime_value(scenario, t.designated);
  const std::size_t total = enumerate_regimes(scenario.arms).size();
  t.report_rows = t.optima_set.size() == total ? std::vector<Regime>{t.designated}
                                               : t.optima_set;
  return t;
}

void ExperimentPlan::validate() const {
  scenario.validate();
  config.validate();
  if (schemes.empty()) throw std::invalid_argument("plan needs at least one scheme");
  if (replicates < 1) throw std::invalid_argument("plan needs replicates >= 1");
}

InTrialSummary summarize_in_trial(const TrialResult& result, const ReportedTruth& truth,
                                  const ArmSets& arms) {
  InTrialSummary s;
  const auto n = static_cast<double>(result.records.size());
  double pcr = 0.0;
  double worst = 0.0;
  std::vector<double> opt(truth.report_rows.size(), 0.0);
  for (const SubjectRecord& rec : result.records) {
    pcr += subject_outcome(rec);
    worst += consistent_with_regime(rec, truth.worst) ? 1.0 : 0.0;
    for (std::size_t k = 0; k < truth.report_rows.size(); ++k) {
      opt[k] += consistent_with_regime(rec, truth.report_rows[k]) ? 1.0 : 0.0;
    }
  }
  s.mean_pcr = pcr / n;
  s.consist_worst = worst / n;
  s.consist_opt.resize(opt.size());
  for (std::size_t k = 0; k < opt.size(); ++k) s.consist_opt[k] = opt[k] / n;

  const int k2 = arms.k2();
  s.final_pi1_opt.resize(truth.report_rows.size());
  s.final_pi2_opt.resize(truth.report_rows.size());
  for (std::size_t k = 0; k < truth.report_rows.size(); ++k) {
    const int i1 = arms.stage1_index(truth.report_rows[k].a1);
    const int i2 = arms.stage2_index(truth.report_rows[k].a2);
    s.final_pi1_opt[k] = result.final_table.pi1[static_cast<std::size_t>(i1)];
    s.final_pi2_opt[k] =
        result.final_table.pi2[static_cast<std::size_t>(result.final_table.cell(i1, i2, k2))];
  }

  if (!result.weekly.empty()) {
    const int i1 = arms.stage1_index(truth.designated.a1);
    const int i2 = arms.stage2_index(truth.designated.a2);
    s.traj_pi1.reserve(result.weekly.size());
    s.traj_pi2.reserve(result.weekly.size());
    for (const RandomizationTable& t : result.weekly) {
      s.traj_pi1.push_back(t.pi1[static_cast<std::size_t>(i1)]);
      s.traj_pi2.push_back(t.pi2[static_cast<std::size_t>(t.cell(i1, i2, k2))]);
    }
  }
  return s;
}

MethodReplicate summarize_method(const std::vector<RegimeEstimate>& estimates,
                                 const ReportedTruth& truth) {
  MethodReplicate m;
  m.ok = true;
  const RegimeEstimate* designated = nullptr;
  for (const RegimeEstimate& est : estimates) {
    if (est.regime == truth.designated) designated = &est;
  }
  if (designated == nullptr) {
    throw std::invalid_argument("summarize_method: designated regime missing from estimates");
  }
  m.estimate = designated->estimate;
  m.se = designated->se;
  m.ci_lo = designated->ci_lo;
  m.ci_hi = designated->ci_hi;
  m.correct = contains(truth.optima_set, identify_optimal(estimates));
  m.z = m.se > 0.0 ? (m.estimate - truth.value_designated) / m.se : 0.0;
  return m;
}

ReplicateSummary run_replicate(const ScenarioSpec& scenario, const TrialConfig& config,
                               const ReportedTruth& truth, std::uint64_t trial_seed,
                               bool collect_trajectory) {
  const TrialResult result = run_trial(scenario, config, trial_seed, collect_trajectory);
  const ArmSets arms = resolved_arms(config, scenario);

  ReplicateSummary out;
  out.in_trial = summarize_in_trial(result, truth, arms);

  Rng bayes_rng(derive_seed(trial_seed, kSeedBayes));
  out.bayes = summarize_method(
      estimate_bayes_all(result.records, arms, config.posterior_draws, bayes_rng), truth);

  const std::vector<Regime> regimes = enumerate_regimes(arms);
  const auto run_sample_method = [&](bool weighted) {
    MethodReplicate m;
    std::vector<RegimeEstimate> ests;
    ests.reserve(regimes.size());
    try {
      for (const Regime& r : regimes) {
        ests.push_back(weighted ? estimate_weighted(result.records, r)
                                : estimate_plugin(result.records, r));
      }
    } catch (const empty_cell_error& e) {
      m.ok = false;
      m.failed_cell = e.cell();
      return m;
    }
    return summarize_method(ests, truth);
  };
  out.plugin = run_sample_method(false);
  out.weighted = run_sample_method(true);
  return out;
}

EstimatorMetrics post_trial_metrics(const std::vector<MethodReplicate>& replicates,
                                    EstimatorKind method, double truth_value) {
  EstimatorMetrics m;
  m.method = estimator_name(method);
  m.rel_eff_vs_bayes = std::numeric_limits<double>::quiet_NaN();
  m.rel_eff_vs_sr = std::numeric_limits<double>::quiet_NaN();
  double sum_est = 0.0, sum_cov = 0.0, sum_len = 0.0, sum_corr = 0.0, sum_sq = 0.0, sum_z = 0.0;
  for (const MethodReplicate& r : replicates) {
    if (!r.ok) {
      ++m.excluded;
      continue;
    }
    ++m.included;
    sum_est += r.estimate;
    sum_cov += (r.ci_lo <= truth_value && truth_value <= r.ci_hi) ? 1.0 : 0.0;
    sum_len += r.ci_hi - r.ci_lo;
    sum_corr += r.correct ? 1.0 : 0.0;
    const double err = r.estimate - truth_value;
    sum_sq += err * err;
    sum_z += r.z;
  }
  if (m.included > 0) {
    const auto n = static_cast<double>(m.included);
    m.mc_mean = sum_est / n;
    m.coverage = sum_cov / n;
    m.ci_length = sum_len / n;
    m.prop_correct = sum_corr / n;
    m.mse = sum_sq / n;
    m.zscore_mean = sum_z / n;
  }
  return m;
}

void reduce_in_trial(const std::vector<InTrialSummary>& summaries, SchemeMetrics& out) {
  if (summaries.empty()) throw std::invalid_argument("reduce_in_trial: no summaries");
  const auto n = static_cast<double>(summaries.size());
  const std::size_t rows = summaries.front().consist_opt.size();
  out.overall_pcr = 0.0;
  out.consist_worst = 0.0;
  out.consist_opt.assign(rows, 0.0);
  out.final_pi1_opt.assign(rows, 0.0);
  out.final_pi2_opt.assign(rows, 0.0);
  const std::size_t weeks = summaries.front().traj_pi1.size();
  out.traj_pi1.assign(weeks, 0.0);
  out.traj_pi2.assign(weeks, 0.0);
  for (const InTrialSummary& s : summaries) {
    out.overall_pcr += s.mean_pcr;
    out.consist_worst += s.consist_worst;
    for (std::size_t k = 0; k < rows; ++k) {
      out.consist_opt[k] += s.consist_opt[k];
      out.final_pi1_opt[k] += s.final_pi1_opt[k];
      out.final_pi2_opt[k] += s.final_pi2_opt[k];
    }
    for (std::size_t w = 0; w < weeks; ++w) {
      out.traj_pi1[w] += s.traj_pi1[w];
      out.traj_pi2[w] += s.traj_pi2[w];
    }
  }
  out.overall_pcr /= n;
  out.consist_worst /= n;
  for (std::size_t k = 0; k < rows; ++k) {
    out.consist_opt[k] /= n;
    out.final_pi1_opt[k] /= n;
    out.final_pi2_opt[k] /= n;
  }
  for (std::size_t w = 0; w < weeks; ++w) {
    out.traj_pi1[w] /= n;
    out.traj_pi2[w] /= n;
  }
}

SchemeMetrics in_trial_metrics(const std::vector<TrialResult>& results,
                               const ScenarioSpec& scenario) {
  const ReportedTruth truth = reported_truth(scenario);
  std::vector<InTrialSummary> summaries;
  summaries.reserve(results.size());
  for (const TrialResult& r : results) {
    summaries.push_back(summarize_in_trial(r, truth, scenario.arms));
  }
  SchemeMetrics out;
  reduce_in_trial(summaries, out);
  return out;
}

namespace {

MetricsReport run_experiment_impl(const ExperimentPlan& plan, bool parallel) {
  plan.validate();
  const ReportedTruth truth = reported_truth(plan.scenario);

  MetricsReport report;
  report.scenario_name = plan.scenario.name;
  report.truth = truth;
  report.replicates = plan.replicates;
  report.n_subjects = plan.config.n_subjects;
  report.seed = plan.seed;

  for (const RandomizationScheme& scheme : plan.schemes) {
    TrialConfig cfg = plan.config;
    cfg.scheme = scheme;
    const std::string label = scheme_label(scheme);
    const std::uint64_t scheme_base = derive_seed(plan.seed, hash_label(label));

    std::vector<ReplicateSummary> reps(static_cast<std::size_t>(plan.replicates));
    std::string first_error;
    const auto worker = [&](int r) {
      try {
        reps[static_cast<std::size_t>(r)] =
            run_replicate(plan.scenario, cfg, truth,
                          derive_seed(scheme_base, static_cast<std::uint64_t>(r)),
                          plan.collect_trajectory);
      } catch (const std::exception& e) {
        // Exceptions must not cross the parallel region; surface the first one.
        #ifdef _OPENMP
        #pragma omp critical(smartrar_worker_error)
        #endif
        {
          if (first_error.empty()) first_error = e.what();
        }
      }
    };
    if (parallel) {
#ifdef _OPENMP
      const int threads = threads_from_env();
      #pragma omp parallel for schedule(dynamic) num_threads(threads)
      for (int r = 0; r < plan.replicates; ++r) worker(r);
#else
      for (int r = 0; r < plan.replicates; ++r) worker(r);
#endif
    } else {
      for (int r = 0; r < plan.replicates; ++r) worker(r);
    }
    if (!first_error.empty()) {
      throw std::runtime_error("replicate failed under scheme " + label + ": " + first_error);
    }

    SchemeMetrics sm;
    sm.scheme = scheme;
    sm.label = label;
    std::vector<InTrialSummary> in_trial;
    in_trial.reserve(reps.size());
    for (ReplicateSummary& r : reps) {
      in_trial.push_back(std::move(r.in_trial));
      sm.replicates_bayes.push_back(r.bayes);
      sm.replicates_plugin.push_back(r.plugin);
      sm.replicates_weighted.push_back(r.weighted);
    }
    reduce_in_trial(in_trial, sm);
    sm.bayes = post_trial_metrics(sm.replicates_bayes, EstimatorKind::bayes, truth.value_designated);
    sm.plugin =
        post_trial_metrics(sm.replicates_plugin, EstimatorKind::plugin, truth.value_designated);
    sm.weighted = post_trial_metrics(sm.replicates_weighted, EstimatorKind::weighted,
                                     truth.value_designated);
    report.schemes.push_back(std::move(sm));
  }

  // Relative efficiencies; the SR columns serve as the cross-scheme reference
  // (plugin standing in for weighted under SR, where the two coincide).
  const SchemeMetrics* sr = nullptr;
  for (const SchemeMetrics& sm : report.schemes) {
    if (sm.scheme.kind == RandomizationScheme::Kind::equal) sr = &sm;
  }
  for (SchemeMetrics& sm : report.schemes) {
    const double mse_bayes = sm.bayes.mse;
    const auto fill_vs_bayes = [&](EstimatorMetrics& em) {
      if (em.mse > 0.0) em.rel_eff_vs_bayes = mse_bayes / em.mse;
    };
    fill_vs_bayes(sm.bayes);
    fill_vs_bayes(sm.plugin);
    fill_vs_bayes(sm.weighted);
    if (sr != nullptr) {
      if (sm.bayes.mse > 0.0) sm.bayes.rel_eff_vs_sr = sr->bayes.mse / sm.bayes.mse;
      if (sm.plugin.mse > 0.0) sm.plugin.rel_eff_vs_sr = sr->plugin.mse / sm.plugin.mse;
      if (sm.weighted.mse > 0.0) sm.weighted.rel_eff_vs_sr = sr->plugin.mse / sm.weighted.mse;
    }
  }
  return report;
}

}  // namespace

MetricsReport run_experiment(const ExperimentPlan& plan) { return run_experiment_impl(plan, true); }

MetricsReport run_experiment_serial(const ExperimentPlan& plan) {
  return run_experiment_impl(plan, false);
}

}  // namespace smartrar
