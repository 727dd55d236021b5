#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "smartrar/estimators.hpp"
#include "smartrar/harness.hpp"
#include "smartrar/io.hpp"
#include "smartrar/report_io.hpp"

namespace {

std::string fixed6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

int run_simulate(const std::string& scenario_path, const std::string& config_path,
                 const std::string& scheme_text, int replicates, std::uint64_t seed,
                 const std::string& out_dir, bool trajectory, bool serial,
                 const std::string& dataset_out) {
  smartrar::ExperimentPlan plan;
  plan.scenario = smartrar::load_scenario(scenario_path);
  plan.config = smartrar::load_config(config_path);
  plan.schemes.push_back(smartrar::parse_scheme_label(scheme_text));
  plan.replicates = replicates;
  plan.seed = seed;
  plan.collect_trajectory = trajectory;

  const smartrar::MetricsReport report =
      serial ? smartrar::run_experiment_serial(plan) : smartrar::run_experiment(plan);
  smartrar::write_experiment_outputs(report, out_dir);

  if (!dataset_out.empty()) {
    // Regenerate replicate 0 on the same seed chain the runner used and dump
    // its final dataset, e.g. to feed the `estimate` subcommand.
    smartrar::TrialConfig cfg = plan.config;
    cfg.scheme = plan.schemes.front();
    const std::uint64_t scheme_base =
        smartrar::derive_seed(plan.seed, smartrar::hash_label(smartrar::scheme_label(cfg.scheme)));
    const smartrar::TrialResult first =
        smartrar::run_trial(plan.scenario, cfg, smartrar::derive_seed(scheme_base, 0));
    smartrar::write_dataset_csv(first.records, dataset_out);
    std::cout << "first replicate's dataset written to " << dataset_out << "\n";
  }

  const smartrar::SchemeMetrics& sm = report.schemes.front();
  std::cout << "scenario " << report.scenario_name << ", scheme " << sm.label << ", "
            << report.replicates << " replicates\n"
            << "  overall pCR rate        " << fixed6(sm.overall_pcr) << "\n"
            << "  final pi1(optimal a1)   " << fixed6(sm.final_pi1_opt.front()) << "\n"
            << "  final pi2(optimal a2)   " << fixed6(sm.final_pi2_opt.front()) << "\n"
            << "  bayes/plugin/weighted mean estimate of the optimal regime: "
            << fixed6(sm.bayes.mc_mean) << " / " << fixed6(sm.plugin.mc_mean) << " / "
            << fixed6(sm.weighted.mc_mean) << "\n"
            << "outputs written under " << out_dir << "/" << smartrar::scheme_slug(sm.scheme)
            << "\n";
  return 0;
}

int run_true_values(const std::string& scenario_path) {
  const smartrar::ScenarioSpec scenario = smartrar::load_scenario(scenario_path);
  const smartrar::ReportedTruth truth = smartrar::reported_truth(scenario);
  std::cout << "a1,a2,value,is_optimal\n";
  for (const smartrar::Regime& r : smartrar::enumerate_regimes(scenario.arms)) {
    bool opt = false;
    for (const smartrar::Regime& o : truth.optima_set) opt = opt || o == r;
    std::cout << r.a1 << ',' << r.a2 << ',' << fixed6(smartrar::true_regime_value(scenario, r))
              << ',' << (opt ? 1 : 0) << '\n';
  }
  return 0;
}

int run_estimate(const std::string& dataset_path, const std::string& method,
                 const std::string& scenario_path, int draws, std::uint64_t seed) {
  const std::vector<smartrar::SubjectRecord> dataset = smartrar::read_dataset_csv(dataset_path);
  smartrar::ArmSets arms;
  if (!scenario_path.empty()) {
    arms = smartrar::load_scenario(scenario_path).arms;
  } else {
    arms = smartrar::infer_arms(dataset);
  }

  std::vector<std::string> methods;
  if (method == "all") {
    methods = {"bayes", "plugin", "weighted"};
  } else {
    methods = {method};
  }

  std::cout << "method,a1,a2,estimate,se,ci_lo,ci_hi,is_estimated_optimal\n";
  for (const std::string& m : methods) {
    std::vector<smartrar::RegimeEstimate> ests;
    if (m == "bayes") {
      smartrar::Rng rng(seed);
      ests = smartrar::estimate_bayes_all(dataset, arms, draws, rng);
    } else {
      for (const smartrar::Regime& r : smartrar::enumerate_regimes(arms)) {
        try {
          ests.push_back(m == "plugin" ? smartrar::estimate_plugin(dataset, r)
                                       : smartrar::estimate_weighted(dataset, r));
        } catch (const smartrar::empty_cell_error& e) {
          std::cerr << "warning: " << m << ": " << e.what() << " (regime skipped)\n";
        }
      }
    }
    if (ests.empty()) continue;
    const smartrar::Regime best = smartrar::identify_optimal(ests);
    for (const smartrar::RegimeEstimate& est : ests) {
      std::cout << m << ',' << est.regime.a1 << ',' << est.regime.a2 << ','
                << fixed6(est.estimate) << ',' << fixed6(est.se) << ',' << fixed6(est.ci_lo)
                << ',' << fixed6(est.ci_hi) << ',' << (est.regime == best ? 1 : 0) << '\n';
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-stage adaptive-trial simulator and regime-value estimators"};
  app.require_subcommand(1);

  std::string scenario_path, config_path, scheme_text = "SR", out_dir = "out";
  std::string dataset_path, dataset_out, method = "all";
  int replicates = 1000;
  int draws = 1000;
  std::uint64_t seed = 20240501;
  bool trajectory = false;
  bool serial = false;

  CLI::App* simulate = app.add_subcommand(
      "simulate", "Run a Monte Carlo experiment for one scenario and scheme");
  simulate->add_option("--scenario", scenario_path, "scenario JSON file")->required();
  simulate->add_option("--config", config_path, "trial config JSON file")->required();
  simulate->add_option("--scheme", scheme_text,
                       "randomization scheme label, e.g. SR, TS(1), TS(0.5t/T_end)");
  simulate->add_option("--replicates", replicates, "number of Monte Carlo replicates");
  simulate->add_option("--seed", seed, "64-bit experiment seed");
  simulate->add_option("--out", out_dir, "output directory")->required();
  simulate->add_flag("--trajectory", trajectory, "also record per-week randomization curves");
  simulate->add_flag("--serial", serial, "use the serial reference runner (no OpenMP)");
  simulate->add_option("--dataset-out", dataset_out,
                       "also write the first replicate's dataset CSV here");

  CLI::App* truev = app.add_subcommand("true-values", "Print true regime values for a scenario");
  truev->add_option("--scenario", scenario_path, "scenario JSON file")->required();

  CLI::App* estimate =
      app.add_subcommand("estimate", "Estimate regime values from a dataset CSV");
  estimate->add_option("--dataset", dataset_path, "dataset CSV file")->required();
  estimate->add_option("--method", method, "bayes | plugin | weighted | all")
      ->check(CLI::IsMember({"bayes", "plugin", "weighted", "all"}));
  estimate->add_option("--scenario", scenario_path,
                       "scenario JSON supplying the arm grid (default: inferred from data)");
  estimate->add_option("--draws", draws, "posterior draws for the bayes method");
  estimate->add_option("--seed", seed, "seed for the bayes method");

  CLI::App* report = app.add_subcommand(
      "report", "Merge per-scheme outputs in a directory into table CSVs");
  report->add_option("--in", out_dir, "directory holding per-scheme outputs")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      return run_simulate(scenario_path, config_path, scheme_text, replicates, seed, out_dir,
                          trajectory, serial, dataset_out);
    }
    if (truev->parsed()) return run_true_values(scenario_path);
    if (estimate->parsed()) {
      return run_estimate(dataset_path, method, scenario_path, draws, seed);
    }
    if (report->parsed()) {
      smartrar::write_report_tables(out_dir);
      std::cout << "wrote " << out_dir << "/table2.csv and " << out_dir << "/table3.csv\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
