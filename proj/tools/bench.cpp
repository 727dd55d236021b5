// Compares the OpenMP experiment runner against the serial reference on a
// small plan and checks that both produce the same report.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "smartrar/harness.hpp"

namespace {

smartrar::ScenarioSpec bench_scenario() {
  smartrar::ScenarioSpec s;
  s.name = "bench";
  s.arms.stage1 = {0, 1};
  s.arms.stage2 = {0, 1, 2};
  s.p1 = {0.30, 0.40};
  s.p2 = {0.60, 0.50, 0.30, 0.18, 0.15, 0.10};
  s.p3 = {0.15, 0.15, 0.15, 0.15, 0.15, 0.15};
  s.lambda_sens = 0.53;
  s.lambda_spec = 0.90;
  s.validate();
  return s;
}

double run_timed(smartrar::MetricsReport (*runner)(const smartrar::ExperimentPlan&),
                 const smartrar::ExperimentPlan& plan, smartrar::MetricsReport& out) {
  const auto t0 = std::chrono::steady_clock::now();
  out = runner(plan);
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

bool same(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

}  // namespace

int main(int argc, char** argv) {
  int replicates = 16;
  if (argc > 1) {
    replicates = std::atoi(argv[1]);
    if (replicates < 1) {
      std::fprintf(stderr, "usage: bench [replicates]   (default 16)\n");
      return 2;
    }
  }

  smartrar::ExperimentPlan plan;
  plan.scenario = bench_scenario();
  plan.schemes = {smartrar::RandomizationScheme{
      smartrar::RandomizationScheme::Kind::adaptive,
      smartrar::DampingSchedule{smartrar::DampingSchedule::Kind::constant, 1.0}}};
  plan.replicates = replicates;
  plan.seed = 991;

  smartrar::MetricsReport serial_report, parallel_report;
  const double t_serial = run_timed(&smartrar::run_experiment_serial, plan, serial_report);
  const double t_parallel = run_timed(&smartrar::run_experiment, plan, parallel_report);

  const smartrar::SchemeMetrics& a = serial_report.schemes.front();
  const smartrar::SchemeMetrics& b = parallel_report.schemes.front();
  const bool match = same(a.overall_pcr, b.overall_pcr) &&
                     same(a.final_pi1_opt.front(), b.final_pi1_opt.front()) &&
                     same(a.bayes.mc_mean, b.bayes.mc_mean) &&
                     same(a.plugin.mc_mean, b.plugin.mc_mean) &&
                     same(a.weighted.mc_mean, b.weighted.mc_mean) &&
                     same(a.plugin.mse, b.plugin.mse);

  std::printf("replicates            %d\n", replicates);
  std::printf("serial reference      %8.3f s  (%.3f s/replicate)\n", t_serial,
              t_serial / replicates);
  std::printf("OpenMP runner         %8.3f s  (%.3f s/replicate)\n", t_parallel,
              t_parallel / replicates);
  std::printf("speedup               %8.2fx\n", t_serial / t_parallel);
  std::printf("reports identical     %s\n", match ? "yes" : "NO");
  return match ? 0 : 1;
}
