#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "smartrar/posterior.hpp"
#include "smartrar/rng.hpp"
#include "smartrar/trial_model.hpp"

namespace smartrar {

enum class EstimatorKind { bayes, plugin, weighted };
std::string estimator_name(EstimatorKind kind);

// Empirical (or weighted-empirical) proportions entering the sample
// estimators, all divided by the dataset size:
//   alpha1: on a1, stage-1 responder, outcome 1     alpha2: on a1
//   alpha3: regime-consistent stage-2 responder, outcome 1
//   alpha4: non-responder on a1 given a2 = regime's  alpha5: stage-3 outcome 1
//   alpha6: on a1, stage-1 non-responder
struct AlphaTable {
  double alpha1 = 0.0, alpha2 = 0.0, alpha3 = 0.0;
  double alpha4 = 0.0, alpha5 = 0.0, alpha6 = 0.0;
};
AlphaTable compute_alphas(const std::vector<SubjectRecord>& dataset, const Regime& regime,
                          bool weighted);

// Thrown when a sample estimator's denominator cell has no observations.
class empty_cell_error : public std::runtime_error {
 public:
  empty_cell_error(const Regime& regime, std::string cell)
      : std::runtime_error("empty cell " + cell + " for regime {" + std::to_string(regime.a1) +
                           "," + std::to_string(regime.a2) + "}"),
        regime_(regime),
        cell_(std::move(cell)) {}
  const Regime& regime() const { return regime_; }
  const std::string& cell() const { return cell_; }

 private:
  Regime regime_;
  std::string cell_;
};

struct RegimeEstimate {
  Regime regime;
  EstimatorKind method = EstimatorKind::plugin;
  double estimate = 0.0;
  double se = 0.0;  // posterior SD for bayes, influence-function SE otherwise
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

// estimate ± z(level)·se; z(0.95) = 1.959964.
std::pair<double, double> wald_ci(double estimate, double se, double level);

// Sample-proportion estimator alpha1/alpha2 + (alpha6/alpha2)((alpha3+alpha5)/alpha4)
// with influence-function SE. Throws empty_cell_error when alpha2 or alpha4 is 0.
RegimeEstimate estimate_plugin(const std::vector<SubjectRecord>& dataset, const Regime& regime);

// Same form on weighted proportions (weights 1/sqrt(pi1) at stage 1 and
// 1/sqrt(pi1*pi2) at stage 2, read from the stored assignment probabilities).
// The SE evaluates the influence expansion at the unweighted proportions with
// this estimator's point estimate substituted, so it coincides with the
// plug-in SE whenever the weights are constant (see estimators.cpp).
RegimeEstimate estimate_weighted(const std::vector<SubjectRecord>& dataset, const Regime& regime);

// Posterior-mean estimators from m joint draws off the final-data posteriors;
// one shared draw set evaluates every regime so cross-regime comparisons are
// within-draw. se is the posterior sample SD; CI is Wald-style around the mean.
std::vector<RegimeEstimate> estimate_bayes_all(const std::vector<SubjectRecord>& dataset,
                                               const ArmSets& arms, int m, Rng& rng);
RegimeEstimate estimate_bayes(const std::vector<SubjectRecord>& dataset, const ArmSets& arms,
                              const Regime& regime, int m, Rng& rng);

// Regime with the largest estimate; ties break to the earliest entry.
Regime identify_optimal(const std::vector<RegimeEstimate>& estimates);

}  // namespace smartrar
