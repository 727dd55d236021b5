#pragma once

#include <string>
#include <vector>

#include "smartrar/posterior.hpp"
#include "smartrar/trial_model.hpp"

namespace smartrar {

// Value of an embedded regime under one parameter draw, by g-computation:
//   theta1*gamma1 + (1-theta1)*theta2*gamma2 + (1-theta1)*(1-theta2)*gamma3.
// Position-based; the id-based overload resolves arm ids through `arms`.
double regime_value(const ThetaDraw& draw, int i1, int i2);
double regime_value(const ThetaDraw& draw, const Regime& regime, const ArmSets& arms);

// Value of continuing a stage-1 non-responder on stage-2 arm i2:
//   theta2*gamma2 + (1-theta2)*gamma3.
double stage2_value(const ThetaDraw& draw, int i1, int i2);

// Best regime / best stage-2 arm under one draw. Ties break to the
// lexicographically smallest position.
struct RegimePos {
  int i1 = 0;
  int i2 = 0;
  friend bool operator==(const RegimePos&, const RegimePos&) = default;
};
RegimePos optimal_regime_pos(const ThetaDraw& draw);
Regime optimal_regime(const ThetaDraw& draw, const ArmSets& arms);
int optimal_stage2_pos(const ThetaDraw& draw, int i1);
int optimal_stage2(const ThetaDraw& draw, int a1, const ArmSets& arms);

// Data-generating parameters for one simulation scenario. p2/p3 are row-major
// [stage1_pos][stage2_pos]. lambda_sens / lambda_spec are the response-marker
// sensitivity and specificity shared by both interim evaluations.
struct ScenarioSpec {
  std::string name;
  ArmSets arms;
  std::vector<double> p1;
  std::vector<double> p2;
  std::vector<double> p3;
  double lambda_sens = 0.0;
  double lambda_spec = 0.0;

  int cell(int i1, int i2) const { return i1 * arms.k2() + i2; }
  void validate() const;  // sizes match arms, probabilities in [0,1]
};

// Closed-form true value of a regime under the generative model:
//   p1 + p2*(1-p1)*lambda_spec + p3*(1-p2)*(1-p1)*lambda_spec^2.
double true_regime_value(const ScenarioSpec& s, int i1, int i2);
double true_regime_value(const ScenarioSpec& s, const Regime& regime);

// The generative parameters mapped to the model parameterization
// (theta/gamma), such that regime_value(scenario_to_theta(s), r) equals
// true_regime_value(s, r) exactly. Throws if a conditional cell is degenerate
// (a conditioning event has probability zero).
ThetaDraw scenario_to_theta(const ScenarioSpec& s);

// All regimes attaining the maximum true value within `tie_tol`
// (lexicographic order), and the single worst regime (lexicographically
// first among minimizers).
std::vector<Regime> true_optimal_regimes(const ScenarioSpec& s, double tie_tol = 1e-12);
Regime true_worst_regime(const ScenarioSpec& s);

}  // namespace smartrar
