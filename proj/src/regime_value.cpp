#include "smartrar/regime_value.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace smartrar {

double regime_value(const ThetaDraw& draw, int i1, int i2) {
  const double t1 = draw.theta1(i1);
  const double g1 = draw.gamma1(i1);
  const double t2 = draw.theta2(i1, i2);
  const double g2 = draw.gamma2(i1, i2);
  const double g3 = draw.gamma3(i1, i2);
  return t1 * g1 + (1.0 - t1) * t2 * g2 + (1.0 - t1) * (1.0 - t2) * g3;
}

double regime_value(const ThetaDraw& draw, const Regime& regime, const ArmSets& arms) {
  return regime_value(draw, arms.stage1_index(regime.a1), arms.stage2_index(regime.a2));
}

double stage2_value(const ThetaDraw& draw, int i1, int i2) {
  const double t2 = draw.theta2(i1, i2);
  return t2 * draw.gamma2(i1, i2) + (1.0 - t2) * draw.gamma3(i1, i2);
}

RegimePos optimal_regime_pos(const ThetaDraw& draw) {
  RegimePos best{0, 0};
  double best_value = regime_value(draw, 0, 0);
  for (int i1 = 0; i1 < draw.k1; ++i1) {
    for (int i2 = 0; i2 < draw.k2; ++i2) {
      const double value = regime_value(draw, i1, i2);
      if (value > best_value) {
        best_value = value;
        best = RegimePos{i1, i2};
      }
    }
  }
  return best;
}

Regime optimal_regime(const ThetaDraw& draw, const ArmSets& arms) {
  const RegimePos pos = optimal_regime_pos(draw);
  return Regime{arms.stage1[static_cast<std::size_t>(pos.i1)],
                arms.stage2[static_cast<std::size_t>(pos.i2)]};
}

int optimal_stage2_pos(const ThetaDraw& draw, int i1) {
  int best = 0;
  double best_value = stage2_value(draw, i1, 0);
  for (int i2 = 1; i2 < draw.k2; ++i2) {
    const double value = stage2_value(draw, i1, i2);
    if (value > best_value) {
      best_value = value;
      best = i2;
    }
  }
  return best;
}

int optimal_stage2(const ThetaDraw& draw, int a1, const ArmSets& arms) {
  const int i2 = optimal_stage2_pos(draw, arms.stage1_index(a1));
  return arms.stage2[static_cast<std::size_t>(i2)];
}

void ScenarioSpec::validate() const {
  arms.validate();
  const auto k1 = static_cast<std::size_t>(arms.k1());
  const auto cells = k1 * static_cast<std::size_t>(arms.k2());
  if (p1.size() != k1 || p2.size() != cells || p3.size() != cells) {
    throw std::invalid_argument("scenario " + name + ": parameter arrays do not match arms");
  }
  const auto is_prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  for (double p : p1)
    if (!is_prob(p)) throw std::invalid_argument("scenario " + name + ": p1 out of [0,1]");
  for (double p : p2)
    if (!is_prob(p)) throw std::invalid_argument("scenario " + name + ": p2 out of [0,1]");
  for (double p : p3)
    if (!is_prob(p)) throw std::invalid_argument("scenario " + name + ": p3 out of [0,1]");
  if (!is_prob(lambda_sens) || !is_prob(lambda_spec)) {
    throw std::invalid_argument("scenario " + name + ": lambdas out of [0,1]");
  }
}

double true_regime_value(const ScenarioSpec& s, int i1, int i2) {
  const double l = s.lambda_spec;
  const double p1 = s.p1[static_cast<std::size_t>(i1)];
  const double p2 = s.p2[static_cast<std::size_t>(s.cell(i1, i2))];
  const double p3 = s.p3[static_cast<std::size_t>(s.cell(i1, i2))];
  return p1 + p2 * (1.0 - p1) * l + p3 * (1.0 - p2) * (1.0 - p1) * l * l;
}

double true_regime_value(const ScenarioSpec& s, const Regime& regime) {
  return true_regime_value(s, s.arms.stage1_index(regime.a1), s.arms.stage2_index(regime.a2));
}

ThetaDraw scenario_to_theta(const ScenarioSpec& s) {
  s.validate();
  const double ls = s.lambda_sens;
  const double lc = s.lambda_spec;
  ThetaDraw d(s.arms.k1(), s.arms.k2());
  const auto positive = [&](double denom, const char* what) {
    if (!(denom > 0.0)) {
      throw std::invalid_argument("scenario " + s.name + ": degenerate cell, " +
                                  std::string(what) + " has probability zero");
    }
  };
  for (int i1 = 0; i1 < s.arms.k1(); ++i1) {
    const double p1 = s.p1[static_cast<std::size_t>(i1)];
    // Stage-1 response mixes true positives among outcome successes with
    // false positives among failures.
    const double t1 = ls * p1 + (1.0 - lc) * (1.0 - p1);
    d.theta1(i1) = t1;
    positive(t1, "stage-1 response");
    d.gamma1(i1) = ls * p1 / t1;
    positive(1.0 - t1, "stage-1 non-response");
    // Latent outcome distribution among stage-1 non-responders.
    const double pr_y0 = lc * (1.0 - p1) / (1.0 - t1);
    const double pr_y1 = (1.0 - ls) * p1 / (1.0 - t1);
    for (int i2 = 0; i2 < s.arms.k2(); ++i2) {
      const auto c = static_cast<std::size_t>(s.cell(i1, i2));
      const double p2 = s.p2[c];
      const double p3 = s.p3[c];
      // Outcome success probability at the end of stage 2: durable successes
      // carry through, the rest convert at rate p2.
      const double q2 = p2 * pr_y0 + pr_y1;
      const double t2 = ls * q2 + (1.0 - lc) * (1.0 - q2);
      d.theta2(i1, i2) = t2;
      positive(t2, "stage-2 response");
      d.gamma2(i1, i2) = ls * q2 / t2;
      positive(1.0 - t2, "stage-2 non-response");
      d.gamma3(i1, i2) = (p3 * (1.0 - p2) * pr_y0 * lc + q2 * (1.0 - ls)) / (1.0 - t2);
    }
  }
  return d;
}

std::vector<Regime> true_optimal_regimes(const ScenarioSpec& s, double tie_tol) {
  const std::vector<Regime> all = enumerate_regimes(s.arms);
  double best = -1.0;
  for (const Regime& r : all) best = std::max(best, true_regime_value(s, r));
  std::vector<Regime> out;
  for (const Regime& r : all) {
    if (true_regime_value(s, r) >= best - tie_tol) out.push_back(r);
  }
  return out;
}

Regime true_worst_regime(const ScenarioSpec& s) {
  const std::vector<Regime> all = enumerate_regimes(s.arms);
  Regime worst = all.front();
  double worst_value = true_regime_value(s, worst);
  for (const Regime& r : all) {
    const double v = true_regime_value(s, r);
    if (v < worst_value) {
      worst_value = v;
      worst = r;
    }
  }
  return worst;
}

}  // namespace smartrar
