#include "smartrar/estimators.hpp"

#include "smartrar/regime_value.hpp"

#include <cmath>
#include <limits>

namespace smartrar {

namespace {

constexpr double kCiLevel = 0.95;

// Inverse standard-normal CDF (Acklam's rational approximation, relative
// error < 1.2e-9 — gives z(0.975) = 1.959964).
double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal_quantile: p must be in (0,1)");
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - plow) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

struct Indicators {
  double i1 = 0.0, i2 = 0.0, i3 = 0.0, i4 = 0.0, i5 = 0.0, i6 = 0.0;
};

Indicators indicators_for(const SubjectRecord& rec, const Regime& regime) {
  Indicators x;
  if (rec.a1 != regime.a1) return x;
  x.i2 = 1.0;
  if (rec.r1 == 1) {
    if (rec.y1.value_or(0) == 1) x.i1 = 1.0;
    return x;
  }
  x.i6 = 1.0;
  if (!rec.a2 || *rec.a2 != regime.a2) return x;
  x.i4 = 1.0;
  if (rec.r2.value_or(0) == 1) {
    if (rec.y2.value_or(0) == 1) x.i3 = 1.0;
  } else if (rec.y3.value_or(0) == 1) {
    x.i5 = 1.0;
  }
  return x;
}

RegimeEstimate sample_estimator(const std::vector<SubjectRecord>& dataset, const Regime& regime,
                                bool weighted) {
  if (dataset.empty()) throw std::invalid_argument("sample estimator: empty dataset");
  const auto n = static_cast<double>(dataset.size());
  const AlphaTable A = compute_alphas(dataset, regime, weighted);
  if (A.alpha2 == 0.0) throw empty_cell_error(regime, "alpha2");
  if (A.alpha4 == 0.0) throw empty_cell_error(regime, "alpha4");
  const double stage2_ratio = (A.alpha3 + A.alpha5) / A.alpha4;
  const double mu = A.alpha1 / A.alpha2 + (A.alpha6 / A.alpha2) * stage2_ratio;

  // The SE evaluates the influence expansion at the raw (unweighted) event
  // proportions, substituting this estimator's own point estimate for the
  // value argument. Evaluating it at the weighted proportions instead shrinks
  // the leading 1/alpha2 factor once assignment concentrates and yields badly
  // anticonservative intervals (~0.74 empirical coverage at nominal 0.95
  // under aggressive adaptation). With constant weights the two evaluations
  // coincide, as they must: the weighted and unweighted estimators are then
  // the same statistic, so they get the same SE.
  const AlphaTable U = weighted ? compute_alphas(dataset, regime, false) : A;
  const double u_ratio = (U.alpha3 + U.alpha5) / U.alpha4;
  double ss = 0.0;
  for (const SubjectRecord& rec : dataset) {
    const Indicators x = indicators_for(rec, regime);
    const double inf =
        (1.0 / U.alpha2) *
        ((x.i1 - U.alpha1) - mu * (x.i2 - U.alpha2) +
         u_ratio * (-(U.alpha6 / U.alpha4) * (x.i4 - U.alpha4) + (x.i6 - U.alpha6)) +
         (U.alpha6 / U.alpha4) * (x.i3 + x.i5 - (U.alpha3 + U.alpha5)));
    ss += inf * inf;
  }
  const double sigma = ss / n;
  const double se = std::sqrt(sigma / n);

  RegimeEstimate est;
  est.regime = regime;
  est.method = weighted ? EstimatorKind::weighted : EstimatorKind::plugin;
  est.estimate = mu;
  est.se = se;
  const auto [lo, hi] = wald_ci(mu, se, kCiLevel);
  est.ci_lo = lo;
  est.ci_hi = hi;
  return est;
}

}  // namespace

std::string estimator_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::bayes: return "bayes";
    case EstimatorKind::plugin: return "plugin";
    case EstimatorKind::weighted: return "weighted";
  }
  return "unknown";
}

AlphaTable compute_alphas(const std::vector<SubjectRecord>& dataset, const Regime& regime,
                          bool weighted) {
  AlphaTable A;
  for (const SubjectRecord& rec : dataset) {
    const Indicators x = indicators_for(rec, regime);
    double w1 = 1.0;
    double w2 = 1.0;
    if (weighted) {
      w1 = 1.0 / std::sqrt(rec.pi1);
      if (rec.pi2) w2 = 1.0 / std::sqrt(rec.pi1 * *rec.pi2);
    }
    A.alpha1 += w1 * x.i1;
    A.alpha2 += w1 * x.i2;
    A.alpha6 += w1 * x.i6;
    A.alpha3 += w2 * x.i3;
    A.alpha4 += w2 * x.i4;
    A.alpha5 += w2 * x.i5;
  }
  const auto n = static_cast<double>(dataset.size());
  A.alpha1 /= n;
  A.alpha2 /= n;
  A.alpha3 /= n;
  A.alpha4 /= n;
  A.alpha5 /= n;
  A.alpha6 /= n;
  return A;
}

std::pair<double, double> wald_ci(double estimate, double se, double level) {
  if (se < 0.0) throw std::invalid_argument("wald_ci: se must be non-negative");
  const double z = normal_quantile(0.5 + level / 2.0);
  return {estimate - z * se, estimate + z * se};
}

RegimeEstimate estimate_plugin(const std::vector<SubjectRecord>& dataset, const Regime& regime) {
  return sample_estimator(dataset, regime, false);
}

RegimeEstimate estimate_weighted(const std::vector<SubjectRecord>& dataset, const Regime& regime) {
  return sample_estimator(dataset, regime, true);
}

std::vector<RegimeEstimate> estimate_bayes_all(const std::vector<SubjectRecord>& dataset,
                                               const ArmSets& arms, int m, Rng& rng) {
  if (m < 2) throw std::invalid_argument("estimate_bayes_all: need m >= 2 for a sample SD");
  const CountTable counts =
      counts_at_week(dataset, std::numeric_limits<int>::max(), arms);
  const PosteriorSet post = posteriors_from_counts(counts);
  const std::vector<ThetaDraw> draws = sample_theta_draws(post, m, rng);

  std::vector<RegimeEstimate> out;
  const std::vector<Regime> regimes = enumerate_regimes(arms);
  out.reserve(regimes.size());
  for (const Regime& regime : regimes) {
    const int i1 = arms.stage1_index(regime.a1);
    const int i2 = arms.stage2_index(regime.a2);
    double mean = 0.0;
    for (const ThetaDraw& d : draws) mean += regime_value(d, i1, i2);
    mean /= static_cast<double>(m);
    double ssd = 0.0;
    for (const ThetaDraw& d : draws) {
      const double diff = regime_value(d, i1, i2) - mean;
      ssd += diff * diff;
    }
    const double sd = std::sqrt(ssd / static_cast<double>(m - 1));
    RegimeEstimate est;
    est.regime = regime;
    est.method = EstimatorKind::bayes;
    est.estimate = mean;
    est.se = sd;
    const auto [lo, hi] = wald_ci(mean, sd, kCiLevel);
    est.ci_lo = lo;
    est.ci_hi = hi;
    out.push_back(est);
  }
  return out;
}

RegimeEstimate estimate_bayes(const std::vector<SubjectRecord>& dataset, const ArmSets& arms,
                              const Regime& regime, int m, Rng& rng) {
  const std::vector<RegimeEstimate> all = estimate_bayes_all(dataset, arms, m, rng);
  for (const RegimeEstimate& est : all) {
    if (est.regime == regime) return est;
  }
  throw std::invalid_argument("estimate_bayes: regime not covered by arms");
}

Regime identify_optimal(const std::vector<RegimeEstimate>& estimates) {
  if (estimates.empty()) throw std::invalid_argument("identify_optimal: no estimates");
  std::size_t best = 0;
  for (std::size_t i = 1; i < estimates.size(); ++i) {
    if (estimates[i].estimate > estimates[best].estimate) best = i;
  }
  return estimates[best].regime;
}

}  // namespace smartrar
