#pragma once

#include <vector>

#include "smartrar/rng.hpp"
#include "smartrar/trial_model.hpp"

namespace smartrar {

// Parameters of a Beta distribution (shape1 = successes + 1 under the flat
// Beta(1,1) prior used throughout).
struct BetaParams {
  double a = 1.0;
  double b = 1.0;
};

// Independent conjugate posteriors for every model component. Stage-1 vectors
// are indexed by stage-1 arm position, stage-2 vectors row-major by
// [stage1_pos][stage2_pos], matching CountTable.
struct PosteriorSet {
  int k1 = 0;
  int k2 = 0;
  std::vector<BetaParams> theta1;  // stage-1 response probability
  std::vector<BetaParams> gamma1;  // outcome probability among stage-1 responders
  std::vector<BetaParams> theta2;  // stage-2 response probability
  std::vector<BetaParams> gamma2;  // outcome probability among stage-2 responders
  std::vector<BetaParams> gamma3;  // outcome probability among stage-2 non-responders

  int cell(int i1, int i2) const { return i1 * k2 + i2; }
};

// Beta(1 + successes, 1 + failures) for every component; an all-zero table
// yields flat Beta(1,1) posteriors everywhere.
PosteriorSet posteriors_from_counts(const CountTable& counts);

// One joint draw of all model components, stored flat in the order
// theta1 | gamma1 | theta2 | gamma2 | gamma3 (stage-2 blocks row-major).
struct ThetaDraw {
  int k1 = 0;
  int k2 = 0;
  std::vector<double> v;

  ThetaDraw() = default;
  ThetaDraw(int n_stage1, int n_stage2)
      : k1(n_stage1),
        k2(n_stage2),
        v(static_cast<std::size_t>(2 * n_stage1) +
              static_cast<std::size_t>(3 * n_stage1) * static_cast<std::size_t>(n_stage2),
          0.0) {}

  int cell(int i1, int i2) const { return i1 * k2 + i2; }
  double theta1(int i1) const { return v[static_cast<std::size_t>(i1)]; }
  double gamma1(int i1) const { return v[static_cast<std::size_t>(k1 + i1)]; }
  double theta2(int i1, int i2) const { return v[static_cast<std::size_t>(2 * k1 + cell(i1, i2))]; }
  double gamma2(int i1, int i2) const {
    return v[static_cast<std::size_t>(2 * k1 + k1 * k2 + cell(i1, i2))];
  }
  double gamma3(int i1, int i2) const {
    return v[static_cast<std::size_t>(2 * k1 + 2 * k1 * k2 + cell(i1, i2))];
  }
  double& theta1(int i1) { return v[static_cast<std::size_t>(i1)]; }
  double& gamma1(int i1) { return v[static_cast<std::size_t>(k1 + i1)]; }
  double& theta2(int i1, int i2) { return v[static_cast<std::size_t>(2 * k1 + cell(i1, i2))]; }
  double& gamma2(int i1, int i2) {
    return v[static_cast<std::size_t>(2 * k1 + k1 * k2 + cell(i1, i2))];
  }
  double& gamma3(int i1, int i2) {
    return v[static_cast<std::size_t>(2 * k1 + 2 * k1 * k2 + cell(i1, i2))];
  }
};

// m independent joint draws. Sampling is component-major (all draws of one
// component before the next) so the stream layout is stable and documented.
std::vector<ThetaDraw> sample_theta_draws(const PosteriorSet& post, int m, Rng& rng);

}  // namespace smartrar
