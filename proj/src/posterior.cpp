#include "smartrar/posterior.hpp"

#include <stdexcept>

namespace smartrar {

PosteriorSet posteriors_from_counts(const CountTable& counts) {
  counts.validate();
  PosteriorSet post;
  post.k1 = counts.k1;
  post.k2 = counts.k2;
  const auto beta = [](long successes, long failures) {
    return BetaParams{1.0 + static_cast<double>(successes), 1.0 + static_cast<double>(failures)};
  };
  post.theta1.reserve(counts.k1);
  post.gamma1.reserve(counts.k1);
  for (int i = 0; i < counts.k1; ++i) {
    post.theta1.push_back(beta(counts.r1_plus[i], counts.n1[i] - counts.r1_plus[i]));
    post.gamma1.push_back(beta(counts.y1_plus[i], counts.n1_star[i] - counts.y1_plus[i]));
  }
  const int cells = counts.k1 * counts.k2;
  post.theta2.reserve(cells);
  post.gamma2.reserve(cells);
  post.gamma3.reserve(cells);
  for (int c = 0; c < cells; ++c) {
    post.theta2.push_back(beta(counts.r2_plus[c], counts.n2[c] - counts.r2_plus[c]));
    post.gamma2.push_back(beta(counts.y2_plus[c], counts.n2_star[c] - counts.y2_plus[c]));
    post.gamma3.push_back(beta(counts.y3_plus[c], counts.n3_star[c] - counts.y3_plus[c]));
  }
  return post;
}

std::vector<ThetaDraw> sample_theta_draws(const PosteriorSet& post, int m, Rng& rng) {
  if (m <= 0) throw std::invalid_argument("sample_theta_draws: m must be positive");
  std::vector<ThetaDraw> draws(static_cast<std::size_t>(m), ThetaDraw(post.k1, post.k2));
  // Component-major: the stream position of a component's draws does not
  // depend on m-agnostic details of other components.
  std::size_t slot = 0;
  const auto fill = [&](const std::vector<BetaParams>& params) {
    for (const BetaParams& bp : params) {
      for (int j = 0; j < m; ++j) draws[static_cast<std::size_t>(j)].v[slot] = rng.beta(bp.a, bp.b);
      ++slot;
    }
  };
  fill(post.theta1);
  fill(post.gamma1);
  fill(post.theta2);
  fill(post.gamma2);
  fill(post.gamma3);
  return draws;
}

}  // namespace smartrar
