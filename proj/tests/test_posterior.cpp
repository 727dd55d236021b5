#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "smartrar/posterior.hpp"
#include "smartrar/rng.hpp"
#include "test_support.hpp"

using namespace smartrar;

namespace {
constexpr int kDraws = 100000;

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Erlang CDF, the gamma CDF at integer shape.
double erlang_cdf(int k, double x) {
  if (x <= 0.0) return 0.0;
  double term = 1.0, sum = 1.0;
  for (int i = 1; i < k; ++i) {
    term *= x / i;
    sum += term;
  }
  return 1.0 - std::exp(-x) * sum;
}
}  // namespace

TEST_CASE("seed derivation separates streams and is stable") {
  CHECK(derive_seed(1, 2) != derive_seed(1, 3));
  CHECK(derive_seed(1, 2) != derive_seed(2, 2));
  CHECK(derive_seed(1, 2) == derive_seed(1, 2));
  CHECK(hash_label("TS(1)") != hash_label("TS(0.5)"));
  CHECK(hash_label("SR") == hash_label("SR"));
}

TEST_CASE("uniform and integer draws match their distributions") {
  Rng rng(42);
  std::vector<double> us(kDraws);
  for (double& u : us) u = rng.uniform01();
  const double d = testsup::ks_statistic(us, [](double x) { return x; });
  CHECK(d < testsup::ks_critical(us.size()));

  std::vector<int> freq(6, 0);
  for (int i = 0; i < kDraws; ++i) freq[rng.uniform_int(6)] += 1;
  for (int f : freq) CHECK(std::abs(f / double(kDraws) - 1.0 / 6) < 0.01);

  int ones = 0;
  for (int i = 0; i < kDraws; ++i) ones += rng.bernoulli(0.3);
  CHECK(std::abs(ones / double(kDraws) - 0.3) < 0.005);
}

TEST_CASE("normal sampler passes a KS test against the exact CDF") {
  Rng rng(7);
  std::vector<double> xs(kDraws);
  for (double& x : xs) x = rng.normal();
  const double d = testsup::ks_statistic(xs, std_normal_cdf);
  CHECK(d < testsup::ks_critical(xs.size()));
}

TEST_CASE("gamma sampler matches the Erlang CDF and moments") {
  Rng rng(11);
  std::vector<double> xs(kDraws);
  for (double& x : xs) x = rng.gamma(3.0);
  const double d = testsup::ks_statistic(xs, [](double x) { return erlang_cdf(3, x); });
  CHECK(d < testsup::ks_critical(xs.size()));

  double mean = 0.0;
  for (int i = 0; i < kDraws; ++i) mean += rng.gamma(2.5);
  mean /= kDraws;
  CHECK(std::abs(mean - 2.5) < 0.02);

  CHECK_THROWS(rng.gamma(0.5));  // shapes below 1 never occur with Beta(1,1) priors
}

TEST_CASE("beta sampler passes KS tests against exact integer-shape CDFs") {
  Rng rng(13);
  const int cases[][2] = {{1, 1}, {5, 7}, {40, 60}};
  for (const auto& c : cases) {
    std::vector<double> xs(kDraws);
    for (double& x : xs) x = rng.beta(c[0], c[1]);
    const double d = testsup::ks_statistic(
        xs, [&](double x) { return testsup::beta_cdf_int(c[0], c[1], x); });
    INFO("Beta(", c[0], ",", c[1], ") KS distance ", d);
    CHECK(d < testsup::ks_critical(xs.size()));
  }
}

TEST_CASE("beta comparison probabilities are calibrated") {
  // P(X > Y) = 2/3 for X ~ Beta(2,1), Y ~ Beta(1,1).
  Rng rng(17);
  int wins = 0;
  for (int i = 0; i < kDraws; ++i) {
    const double x = rng.beta(2, 1);
    const double y = rng.beta(1, 1);
    wins += x > y ? 1 : 0;
  }
  CHECK(std::abs(wins / double(kDraws) - 2.0 / 3) < 0.01);
}

TEST_CASE("categorical draws follow the given probabilities") {
  Rng rng(19);
  const std::vector<double> p{0.2, 0.3, 0.5};
  std::vector<int> freq(3, 0);
  for (int i = 0; i < kDraws; ++i) freq[rng.categorical(p)] += 1;
  for (int k = 0; k < 3; ++k) CHECK(std::abs(freq[k] / double(kDraws) - p[k]) < 0.01);

  // Rounding slack: mass just shy of one still yields a valid index.
  const std::vector<double> shy{0.25, 0.25, 0.5 - 1e-12};
  for (int i = 0; i < 1000; ++i) {
    const int k = rng.categorical(shy);
    CHECK(k >= 0);
    CHECK(k <= 2);
  }
}

TEST_CASE("empty counts give flat Beta(1,1) posteriors everywhere") {
  const CountTable counts(2, 3);
  const PosteriorSet post = posteriors_from_counts(counts);
  REQUIRE(post.theta1.size() == 2);
  REQUIRE(post.gamma2.size() == 6);
  for (const auto& bp : post.theta1) {
    CHECK(bp.a == 1.0);
    CHECK(bp.b == 1.0);
  }
  for (const auto& bp : post.gamma3) {
    CHECK(bp.a == 1.0);
    CHECK(bp.b == 1.0);
  }
}

TEST_CASE("posterior parameters are 1 + successes, 1 + failures") {
  CountTable counts(2, 3);
  counts.n1[0] = 10;
  counts.r1_plus[0] = 4;
  counts.n1_star[0] = 3;
  counts.y1_plus[0] = 2;
  const int c = counts.cell(1, 2);
  counts.n2[c] = 3;
  counts.r2_plus[c] = 3;
  counts.n2_star[c] = 2;
  counts.y2_plus[c] = 1;
  counts.validate();

  const PosteriorSet post = posteriors_from_counts(counts);
  CHECK(post.theta1[0].a == 5.0);  // Beta(1+4, 1+6)
  CHECK(post.theta1[0].b == 7.0);
  CHECK(post.gamma1[0].a == 3.0);  // Beta(1+2, 1+1)
  CHECK(post.gamma1[0].b == 2.0);
  CHECK(post.theta2[c].a == 4.0);  // Beta(1+3, 1+0)
  CHECK(post.theta2[c].b == 1.0);
  CHECK(post.gamma2[c].a == 2.0);
  CHECK(post.gamma2[c].b == 2.0);
  CHECK(post.gamma3[c].a == 1.0);  // untouched cell stays flat
  CHECK(post.gamma3[c].b == 1.0);
}

TEST_CASE("posterior draws average to the posterior means") {
  CountTable counts(1, 1);
  counts.n1[0] = 10;
  counts.r1_plus[0] = 4;
  const PosteriorSet post = posteriors_from_counts(counts);
  Rng rng(23);
  const auto draws = sample_theta_draws(post, kDraws, rng);
  double mean_theta1 = 0.0, mean_gamma1 = 0.0;
  for (const auto& d : draws) {
    mean_theta1 += d.theta1(0);
    mean_gamma1 += d.gamma1(0);
  }
  mean_theta1 /= kDraws;
  mean_gamma1 /= kDraws;
  CHECK(std::abs(mean_theta1 - 5.0 / 12) < 0.005);  // Beta(5,7)
  CHECK(std::abs(mean_gamma1 - 0.5) < 0.005);       // flat Beta(1,1)
}

TEST_CASE("draws are component-major so layouts are reproducible") {
  CountTable counts(2, 3);
  counts.n1[1] = 8;
  counts.r1_plus[1] = 2;
  const PosteriorSet post = posteriors_from_counts(counts);
  const int m = 5;

  Rng rng_a(31);
  const auto draws = sample_theta_draws(post, m, rng_a);

  // Reconstruct by hand from an identically seeded stream.
  Rng rng_b(31);
  const std::size_t dim = draws[0].v.size();
  std::vector<std::vector<double>> expect(m, std::vector<double>(dim, 0.0));
  std::vector<BetaParams> flat;
  for (const auto& bp : post.theta1) flat.push_back(bp);
  for (const auto& bp : post.gamma1) flat.push_back(bp);
  for (const auto& bp : post.theta2) flat.push_back(bp);
  for (const auto& bp : post.gamma2) flat.push_back(bp);
  for (const auto& bp : post.gamma3) flat.push_back(bp);
  REQUIRE(flat.size() == dim);
  for (std::size_t slot = 0; slot < dim; ++slot) {
    for (int j = 0; j < m; ++j) expect[j][slot] = rng_b.beta(flat[slot].a, flat[slot].b);
  }
  for (int j = 0; j < m; ++j) CHECK(draws[j].v == expect[j]);
}

TEST_CASE("an extra success moves the posterior mean up") {
  CountTable a(1, 1), b(1, 1);
  a.n1[0] = b.n1[0] = 10;
  a.r1_plus[0] = 4;
  b.r1_plus[0] = 5;
  const auto pa = posteriors_from_counts(a).theta1[0];
  const auto pb = posteriors_from_counts(b).theta1[0];
  CHECK(pb.a / (pb.a + pb.b) > pa.a / (pa.a + pa.b));
}
