#include "smartrar/randomizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace smartrar {

RandomizationTable uniform_table(const ArmSets& arms, int week) {
  RandomizationTable t;
  t.week = week;
  t.pi1.assign(static_cast<std::size_t>(arms.k1()), 1.0 / arms.k1());
  t.pi2.assign(static_cast<std::size_t>(arms.k1()) * arms.k2(), 1.0 / arms.k2());
  return t;
}

std::vector<double> stage1_optimality_probs(const std::vector<ThetaDraw>& draws) {
  if (draws.empty()) throw std::invalid_argument("stage1_optimality_probs: no draws");
  std::vector<double> rho(static_cast<std::size_t>(draws.front().k1), 0.0);
  for (const ThetaDraw& d : draws) {
    rho[static_cast<std::size_t>(optimal_regime_pos(d).i1)] += 1.0;
  }
  for (double& r : rho) r /= static_cast<double>(draws.size());
  return rho;
}

std::vector<double> stage2_optimality_probs(const std::vector<ThetaDraw>& draws, int i1) {
  if (draws.empty()) throw std::invalid_argument("stage2_optimality_probs: no draws");
  std::vector<double> rho(static_cast<std::size_t>(draws.front().k2), 0.0);
  for (const ThetaDraw& d : draws) {
    rho[static_cast<std::size_t>(optimal_stage2_pos(d, i1))] += 1.0;
  }
  for (double& r : rho) r /= static_cast<double>(draws.size());
  return rho;
}

std::vector<double> damp_and_normalize(const std::vector<double>& rho, double psi) {
  std::vector<double> out(rho.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    out[i] = std::pow(rho[i], psi);  // pow(0,0) == 1, so psi = 0 is uniform
    sum += out[i];
  }
  if (!(sum > 0.0)) throw std::invalid_argument("damp_and_normalize: input has no mass");
  for (double& p : out) p /= sum;
  return out;
}

std::vector<double> clip_and_renormalize(std::vector<double> probs, double lo, double hi) {
  const int k = static_cast<int>(probs.size());
  if (k == 0) throw std::invalid_argument("clip_and_renormalize: empty vector");
  if (!(lo <= hi) || lo < 0.0 || hi > 1.0) {
    throw std::invalid_argument("clip_and_renormalize: bounds must satisfy 0 <= lo <= hi <= 1");
  }
  if (lo * k > 1.0 + 1e-12 || hi * k < 1.0 - 1e-12) {
    throw std::invalid_argument("clip_and_renormalize: bounds infeasible for vector length");
  }

  // Floor phase: pin entries below lo at exactly lo and rescale the rest to
  // keep the total at one. Rescaling shrinks the free entries, which can drop
  // more of them below lo, so iterate; the pinned set only grows.
  std::vector<char> pinned(static_cast<std::size_t>(k), 0);
  for (;;) {
    bool grew = false;
    for (int i = 0; i < k; ++i) {
      if (!pinned[static_cast<std::size_t>(i)] && probs[static_cast<std::size_t>(i)] < lo) {
        pinned[static_cast<std::size_t>(i)] = 1;
        grew = true;
      }
    }
    if (!grew) break;
    int pinned_count = 0;
    double free_sum = 0.0;
    for (int i = 0; i < k; ++i) {
      if (pinned[static_cast<std::size_t>(i)]) {
        probs[static_cast<std::size_t>(i)] = lo;
        ++pinned_count;
      } else {
        free_sum += probs[static_cast<std::size_t>(i)];
      }
    }
    const double target = 1.0 - lo * pinned_count;
    if (free_sum > 0.0) {
      const double scale = target / free_sum;
      for (int i = 0; i < k; ++i) {
        if (!pinned[static_cast<std::size_t>(i)]) probs[static_cast<std::size_t>(i)] *= scale;
      }
    }
  }

  // Cap phase: pin entries above hi at exactly hi and scale the rest up to
  // absorb the surplus; scaling up can push more entries over hi, so iterate.
  std::vector<char> capped(static_cast<std::size_t>(k), 0);
  for (;;) {
    bool grew = false;
    for (int i = 0; i < k; ++i) {
      if (!capped[static_cast<std::size_t>(i)] && probs[static_cast<std::size_t>(i)] > hi) {
        capped[static_cast<std::size_t>(i)] = 1;
        grew = true;
      }
    }
    if (!grew) break;
    int capped_count = 0;
    double free_sum = 0.0;
    int free_count = 0;
    for (int i = 0; i < k; ++i) {
      if (capped[static_cast<std::size_t>(i)]) {
        probs[static_cast<std::size_t>(i)] = hi;
        ++capped_count;
      } else {
        free_sum += probs[static_cast<std::size_t>(i)];
        ++free_count;
      }
    }
    const double target = 1.0 - hi * capped_count;
    if (free_count > 0) {
      if (free_sum > 0.0) {
        const double scale = target / free_sum;
        for (int i = 0; i < k; ++i) {
          if (!capped[static_cast<std::size_t>(i)]) probs[static_cast<std::size_t>(i)] *= scale;
        }
      } else {
        for (int i = 0; i < k; ++i) {
          if (!capped[static_cast<std::size_t>(i)]) {
            probs[static_cast<std::size_t>(i)] = target / free_count;
          }
        }
      }
    }
  }
  return probs;
}

RandomizationTable build_tables(const std::vector<SubjectRecord>& dataset, int week,
                                const TrialConfig& config, Rng& rng) {
  if (config.arms.stage1.empty()) {
    throw std::invalid_argument("build_tables: config.arms must be resolved");
  }
  if (config.scheme.kind == RandomizationScheme::Kind::equal) {
    return uniform_table(config.arms, week);
  }
  long enrolled_before = 0;
  for (const SubjectRecord& rec : dataset) {
    if (rec.enroll_week < week) ++enrolled_before;
  }
  if (enrolled_before < config.burn_in_count) return uniform_table(config.arms, week);

  const CountTable counts = counts_at_week(dataset, week, config.arms);
  const PosteriorSet post = posteriors_from_counts(counts);
  const std::vector<ThetaDraw> draws = sample_theta_draws(post, config.posterior_draws, rng);
  const double psi = psi_at(config.scheme.damping, week, config.t_end);

  RandomizationTable t;
  t.week = week;
  t.pi1 = clip_and_renormalize(damp_and_normalize(stage1_optimality_probs(draws), psi),
                               config.clip_lo, config.clip_hi);
  t.pi2.resize(static_cast<std::size_t>(config.arms.k1()) * config.arms.k2());
  for (int i1 = 0; i1 < config.arms.k1(); ++i1) {
    const std::vector<double> row = clip_and_renormalize(
        damp_and_normalize(stage2_optimality_probs(draws, i1), psi), config.clip_lo,
        config.clip_hi);
    for (int i2 = 0; i2 < config.arms.k2(); ++i2) {
      t.pi2[static_cast<std::size_t>(t.cell(i1, i2, config.arms.k2()))] =
          row[static_cast<std::size_t>(i2)];
    }
  }
  return t;
}

}  // namespace smartrar
