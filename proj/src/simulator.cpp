#include "smartrar/simulator.hpp"

#include <algorithm>
#include <stdexcept>

namespace smartrar {

namespace {

// Substream tags off the trial seed.
constexpr std::uint64_t kSeedEnroll = 1;
constexpr std::uint64_t kSeedSubject = 2;
constexpr std::uint64_t kSeedTable = 3;

double marker_prob(const ScenarioSpec& s, int y) {
  return y == 1 ? s.lambda_sens : 1.0 - s.lambda_spec;
}

}  // namespace

std::vector<EnrolledSubject> draw_enrollment(int n, int t_enroll, Rng& rng) {
  std::vector<EnrolledSubject> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = EnrolledSubject{i, 1 + rng.uniform_int(t_enroll)};
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const EnrolledSubject& a, const EnrolledSubject& b) { return a.week < b.week; });
  return out;
}

StageOutcome simulate_stage(const ScenarioSpec& scenario, int stage, int a1,
                            std::optional<int> a2, int prior_pcr, Rng& rng) {
  const int i1 = scenario.arms.stage1_index(a1);
  if (stage == 1) {
    const int y = rng.bernoulli(scenario.p1[static_cast<std::size_t>(i1)]);
    return StageOutcome{y, rng.bernoulli(marker_prob(scenario, y))};
  }
  if (!a2) throw std::invalid_argument("simulate_stage: stages 2 and 3 need a2");
  const auto c = static_cast<std::size_t>(scenario.cell(i1, scenario.arms.stage2_index(*a2)));
  if (stage == 2) {
    const int y = prior_pcr == 1 ? 1 : rng.bernoulli(scenario.p2[c]);
    return StageOutcome{y, rng.bernoulli(marker_prob(scenario, y))};
  }
  if (stage == 3) {
    const int y = prior_pcr == 1 ? 1 : rng.bernoulli(scenario.p3[c]);
    return StageOutcome{y, std::nullopt};
  }
  throw std::invalid_argument("simulate_stage: stage must be 1, 2, or 3");
}

ArmSets resolved_arms(const TrialConfig& config, const ScenarioSpec& scenario) {
  if (config.arms.stage1.empty() && config.arms.stage2.empty()) return scenario.arms;
  config.arms.validate();
  for (int id : config.arms.stage1) scenario.arms.stage1_index(id);  // throws if unknown
  for (int id : config.arms.stage2) scenario.arms.stage2_index(id);
  return config.arms;
}

TrialResult run_trial(const ScenarioSpec& scenario, const TrialConfig& config,
                      std::uint64_t trial_seed, bool collect_weekly) {
  scenario.validate();
  config.validate();
  TrialConfig cfg = config;
  cfg.arms = resolved_arms(config, scenario);
  const ArmSets& arms = cfg.arms;
  const int k1 = arms.k1();
  const int k2 = arms.k2();
  const EventOffsets& off = cfg.offsets;

  // Positions of the trial's arms inside the scenario's parameter arrays.
  std::vector<int> scen1(static_cast<std::size_t>(k1));
  std::vector<int> scen2(static_cast<std::size_t>(k2));
  for (int i = 0; i < k1; ++i) scen1[static_cast<std::size_t>(i)] = scenario.arms.stage1_index(arms.stage1[static_cast<std::size_t>(i)]);
  for (int i = 0; i < k2; ++i) scen2[static_cast<std::size_t>(i)] = scenario.arms.stage2_index(arms.stage2[static_cast<std::size_t>(i)]);

  Rng enroll_rng(derive_seed(trial_seed, kSeedEnroll));
  const std::vector<EnrolledSubject> enrollment =
      draw_enrollment(cfg.n_subjects, cfg.t_enroll, enroll_rng);

  TrialResult result;
  result.records.resize(static_cast<std::size_t>(cfg.n_subjects));
  result.latent.resize(static_cast<std::size_t>(cfg.n_subjects));
  for (const EnrolledSubject& s : enrollment) {
    result.records[static_cast<std::size_t>(s.id)].id = s.id;
    result.records[static_cast<std::size_t>(s.id)].enroll_week = s.week;
  }

  // Per-week work lists. Stage-2 assignments of week-t enrollees fall on week
  // t + off.stage1_eval, which config validation keeps within t_end.
  std::vector<std::vector<int>> stage1_due(static_cast<std::size_t>(cfg.t_end + 1));
  std::vector<std::vector<int>> stage2_due(static_cast<std::size_t>(cfg.t_end + 1));
  for (const EnrolledSubject& s : enrollment) stage1_due[static_cast<std::size_t>(s.week)].push_back(s.id);

  // Each subject consumes randomness only from its own stream, in a fixed
  // order, so trajectories are independent of scheduling details.
  std::vector<Rng> subject_rng;
  subject_rng.reserve(static_cast<std::size_t>(cfg.n_subjects));
  const std::uint64_t subject_base = derive_seed(trial_seed, kSeedSubject);
  for (int id = 0; id < cfg.n_subjects; ++id) subject_rng.emplace_back(derive_seed(subject_base, static_cast<std::uint64_t>(id)));
  std::vector<int> a1_pos(static_cast<std::size_t>(cfg.n_subjects), -1);

  const std::uint64_t table_base = derive_seed(trial_seed, kSeedTable);
  bool have_final = false;

  for (int t = 1; t <= cfg.t_end; ++t) {
    const auto& due1 = stage1_due[static_cast<std::size_t>(t)];
    const auto& due2 = stage2_due[static_cast<std::size_t>(t)];
    const bool assigning = !due1.empty() || !due2.empty();
    if (!assigning && !collect_weekly) continue;

    Rng table_rng(derive_seed(table_base, static_cast<std::uint64_t>(t)));
    const RandomizationTable table = build_tables(result.records, t, cfg, table_rng);
    if (collect_weekly) result.weekly.push_back(table);
    if (!assigning) continue;

    // Stage-2 assignments first (their subjects enrolled earlier).
    for (int id : due2) {
      SubjectRecord& rec = result.records[static_cast<std::size_t>(id)];
      LatentOutcomes& lat = result.latent[static_cast<std::size_t>(id)];
      Rng& srng = subject_rng[static_cast<std::size_t>(id)];
      const int i1 = a1_pos[static_cast<std::size_t>(id)];
      std::vector<double> row(static_cast<std::size_t>(k2));
      for (int i2 = 0; i2 < k2; ++i2) row[static_cast<std::size_t>(i2)] = table.pi2[static_cast<std::size_t>(table.cell(i1, i2, k2))];
      const int i2 = srng.categorical(row);
      rec.a2 = arms.stage2[static_cast<std::size_t>(i2)];
      rec.pi2 = row[static_cast<std::size_t>(i2)];
      rec.week_a2 = t;

      const auto cell = static_cast<std::size_t>(
          scen1[static_cast<std::size_t>(i1)] * scenario.arms.k2() + scen2[static_cast<std::size_t>(i2)]);
      // Successes are durable: a latent stage-1 success stays a success.
      const int y2 = lat.y1 == 1 ? 1 : srng.bernoulli(scenario.p2[cell]);
      const int r2 = srng.bernoulli(marker_prob(scenario, y2));
      lat.y2 = y2;
      rec.r2 = r2;
      rec.week_r2 = rec.enroll_week + off.stage2_eval;
      if (r2 == 1) {
        rec.y2 = y2;
        rec.week_y2 = rec.enroll_week + off.y2_record;
      } else {
        const int y3 = y2 == 1 ? 1 : srng.bernoulli(scenario.p3[cell]);
        lat.y3 = y3;
        rec.y3 = y3;
        rec.week_y3 = rec.enroll_week + off.y3_record;
      }
    }

    // New enrollees.
    for (int id : due1) {
      SubjectRecord& rec = result.records[static_cast<std::size_t>(id)];
      LatentOutcomes& lat = result.latent[static_cast<std::size_t>(id)];
      Rng& srng = subject_rng[static_cast<std::size_t>(id)];
      const int i1 = srng.categorical(table.pi1);
      a1_pos[static_cast<std::size_t>(id)] = i1;
      rec.a1 = arms.stage1[static_cast<std::size_t>(i1)];
      rec.pi1 = table.pi1[static_cast<std::size_t>(i1)];

      const int y1 = srng.bernoulli(scenario.p1[static_cast<std::size_t>(scen1[static_cast<std::size_t>(i1)])]);
      const int r1 = srng.bernoulli(marker_prob(scenario, y1));
      lat.y1 = y1;
      rec.r1 = r1;
      rec.week_r1 = t + off.stage1_eval;
      if (r1 == 1) {
        rec.y1 = y1;
        rec.week_y1 = t + off.y1_record;
      } else {
        stage2_due[static_cast<std::size_t>(t + off.stage1_eval)].push_back(id);
      }
    }

    result.final_table = table;
    have_final = true;
  }

  if (!have_final) result.final_table = uniform_table(arms, 0);
  for (const SubjectRecord& rec : result.records) validate_record(rec);
  return result;
}

}  // namespace smartrar
