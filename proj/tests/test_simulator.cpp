#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "smartrar/io.hpp"
#include "smartrar/simulator.hpp"
#include "test_support.hpp"

using namespace smartrar;

namespace {

std::string dataset_bytes(const std::vector<SubjectRecord>& ds) {
  std::stringstream out;
  write_dataset_csv(ds, out);
  return out.str();
}

}  // namespace

TEST_CASE("enrollment is uniform on the enrollment window and sorted") {
  Rng rng(3);
  const int n = 100000;
  const auto subjects = draw_enrollment(n, 130, rng);
  REQUIRE(subjects.size() == static_cast<std::size_t>(n));
  double mean = 0.0;
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (std::size_t i = 0; i < subjects.size(); ++i) {
    CHECK(subjects[i].week >= 1);
    CHECK(subjects[i].week <= 130);
    if (i > 0) CHECK(subjects[i].week >= subjects[i - 1].week);
    seen[static_cast<std::size_t>(subjects[i].id)] = 1;
    mean += subjects[i].week;
  }
  mean /= n;
  CHECK(std::abs(mean - 65.5) < 0.5);
  for (char c : seen) CHECK(c == 1);  // every id appears exactly once
}

TEST_CASE("stage simulation matches the generative rates") {
  const ScenarioSpec s = testsup::make_scenario(3);
  Rng rng(17);
  const int n = 100000;
  long y_sum = 0, r_given_y1 = 0, n_y1 = 0, r_given_y0 = 0, n_y0 = 0;
  for (int i = 0; i < n; ++i) {
    const StageOutcome out = simulate_stage(s, 1, 0, std::nullopt, 0, rng);
    y_sum += out.y;
    REQUIRE(out.r.has_value());
    if (out.y == 1) {
      n_y1 += 1;
      r_given_y1 += *out.r;
    } else {
      n_y0 += 1;
      r_given_y0 += *out.r;
    }
  }
  CHECK(std::abs(y_sum / double(n) - 0.30) < 0.005);           // p1[0]
  CHECK(std::abs(r_given_y1 / double(n_y1) - 0.53) < 0.01);    // sensitivity
  CHECK(std::abs(r_given_y0 / double(n_y0) - 0.10) < 0.01);    // 1 - specificity

  // Stage 2 on cell (1, 2): p2 = 0.10.
  long y2_sum = 0;
  for (int i = 0; i < n; ++i) y2_sum += simulate_stage(s, 2, 1, 2, 0, rng).y;
  CHECK(std::abs(y2_sum / double(n) - 0.10) < 0.005);

  // Stage 3 has no response marker.
  CHECK_FALSE(simulate_stage(s, 3, 0, 1, 0, rng).r.has_value());
  CHECK_THROWS(simulate_stage(s, 2, 0, std::nullopt, 0, rng));
}

TEST_CASE("durable successes are forced without consuming randomness") {
  const ScenarioSpec s = testsup::make_scenario(3);
  // prior success at stage 3: y = 1 and the stream is untouched.
  {
    Rng a(55), b(55);
    const StageOutcome out = simulate_stage(s, 3, 0, 1, 1, a);
    CHECK(out.y == 1);
    CHECK(a.next_u64() == b.next_u64());
  }
  // prior success at stage 2: y = 1, only the marker draw consumes.
  {
    Rng a(55), b(55);
    const StageOutcome out = simulate_stage(s, 2, 0, 1, 1, a);
    CHECK(out.y == 1);
    b.next_u64();  // the marker's single uniform
    CHECK(a.next_u64() == b.next_u64());
  }
  // no prior success at stage 2: outcome and marker each consume one.
  {
    Rng a(55), b(55);
    simulate_stage(s, 2, 0, 1, 0, a);
    b.next_u64();
    b.next_u64();
    CHECK(a.next_u64() == b.next_u64());
  }
}

TEST_CASE("equal randomization stores exact uniform probabilities") {
  const ScenarioSpec s = testsup::make_scenario(1);
  TrialConfig config = testsup::make_config(150);
  const TrialResult res = run_trial(s, config, 2024);
  REQUIRE(res.records.size() == 150);
  for (const SubjectRecord& rec : res.records) {
    CHECK(rec.pi1 == 0.5);
    if (rec.a2) CHECK(*rec.pi2 == 1.0 / 3.0);
    validate_record(rec);
    CHECK(rec.week_r1 == rec.enroll_week + config.offsets.stage1_eval);
    if (rec.a2) {
      CHECK(rec.week_a2 == rec.week_r1);
      CHECK(rec.week_r2 == rec.enroll_week + config.offsets.stage2_eval);
    }
  }
}

TEST_CASE("latent successes stay successes downstream") {
  const ScenarioSpec s = testsup::make_scenario(0);  // plenty of every branch
  const TrialConfig config = testsup::make_config(400);
  const TrialResult res = run_trial(s, config, 77);
  int checked = 0;
  for (std::size_t i = 0; i < res.records.size(); ++i) {
    const LatentOutcomes& lat = res.latent[i];
    if (lat.y2 != -1 && lat.y1 == 1) {
      CHECK(lat.y2 == 1);
      ++checked;
    }
    if (lat.y3 != -1 && lat.y2 == 1) {
      CHECK(lat.y3 == 1);
      ++checked;
    }
    // Recorded outcomes agree with the latent ones on their branch.
    const SubjectRecord& rec = res.records[i];
    if (rec.y2) CHECK(*rec.y2 == lat.y2);
    if (rec.y3) CHECK(*rec.y3 == lat.y3);
  }
  CHECK(checked > 0);  // the invariant was actually exercised
}

TEST_CASE("overall outcome rate matches the flat scenario's common value") {
  // Every regime of scenario 0 is worth 0.521, so the expected overall
  // outcome rate is 0.521 under any assignment pattern.
  const ScenarioSpec s = testsup::make_scenario(0);
  const TrialConfig config = testsup::make_config();
  double sum = 0.0;
  long count = 0;
  for (int rep = 0; rep < 50; ++rep) {
    const TrialResult res = run_trial(s, config, 9000 + static_cast<std::uint64_t>(rep));
    for (const SubjectRecord& rec : res.records) {
      sum += subject_outcome(rec);
      ++count;
    }
  }
  CHECK(std::abs(sum / static_cast<double>(count) - 0.521) < 0.015);
}

TEST_CASE("trials are bit-identical for a seed and differ across seeds") {
  const ScenarioSpec s = testsup::make_scenario(3);
  TrialConfig config = testsup::make_config();
  config.scheme = parse_scheme_label("TS(1)");
  config.n_subjects = 60;   // keep the adaptive run cheap
  config.posterior_draws = 200;

  const TrialResult a = run_trial(s, config, 31415);
  const TrialResult b = run_trial(s, config, 31415);
  CHECK(dataset_bytes(a.records) == dataset_bytes(b.records));
  CHECK(a.final_table.pi1 == b.final_table.pi1);
  CHECK(a.final_table.pi2 == b.final_table.pi2);

  const TrialResult c = run_trial(s, config, 31416);
  CHECK(dataset_bytes(a.records) != dataset_bytes(c.records));
}

TEST_CASE("collecting weekly tables does not perturb the trial") {
  const ScenarioSpec s = testsup::make_scenario(3);
  TrialConfig config = testsup::make_config();
  config.scheme = parse_scheme_label("TS(0.5)");
  config.n_subjects = 60;
  config.posterior_draws = 200;

  const TrialResult bare = run_trial(s, config, 2718, false);
  const TrialResult full = run_trial(s, config, 2718, true);
  CHECK(dataset_bytes(bare.records) == dataset_bytes(full.records));
  REQUIRE(full.weekly.size() == static_cast<std::size_t>(config.t_end));

  // Stored assignment probabilities equal the in-force weekly table entries.
  const ArmSets arms = resolved_arms(config, s);
  int last_assign = 0;
  for (const SubjectRecord& rec : full.records) {
    const auto& at_enroll = full.weekly[static_cast<std::size_t>(rec.enroll_week - 1)];
    CHECK(at_enroll.week == rec.enroll_week);
    CHECK(rec.pi1 == at_enroll.pi1[static_cast<std::size_t>(arms.stage1_index(rec.a1))]);
    last_assign = std::max(last_assign, rec.enroll_week);
    if (rec.a2) {
      const auto& at_a2 = full.weekly[static_cast<std::size_t>(rec.week_a2 - 1)];
      const int cell = at_a2.cell(arms.stage1_index(rec.a1), arms.stage2_index(*rec.a2), arms.k2());
      CHECK(*rec.pi2 == at_a2.pi2[static_cast<std::size_t>(cell)]);
      last_assign = std::max(last_assign, rec.week_a2);
    }
  }
  // The final table is the one in force at the last assignment week.
  CHECK(full.final_table.week == last_assign);
  CHECK(full.final_table.pi1 == full.weekly[static_cast<std::size_t>(last_assign - 1)].pi1);
  CHECK(full.final_table.pi2 == full.weekly[static_cast<std::size_t>(last_assign - 1)].pi2);

  // During burn-in every stored probability is exactly uniform.
  for (const SubjectRecord& rec : full.records) {
    long earlier = 0;
    for (const SubjectRecord& other : full.records) {
      if (other.enroll_week < rec.enroll_week) ++earlier;
    }
    if (earlier < config.burn_in_count) CHECK(rec.pi1 == 0.5);
  }
}

TEST_CASE("adaptive assignment probabilities respect the clip bounds") {
  const ScenarioSpec s = testsup::make_scenario(2);
  TrialConfig config = testsup::make_config();
  config.scheme = parse_scheme_label("TS(1)");
  config.n_subjects = 80;
  config.posterior_draws = 200;
  const TrialResult res = run_trial(s, config, 555);
  for (const SubjectRecord& rec : res.records) {
    CHECK(rec.pi1 >= config.clip_lo - 1e-12);
    CHECK(rec.pi1 <= config.clip_hi + 1e-12);
    if (rec.pi2) {
      CHECK(*rec.pi2 >= config.clip_lo - 1e-12);
      CHECK(*rec.pi2 <= config.clip_hi + 1e-12);
    }
  }
}

TEST_CASE("the trial can restrict to a subset of the scenario's arms") {
  const ScenarioSpec s = testsup::make_scenario(1);
  TrialConfig config = testsup::make_config(120);
  config.arms.stage1 = {0, 1};
  config.arms.stage2 = {0, 2};  // drop the middle stage-2 arm
  const TrialResult res = run_trial(s, config, 808);
  for (const SubjectRecord& rec : res.records) {
    if (rec.a2) {
      CHECK(*rec.a2 != 1);
      CHECK(*rec.pi2 == 0.5);  // uniform over two remaining arms
    }
  }
  TrialConfig bad = config;
  bad.arms.stage2 = {0, 9};
  CHECK_THROWS(run_trial(s, bad, 808));
}

TEST_CASE("config validation rejects an unreachable stage-2 window") {
  TrialConfig config = testsup::make_config();
  config.t_end = 135;  // < t_enroll + stage1_eval
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  EventOffsets off;
  off.y2_record = off.stage2_eval;  // recording cannot precede observation
  CHECK_THROWS_AS(off.validate(), std::invalid_argument);
}
