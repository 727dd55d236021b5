#include "smartrar/trial_model.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace smartrar {

namespace {

int index_of(const std::vector<int>& ids, int arm_id, const char* stage) {
  for (std::size_t k = 0; k < ids.size(); ++k) {
    if (ids[k] == arm_id) return static_cast<int>(k);
  }
  throw std::invalid_argument(std::string("unknown ") + stage + " arm id " +
                              std::to_string(arm_id));
}

void require(bool ok, const std::string& what, int subject_id) {
  if (!ok) {
    throw std::invalid_argument("invalid record (subject " + std::to_string(subject_id) +
                                "): " + what);
  }
}

}  // namespace

int ArmSets::stage1_index(int arm_id) const { return index_of(stage1, arm_id, "stage-1"); }
int ArmSets::stage2_index(int arm_id) const { return index_of(stage2, arm_id, "stage-2"); }

void ArmSets::validate() const {
  if (stage1.empty() || stage2.empty()) {
    throw std::invalid_argument("arm sets must be non-empty at both stages");
  }
  const std::unordered_set<int> s1(stage1.begin(), stage1.end());
  const std::unordered_set<int> s2(stage2.begin(), stage2.end());
  if (s1.size() != stage1.size() || s2.size() != stage2.size()) {
    throw std::invalid_argument("arm ids must be unique within a stage");
  }
}

std::vector<Regime> enumerate_regimes(const ArmSets& arms) {
  std::vector<Regime> out;
  out.reserve(static_cast<std::size_t>(arms.k1()) * arms.k2());
  for (int a1 : arms.stage1) {
    for (int a2 : arms.stage2) out.push_back(Regime{a1, a2});
  }
  return out;
}

void validate_record(const SubjectRecord& rec) {
  require(rec.enroll_week >= 1, "enroll_week must be >= 1", rec.id);
  require(rec.pi1 > 0.0 && rec.pi1 <= 1.0, "pi1 must lie in (0,1]", rec.id);
  require(rec.r1 == 0 || rec.r1 == 1, "r1 must be 0 or 1", rec.id);
  require(rec.week_r1 > rec.enroll_week, "r1 must be observed after enrollment", rec.id);
  if (rec.r1 == 1) {
    require(rec.y1.has_value(), "responder must carry y1", rec.id);
    require(!rec.a2 && !rec.pi2 && !rec.r2 && !rec.y2 && !rec.y3,
            "responder must carry no stage-2 fields", rec.id);
    require(rec.week_y1 > rec.week_r1, "y1 must be recorded after r1", rec.id);
    require(*rec.y1 == 0 || *rec.y1 == 1, "y1 must be 0 or 1", rec.id);
  } else {
    require(!rec.y1, "non-responder must not carry y1", rec.id);
    require(rec.a2.has_value(), "non-responder must carry a2", rec.id);
    require(rec.pi2.has_value() && *rec.pi2 > 0.0 && *rec.pi2 <= 1.0,
            "pi2 must lie in (0,1]", rec.id);
    require(rec.week_a2 >= rec.week_r1, "a2 cannot precede r1", rec.id);
    require(rec.r2.has_value() && (*rec.r2 == 0 || *rec.r2 == 1), "r2 must be 0 or 1", rec.id);
    require(rec.week_r2 > rec.week_a2, "r2 must be observed after a2", rec.id);
    if (*rec.r2 == 1) {
      require(rec.y2.has_value() && !rec.y3, "stage-2 responder must carry y2 only", rec.id);
      require(rec.week_y2 > rec.week_r2, "y2 must be recorded after r2", rec.id);
      require(*rec.y2 == 0 || *rec.y2 == 1, "y2 must be 0 or 1", rec.id);
    } else {
      require(rec.y3.has_value() && !rec.y2, "stage-2 non-responder must carry y3 only", rec.id);
      require(rec.week_y3 > rec.week_r2, "y3 must be recorded after r2", rec.id);
      require(*rec.y3 == 0 || *rec.y3 == 1, "y3 must be 0 or 1", rec.id);
    }
  }
}

int subject_outcome(const SubjectRecord& rec) {
  if (rec.y1) return *rec.y1;
  if (rec.y2) return *rec.y2;
  if (rec.y3) return *rec.y3;
  throw std::runtime_error("incomplete trajectory: subject " + std::to_string(rec.id) +
                           " has no terminal outcome");
}

bool consistent_with_regime(const SubjectRecord& rec, const Regime& regime) {
  if (rec.a1 != regime.a1) return false;
  if (rec.r1 == 1) return true;
  if (!rec.a2) {
    throw std::runtime_error("incomplete trajectory: subject " + std::to_string(rec.id) +
                             " is a non-responder without a stage-2 arm");
  }
  return *rec.a2 == regime.a2;
}

CountTable::CountTable(int n_stage1, int n_stage2) : k1(n_stage1), k2(n_stage2) {
  const auto c1 = static_cast<std::size_t>(k1);
  const auto c2 = static_cast<std::size_t>(k1) * static_cast<std::size_t>(k2);
  n1.assign(c1, 0);
  r1_plus.assign(c1, 0);
  n1_star.assign(c1, 0);
  y1_plus.assign(c1, 0);
  n2.assign(c2, 0);
  r2_plus.assign(c2, 0);
  n2_star.assign(c2, 0);
  y2_plus.assign(c2, 0);
  n3_star.assign(c2, 0);
  y3_plus.assign(c2, 0);
}

void CountTable::validate() const {
  auto check = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("count table violates: ") + what);
  };
  for (int i = 0; i < k1; ++i) {
    check(n1[i] >= 0 && r1_plus[i] >= 0 && n1_star[i] >= 0 && y1_plus[i] >= 0,
          "non-negative stage-1 counts");
    check(r1_plus[i] <= n1[i], "r1_plus <= n1");
    check(n1_star[i] <= r1_plus[i], "n1_star <= r1_plus");
    check(y1_plus[i] <= n1_star[i], "y1_plus <= n1_star");
  }
  for (int c = 0; c < k1 * k2; ++c) {
    check(n2[c] >= 0 && r2_plus[c] >= 0 && n2_star[c] >= 0 && y2_plus[c] >= 0 &&
              n3_star[c] >= 0 && y3_plus[c] >= 0,
          "non-negative stage-2 counts");
    check(r2_plus[c] <= n2[c], "r2_plus <= n2");
    check(n2_star[c] <= r2_plus[c], "n2_star <= r2_plus");
    check(y2_plus[c] <= n2_star[c], "y2_plus <= n2_star");
    check(n3_star[c] <= n2[c] - r2_plus[c], "n3_star <= n2 - r2_plus");
    check(y3_plus[c] <= n3_star[c], "y3_plus <= n3_star");
  }
}

CountTable counts_at_week(const std::vector<SubjectRecord>& dataset, int week,
                          const ArmSets& arms) {
  CountTable t(arms.k1(), arms.k2());
  const auto seen = [week](int event_week) { return event_week >= 0 && event_week < week; };
  for (const SubjectRecord& rec : dataset) {
    if (!seen(rec.week_r1)) continue;  // nothing about this subject is informative yet
    const int i1 = arms.stage1_index(rec.a1);
    t.n1[i1] += 1;
    if (rec.r1 == 1) {
      t.r1_plus[i1] += 1;
      if (seen(rec.week_y1)) {
        t.n1_star[i1] += 1;
        t.y1_plus[i1] += rec.y1.value_or(0);
      }
      continue;
    }
    if (!rec.a2 || !seen(rec.week_r2)) continue;
    const int c = t.cell(i1, arms.stage2_index(*rec.a2));
    t.n2[c] += 1;
    if (*rec.r2 == 1) {
      t.r2_plus[c] += 1;
      if (seen(rec.week_y2)) {
        t.n2_star[c] += 1;
        t.y2_plus[c] += rec.y2.value_or(0);
      }
    } else if (seen(rec.week_y3)) {
      t.n3_star[c] += 1;
      t.y3_plus[c] += rec.y3.value_or(0);
    }
  }
  return t;
}

}  // namespace smartrar
