#pragma once

#include <optional>
#include <string>
#include <vector>

namespace smartrar {

// Arms available at each decision stage, identified by integer ids. Stage-2
// arms are offered to stage-1 non-responders regardless of their stage-1 arm.
struct ArmSets {
  std::vector<int> stage1;
  std::vector<int> stage2;

  int k1() const { return static_cast<int>(stage1.size()); }
  int k2() const { return static_cast<int>(stage2.size()); }
  int stage1_index(int arm_id) const;  // position of an id; throws if unknown
  int stage2_index(int arm_id) const;
  void validate() const;  // non-empty, unique ids
};

// An embedded treatment regime: start on a1; switch to a2 on non-response.
struct Regime {
  int a1 = 0;
  int a2 = 0;

  friend bool operator==(const Regime&, const Regime&) = default;
};

// Lexicographic enumeration of all regimes (a1-major), the canonical order
// used for estimate vectors and reports.
std::vector<Regime> enumerate_regimes(const ArmSets& arms);

// One subject's observed trajectory. Fields after stage 1 are present only on
// the branch the subject actually followed; `week_*` fields give the calendar
// week each quantity becomes part of the observable dataset (-1 if the event
// does not occur for this subject). A field counts as observed at week t only
// if its event week is strictly less than t.
struct SubjectRecord {
  int id = 0;
  int enroll_week = 0;

  int a1 = 0;
  double pi1 = 0.0;  // assignment probability of a1 at the time of assignment
  int r1 = 0;        // stage-1 response indicator

  std::optional<int> y1;  // terminal outcome, responders only
  std::optional<int> a2;  // stage-2 arm, non-responders only
  std::optional<double> pi2;
  std::optional<int> r2;
  std::optional<int> y2;  // terminal outcome, stage-2 responders
  std::optional<int> y3;  // terminal outcome, stage-2 non-responders

  int week_r1 = -1;
  int week_y1 = -1;
  int week_a2 = -1;
  int week_r2 = -1;
  int week_y2 = -1;
  int week_y3 = -1;
};

// Checks the presence pattern and event-week ordering of a completed record;
// throws std::invalid_argument describing the first violation.
void validate_record(const SubjectRecord& rec);

// The unique terminal outcome (y1, y2, or y3); throws std::runtime_error if
// the trajectory is incomplete.
int subject_outcome(const SubjectRecord& rec);

// Whether the observed trajectory is consistent with following the regime:
// the stage-1 arm matches, and either the subject responded at stage 1 or the
// stage-2 arm matches too. Requires a completed record.
bool consistent_with_regime(const SubjectRecord& rec, const Regime& regime);

// Sufficient statistics of a dataset snapshot. Stage-1 vectors are indexed by
// stage-1 arm position; stage-2 vectors are row-major [stage1_pos][stage2_pos].
// Each counter tallies subjects whose relevant quantity is already observed:
// n1 requires r1 observed, n1_star requires y1 observed, and so on.
struct CountTable {
  int k1 = 0;
  int k2 = 0;
  std::vector<long> n1, r1_plus;        // r1 observed on a1 / of those, r1 == 1
  std::vector<long> n1_star, y1_plus;   // responders with y1 observed / y1 == 1
  std::vector<long> n2, r2_plus;        // r2 observed on (a1,a2) / r2 == 1
  std::vector<long> n2_star, y2_plus;   // stage-2 responders with y2 observed / y2 == 1
  std::vector<long> n3_star, y3_plus;   // stage-2 non-resp. with y3 observed / y3 == 1

  CountTable() = default;
  CountTable(int n_stage1, int n_stage2);
  int cell(int i1, int i2) const { return i1 * k2 + i2; }
  void validate() const;  // non-negativity and nesting invariants; throws
};

// Counts using exactly the information observable at the start of `week`:
// an event contributes only if its recorded week is strictly less than `week`.
CountTable counts_at_week(const std::vector<SubjectRecord>& dataset, int week,
                          const ArmSets& arms);

}  // namespace smartrar
