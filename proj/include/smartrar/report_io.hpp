#pragma once

#include <string>

#include "smartrar/harness.hpp"

namespace smartrar {

// Writes one directory per scheme under out_dir (named by scheme slug):
//   <slug>/metrics.json   — all aggregates plus context for later merging
//   <slug>/zscores.csv    — per-replicate standardized estimates (ok replicates)
//   <slug>/trajectory.csv — per-week MC-mean table entries for the designated
//                           optimum (only when the plan collected trajectories)
// Creates directories as needed; output is byte-stable for identical reports.
void write_experiment_outputs(const MetricsReport& report, const std::string& out_dir);

// Scans dir/*/metrics.json, groups by scenario, orders schemes canonically,
// recomputes cross-scheme relative efficiencies from the stored MSEs, and
// writes dir/table2.csv (in-trial metrics) and dir/table3.csv (post-trial
// metrics), shaped one metric row by one scheme column.
void write_report_tables(const std::string& dir);

}  // namespace smartrar
