#pragma once

#include <string>
#include <vector>

namespace smartrar {

// How strongly posterior optimality probabilities drive assignment: tables
// use rho^psi renormalized, with psi either fixed or ramped linearly over the
// course of the trial (psi(t) = psi_max * t / t_end).
struct DampingSchedule {
  enum class Kind { constant, linear_in_time };
  Kind kind = Kind::constant;
  double psi_max = 1.0;
};

double psi_at(const DampingSchedule& schedule, int week, int t_end);

// A randomization scheme: either equal (non-adaptive) randomization at both
// stages, or posterior-probability-driven adaptive randomization with the
// given damping schedule.
struct RandomizationScheme {
  enum class Kind { equal, adaptive };
  Kind kind = Kind::equal;
  DampingSchedule damping{};
};

// Canonical display label: "SR", "TS(0.5)", "TS(t/T_end)", "TS(0.5t/T_end)".
std::string scheme_label(const RandomizationScheme& scheme);

// Filesystem-safe slug: "sr", "ts05", "ts1t", ...
std::string scheme_slug(const RandomizationScheme& scheme);

// Parses a display label (case-insensitive, whitespace-tolerant); throws
// std::invalid_argument on anything unrecognized.
RandomizationScheme parse_scheme_label(const std::string& text);

// The seven schemes studied in the reference experiments, in report order.
std::vector<RandomizationScheme> standard_schemes();

}  // namespace smartrar
