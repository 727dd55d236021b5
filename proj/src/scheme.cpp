#include "smartrar/scheme.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <stdexcept>

namespace smartrar {

namespace {

std::string format_psi(double psi) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", psi);
  return buf;
}

std::string lower_nospace(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  return out;
}

}  // namespace

double psi_at(const DampingSchedule& schedule, int week, int t_end) {
  if (schedule.kind == DampingSchedule::Kind::constant) return schedule.psi_max;
  return schedule.psi_max * static_cast<double>(week) / static_cast<double>(t_end);
}

std::string scheme_label(const RandomizationScheme& scheme) {
  if (scheme.kind == RandomizationScheme::Kind::equal) return "SR";
  if (scheme.damping.kind == DampingSchedule::Kind::constant) {
    return "TS(" + format_psi(scheme.damping.psi_max) + ")";
  }
  if (scheme.damping.psi_max == 1.0) return "TS(t/T_end)";
  return "TS(" + format_psi(scheme.damping.psi_max) + "t/T_end)";
}

std::string scheme_slug(const RandomizationScheme& scheme) {
  if (scheme.kind == RandomizationScheme::Kind::equal) return "sr";
  std::string digits;
  for (char c : format_psi(scheme.damping.psi_max)) {
    if (c != '.') digits.push_back(c);
  }
  std::string slug = "ts" + digits;
  if (scheme.damping.kind == DampingSchedule::Kind::linear_in_time) slug += "t";
  return slug;
}

RandomizationScheme parse_scheme_label(const std::string& text) {
  const std::string s = lower_nospace(text);
  if (s == "sr" || s == "equal") return RandomizationScheme{};
  if (s.rfind("ts(", 0) != 0 || s.back() != ')') {
    throw std::invalid_argument("unrecognized scheme label: " + text);
  }
  std::string inside = s.substr(3, s.size() - 4);
  RandomizationScheme scheme;
  scheme.kind = RandomizationScheme::Kind::adaptive;
  // Linear schedules end in "t/t_end" (t/tend and t/t also accepted).
  for (const char* suffix : {"t/t_end", "t/tend", "t/t"}) {
    const std::string suf(suffix);
    if (inside.size() >= suf.size() && inside.compare(inside.size() - suf.size(), suf.size(), suf) == 0) {
      scheme.damping.kind = DampingSchedule::Kind::linear_in_time;
      inside = inside.substr(0, inside.size() - suf.size());
      if (!inside.empty() && inside.back() == '*') inside.pop_back();
      break;
    }
  }
  if (inside.empty()) {
    scheme.damping.psi_max = 1.0;
    if (scheme.damping.kind == DampingSchedule::Kind::constant) {
      throw std::invalid_argument("unrecognized scheme label: " + text);
    }
  } else {
    std::size_t used = 0;
    double psi = 0.0;
    try {
      psi = std::stod(inside, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("unrecognized scheme label: " + text);
    }
    if (used != inside.size() || !(psi > 0.0)) {
      throw std::invalid_argument("unrecognized scheme label: " + text);
    }
    scheme.damping.psi_max = psi;
  }
  return scheme;
}

std::vector<RandomizationScheme> standard_schemes() {
  std::vector<RandomizationScheme> out;
  out.push_back(RandomizationScheme{});  // SR
  for (double psi : {0.25, 0.5, 0.75, 1.0}) {
    RandomizationScheme s;
    s.kind = RandomizationScheme::Kind::adaptive;
    s.damping = DampingSchedule{DampingSchedule::Kind::constant, psi};
    out.push_back(s);
  }
  for (double psi : {0.5, 1.0}) {
    RandomizationScheme s;
    s.kind = RandomizationScheme::Kind::adaptive;
    s.damping = DampingSchedule{DampingSchedule::Kind::linear_in_time, psi};
    out.push_back(s);
  }
  return out;
}

}  // namespace smartrar
