#include "smartrar/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace smartrar {

namespace {

std::string format_prob(double p) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", p);
  return buf;
}

std::string opt_int(const std::optional<int>& v) { return v ? std::to_string(*v) : ""; }

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  return in;
}

}  // namespace

void write_dataset_csv(const std::vector<SubjectRecord>& dataset, std::ostream& out) {
  out << "id,enroll_week,a1,pi1,r1,y1,a2,pi2,r2,y2,y3,"
         "week_r1,week_y1,week_a2,week_r2,week_y2,week_y3\n";
  for (const SubjectRecord& r : dataset) {
    out << r.id << ',' << r.enroll_week << ',' << r.a1 << ',' << format_prob(r.pi1) << ','
        << r.r1 << ',' << opt_int(r.y1) << ',' << opt_int(r.a2) << ','
        << (r.pi2 ? format_prob(*r.pi2) : std::string()) << ',' << opt_int(r.r2) << ','
        << opt_int(r.y2) << ',' << opt_int(r.y3) << ',' << r.week_r1 << ',' << r.week_y1 << ','
        << r.week_a2 << ',' << r.week_r2 << ',' << r.week_y2 << ',' << r.week_y3 << '\n';
  }
}

void write_dataset_csv(const std::vector<SubjectRecord>& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_dataset_csv(dataset, out);
}

std::vector<SubjectRecord> read_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("dataset CSV: missing header");
  std::vector<SubjectRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 17) {
      throw std::runtime_error("dataset CSV line " + std::to_string(line_no) +
                               ": expected 17 fields, got " + std::to_string(f.size()));
    }
    SubjectRecord r;
    const auto as_int = [&](const std::string& s) { return std::stoi(s); };
    const auto as_opt_int = [&](const std::string& s) {
      return s.empty() ? std::optional<int>{} : std::optional<int>{std::stoi(s)};
    };
    r.id = as_int(f[0]);
    r.enroll_week = as_int(f[1]);
    r.a1 = as_int(f[2]);
    r.pi1 = std::stod(f[3]);
    r.r1 = as_int(f[4]);
    r.y1 = as_opt_int(f[5]);
    r.a2 = as_opt_int(f[6]);
    r.pi2 = f[7].empty() ? std::optional<double>{} : std::optional<double>{std::stod(f[7])};
    r.r2 = as_opt_int(f[8]);
    r.y2 = as_opt_int(f[9]);
    r.y3 = as_opt_int(f[10]);
    r.week_r1 = as_int(f[11]);
    r.week_y1 = as_int(f[12]);
    r.week_a2 = as_int(f[13]);
    r.week_r2 = as_int(f[14]);
    r.week_y2 = as_int(f[15]);
    r.week_y3 = as_int(f[16]);
    out.push_back(r);
  }
  return out;
}

std::vector<SubjectRecord> read_dataset_csv(const std::string& path) {
  std::ifstream in = open_input(path);
  return read_dataset_csv(in);
}

ScenarioSpec parse_scenario(const std::string& json_text) {
  const nlohmann::json j = nlohmann::json::parse(json_text);
  ScenarioSpec s;
  s.name = j.at("name").get<std::string>();
  s.arms.stage1 = j.at("stage1_arms").get<std::vector<int>>();
  s.arms.stage2 = j.at("stage2_arms").get<std::vector<int>>();
  s.p1 = j.at("p1").get<std::vector<double>>();
  for (const auto& row : j.at("p2")) {
    const auto r = row.get<std::vector<double>>();
    s.p2.insert(s.p2.end(), r.begin(), r.end());
  }
  for (const auto& row : j.at("p3")) {
    const auto r = row.get<std::vector<double>>();
    s.p3.insert(s.p3.end(), r.begin(), r.end());
  }
  s.lambda_sens = j.at("lambda_sens").get<double>();
  s.lambda_spec = j.at("lambda_spec").get<double>();
  s.validate();
  return s;
}

ScenarioSpec load_scenario(const std::string& path) {
  std::ifstream in = open_input(path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_scenario(ss.str());
  } catch (const std::exception& e) {
    throw std::runtime_error("scenario file " + path + ": " + e.what());
  }
}

TrialConfig parse_config(const std::string& json_text) {
  const nlohmann::json j = nlohmann::json::parse(json_text);
  TrialConfig c;
  if (j.contains("arms")) {
    c.arms.stage1 = j["arms"].at("stage1").get<std::vector<int>>();
    c.arms.stage2 = j["arms"].at("stage2").get<std::vector<int>>();
  }
  c.n_subjects = j.value("n_subjects", c.n_subjects);
  c.t_enroll = j.value("t_enroll", c.t_enroll);
  c.t_end = j.value("t_end", c.t_end);
  c.burn_in_count = j.value("burn_in_count", c.burn_in_count);
  c.posterior_draws = j.value("posterior_draws", c.posterior_draws);
  c.clip_lo = j.value("clip_lo", c.clip_lo);
  c.clip_hi = j.value("clip_hi", c.clip_hi);
  if (j.contains("offsets")) {
    const auto& o = j["offsets"];
    c.offsets.stage1_eval = o.value("stage1_eval", c.offsets.stage1_eval);
    c.offsets.y1_record = o.value("y1_record", c.offsets.y1_record);
    c.offsets.stage2_eval = o.value("stage2_eval", c.offsets.stage2_eval);
    c.offsets.y2_record = o.value("y2_record", c.offsets.y2_record);
    c.offsets.y3_record = o.value("y3_record", c.offsets.y3_record);
  }
  if (j.contains("scheme")) c.scheme = parse_scheme_label(j["scheme"].get<std::string>());
  c.validate();
  return c;
}

TrialConfig load_config(const std::string& path) {
  std::ifstream in = open_input(path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const std::exception& e) {
    throw std::runtime_error("config file " + path + ": " + e.what());
  }
}

ArmSets infer_arms(const std::vector<SubjectRecord>& dataset) {
  std::set<int> s1, s2;
  for (const SubjectRecord& r : dataset) {
    s1.insert(r.a1);
    if (r.a2) s2.insert(*r.a2);
  }
  if (s1.empty() || s2.empty()) {
    throw std::runtime_error("cannot infer arms: dataset lacks assignments at both stages");
  }
  ArmSets arms;
  arms.stage1.assign(s1.begin(), s1.end());
  arms.stage2.assign(s2.begin(), s2.end());
  return arms;
}

}  // namespace smartrar
