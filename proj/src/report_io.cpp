#include "smartrar/report_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

#include "json.hpp"

namespace smartrar {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fixed6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string fixed9(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.9f", v);
  return buf;
}

json number_or_null(double v) {
  if (std::isnan(v) || std::isinf(v)) return nullptr;
  return v;
}

json regime_json(const Regime& r) { return json{{"a1", r.a1}, {"a2", r.a2}}; }

json estimator_json(const EstimatorMetrics& em) {
  return json{{"method", em.method},
              {"included", em.included},
              {"excluded", em.excluded},
              {"mc_mean", number_or_null(em.mc_mean)},
              {"coverage", number_or_null(em.coverage)},
              {"ci_length", number_or_null(em.ci_length)},
              {"prop_correct", number_or_null(em.prop_correct)},
              {"mse", number_or_null(em.mse)},
              {"zscore_mean", number_or_null(em.zscore_mean)},
              {"rel_eff_vs_bayes", number_or_null(em.rel_eff_vs_bayes)},
              {"rel_eff_vs_sr", number_or_null(em.rel_eff_vs_sr)}};
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  return out;
}

void write_zscores_csv(const SchemeMetrics& sm, const fs::path& path) {
  std::ofstream out = open_output(path);
  out << "replicate,method,estimate,se,z\n";
  const auto dump = [&](const std::vector<MethodReplicate>& reps, const char* method) {
    for (std::size_t r = 0; r < reps.size(); ++r) {
      if (!reps[r].ok) continue;
      out << r << ',' << method << ',' << fixed9(reps[r].estimate) << ','
          << fixed9(reps[r].se) << ',' << fixed9(reps[r].z) << '\n';
    }
  };
  dump(sm.replicates_bayes, "bayes");
  dump(sm.replicates_plugin, "plugin");
  dump(sm.replicates_weighted, "weighted");
}

void write_trajectory_csv(const SchemeMetrics& sm, const fs::path& path) {
  std::ofstream out = open_output(path);
  out << "week,pi1_opt,pi2_opt\n";
  for (std::size_t w = 0; w < sm.traj_pi1.size(); ++w) {
    out << (w + 1) << ',' << fixed6(sm.traj_pi1[w]) << ',' << fixed6(sm.traj_pi2[w]) << '\n';
  }
}

// Canonical column order: the standard schemes first, anything else after,
// alphabetically by label.
std::vector<std::string> order_labels(const std::vector<std::string>& present) {
  std::vector<std::string> ordered;
  for (const RandomizationScheme& s : standard_schemes()) {
    const std::string label = scheme_label(s);
    if (std::find(present.begin(), present.end(), label) != present.end()) {
      ordered.push_back(label);
    }
  }
  std::vector<std::string> rest;
  for (const std::string& label : present) {
    if (std::find(ordered.begin(), ordered.end(), label) == ordered.end()) rest.push_back(label);
  }
  std::sort(rest.begin(), rest.end());
  ordered.insert(ordered.end(), rest.begin(), rest.end());
  return ordered;
}

std::string cell_or_empty(const json& j) {
  if (j.is_null()) return "";
  return fixed6(j.get<double>());
}

}  // namespace

void write_experiment_outputs(const MetricsReport& report, const std::string& out_dir) {
  const fs::path root(out_dir);
  fs::create_directories(root);
  for (const SchemeMetrics& sm : report.schemes) {
    const fs::path dir = root / scheme_slug(sm.scheme);
    fs::create_directories(dir);

    json rows = json::array();
    for (std::size_t k = 0; k < report.truth.report_rows.size(); ++k) {
      rows.push_back(json{{"a1", report.truth.report_rows[k].a1},
                          {"a2", report.truth.report_rows[k].a2},
                          {"consist_opt", number_or_null(sm.consist_opt[k])},
                          {"final_pi1_opt", number_or_null(sm.final_pi1_opt[k])},
                          {"final_pi2_opt", number_or_null(sm.final_pi2_opt[k])}});
    }
    json optima = json::array();
    for (const Regime& r : report.truth.optima_set) optima.push_back(regime_json(r));

    const json j{{"kind", "smartrar-metrics"},
                 {"scenario", report.scenario_name},
                 {"scheme", sm.label},
                 {"slug", scheme_slug(sm.scheme)},
                 {"replicates", report.replicates},
                 {"n_subjects", report.n_subjects},
                 {"seed", report.seed},
                 {"designated", regime_json(report.truth.designated)},
                 {"optima", optima},
                 {"worst", regime_json(report.truth.worst)},
                 {"true_value_designated", report.truth.value_designated},
                 {"in_trial", json{{"overall_pcr", number_or_null(sm.overall_pcr)},
                                   {"consist_worst", number_or_null(sm.consist_worst)},
                                   {"rows", rows}}},
                 {"estimators", json::array({estimator_json(sm.bayes), estimator_json(sm.plugin),
                                             estimator_json(sm.weighted)})}};
    {
      std::ofstream out = open_output(dir / "metrics.json");
      out << j.dump(2) << '\n';
    }
    write_zscores_csv(sm, dir / "zscores.csv");
    if (!sm.traj_pi1.empty()) write_trajectory_csv(sm, dir / "trajectory.csv");
  }
}

void write_report_tables(const std::string& dir) {
  const fs::path root(dir);
  if (!fs::is_directory(root)) throw std::runtime_error("not a directory: " + dir);

  // scenario name -> scheme label -> metrics json
  std::map<std::string, std::map<std::string, json>> by_scenario;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory() && fs::exists(entry.path() / "metrics.json")) {
      files.push_back(entry.path() / "metrics.json");
    }
  }
  std::sort(files.begin(), files.end());
  for (const fs::path& file : files) {
    std::ifstream in(file);
    json j;
    in >> j;
    if (j.value("kind", "") != "smartrar-metrics") continue;
    by_scenario[j.at("scenario").get<std::string>()][j.at("scheme").get<std::string>()] = j;
  }
  if (by_scenario.empty()) throw std::runtime_error("no metrics.json files under " + dir);

  std::ofstream t2 = open_output(root / "table2.csv");
  std::ofstream t3 = open_output(root / "table3.csv");

  for (const auto& [scenario, schemes] : by_scenario) {
    std::vector<std::string> present;
    for (const auto& [label, _] : schemes) present.push_back(label);
    const std::vector<std::string> labels = order_labels(present);

    t2 << "scenario,metric,a1,a2";
    for (const std::string& l : labels) t2 << ',' << l;
    t2 << '\n';

    const json& first = schemes.begin()->second;
    const auto& rows = first.at("in_trial").at("rows");

    const auto t2_row = [&](const std::string& metric, const std::string& a1,
                            const std::string& a2, const auto& getter) {
      t2 << scenario << ',' << metric << ',' << a1 << ',' << a2;
      for (const std::string& l : labels) t2 << ',' << cell_or_empty(getter(schemes.at(l)));
      t2 << '\n';
    };

    t2_row("overall_pcr", "", "",
           [](const json& j) { return j.at("in_trial").at("overall_pcr"); });
    for (std::size_t k = 0; k < rows.size(); ++k) {
      t2_row("consist_opt", rows[k].at("a1").dump(), rows[k].at("a2").dump(),
             [k](const json& j) { return j.at("in_trial").at("rows").at(k).at("consist_opt"); });
    }
    t2_row("consist_worst", first.at("worst").at("a1").dump(), first.at("worst").at("a2").dump(),
           [](const json& j) { return j.at("in_trial").at("consist_worst"); });
    for (std::size_t k = 0; k < rows.size(); ++k) {
      t2_row("final_pi1_opt", rows[k].at("a1").dump(), rows[k].at("a2").dump(),
             [k](const json& j) { return j.at("in_trial").at("rows").at(k).at("final_pi1_opt"); });
    }
    for (std::size_t k = 0; k < rows.size(); ++k) {
      t2_row("final_pi2_opt", rows[k].at("a1").dump(), rows[k].at("a2").dump(),
             [k](const json& j) { return j.at("in_trial").at("rows").at(k).at("final_pi2_opt"); });
    }

    // Post-trial table, with relative efficiencies recomputed from the stored
    // MSEs so separately-run schemes merge correctly.
    const auto mse_of = [&](const json& j, const char* method) -> double {
      for (const auto& em : j.at("estimators")) {
        if (em.at("method") == method) {
          return em.at("mse").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                        : em.at("mse").get<double>();
        }
      }
      return std::numeric_limits<double>::quiet_NaN();
    };
    const json* sr = nullptr;
    const auto it = schemes.find("SR");
    if (it != schemes.end()) sr = &it->second;

    t3 << "scenario,method,metric";
    for (const std::string& l : labels) t3 << ',' << l;
    t3 << '\n';
    const char* methods[] = {"bayes", "plugin", "weighted"};
    const char* fields[] = {"mc_mean",      "coverage",    "ci_length", "prop_correct",
                            "rel_eff_vs_bayes", "rel_eff_vs_sr", "zscore_mean", "excluded"};
    for (const char* method : methods) {
      for (const char* field : fields) {
        t3 << scenario << ',' << method << ',' << field;
        for (const std::string& l : labels) {
          const json& j = schemes.at(l);
          const json* em = nullptr;
          for (const auto& cand : j.at("estimators")) {
            if (cand.at("method") == method) em = &cand;
          }
          std::string cell;
          if (em == nullptr) {
            cell = "";
          } else if (std::string(field) == "excluded") {
            cell = std::to_string(em->at("excluded").get<long>());
          } else if (std::string(field) == "rel_eff_vs_bayes") {
            const double denom = mse_of(j, method);
            const double numer = mse_of(j, "bayes");
            cell = (std::isnan(denom) || std::isnan(numer) || denom <= 0.0)
                       ? ""
                       : fixed6(numer / denom);
          } else if (std::string(field) == "rel_eff_vs_sr") {
            const double denom = mse_of(j, method);
            const double numer =
                sr == nullptr
                    ? std::numeric_limits<double>::quiet_NaN()
                    : mse_of(*sr, std::string(method) == "weighted" ? "plugin" : method);
            cell = (std::isnan(denom) || std::isnan(numer) || denom <= 0.0)
                       ? ""
                       : fixed6(numer / denom);
          } else {
            cell = cell_or_empty(em->at(field));
          }
          t3 << ',' << cell;
        }
        t3 << '\n';
      }
    }
  }
}

}  // namespace smartrar
