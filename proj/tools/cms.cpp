// cms — conflict management workbench for Near-RT-RIC xApps.
//
// Subcommands: generate, validate, normalize, fit, detect, mitigate, run,
// casestudy, report. Exit codes: 0 success, 1 domain error, 2 usage error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "cms/errors.hpp"
#include "cms/harness.hpp"
#include "json.hpp"

using namespace cms;
using nlohmann::json;

namespace {

std::string fmt9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::filesystem::path default_fixture_dir() {
  if (const char* env = std::getenv("CMS_FIXTURE_DIR")) return env;
#ifdef CMS_FIXTURE_DIR_DEFAULT
  return CMS_FIXTURE_DIR_DEFAULT;
#else
  return "fixtures";
#endif
}

std::map<std::string, std::string> load_column_map(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open column map " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(std::string("column map: ") + e.what());
  }
  std::map<std::string, std::string> out;
  for (const auto& [k, v] : j.items()) out[k] = v.get<std::string>();
  return out;
}

PolicyConfig parse_ratio_list(const std::vector<std::string>& pairs) {
  // "x1=7" entries; an empty list is the uniform default
  PolicyConfig p;
  for (const std::string& entry : pairs) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("weight '" + entry + "' must look like xapp=ratio", "cli");
    }
    const std::string id = entry.substr(0, eq);
    const double ratio = std::strtod(entry.c_str() + eq + 1, nullptr);
    p.ratios[XAppId{id}] = ratio;
  }
  double sum = 0.0;
  for (const auto& [x, r] : p.ratios) {
    (void)x;
    sum += r;
  }
  if (!p.ratios.empty() && !(sum > 0.0)) {
    throw WeightError("weights sum to " + std::to_string(sum) + ", expected a positive total");
  }
  return p;
}

Method parse_method_flag(const std::string& name) {
  auto m = method_from_string(name);
  if (!m) throw ConfigError("unknown method '" + name + "'", "cli");
  return *m;
}

// ---------------------------------------------------------------- curves io

struct CurveFile {
  XAppId xapp;
  ParamId param;
  std::vector<double> grid;
  std::map<KpiId, UtilityCurve> per_kpi;
  std::optional<UtilityCurve> combined;
};

void save_curves(const CurveFile& cf, std::ostream& out) {
  out << "# cms-curves v1\n";
  out << "# xapp: " << cf.xapp.str() << "\n";
  out << "# param: " << cf.param.str() << "\n";
  for (const auto& [k, c] : cf.per_kpi) {
    out << "# curve z_" << k.str() << " threshold " << fmt9(c.threshold) << " delta " << c.delta
        << "\n";
  }
  if (cf.combined) {
    out << "# curve z_combined threshold " << fmt9(cf.combined->threshold) << " delta "
        << cf.combined->delta << "\n";
  }
  out << cf.param.str();
  for (const auto& [k, c] : cf.per_kpi) {
    (void)c;
    out << ",z_" << k.str();
  }
  if (cf.combined) out << ",z_combined";
  out << "\n";
  for (std::size_t i = 0; i < cf.grid.size(); ++i) {
    out << fmt9(cf.grid[i]);
    for (const auto& [k, c] : cf.per_kpi) {
      (void)k;
      out << "," << fmt9(c.values[i]);
    }
    if (cf.combined) out << "," << fmt9(cf.combined->values[i]);
    out << "\n";
  }
}

UtilityCurve load_curve_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());

  std::string xapp, param;
  struct Meta {
    double threshold = 0.0;
    int delta = 0;
  };
  std::map<std::string, Meta> meta;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    if (line[0] == '#') {
      std::istringstream ss(line.substr(1));
      std::string key;
      ss >> key;
      if (key == "xapp:") ss >> xapp;
      if (key == "param:") ss >> param;
      if (key == "curve") {
        std::string col, kw_thr, kw_delta;
        Meta m;
        ss >> col >> kw_thr >> m.threshold >> kw_delta >> m.delta;
        meta[col] = m;
      }
      continue;
    }
    std::istringstream ss(line);
    if (header.empty()) {
      std::string tok;
      while (std::getline(ss, tok, ',')) header.push_back(tok);
      continue;
    }
    std::vector<double> row;
    std::string tok;
    while (std::getline(ss, tok, ',')) row.push_back(std::strtod(tok.c_str(), nullptr));
    if (row.size() != header.size()) throw ParseError("ragged curve row", line_no);
    rows.push_back(std::move(row));
  }
  if (xapp.empty() || param.empty() || header.size() < 2) {
    throw ParseError("curve file " + path.string() + " lacks metadata or columns");
  }

  // prefer the combined column; otherwise exactly one z_ column is expected
  std::size_t col = 0;
  std::string col_name;
  for (std::size_t c = 1; c < header.size(); ++c) {
    if (header[c] == "z_combined") {
      col = c;
      col_name = header[c];
      break;
    }
  }
  if (col == 0) {
    std::vector<std::size_t> zcols;
    for (std::size_t c = 1; c < header.size(); ++c) {
      if (header[c].rfind("z_", 0) == 0) zcols.push_back(c);
    }
    if (zcols.size() != 1) {
      throw ParseError("curve file " + path.string() +
                       " has multiple z_ columns and no z_combined");
    }
    col = zcols.front();
    col_name = header[col];
  }
  if (!meta.count(col_name)) {
    throw ParseError("curve file lacks '# curve " + col_name + " ...' metadata");
  }

  UtilityCurve c;
  c.xapp = XAppId{xapp};
  c.param = ParamId{param};
  for (const auto& row : rows) {
    c.grid.push_back(row[0]);
    c.values.push_back(row[col]);
  }
  c.threshold = meta.at(col_name).threshold;
  c.delta = meta.at(col_name).delta;
  c.validate();
  return c;
}

CurveFile curves_from_table(const ConflictTable& table, const Scenario& scenario) {
  CurveFile cf;
  cf.xapp = table.xapp;
  cf.param = table.swept;
  cf.grid = table.swept_values();
  const XAppSpec& spec = scenario.xapp(table.xapp);
  std::vector<UtilityCurve> parts;
  std::vector<double> weights;
  for (const KpiDef& k : spec.kpis) {
    if (!table.has_kpi(k.id)) continue;
    UtilityCurve c = utility_curve(table, k);
    cf.per_kpi.emplace(k.id, c);
    parts.push_back(std::move(c));
    weights.push_back(k.weight_in_xapp);
  }
  if (parts.empty()) throw SchemaError("table has no KPI column of " + spec.id.str());
  if (parts.size() > 1) {
    double sum = 0.0;
    for (double w : weights) sum += w;
    for (double& w : weights) w /= sum;
    cf.combined = combine_kpis(parts, weights);
  }
  return cf;
}

// ---------------------------------------------------------------- reporting

json result_to_json(const MitigationResult& r, const std::map<XAppId, double>& weights) {
  json per = json::array();
  for (const PerXApp& p : r.per_xapp) {
    per.push_back({{"xapp", p.xapp.str()},
                   {"utility", p.utility},
                   {"distance", p.distance},
                   {"satisfied", p.satisfied}});
  }
  json w;
  for (const auto& [x, v] : weights) w[x.str()] = v;
  return json{{"method", to_string(r.method)}, {"p_opt", r.p_opt},
              {"objective", r.objective},     {"satisfied_count", r.satisfied_count()},
              {"weights", w},                 {"per_xapp", per}};
}

void print_result(const MitigationResult& r, const ParamId& param, std::ostream& out) {
  out << "method " << to_string(r.method) << ": " << param.str() << " = " << fmt9(r.p_opt)
      << "  objective " << fmt9(r.objective) << "  satisfied " << r.satisfied_count() << "/"
      << r.per_xapp.size() << "\n";
  for (const PerXApp& p : r.per_xapp) {
    out << "  " << p.xapp.str() << ": utility " << fmt9(p.utility) << "  distance "
        << fmt9(p.distance) << "  " << (p.satisfied ? "satisfied" : "unsatisfied") << "\n";
  }
}

struct ReportRow {
  std::string label;
  Method method;
  PolicyConfig policy;
};

int run_report(const std::filesystem::path& fixtures, bool as_json,
               const std::string& plot_dir) {
  std::ostream& out = std::cout;
  if (!as_json) {
    out << "case-study comparison (tables regenerated from the analytic model;\n"
           "fixture file constants, not the externally published dataset)\n\n";
  }
  json all = json::array();

  for (char id : {'A', 'B', 'C', 'D'}) {
    const char lo = static_cast<char>(std::tolower(id));
    Scenario probe = load_scenario(fixtures / (std::string("casestudy_") + lo + ".json"));
    const PolicyConfig prio = probe.priority_policy.value_or(PolicyConfig{});

    const std::vector<ReportRow> rows = {
        {"QACM (equal)", Method::kQacm, PolicyConfig{}},
        {"NSWF (equal)", Method::kNswf, PolicyConfig{}},
        {"QACMP (priority)", Method::kQacm, prio},
        {"EG (priority)", Method::kEg, prio},
    };

    if (!as_json) out << "case study " << id << "\n";
    json case_json{{"case", std::string(1, id)}, {"rows", json::array()}};

    int qacm_equal_sat = 0, nswf_sat = 0, qacmp_sat = 0, eg_sat = 0;
    for (const ReportRow& row : rows) {
      const CaseStudyOutcome oc = casestudy(id, row.method, row.policy, fixtures);
      const MitigationResult& r = oc.final_result;
      if (row.label == "QACM (equal)") qacm_equal_sat = r.satisfied_count();
      if (row.label == "NSWF (equal)") nswf_sat = r.satisfied_count();
      if (row.label == "QACMP (priority)") qacmp_sat = r.satisfied_count();
      if (row.label == "EG (priority)") eg_sat = r.satisfied_count();

      if (as_json) {
        json rj = result_to_json(r, oc.final_weights);
        rj["label"] = row.label;
        case_json["rows"].push_back(rj);
      } else {
        std::string sats;
        for (const PerXApp& p : r.per_xapp) {
          if (p.satisfied) sats += (sats.empty() ? "" : ",") + p.xapp.str();
        }
        char buf[160];
        std::snprintf(buf, sizeof(buf), "  %-18s p = %-8s satisfied %d/%zu  {%s}\n",
                      row.label.c_str(), fmt9(r.p_opt).c_str(), r.satisfied_count(),
                      r.per_xapp.size(), sats.c_str());
        out << buf;
      }

      if (!plot_dir.empty() && row.label == "QACM (equal)") {
        std::filesystem::create_directories(plot_dir);
        Engine engine(oc.scenario);
        RunLog log = engine.run_schedule();
        const auto conflicts = log.all<ConflictRecord>();
        if (!conflicts.empty()) {
          const ConflictCase& final_case = conflicts.back()->conflict;
          const auto curves = engine.curves_for(final_case);
          CurveFile cf;
          cf.param = final_case.param;
          cf.xapp = XAppId{std::string("case") + id};
          std::vector<UtilityCurve> list;
          for (const auto& [x, c] : curves) {
            cf.per_kpi.emplace(KpiId{x.str()}, c);
            list.push_back(c);
          }
          cf.grid = list.front().grid;
          std::ofstream cf_out(std::filesystem::path(plot_dir) /
                               (std::string("case_") + lo + "_curves.csv"));
          save_curves(cf, cf_out);
        }
        std::ofstream mk(std::filesystem::path(plot_dir) /
                         (std::string("case_") + lo + "_choices.csv"));
        mk << "method,p_opt,satisfied,objective\n";
        for (const ReportRow& rr : rows) {
          const CaseStudyOutcome o2 = casestudy(id, rr.method, rr.policy, fixtures);
          mk << rr.label << "," << fmt9(o2.final_result.p_opt) << ","
             << o2.final_result.satisfied_count() << "," << fmt9(o2.final_result.objective)
             << "\n";
        }
      }
    }

    const bool dom = qacm_equal_sat >= nswf_sat && qacmp_sat >= eg_sat;
    if (as_json) {
      case_json["satisfaction_dominance"] = dom;
      all.push_back(case_json);
    } else {
      out << "  satisfaction dominance: " << (dom ? "holds" : "VIOLATED") << "\n\n";
    }
  }
  if (as_json) out << all.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"conflict detection and mitigation workbench for RIC xApps"};
  app.require_subcommand(1);

  std::string scenario_path, table_path, out_path, out_dir, column_map_path, events_path;
  std::string stores_in, stores_out, method_name = "qacm", plot_dir;
  std::string xapp_id, sweep_id, kpi_id;
  std::vector<std::string> curve_paths, weight_pairs;
  double opt_min = 0.0, opt_max = 0.0, opt_step = 1.0;
  bool has_range = false, as_json = false, no_shift = false, summary = false;
  int degree = 4;
  double zeta = 1000.0, big_m = 10.0;
  std::string fixtures = default_fixture_dir().string();
  std::string case_id;

  auto* gen = app.add_subcommand("generate", "generate a conflict table from a scenario");
  gen->add_option("--scenario", scenario_path, "scenario file")->required();
  gen->add_option("--xapp", xapp_id, "xApp id (omit to emit every fit table)");
  gen->add_option("--sweep", sweep_id, "parameter to sweep");
  auto* gmin = gen->add_option("--min", opt_min, "sweep minimum");
  gen->add_option("--max", opt_max, "sweep maximum")->needs(gmin);
  gen->add_option("--step", opt_step, "sweep step");
  gen->add_option("--out", out_path, "output table file");
  gen->add_option("--out-dir", out_dir, "output directory for --all style emission");

  auto* val = app.add_subcommand("validate", "validate a conflict-table file");
  val->add_option("--table", table_path, "table file")->required();
  val->add_option("--scenario", scenario_path, "scenario to check KPI coverage against");
  val->add_option("--xapp", xapp_id, "xApp the table must belong to");
  val->add_option("--column-map", column_map_path, "JSON column mapping file");

  auto* norm = app.add_subcommand("normalize", "emit z-score utility curves for a table");
  norm->add_option("--table", table_path, "table file")->required();
  norm->add_option("--scenario", scenario_path, "scenario providing thresholds")->required();
  norm->add_option("--out", out_path, "output curve file (default stdout)");
  norm->add_option("--column-map", column_map_path, "JSON column mapping file");

  auto* fit = app.add_subcommand("fit", "fit per-xApp KPI regressors and report metrics");
  fit->add_option("--scenario", scenario_path, "scenario file")->required();
  fit->add_option("--degree", degree, "polynomial degree (default 4)");
  fit->add_option("--xapp", xapp_id, "restrict to one xApp");
  fit->add_flag("--json", as_json, "machine-readable output");

  auto* det = app.add_subcommand("detect", "replay a request/observation log and print cases");
  det->add_option("--scenario", scenario_path, "scenario file")->required();
  det->add_option("--events", events_path, "JSONL event log")->required();
  det->add_option("--stores-in", stores_in, "initial stores snapshot");
  det->add_option("--stores-out", stores_out, "write final stores snapshot");

  int selfcheck_trials = 0;
  std::uint64_t seed = 20240817;
  auto* mit = app.add_subcommand("mitigate", "solve one conflict from utility-curve files");
  mit->add_option("--method", method_name, "qacm|qacm-heuristic|nswf|eg")->required();
  auto* mit_curves =
      mit->add_option("--curves", curve_paths, "one curve file per involved xApp")->expected(-2);
  mit->add_option("--weights", weight_pairs, "priority ratios as xapp=ratio");
  mit->add_option("--zeta", zeta, "distance scaling constant (default 1000)");
  mit->add_option("--big-m", big_m, "big-M constant (default 10)");
  mit->add_flag("--no-shift", no_shift, "disable the NSWF positivity shift");
  mit->add_flag("--json", as_json, "machine-readable output");
  mit->add_option("--selfcheck", selfcheck_trials,
                  "run N randomized exact-vs-heuristic equivalence trials instead of solving")
      ->excludes(mit_curves);
  mit->add_option("--seed", seed, "seed for --selfcheck trials");

  std::string oracle_override, table_dir_override;
  int degree_override = 0;
  auto* run_cmd = app.add_subcommand("run", "replay a scenario through the control loop");
  run_cmd->add_option("--scenario", scenario_path, "scenario file")->required();
  run_cmd->add_option("--out", out_path, "write the run log (JSONL) here");
  run_cmd->add_flag("--summary", summary, "print a human summary");
  run_cmd->add_option("--oracle", oracle_override, "override: analytic|table|regressor")
      ->check(CLI::IsMember({"analytic", "table", "regressor"}));
  run_cmd->add_option("--table-dir", table_dir_override, "table directory for --oracle table");
  run_cmd->add_option("--degree", degree_override, "regressor degree for --oracle regressor");

  auto* cs = app.add_subcommand("casestudy", "reproduce one case study");
  cs->add_option("id", case_id, "A, B, C or D")->required();
  cs->add_option("--method", method_name, "qacm|qacm-heuristic|nswf|eg");
  cs->add_option("--weights", weight_pairs, "priority ratios as xapp=ratio");
  cs->add_option("--fixtures", fixtures, "fixture directory");
  cs->add_flag("--json", as_json, "machine-readable output");

  auto* rep = app.add_subcommand("report", "all four case studies, all methods");
  rep->add_option("--fixtures", fixtures, "fixture directory");
  rep->add_flag("--json", as_json, "machine-readable output");
  rep->add_option("--plot-dir", plot_dir, "emit plot-ready curve/choice data here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    std::cerr << app.help() << "\n";
    return 2;
  }

  try {
    if (*gen) {
      const Scenario s = load_scenario(scenario_path);
      if (!xapp_id.empty()) {
        if (sweep_id.empty()) throw ConfigError("--sweep required with --xapp", "cli");
        ParamRange range;
        if (gmin->count()) {
          range = ParamRange{opt_min, opt_max, opt_step};
          has_range = true;
        }
        if (!has_range) {
          auto it = s.pkr.find(ParamId{sweep_id});
          if (it == s.pkr.end()) throw ConfigError("no PKR range for " + sweep_id, "cli");
          range = it->second;
        }
        const ConflictTable t = generate_table(s.xapp(XAppId{xapp_id}), s.kpi_models,
                                               ParamId{sweep_id}, range, s.initial);
        const std::string out = out_path.empty() ? xapp_id + "_" + sweep_id + ".csv" : out_path;
        save_table(t, out);
        std::cout << "wrote " << out << " (" << t.size() << " rows)\n";
      } else {
        if (s.fit_tables.empty()) throw ConfigError("scenario declares no fit_tables", "cli");
        const std::string dir = out_dir.empty() ? "." : out_dir;
        std::filesystem::create_directories(dir);
        for (const auto& [x, ft] : s.fit_tables) {
          const ConflictTable t =
              generate_table(s.xapp(x), s.kpi_models, ft.sweep, ft.range, s.initial);
          const auto out = std::filesystem::path(dir) / (x.str() + "_" + ft.sweep.str() + ".csv");
          save_table(t, out);
          std::cout << "wrote " << out.string() << " (" << t.size() << " rows)\n";
        }
      }
      return 0;
    }

    if (*val) {
      ConflictTable t = column_map_path.empty()
                            ? load_table(table_path)
                            : load_table(table_path, load_column_map(column_map_path));
      if (!scenario_path.empty()) {
        const Scenario s = load_scenario(scenario_path);
        validate_against_spec(t, s.xapp(XAppId{xapp_id.empty() ? t.xapp.str() : xapp_id}));
      }
      std::cout << "ok: " << t.xapp.str() << " sweep of " << t.swept.str() << ", " << t.size()
                << " rows, " << t.kpi_ids.size() << " KPI column(s)\n";
      return 0;
    }

    if (*norm) {
      const Scenario s = load_scenario(scenario_path);
      ConflictTable t = column_map_path.empty()
                            ? load_table(table_path)
                            : load_table(table_path, load_column_map(column_map_path));
      const CurveFile cf = curves_from_table(t, s);
      if (out_path.empty()) {
        save_curves(cf, std::cout);
      } else {
        std::ofstream out(out_path);
        save_curves(cf, out);
        std::cout << "wrote " << out_path << "\n";
      }
      return 0;
    }

    if (*fit) {
      const Scenario s = load_scenario(scenario_path);
      json rows = json::array();
      if (!as_json) {
        std::printf("%-5s %-5s %-6s %9s %9s %12s\n", "xapp", "kpi", "split", "evs", "r2", "mse");
      }
      for (const XAppSpec& spec : s.xapps) {
        if (!xapp_id.empty() && spec.id.str() != xapp_id) continue;
        auto ft = s.fit_tables.find(spec.id);
        if (ft == s.fit_tables.end()) {
          throw ConfigError("scenario has no fit table for " + spec.id.str(), "cli");
        }
        const ConflictTable full = generate_table(spec, s.kpi_models, ft->second.sweep,
                                                  ft->second.range, s.initial);
        // deterministic 80/20 split: every fifth row held out
        ConflictTable train = full, test = full;
        train.rows.clear();
        test.rows.clear();
        for (std::size_t i = 0; i < full.rows.size(); ++i) {
          (i % 5 == 4 ? test : train).rows.push_back(full.rows[i]);
        }
        for (const KpiDef& k : spec.kpis) {
          const PolyRegressor reg_full = PolyRegressor::fit(full, k.id, degree);
          const FitMetrics m_full = reg_full.evaluate(full);
          const PolyRegressor reg_train = PolyRegressor::fit(train, k.id, degree);
          const FitMetrics m_test = reg_train.evaluate(test);
          if (as_json) {
            rows.push_back({{"xapp", spec.id.str()}, {"kpi", k.id.str()}, {"split", "full"},
                            {"evs", m_full.evs},     {"r2", m_full.r2},   {"mse", m_full.mse}});
            rows.push_back({{"xapp", spec.id.str()}, {"kpi", k.id.str()}, {"split", "holdout"},
                            {"evs", m_test.evs},     {"r2", m_test.r2},   {"mse", m_test.mse}});
          } else {
            std::printf("%-5s %-5s %-6s %9.4f %9.4f %12.3e\n", spec.id.str().c_str(),
                        k.id.str().c_str(), "full", m_full.evs, m_full.r2, m_full.mse);
            std::printf("%-5s %-5s %-6s %9.4f %9.4f %12.3e\n", spec.id.str().c_str(),
                        k.id.str().c_str(), "80/20", m_test.evs, m_test.r2, m_test.mse);
          }
        }
      }
      if (as_json) std::cout << rows.dump(2) << "\n";
      return 0;
    }

    if (*det) {
      const Scenario s = load_scenario(scenario_path);
      detect::Stores stores;
      if (!stores_in.empty()) {
        std::ifstream in(stores_in);
        if (!in) throw FixtureMissing("stores file " + stores_in + " not found");
        std::stringstream ss;
        ss << in.rdbuf();
        stores = detect::parse_stores(ss.str());
      } else {
        stores.pgd = s.groups;
        stores.pkr_params = s.pkr;
        stores.window = s.window;
        for (const XAppSpec& spec : s.xapps) {
          stores.icps[spec.id] = spec.icps;
          for (const KpiDef& k : spec.kpis) {
            stores.dckd[k.id] = detect::ThresholdEntry{k.qos_threshold, k.delta, spec.id};
          }
        }
      }
      const auto oracle = s.make_oracle();
      Assignment state = s.initial;

      std::ifstream in(events_path);
      if (!in) throw FixtureMissing("event log " + events_path + " not found");
      std::string line;
      std::size_t n_cases = 0;
      Tick tick = 0;
      std::vector<ParamRequest> batch;
      auto flush_batch = [&](Tick t) {
        if (batch.empty()) return;
        for (const ConflictCase& c : detect::detect_direct(batch, stores)) {
          json involved = json::array();
          for (const XAppId& x : c.involved) involved.push_back(x.str());
          std::cout << json{{"tick", t},
                            {"kind", to_string(c.kind)},
                            {"param", c.param.str()},
                            {"involved", involved}}
                           .dump()
                    << "\n";
          ++n_cases;
        }
        for (const ParamRequest& r : batch) {
          stores.record_change(r.param, r.value, t, r.xapp);
          state[r.param] = r.value;
        }
        batch.clear();
      };
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        json e;
        try {
          e = json::parse(line);
        } catch (const json::exception& ex) {
          throw ParseError(std::string("event log: ") + ex.what());
        }
        const Tick t = e.at("tick").get<Tick>();
        if (t != tick) {
          flush_batch(tick);
          tick = t;
        }
        const std::string type = e.at("type").get<std::string>();
        if (type == "request") {
          batch.push_back(ParamRequest{XAppId{e.at("xapp").get<std::string>()},
                                       ParamId{e.at("param").get<std::string>()},
                                       e.at("value").get<double>()});
          continue;
        }
        flush_batch(t);
        if (type == "observe" || type == "observe_value") {
          const KpiId kpi{e.at("kpi").get<std::string>()};
          const double value =
              type == "observe_value" ? e.at("value").get<double>() : oracle->eval(kpi, state);
          auto alert = detect::pmon_observe(kpi, value, t, stores);
          if (!alert) continue;
          auto c = detect::detect_indirect(*alert, stores);
          if (!c) c = detect::detect_implicit(*alert, stores);
          if (c) {
            json involved = json::array();
            for (const XAppId& x : c->involved) involved.push_back(x.str());
            std::cout << json{{"tick", t},
                              {"kind", to_string(c->kind)},
                              {"param", c->param.str()},
                              {"involved", involved}}
                             .dump()
                      << "\n";
            ++n_cases;
          }
        } else {
          throw ConfigError("unknown event type '" + type + "'", "cli");
        }
      }
      flush_batch(tick);
      std::cerr << n_cases << " conflict case(s)\n";
      if (!stores_out.empty()) {
        std::ofstream out(stores_out);
        out << detect::dump_stores(stores);
      }
      return 0;
    }

    if (*mit && selfcheck_trials > 0) {
      // randomized property run: the literal scan must match the forced-binary
      // enumeration bit for bit
      std::mt19937_64 rng(seed);
      std::uniform_int_distribution<int> n_apps(2, 8), n_pts(50, 500);
      std::uniform_real_distribution<double> uni(0.0, 1.0);
      std::normal_distribution<double> gauss(0.0, 1.0);
      for (int trial = 0; trial < selfcheck_trials; ++trial) {
        MitigationInput in;
        in.conflict.kind = ConflictKind::kDirect;
        in.conflict.param = ParamId{"p"};
        in.zeta = zeta;
        const int n = n_apps(rng), m = n_pts(rng);
        std::vector<double> grid(m);
        double g = -10.0 * uni(rng);
        for (int i = 0; i < m; ++i) {
          g += 0.1 + uni(rng);
          grid[i] = g;
        }
        double max_abs = 0.0;
        std::vector<double> ratios(n);
        for (int a = 0; a < n; ++a) {
          const XAppId id{"x" + std::to_string(a + 1)};
          in.conflict.involved.push_back(id);
          UtilityCurve c;
          c.xapp = id;
          c.param = in.conflict.param;
          c.grid = grid;
          double v = gauss(rng);
          for (int i = 0; i < m; ++i) {
            v += 0.25 * gauss(rng);
            c.values.push_back(v);
            max_abs = std::max(max_abs, std::abs(v));
          }
          c.threshold = gauss(rng);
          max_abs = std::max(max_abs, std::abs(c.threshold));
          c.delta = uni(rng) < 0.25 ? 1 : 0;
          in.curves.emplace(id, std::move(c));
          ratios[a] = 0.05 + uni(rng);
        }
        double rsum = 0.0;
        for (double r : ratios) rsum += r;
        for (int a = 0; a < n; ++a) in.weights[in.conflict.involved[a]] = ratios[a] / rsum;
        in.big_m = 2.0 * max_abs + 1.0;

        const MitigationResult e = qacm_exact(in);
        const MitigationResult h = qacm_heuristic(in);
        if (e.p_opt != h.p_opt || e.objective != h.objective) {
          std::cerr << "selfcheck FAILED at trial " << trial << ": exact " << e.p_opt
                    << " vs heuristic " << h.p_opt << "\n";
          return 1;
        }
      }
      std::cout << "selfcheck ok: " << selfcheck_trials
                << " randomized trials, exact == heuristic (seed " << seed << ")\n";
      return 0;
    }

    if (*mit) {
      if (curve_paths.empty()) {
        std::cerr << "usage error: either --curves or --selfcheck is required\n";
        std::cerr << mit->help() << "\n";
        return 2;
      }
      const Method method = parse_method_flag(method_name);
      MitigationInput input;
      input.zeta = zeta;
      input.big_m = big_m;
      input.nswf_shift = !no_shift;
      input.conflict.kind = ConflictKind::kDirect;
      input.conflict.detected_at = 0;
      for (const std::string& path : curve_paths) {
        UtilityCurve c = load_curve_file(path);
        input.conflict.param = c.param;
        input.conflict.involved.push_back(c.xapp);
        input.curves.emplace(c.xapp, std::move(c));
      }
      const PolicyConfig policy = parse_ratio_list(weight_pairs);
      input.weights = assign_weights(input.conflict, policy);

      MitigationResult r;
      switch (method) {
        case Method::kQacm:
          r = qacm_exact(input);
          break;
        case Method::kQacmHeuristic:
          r = qacm_heuristic(input);
          break;
        case Method::kNswf:
          r = nswf(input);
          break;
        case Method::kEg:
          r = eg(input);
          break;
      }
      if (as_json) {
        std::cout << result_to_json(r, input.weights).dump(2) << "\n";
      } else {
        print_result(r, input.conflict.param, std::cout);
      }
      return 0;
    }

    if (*run_cmd) {
      Scenario s = load_scenario(scenario_path);
      if (!oracle_override.empty()) {
        if (oracle_override == "analytic") s.oracle = OracleMode::kAnalytic;
        if (oracle_override == "table") s.oracle = OracleMode::kTable;
        if (oracle_override == "regressor") s.oracle = OracleMode::kRegressor;
        if (!table_dir_override.empty()) s.table_dir = table_dir_override;
        if (degree_override > 0) s.regressor_degree = degree_override;
      }
      const RunLog log = run(s);
      const std::string text = to_jsonl(log);
      if (out_path.empty()) {
        std::cout << text;
      } else {
        std::ofstream out(out_path, std::ios::binary);
        out << text;
        std::cout << "wrote " << out_path << " (" << log.entries.size() << " records)\n";
      }
      if (summary) {
        std::cout << "requests " << log.all<RequestRecord>().size() << ", alerts "
                  << log.all<AlertRecord>().size() << ", conflicts "
                  << log.all<ConflictRecord>().size() << " (direct "
                  << log.count_conflicts(ConflictKind::kDirect) << ", indirect "
                  << log.count_conflicts(ConflictKind::kIndirect) << ", implicit "
                  << log.count_conflicts(ConflictKind::kImplicit) << "), mitigations "
                  << log.all<MitigationRecord>().size() << ", applied "
                  << log.all<AppliedRecord>().size() << "\n";
      }
      return 0;
    }

    if (*cs) {
      if (case_id.size() != 1) throw ConfigError("case id must be A, B, C or D", "cli");
      const Method method = parse_method_flag(method_name);
      const PolicyConfig policy = parse_ratio_list(weight_pairs);
      const CaseStudyOutcome oc = casestudy(case_id[0], method, policy, fixtures);
      if (as_json) {
        json j = result_to_json(oc.final_result, oc.final_weights);
        j["case"] = case_id;
        std::cout << j.dump(2) << "\n";
      } else {
        std::cout << "case study " << case_id
                  << " (regenerated analytic tables, fixture constants)\n";
        ParamId param;
        for (const auto& m : oc.log.all<MitigationRecord>()) param = m->param;
        print_result(oc.final_result, param, std::cout);
      }
      return 0;
    }

    if (*rep) {
      return run_report(fixtures, as_json, plot_dir);
    }
  } catch (const Error& e) {
    std::cerr << "error [" << e.module() << "]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
