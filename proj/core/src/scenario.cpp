#include "cms/scenario.hpp"

#include <algorithm>
#include <fstream>

#include "cms/dataset.hpp"
#include "cms/errors.hpp"
#include "json.hpp"

namespace cms {

using nlohmann::json;

const char* to_string(OracleMode m) {
  switch (m) {
    case OracleMode::kAnalytic:
      return "analytic";
    case OracleMode::kTable:
      return "table";
    case OracleMode::kRegressor:
      return "regressor";
  }
  return "?";
}

void Scenario::validate() const {
  if (xapps.empty()) throw ConfigError("scenario has no xApps", "scenario");
  std::set<XAppId> xapp_ids;
  std::set<KpiId> kpi_ids;
  for (const XAppSpec& s : xapps) {
    s.validate();
    if (!xapp_ids.insert(s.id).second) {
      throw ConfigError("duplicate xApp id " + s.id.str(), "scenario");
    }
    for (const KpiDef& k : s.kpis) {
      if (!kpi_ids.insert(k.id).second) {
        throw ConfigError("duplicate KPI id " + k.id.str(), "scenario");
      }
    }
  }
  for (const auto& [p, r] : pkr) {
    (void)p;
    r.validate();
  }
  for (const auto& [k, group] : groups) {
    for (const ParamId& p : group) {
      if (!pkr.count(p)) {
        throw ConfigError("group of " + k.str() + " references " + p.str() + " missing from pkr",
                          "scenario");
      }
    }
  }
  Tick last = std::numeric_limits<Tick>::min();
  for (const ScheduleEvent& e : schedule) {
    if (e.tick < last) throw ConfigError("schedule ticks must be non-decreasing", "scenario");
    last = e.tick;
  }
  if (oracle == OracleMode::kAnalytic || oracle == OracleMode::kRegressor) {
    for (const XAppSpec& s : xapps) {
      for (const KpiDef& k : s.kpis) {
        if (!kpi_models.count(k.id)) {
          throw ConfigError("no analytic model for KPI " + k.id.str(), "scenario");
        }
      }
    }
  }
  if (!(zeta > 0.0)) throw ConfigError("zeta must be > 0", "scenario");
  if (!(big_m > 0.0)) throw ConfigError("big_m must be > 0", "scenario");
  if (window < 0) throw ConfigError("window must be >= 0", "scenario");
}

const XAppSpec& Scenario::xapp(const XAppId& id) const {
  for (const XAppSpec& s : xapps) {
    if (s.id == id) return s;
  }
  throw ConfigError("unknown xApp " + id.str(), "scenario");
}

const KpiDef& Scenario::kpi_def(const KpiId& id) const {
  for (const XAppSpec& s : xapps) {
    for (const KpiDef& k : s.kpis) {
      if (k.id == id) return k;
    }
  }
  throw UnknownKpi("no xApp owns KPI " + id.str());
}

std::shared_ptr<const KpiPredictor> Scenario::make_oracle() const {
  switch (oracle) {
    case OracleMode::kAnalytic:
      return std::make_shared<AnalyticPredictor>(kpi_models);
    case OracleMode::kTable: {
      const std::filesystem::path dir = base_dir / table_dir;
      if (!std::filesystem::is_directory(dir)) {
        throw FixtureMissing("table oracle directory " + dir.string() + " not found");
      }
      std::vector<std::filesystem::path> files;
      for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() == ".csv") files.push_back(entry.path());
      }
      std::sort(files.begin(), files.end());
      if (files.empty()) throw FixtureMissing("no .csv tables in " + dir.string());
      std::vector<ConflictTable> tables;
      tables.reserve(files.size());
      for (const auto& f : files) tables.push_back(load_table(f));
      return std::make_shared<TablePredictor>(std::move(tables));
    }
    case OracleMode::kRegressor: {
      std::map<KpiId, PolyRegressor> regs;
      for (const XAppSpec& s : xapps) {
        auto it = fit_tables.find(s.id);
        if (it == fit_tables.end()) {
          throw ConfigError("regressor oracle needs a fit_tables entry for " + s.id.str(),
                            "scenario");
        }
        const ConflictTable t =
            generate_table(s, kpi_models, it->second.sweep, it->second.range, initial);
        for (const KpiDef& k : s.kpis) {
          regs.emplace(k.id, PolyRegressor::fit(t, k.id, regressor_degree));
        }
      }
      return std::make_shared<RegressorPredictor>(std::move(regs));
    }
  }
  throw ConfigError("unknown oracle mode", "scenario");
}

namespace {

ParamRange parse_range(const json& j) {
  ParamRange r;
  r.min = j.at("min").get<double>();
  r.max = j.at("max").get<double>();
  r.step = j.value("step", 1.0);
  r.validate();
  return r;
}

PolicyConfig parse_policy(const json& j) {
  PolicyConfig p;
  if (j.contains("ratios")) {
    for (const auto& [k, v] : j.at("ratios").items()) {
      p.ratios[XAppId{k}] = v.get<double>();
    }
  }
  if (j.contains("default")) p.default_ratio = j.at("default").get<double>();
  return p;
}

GaussianKpiModel parse_kpi_model(const json& j) {
  GaussianKpiModel m;
  m.amplitude = j.at("amplitude").get<double>();
  if (j.contains("terms")) {
    for (const auto& [k, v] : j.at("terms").items()) {
      m.center_coeffs[ParamId{k}] = v.get<double>();
    }
  }
  m.center_offset = j.value("offset", 0.0);
  m.width_param = ParamId{j.at("width").get<std::string>()};
  return m;
}

Method parse_method(const std::string& name) {
  auto m = method_from_string(name);
  if (!m) throw ConfigError("unknown method '" + name + "'", "scenario");
  return *m;
}

}  // namespace

Scenario parse_scenario(const std::string& json_text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario JSON: ") + e.what(), "scenario");
  }

  Scenario s;
  s.base_dir = base_dir;
  try {
    s.name = j.value("name", "scenario");

    if (j.value("model", "") == "builtin") {
      ExampleModel m = builtin_example_model();
      s.xapps = std::move(m.xapps);
      s.kpi_models = std::move(m.kpi_models);
      s.groups = builtin_parameter_groups();
    }
    if (j.contains("xapps")) {
      for (const json& xj : j.at("xapps")) {
        XAppSpec spec;
        spec.id = XAppId{xj.at("id").get<std::string>()};
        for (const json& p : xj.at("icps")) spec.icps.insert(ParamId{p.get<std::string>()});
        for (const json& kj : xj.at("kpis")) {
          KpiDef k;
          k.id = KpiId{kj.at("id").get<std::string>()};
          k.owner = spec.id;
          k.qos_threshold = kj.at("qos").get<double>();
          k.delta = kj.value("delta", 0);
          k.weight_in_xapp = kj.value("weight", 1.0);
          spec.kpis.push_back(std::move(k));
        }
        s.xapps.push_back(std::move(spec));
      }
    }
    if (j.contains("kpi_models")) {
      for (const auto& [k, v] : j.at("kpi_models").items()) {
        s.kpi_models[KpiId{k}] = parse_kpi_model(v);
      }
    }
    if (j.contains("groups")) {
      for (const auto& [k, v] : j.at("groups").items()) {
        std::set<ParamId>& g = s.groups[KpiId{k}];
        for (const json& p : v) g.insert(ParamId{p.get<std::string>()});
      }
    }
    if (j.contains("pkr")) {
      for (const auto& [k, v] : j.at("pkr").items()) {
        s.pkr[ParamId{k}] = parse_range(v);
      }
    }
    if (j.contains("preferred")) {
      for (const auto& [x, v] : j.at("preferred").items()) {
        for (const auto& [p, pr] : v.items()) {
          if (!pr.is_array() || pr.size() != 2) {
            throw ConfigError("preferred range must be [min, max]", "scenario");
          }
          s.preferred[XAppId{x}][ParamId{p}] = {pr[0].get<double>(), pr[1].get<double>()};
        }
      }
    }
    if (j.contains("initial")) {
      for (const auto& [k, v] : j.at("initial").items()) {
        s.initial[ParamId{k}] = v.get<double>();
      }
    }
    if (j.contains("policy")) s.policy = parse_policy(j.at("policy"));
    if (j.contains("method")) s.method = parse_method(j.at("method").get<std::string>());

    if (j.contains("oracle")) {
      const json& o = j.at("oracle");
      if (o.is_string()) {
        const std::string name = o.get<std::string>();
        if (name == "analytic") {
          s.oracle = OracleMode::kAnalytic;
        } else if (name == "table") {
          s.oracle = OracleMode::kTable;
        } else if (name == "regressor") {
          s.oracle = OracleMode::kRegressor;
        } else {
          throw ConfigError("unknown oracle '" + name + "'", "scenario");
        }
      } else {
        const std::string type = o.at("type").get<std::string>();
        if (type == "table") {
          s.oracle = OracleMode::kTable;
          s.table_dir = o.at("dir").get<std::string>();
        } else if (type == "regressor") {
          s.oracle = OracleMode::kRegressor;
          s.regressor_degree = o.value("degree", 4);
        } else if (type == "analytic") {
          s.oracle = OracleMode::kAnalytic;
        } else {
          throw ConfigError("unknown oracle type '" + type + "'", "scenario");
        }
      }
    }

    s.zeta = j.value("zeta", 1000.0);
    s.big_m = j.value("big_m", 10.0);
    s.window = j.value("window", Tick{5});
    s.nswf_shift = j.value("nswf_shift", true);
    if (j.contains("switch_tick")) s.switch_tick = j.at("switch_tick").get<Tick>();
    if (j.contains("priority_policy")) s.priority_policy = parse_policy(j.at("priority_policy"));

    if (j.contains("fit_tables")) {
      for (const auto& [x, v] : j.at("fit_tables").items()) {
        FitTableSpec f;
        f.sweep = ParamId{v.at("sweep").get<std::string>()};
        f.range = parse_range(v);
        s.fit_tables[XAppId{x}] = f;
      }
    }

    if (j.contains("schedule")) {
      for (const json& ej : j.at("schedule")) {
        ScheduleEvent e;
        e.tick = ej.at("tick").get<Tick>();
        if (ej.contains("request")) {
          const json& r = ej.at("request");
          e.type = ScheduleEvent::Type::kRequest;
          e.xapp = XAppId{r.at("xapp").get<std::string>()};
          e.param = ParamId{r.at("param").get<std::string>()};
          e.value = r.at("value").get<double>();
        } else if (ej.contains("observe")) {
          e.type = ScheduleEvent::Type::kObserve;
          e.kpi = KpiId{ej.at("observe").get<std::string>()};
        } else if (ej.contains("observe_value")) {
          const json& o = ej.at("observe_value");
          e.type = ScheduleEvent::Type::kObserveValue;
          e.kpi = KpiId{o.at("kpi").get<std::string>()};
          e.value = o.at("value").get<double>();
        } else if (ej.contains("set_method")) {
          e.type = ScheduleEvent::Type::kSetMethod;
          e.method = parse_method(ej.at("set_method").get<std::string>());
        } else if (ej.contains("set_policy")) {
          e.type = ScheduleEvent::Type::kSetPolicy;
          e.policy = parse_policy(ej.at("set_policy"));
        } else {
          throw ConfigError("schedule event with no recognized action", "scenario");
        }
        s.schedule.push_back(std::move(e));
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario JSON: ") + e.what(), "scenario");
  }

  s.validate();
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FixtureMissing("scenario file " + path.string() + " not found");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Scenario s = parse_scenario(text, path.parent_path());
  if (s.name == "scenario") s.name = path.stem().string();
  return s;
}

}  // namespace cms
