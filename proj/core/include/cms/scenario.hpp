#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "cms/mitigate.hpp"
#include "cms/predict.hpp"

namespace cms {

enum class OracleMode { kAnalytic, kTable, kRegressor };

const char* to_string(OracleMode m);

struct ScheduleEvent {
  enum class Type { kRequest, kObserve, kObserveValue, kSetMethod, kSetPolicy };

  Tick tick = 0;
  Type type = Type::kRequest;

  XAppId xapp;   // kRequest
  ParamId param; // kRequest
  double value = 0.0;  // kRequest / kObserveValue
  KpiId kpi;           // kObserve / kObserveValue
  Method method = Method::kQacm;  // kSetMethod
  PolicyConfig policy;            // kSetPolicy
};

struct FitTableSpec {
  ParamId sweep;
  ParamRange range;
};

// A full deployment description plus a replayable event schedule: xApp specs,
// analytic KPI formulas, permissible ranges, declared parameter groups,
// preferred per-xApp ranges, initial parameter values, operator policy and
// solver settings.
struct Scenario {
  std::string name;
  std::vector<XAppSpec> xapps;
  std::map<KpiId, GaussianKpiModel> kpi_models;
  std::map<ParamId, ParamRange> pkr;
  std::map<KpiId, std::set<ParamId>> groups;
  std::map<XAppId, std::map<ParamId, std::pair<double, double>>> preferred;
  Assignment initial;
  PolicyConfig policy;
  Method method = Method::kQacm;
  OracleMode oracle = OracleMode::kAnalytic;
  std::string table_dir;  // kTable: directory of conflict-table files
  int regressor_degree = 4;
  double zeta = 1000.0;
  double big_m = 10.0;
  Tick window = 5;
  bool nswf_shift = true;
  std::optional<Tick> switch_tick;  // where case studies swap in the compared method
  std::optional<PolicyConfig> priority_policy;  // the scenario's priority-case weights
  std::map<XAppId, FitTableSpec> fit_tables;
  std::vector<ScheduleEvent> schedule;
  std::filesystem::path base_dir;  // directory of the loaded file

  void validate() const;
  const XAppSpec& xapp(const XAppId& id) const;
  const KpiDef& kpi_def(const KpiId& id) const;

  // Builds the oracle for this scenario's mode. Table mode loads table_dir;
  // regressor mode fits per-KPI regressors on the scenario's fit tables.
  std::shared_ptr<const KpiPredictor> make_oracle() const;
};

// Parses the documented JSON schema. "model": "builtin" pulls in the
// five-xApp reference model and its parameter groups.
Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario(const std::string& json_text, const std::filesystem::path& base_dir = {});

}  // namespace cms
