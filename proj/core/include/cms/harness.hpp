#pragma once

#include <variant>

#include "cms/scenario.hpp"

namespace cms {

struct RequestRecord {
  XAppId xapp;
  ParamId param;
  double value = 0.0;
};

struct AlertRecord {
  DegradationAlert alert;
};

struct ConflictRecord {
  ConflictCase conflict;
};

struct MitigationRecord {
  std::size_t id = 0;  // referenced by AppliedRecord::source
  ParamId param;
  MitigationResult result;
  std::map<XAppId, double> weights;
};

struct AppliedRecord {
  ParamId param;
  double value = 0.0;
  std::string source;  // "request:<xapp>" or "mitigation:<id>"
};

struct SnapshotRecord {
  std::map<KpiId, double> kpis;
};

struct WarningRecord {
  std::string message;
};

struct LogEntry {
  Tick tick = 0;
  std::variant<RequestRecord, AlertRecord, ConflictRecord, MitigationRecord, AppliedRecord,
               SnapshotRecord, WarningRecord>
      payload;
};

struct RunLog {
  std::vector<LogEntry> entries;

  template <class T>
  std::vector<const T*> all() const {
    std::vector<const T*> out;
    for (const LogEntry& e : entries) {
      if (const T* p = std::get_if<T>(&e.payload)) out.push_back(p);
    }
    return out;
  }
  std::size_t count_conflicts(ConflictKind kind) const;
};

// Line-delimited JSON, one record per entry; byte-stable for identical runs.
std::string to_jsonl(const RunLog& log);

// Single-writer control loop: replays the schedule, detects conflicts,
// asks the policy for weights, builds utility curves through the oracle,
// runs the configured solver and applies its decision.
class Engine {
 public:
  explicit Engine(Scenario scenario);

  // Replays the scenario schedule once. Parameter state restarts from the
  // scenario's initial values; stores (and thus group promotions) persist,
  // with ticks continuing after the previous replay's window.
  RunLog run_schedule();

  const detect::Stores& stores() const { return stores_; }
  const Assignment& params() const { return state_; }
  const Scenario& scenario() const { return scenario_; }
  const KpiPredictor& oracle() const { return *oracle_; }

  // Curves + weights + solve for an already-detected case at current state,
  // without applying the decision.
  MitigationResult solve(const ConflictCase& conflict, Method method,
                         const PolicyConfig& policy) const;

  // The utility curves the solver would see for `conflict` at current state
  // (xApps with degenerate columns omitted). Used for plot-data emission.
  std::map<XAppId, UtilityCurve> curves_for(const ConflictCase& conflict) const;

 private:
  struct CurveSet {
    std::map<XAppId, UtilityCurve> curves;
    std::vector<XAppId> usable;  // involved xApps with nondegenerate curves
    std::vector<std::string> warnings;
  };
  CurveSet build_curves(const ConflictCase& conflict) const;
  MitigationResult dispatch(const MitigationInput& input, Method method) const;
  void apply_mitigation(const ConflictCase& conflict, Tick tick, RunLog& log);

  Scenario scenario_;
  std::shared_ptr<const KpiPredictor> oracle_;
  detect::Stores stores_;
  Assignment state_;
  Method method_;
  PolicyConfig policy_;
  Tick tick_offset_ = 0;
  std::size_t mitigation_seq_ = 0;
};

// Fresh-engine replay; deterministic, byte-identical for identical scenarios.
RunLog run(const Scenario& scenario);

struct CaseStudyOutcome {
  Scenario scenario;
  RunLog log;
  MitigationResult final_result;  // last mitigation of the replay
  std::map<XAppId, double> final_weights;
};

// Loads fixtures/casestudy_<id>.json (id in {A,B,C,D}), swaps in `method` and
// `policy` at the scenario's switch point (or globally when it has none) and
// replays. Throws FixtureMissing when the fixture is absent.
CaseStudyOutcome casestudy(char id, Method method, const PolicyConfig& policy,
                           const std::filesystem::path& fixture_dir);

}  // namespace cms
