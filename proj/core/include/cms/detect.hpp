#pragma once

#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "cms/model.hpp"

namespace cms {

enum class ConflictKind { kDirect, kIndirect, kImplicit };

const char* to_string(ConflictKind k);

// A detected conflict over one parameter; `involved` is ordered oldest intent
// first, with the degraded xApp last for indirect/implicit cases.
struct ConflictCase {
  ConflictKind kind = ConflictKind::kDirect;
  ParamId param;
  std::vector<XAppId> involved;
  Tick detected_at = 0;

  void validate() const;  // |involved| >= 2
};

struct DegradationAlert {
  KpiId kpi;
  XAppId owner;
  double value = 0.0;
  double threshold = 0.0;
  int delta = 0;
  Tick t = 0;
};

struct ParamRequest {
  XAppId xapp;
  ParamId param;
  double value = 0.0;
};

namespace detect {

struct RcpEntry {
  ParamId param;
  double value = 0.0;
  Tick t = 0;
  XAppId by;
};

struct RcpgEntry {
  ParamId param;
  Tick t = 0;
  std::vector<KpiId> groups;  // KPIs whose parameter group contains `param`
};

struct KdoEntry {
  KpiId kpi;
  double value = 0.0;
  Tick t = 0;
};

struct ThresholdEntry {
  double threshold = 0.0;
  int delta = 0;
  XAppId owner;
};

// The six CMS database stores plus the deployment registry the detectors
// consult (xApp ICP sets, implicit-candidate bookkeeping). Mutated only by
// the single control-loop writer; readers may snapshot copies.
struct Stores {
  std::vector<RcpEntry> rcp;
  std::map<KpiId, std::set<ParamId>> pgd;
  std::vector<RcpgEntry> rcpg;
  std::map<ParamId, ParamRange> pkr_params;
  std::map<KpiId, std::pair<double, double>> pkr_kpis;
  std::map<KpiId, ThresholdEntry> dckd;
  std::vector<KdoEntry> kdo;

  std::map<XAppId, std::set<ParamId>> icps;
  std::map<std::pair<KpiId, ParamId>, std::vector<Tick>> implicit_strikes;
  Tick window = 5;  // co-occurrence lookback, in ticks

  // Timestamps monotone per store; every PGD member present in PKR.
  void validate() const;

  // Logs the intent in RCP (and RCPG when the parameter belongs to a group).
  void record_change(const ParamId& param, double value, Tick t, const XAppId& by);

  const RcpEntry* latest_rcp(const ParamId& param) const;
  // Distinct xApps that changed `param` within [t - window, t], oldest first.
  std::vector<XAppId> changers_in_window(const ParamId& param, Tick t) const;
};

// Appends a KDO record and returns an alert when `value` violates the KPI's
// threshold: below it for delta=0, above it for delta=1 (meeting the
// threshold exactly satisfies it). Throws UnknownKpi for KPIs not in DCKD.
std::optional<DegradationAlert> pmon_observe(const KpiId& kpi, double value, Tick t,
                                             Stores& stores);

// One Direct case per parameter requested with disagreeing values by two or
// more xApps in this batch, or whose single request clashes with the latest
// RCP entry from a different xApp.
std::vector<ConflictCase> detect_direct(const std::vector<ParamRequest>& requests,
                                        const Stores& stores);

// Indirect: a parameter inside the degraded KPI's group, outside the owner's
// own ICP set, changed within the window. Picks the most recent such change.
std::optional<ConflictCase> detect_indirect(const DegradationAlert& alert, const Stores& stores);

// Implicit: a parameter outside the degraded KPI's group changed within the
// window. The first co-occurrence records a candidate; the second promotes
// the parameter into the group (so the pair is indirect from then on) and
// returns the case.
std::optional<ConflictCase> detect_implicit(const DegradationAlert& alert, Stores& stores);

// Structured-text snapshot of all stores, for test fixtures and the detect
// CLI; parse(dump(s)) reproduces s.
std::string dump_stores(const Stores& stores);
Stores parse_stores(const std::string& text);

}  // namespace detect
}  // namespace cms
