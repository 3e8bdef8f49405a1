#include "cms/detect.hpp"

#include <algorithm>

#include "cms/errors.hpp"

namespace cms {

const char* to_string(ConflictKind k) {
  switch (k) {
    case ConflictKind::kDirect:
      return "direct";
    case ConflictKind::kIndirect:
      return "indirect";
    case ConflictKind::kImplicit:
      return "implicit";
  }
  return "?";
}

void ConflictCase::validate() const {
  if (involved.size() < 2) {
    throw ConfigError("conflict must involve at least two xApps", "detect");
  }
  if (param.empty()) throw ConfigError("conflict has no parameter", "detect");
}

namespace detect {

void Stores::validate() const {
  for (std::size_t i = 1; i < rcp.size(); ++i) {
    if (rcp[i].t < rcp[i - 1].t) throw ConfigError("RCP timestamps not monotone", "detect");
  }
  for (std::size_t i = 1; i < rcpg.size(); ++i) {
    if (rcpg[i].t < rcpg[i - 1].t) throw ConfigError("RCPG timestamps not monotone", "detect");
  }
  for (std::size_t i = 1; i < kdo.size(); ++i) {
    if (kdo[i].t < kdo[i - 1].t) throw ConfigError("KDO timestamps not monotone", "detect");
  }
  for (const auto& [kpi, group] : pgd) {
    for (const ParamId& p : group) {
      if (!pkr_params.count(p)) {
        throw ConfigError("PGD member " + p.str() + " of " + kpi.str() + " missing from PKR",
                          "detect");
      }
    }
  }
}

void Stores::record_change(const ParamId& param, double value, Tick t, const XAppId& by) {
  if (!rcp.empty() && t < rcp.back().t) {
    throw ConfigError("RCP timestamp going backwards", "detect");
  }
  rcp.push_back(RcpEntry{param, value, t, by});

  std::vector<KpiId> groups;
  for (const auto& [kpi, group] : pgd) {
    if (group.count(param)) groups.push_back(kpi);
  }
  if (!groups.empty()) {
    rcpg.push_back(RcpgEntry{param, t, std::move(groups)});
  }
}

const RcpEntry* Stores::latest_rcp(const ParamId& param) const {
  for (auto it = rcp.rbegin(); it != rcp.rend(); ++it) {
    if (it->param == param) return &*it;
  }
  return nullptr;
}

std::vector<XAppId> Stores::changers_in_window(const ParamId& param, Tick t) const {
  std::vector<XAppId> out;
  for (const RcpEntry& e : rcp) {
    if (e.param != param) continue;
    if (e.t < t - window || e.t > t) continue;
    if (std::find(out.begin(), out.end(), e.by) == out.end()) out.push_back(e.by);
  }
  return out;
}

std::optional<DegradationAlert> pmon_observe(const KpiId& kpi, double value, Tick t,
                                             Stores& stores) {
  auto it = stores.dckd.find(kpi);
  if (it == stores.dckd.end()) {
    throw UnknownKpi("KPI " + kpi.str() + " not registered in DCKD");
  }
  const ThresholdEntry& th = it->second;
  const bool violated = th.delta == 0 ? value < th.threshold : value > th.threshold;
  if (!violated) return std::nullopt;

  if (!stores.kdo.empty() && t < stores.kdo.back().t) {
    throw ConfigError("KDO timestamp going backwards", "detect");
  }
  stores.kdo.push_back(KdoEntry{kpi, value, t});
  return DegradationAlert{kpi, th.owner, value, th.threshold, th.delta, t};
}

std::vector<ConflictCase> detect_direct(const std::vector<ParamRequest>& requests,
                                        const Stores& stores) {
  std::vector<ConflictCase> cases;
  std::vector<ParamId> order;  // parameters in first-request order
  for (const ParamRequest& r : requests) {
    if (std::find(order.begin(), order.end(), r.param) == order.end()) order.push_back(r.param);
  }

  for (const ParamId& p : order) {
    std::vector<const ParamRequest*> batch;
    for (const ParamRequest& r : requests) {
      if (r.param == p) batch.push_back(&r);
    }

    std::vector<XAppId> involved;
    bool disagreement = false;
    for (const ParamRequest* r : batch) {
      if (std::find(involved.begin(), involved.end(), r->xapp) == involved.end()) {
        involved.push_back(r->xapp);
      }
      if (r->value != batch.front()->value) disagreement = true;
    }

    if (involved.size() >= 2 && disagreement) {
      ConflictCase c{ConflictKind::kDirect, p, involved, 0};
      c.validate();
      cases.push_back(std::move(c));
      continue;
    }

    if (involved.size() == 1) {
      const RcpEntry* prev = stores.latest_rcp(p);
      if (prev && prev->by != involved.front() && prev->value != batch.front()->value) {
        ConflictCase c{ConflictKind::kDirect, p, {prev->by, involved.front()}, 0};
        c.validate();
        cases.push_back(std::move(c));
      }
    }
  }
  return cases;
}

namespace {

std::optional<ConflictCase> build_case(ConflictKind kind, const ParamId& param,
                                       const DegradationAlert& alert, const Stores& stores) {
  std::vector<XAppId> involved = stores.changers_in_window(param, alert.t);
  std::erase(involved, alert.owner);
  if (involved.empty()) return std::nullopt;
  involved.push_back(alert.owner);
  ConflictCase c{kind, param, std::move(involved), alert.t};
  c.validate();
  return c;
}

}  // namespace

std::optional<ConflictCase> detect_indirect(const DegradationAlert& alert, const Stores& stores) {
  auto git = stores.pgd.find(alert.kpi);
  if (git == stores.pgd.end()) return std::nullopt;
  const std::set<ParamId>& group = git->second;

  auto iit = stores.icps.find(alert.owner);
  const std::set<ParamId>* own = iit == stores.icps.end() ? nullptr : &iit->second;

  // most recent qualifying change wins
  for (auto it = stores.rcp.rbegin(); it != stores.rcp.rend(); ++it) {
    if (it->t < alert.t - stores.window || it->t > alert.t) continue;
    if (!group.count(it->param)) continue;
    if (own && own->count(it->param)) continue;
    if (it->by == alert.owner) continue;
    if (auto c = build_case(ConflictKind::kIndirect, it->param, alert, stores)) return c;
  }
  return std::nullopt;
}

std::optional<ConflictCase> detect_implicit(const DegradationAlert& alert, Stores& stores) {
  auto git = stores.pgd.find(alert.kpi);
  const std::set<ParamId>* group = git == stores.pgd.end() ? nullptr : &git->second;
  auto iit = stores.icps.find(alert.owner);
  const std::set<ParamId>* own = iit == stores.icps.end() ? nullptr : &iit->second;

  // candidate parameters changed in the window, outside the KPI's group and
  // the owner's own ICPs, by somebody else; most recent change first
  for (auto it = stores.rcp.rbegin(); it != stores.rcp.rend(); ++it) {
    if (it->t < alert.t - stores.window || it->t > alert.t) continue;
    if (group && group->count(it->param)) continue;
    if (own && own->count(it->param)) continue;
    if (it->by == alert.owner) continue;

    auto& strikes = stores.implicit_strikes[{alert.kpi, it->param}];
    if (strikes.empty() || strikes.back() != alert.t) strikes.push_back(alert.t);
    if (strikes.size() < 2) return std::nullopt;  // one co-occurrence: candidate only

    stores.pgd[alert.kpi].insert(it->param);  // promote: indirect from now on
    stores.implicit_strikes.erase({alert.kpi, it->param});
    return build_case(ConflictKind::kImplicit, it->param, alert, stores);
  }
  return std::nullopt;
}

}  // namespace detect
}  // namespace cms
