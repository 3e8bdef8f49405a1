#include "cms/harness.hpp"

#include <algorithm>
#include <sstream>

#include "cms/errors.hpp"
#include "json.hpp"

namespace cms {

using nlohmann::json;

std::size_t RunLog::count_conflicts(ConflictKind kind) const {
  std::size_t n = 0;
  for (const ConflictRecord* c : all<ConflictRecord>()) {
    if (c->conflict.kind == kind) ++n;
  }
  return n;
}

namespace {

json to_json(const MitigationResult& r, const std::map<XAppId, double>& weights) {
  json per = json::array();
  for (const PerXApp& p : r.per_xapp) {
    per.push_back({{"xapp", p.xapp.str()},
                   {"utility", p.utility},
                   {"distance", p.distance},
                   {"satisfied", p.satisfied}});
  }
  json w;
  for (const auto& [x, v] : weights) w[x.str()] = v;
  return json{{"method", to_string(r.method)},
              {"p_opt", r.p_opt},
              {"grid_index", r.grid_index},
              {"objective", r.objective},
              {"satisfied_count", r.satisfied_count()},
              {"weights", w},
              {"per_xapp", per}};
}

struct EntrySerializer {
  Tick tick;
  json operator()(const RequestRecord& r) const {
    return {{"tick", tick},
            {"type", "request"},
            {"xapp", r.xapp.str()},
            {"param", r.param.str()},
            {"value", r.value}};
  }
  json operator()(const AlertRecord& a) const {
    return {{"tick", tick},          {"type", "alert"},
            {"kpi", a.alert.kpi.str()}, {"owner", a.alert.owner.str()},
            {"value", a.alert.value},   {"threshold", a.alert.threshold},
            {"delta", a.alert.delta}};
  }
  json operator()(const ConflictRecord& c) const {
    json involved = json::array();
    for (const XAppId& x : c.conflict.involved) involved.push_back(x.str());
    return {{"tick", tick},
            {"type", "conflict"},
            {"kind", to_string(c.conflict.kind)},
            {"param", c.conflict.param.str()},
            {"involved", involved}};
  }
  json operator()(const MitigationRecord& m) const {
    json j = to_json(m.result, m.weights);
    j["tick"] = tick;
    j["type"] = "mitigation";
    j["id"] = m.id;
    j["param"] = m.param.str();
    return j;
  }
  json operator()(const AppliedRecord& a) const {
    return {{"tick", tick},
            {"type", "applied"},
            {"param", a.param.str()},
            {"value", a.value},
            {"source", a.source}};
  }
  json operator()(const SnapshotRecord& s) const {
    json kpis;
    for (const auto& [k, v] : s.kpis) kpis[k.str()] = v;
    return {{"tick", tick}, {"type", "snapshot"}, {"kpis", kpis}};
  }
  json operator()(const WarningRecord& w) const {
    return {{"tick", tick}, {"type", "warning"}, {"message", w.message}};
  }
};

}  // namespace

std::string to_jsonl(const RunLog& log) {
  std::ostringstream out;
  for (const LogEntry& e : log.entries) {
    out << std::visit(EntrySerializer{e.tick}, e.payload).dump() << "\n";
  }
  return out.str();
}

Engine::Engine(Scenario scenario) : scenario_(std::move(scenario)) {
  scenario_.validate();
  oracle_ = scenario_.make_oracle();
  state_ = scenario_.initial;
  method_ = scenario_.method;
  policy_ = scenario_.policy;

  stores_.pgd = scenario_.groups;
  stores_.pkr_params = scenario_.pkr;
  stores_.window = scenario_.window;
  for (const XAppSpec& s : scenario_.xapps) {
    stores_.icps[s.id] = s.icps;
    for (const KpiDef& k : s.kpis) {
      stores_.dckd[k.id] = detect::ThresholdEntry{k.qos_threshold, k.delta, s.id};
      auto it = scenario_.kpi_models.find(k.id);
      if (it != scenario_.kpi_models.end()) {
        const double a = it->second.amplitude;
        stores_.pkr_kpis[k.id] = {std::min(0.0, a), std::max(0.0, a)};
      }
    }
  }
  stores_.validate();
}

Engine::CurveSet Engine::build_curves(const ConflictCase& conflict) const {
  CurveSet out;

  auto pkr_it = scenario_.pkr.find(conflict.param);
  if (pkr_it == scenario_.pkr.end()) {
    throw ConfigError("no PKR range for parameter " + conflict.param.str(), "harness");
  }

  std::map<XAppId, std::pair<double, double>> ranges;
  for (const XAppId& x : conflict.involved) {
    std::pair<double, double> r{pkr_it->second.min, pkr_it->second.max};
    auto px = scenario_.preferred.find(x);
    if (px != scenario_.preferred.end()) {
      auto pr = px->second.find(conflict.param);
      if (pr != px->second.end()) r = pr->second;
    }
    ranges[x] = r;
  }
  const auto [lo, hi] = optimal_range(ranges);
  const ParamRange grid_range{lo, hi, pkr_it->second.step};
  const std::vector<double> grid = grid_range.grid();

  for (const XAppId& x : conflict.involved) {
    const XAppSpec& spec = scenario_.xapp(x);
    std::vector<UtilityCurve> parts;
    std::vector<double> part_weights;
    for (const KpiDef& k : spec.kpis) {
      std::vector<double> raw;
      raw.reserve(grid.size());
      Assignment a = state_;
      for (double g : grid) {
        a[conflict.param] = g;
        raw.push_back(oracle_->eval(k.id, a));
      }
      try {
        parts.push_back(make_curve(x, conflict.param, grid, raw, k));
        part_weights.push_back(k.weight_in_xapp);
      } catch (const DegenerateDistribution&) {
        out.warnings.push_back("KPI " + k.id.str() + " constant over " + conflict.param.str() +
                               " sweep; excluded from mitigation");
      }
    }
    if (parts.empty()) {
      out.warnings.push_back("xApp " + x.str() + " has no usable KPI over " +
                             conflict.param.str() + "; excluded from mitigation");
      continue;
    }
    if (parts.size() == 1) {
      out.curves.emplace(x, std::move(parts.front()));
    } else {
      double wsum = 0.0;
      for (double w : part_weights) wsum += w;
      for (double& w : part_weights) w /= wsum;
      out.curves.emplace(x, combine_kpis(parts, part_weights));
    }
    out.usable.push_back(x);
  }
  return out;
}

MitigationResult Engine::dispatch(const MitigationInput& input, Method method) const {
  switch (method) {
    case Method::kQacm:
      return qacm_exact(input);
    case Method::kQacmHeuristic:
      return qacm_heuristic(input);
    case Method::kNswf:
      return nswf(input);
    case Method::kEg:
      return eg(input);
  }
  throw ConfigError("unknown method", "harness");
}

std::map<XAppId, UtilityCurve> Engine::curves_for(const ConflictCase& conflict) const {
  return build_curves(conflict).curves;
}

MitigationResult Engine::solve(const ConflictCase& conflict, Method method,
                               const PolicyConfig& policy) const {
  CurveSet cs = build_curves(conflict);
  if (cs.usable.size() < 2) {
    throw EmptyInput("conflict over " + conflict.param.str() +
                     " has fewer than two usable xApps");
  }
  ConflictCase effective = conflict;
  effective.involved = cs.usable;
  MitigationInput input{effective,       std::move(cs.curves),  assign_weights(effective, policy),
                        scenario_.zeta,  scenario_.big_m,       scenario_.nswf_shift};
  return dispatch(input, method);
}

void Engine::apply_mitigation(const ConflictCase& conflict, Tick tick, RunLog& log) {
  CurveSet cs = build_curves(conflict);
  for (const std::string& w : cs.warnings) {
    log.entries.push_back({tick, WarningRecord{w}});
  }
  if (cs.usable.size() < 2) {
    log.entries.push_back(
        {tick, WarningRecord{"conflict over " + conflict.param.str() +
                             " left unresolved: fewer than two usable xApps"}});
    return;
  }

  ConflictCase effective = conflict;
  effective.involved = cs.usable;
  const std::map<XAppId, double> weights = assign_weights(effective, policy_);
  MitigationInput input{effective,      std::move(cs.curves), weights,
                        scenario_.zeta, scenario_.big_m,      scenario_.nswf_shift};
  const MitigationResult result = dispatch(input, method_);

  const std::size_t id = ++mitigation_seq_;
  log.entries.push_back({tick, MitigationRecord{id, conflict.param, result, weights}});
  state_[conflict.param] = result.p_opt;
  log.entries.push_back(
      {tick, AppliedRecord{conflict.param, result.p_opt, "mitigation:" + std::to_string(id)}});
}

RunLog Engine::run_schedule() {
  RunLog log;
  state_ = scenario_.initial;
  const Tick shift = tick_offset_;
  Tick last_tick = shift;

  std::size_t i = 0;
  const auto& sched = scenario_.schedule;
  while (i < sched.size()) {
    const Tick tick = sched[i].tick + shift;
    last_tick = tick;

    std::size_t j = i;
    while (j < sched.size() && sched[j].tick == sched[i].tick) ++j;

    // configuration switches first, then the tick's request batch, then
    // observations in listed order
    for (std::size_t e = i; e < j; ++e) {
      const ScheduleEvent& ev = sched[e];
      if (ev.type == ScheduleEvent::Type::kSetMethod) method_ = ev.method;
      if (ev.type == ScheduleEvent::Type::kSetPolicy) policy_ = ev.policy;
    }

    std::vector<ParamRequest> batch;
    for (std::size_t e = i; e < j; ++e) {
      const ScheduleEvent& ev = sched[e];
      if (ev.type == ScheduleEvent::Type::kRequest) {
        batch.push_back(ParamRequest{ev.xapp, ev.param, ev.value});
        log.entries.push_back({tick, RequestRecord{ev.xapp, ev.param, ev.value}});
      }
    }

    try {
      if (!batch.empty()) {
        const std::vector<ConflictCase> cases = detect::detect_direct(batch, stores_);
        for (const ParamRequest& r : batch) {
          stores_.record_change(r.param, r.value, tick, r.xapp);
        }

        std::set<ParamId> conflicted;
        for (const ConflictCase& c : cases) conflicted.insert(c.param);

        std::vector<ParamId> order;
        for (const ParamRequest& r : batch) {
          if (!conflicted.count(r.param) &&
              std::find(order.begin(), order.end(), r.param) == order.end()) {
            order.push_back(r.param);
          }
        }
        for (const ParamId& p : order) {
          const ParamRequest* last = nullptr;
          for (const ParamRequest& r : batch) {
            if (r.param == p) last = &r;
          }
          state_[p] = last->value;
          log.entries.push_back(
              {tick, AppliedRecord{p, last->value, "request:" + last->xapp.str()}});
        }

        for (ConflictCase c : cases) {
          c.detected_at = tick;
          log.entries.push_back({tick, ConflictRecord{c}});
          apply_mitigation(c, tick, log);
        }
      }

      for (std::size_t e = i; e < j; ++e) {
        const ScheduleEvent& ev = sched[e];
        if (ev.type != ScheduleEvent::Type::kObserve &&
            ev.type != ScheduleEvent::Type::kObserveValue) {
          continue;
        }
        const double value = ev.type == ScheduleEvent::Type::kObserveValue
                                 ? ev.value
                                 : oracle_->eval(ev.kpi, state_);
        auto alert = detect::pmon_observe(ev.kpi, value, tick, stores_);
        if (!alert) continue;
        log.entries.push_back({tick, AlertRecord{*alert}});

        std::optional<ConflictCase> c = detect::detect_indirect(*alert, stores_);
        if (!c) c = detect::detect_implicit(*alert, stores_);
        if (c) {
          log.entries.push_back({tick, ConflictRecord{*c}});
          apply_mitigation(*c, tick, log);
        }
      }
    } catch (const Error& err) {
      throw Error(err.module(), "tick " + std::to_string(tick) + ": " + err.what());
    }

    SnapshotRecord snap;
    for (const XAppSpec& s : scenario_.xapps) {
      for (const KpiDef& k : s.kpis) {
        snap.kpis[k.id] = oracle_->eval(k.id, state_);
      }
    }
    log.entries.push_back({tick, std::move(snap)});

    i = j;
  }

  tick_offset_ = last_tick + scenario_.window + 1;
  return log;
}

RunLog run(const Scenario& scenario) {
  Engine engine(scenario);
  return engine.run_schedule();
}

CaseStudyOutcome casestudy(char id, Method method, const PolicyConfig& policy,
                           const std::filesystem::path& fixture_dir) {
  const char lower = static_cast<char>(std::tolower(static_cast<unsigned char>(id)));
  if (lower < 'a' || lower > 'd') {
    throw ConfigError("case study id must be one of A, B, C, D", "harness");
  }
  const std::filesystem::path path =
      fixture_dir / (std::string("casestudy_") + lower + ".json");
  if (!std::filesystem::exists(path)) {
    throw FixtureMissing("case study fixture " + path.string() + " not found");
  }

  Scenario s = load_scenario(path);
  if (s.switch_tick) {
    // the compared method replaces whatever configuration the fixture holds
    // at its switch point
    std::erase_if(s.schedule, [&](const ScheduleEvent& e) {
      return e.tick == *s.switch_tick && (e.type == ScheduleEvent::Type::kSetMethod ||
                                          e.type == ScheduleEvent::Type::kSetPolicy);
    });
    ScheduleEvent set_m;
    set_m.tick = *s.switch_tick;
    set_m.type = ScheduleEvent::Type::kSetMethod;
    set_m.method = method;
    ScheduleEvent set_p;
    set_p.tick = *s.switch_tick;
    set_p.type = ScheduleEvent::Type::kSetPolicy;
    set_p.policy = policy;

    auto pos = std::find_if(s.schedule.begin(), s.schedule.end(),
                            [&](const ScheduleEvent& e) { return e.tick >= *s.switch_tick; });
    pos = s.schedule.insert(pos, set_p);
    s.schedule.insert(pos, set_m);
  } else {
    s.method = method;
    s.policy = policy;
  }

  CaseStudyOutcome out{std::move(s), {}, {}, {}};
  out.log = run(out.scenario);

  const auto mitigations = out.log.all<MitigationRecord>();
  if (mitigations.empty()) {
    throw ConfigError("case study " + std::string(1, id) + " produced no mitigation", "harness");
  }
  out.final_result = mitigations.back()->result;
  out.final_weights = mitigations.back()->weights;
  return out;
}

}  // namespace cms
