#include "cms/detect.hpp"
#include "cms/errors.hpp"
#include "json.hpp"

namespace cms::detect {

using nlohmann::json;

std::string dump_stores(const Stores& s) {
  json j;
  j["window"] = s.window;

  json rcp = json::array();
  for (const RcpEntry& e : s.rcp) {
    rcp.push_back({{"param", e.param.str()}, {"value", e.value}, {"t", e.t}, {"by", e.by.str()}});
  }
  j["rcp"] = rcp;

  json pgd;
  for (const auto& [kpi, group] : s.pgd) {
    json g = json::array();
    for (const ParamId& p : group) g.push_back(p.str());
    pgd[kpi.str()] = g;
  }
  j["pgd"] = pgd;

  json rcpg = json::array();
  for (const RcpgEntry& e : s.rcpg) {
    json groups = json::array();
    for (const KpiId& k : e.groups) groups.push_back(k.str());
    rcpg.push_back({{"param", e.param.str()}, {"t", e.t}, {"groups", groups}});
  }
  j["rcpg"] = rcpg;

  json pkr_params;
  for (const auto& [p, r] : s.pkr_params) {
    pkr_params[p.str()] = {{"min", r.min}, {"max", r.max}, {"step", r.step}};
  }
  j["pkr_params"] = pkr_params;

  json pkr_kpis;
  for (const auto& [k, mm] : s.pkr_kpis) {
    pkr_kpis[k.str()] = {{"min", mm.first}, {"max", mm.second}};
  }
  j["pkr_kpis"] = pkr_kpis;

  json dckd;
  for (const auto& [k, th] : s.dckd) {
    dckd[k.str()] = {{"threshold", th.threshold}, {"delta", th.delta}, {"owner", th.owner.str()}};
  }
  j["dckd"] = dckd;

  json kdo = json::array();
  for (const KdoEntry& e : s.kdo) {
    kdo.push_back({{"kpi", e.kpi.str()}, {"value", e.value}, {"t", e.t}});
  }
  j["kdo"] = kdo;

  json icps;
  for (const auto& [x, params] : s.icps) {
    json g = json::array();
    for (const ParamId& p : params) g.push_back(p.str());
    icps[x.str()] = g;
  }
  j["icps"] = icps;

  json strikes = json::array();
  for (const auto& [key, ts] : s.implicit_strikes) {
    strikes.push_back({{"kpi", key.first.str()}, {"param", key.second.str()}, {"ticks", ts}});
  }
  j["implicit_strikes"] = strikes;

  return j.dump(2) + "\n";
}

Stores parse_stores(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("stores JSON: ") + e.what(), "detect");
  }

  Stores s;
  try {
    s.window = j.value("window", Tick{5});
    for (const json& e : j.value("rcp", json::array())) {
      s.rcp.push_back(RcpEntry{ParamId{e.at("param").get<std::string>()},
                               e.at("value").get<double>(), e.at("t").get<Tick>(),
                               XAppId{e.at("by").get<std::string>()}});
    }
    if (j.contains("pgd")) {
      for (const auto& [k, g] : j.at("pgd").items()) {
        for (const json& p : g) s.pgd[KpiId{k}].insert(ParamId{p.get<std::string>()});
      }
    }
    for (const json& e : j.value("rcpg", json::array())) {
      RcpgEntry r{ParamId{e.at("param").get<std::string>()}, e.at("t").get<Tick>(), {}};
      for (const json& k : e.at("groups")) r.groups.push_back(KpiId{k.get<std::string>()});
      s.rcpg.push_back(std::move(r));
    }
    if (j.contains("pkr_params")) {
      for (const auto& [p, r] : j.at("pkr_params").items()) {
        s.pkr_params[ParamId{p}] = ParamRange{r.at("min").get<double>(),
                                              r.at("max").get<double>(),
                                              r.value("step", 1.0)};
      }
    }
    if (j.contains("pkr_kpis")) {
      for (const auto& [k, mm] : j.at("pkr_kpis").items()) {
        s.pkr_kpis[KpiId{k}] = {mm.at("min").get<double>(), mm.at("max").get<double>()};
      }
    }
    if (j.contains("dckd")) {
      for (const auto& [k, th] : j.at("dckd").items()) {
        s.dckd[KpiId{k}] = ThresholdEntry{th.at("threshold").get<double>(),
                                          th.value("delta", 0),
                                          XAppId{th.at("owner").get<std::string>()}};
      }
    }
    for (const json& e : j.value("kdo", json::array())) {
      s.kdo.push_back(KdoEntry{KpiId{e.at("kpi").get<std::string>()}, e.at("value").get<double>(),
                               e.at("t").get<Tick>()});
    }
    if (j.contains("icps")) {
      for (const auto& [x, g] : j.at("icps").items()) {
        for (const json& p : g) s.icps[XAppId{x}].insert(ParamId{p.get<std::string>()});
      }
    }
    for (const json& e : j.value("implicit_strikes", json::array())) {
      auto& ts = s.implicit_strikes[{KpiId{e.at("kpi").get<std::string>()},
                                     ParamId{e.at("param").get<std::string>()}}];
      for (const json& t : e.at("ticks")) ts.push_back(t.get<Tick>());
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("stores JSON: ") + e.what(), "detect");
  }

  s.validate();
  return s;
}

}  // namespace cms::detect
