#include "cms/model.hpp"

#include <cctype>
#include <cmath>
#include <cstddef>

#include "cms/errors.hpp"

namespace cms {

void ParamRange::validate() const {
  if (!(min <= max)) {
    throw ConfigError("ParamRange: min > max");
  }
  if (!(step > 0.0)) {
    throw ConfigError("ParamRange: step must be > 0");
  }
}

std::size_t ParamRange::grid_size() const {
  validate();
  return static_cast<std::size_t>(std::floor((max - min) / step + 1e-9)) + 1;
}

std::vector<double> ParamRange::grid() const {
  std::vector<double> g;
  const std::size_t n = grid_size();
  g.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    g.push_back(at(i));
  }
  return g;
}

bool natural_less(const std::string& a, const std::string& b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const unsigned char ca = a[i], cb = b[j];
    if (std::isdigit(ca) && std::isdigit(cb)) {
      std::size_t ia = i, jb = j;
      while (ia < a.size() && std::isdigit(static_cast<unsigned char>(a[ia]))) ++ia;
      while (jb < b.size() && std::isdigit(static_cast<unsigned char>(b[jb]))) ++jb;
      const std::string na = a.substr(i, ia - i), nb = b.substr(j, jb - j);
      // compare as integers: shorter digit run (no leading-zero handling needed
      // for p1..p8 style ids) is smaller
      const std::string ta = na.substr(na.find_first_not_of('0') == std::string::npos
                                           ? na.size() - 1
                                           : na.find_first_not_of('0'));
      const std::string tb = nb.substr(nb.find_first_not_of('0') == std::string::npos
                                           ? nb.size() - 1
                                           : nb.find_first_not_of('0'));
      if (ta.size() != tb.size()) return ta.size() < tb.size();
      if (ta != tb) return ta < tb;
      i = ia;
      j = jb;
    } else {
      if (ca != cb) return ca < cb;
      ++i;
      ++j;
    }
  }
  return (a.size() - i) < (b.size() - j);
}

void XAppSpec::validate() const {
  if (id.empty()) throw ConfigError("xApp id must be nonempty", "model");
  if (icps.empty()) throw ConfigError("xApp " + id.str() + ": ICP set must be nonempty", "model");
  if (kpis.empty()) throw ConfigError("xApp " + id.str() + ": KPI list must be nonempty", "model");
  double wsum = 0.0;
  for (const KpiDef& k : kpis) {
    if (k.id.empty()) throw ConfigError("xApp " + id.str() + ": KPI id must be nonempty", "model");
    if (k.delta != 0 && k.delta != 1) {
      throw ConfigError("KPI " + k.id.str() + ": delta must be 0 or 1", "model");
    }
    if (k.weight_in_xapp < 0.0 || k.weight_in_xapp > 1.0) {
      throw ConfigError("KPI " + k.id.str() + ": weight must lie in [0,1]", "model");
    }
    wsum += k.weight_in_xapp;
  }
  if (std::abs(wsum - 1.0) > 1e-9) {
    throw ConfigError("xApp " + id.str() + ": KPI weights must sum to 1", "model");
  }
}

const KpiDef& XAppSpec::kpi(const KpiId& k) const {
  for (const KpiDef& d : kpis) {
    if (d.id == k) return d;
  }
  throw UnknownKpi("xApp " + id.str() + " has no KPI " + k.str());
}

bool XAppSpec::owns_kpi(const KpiId& k) const {
  for (const KpiDef& d : kpis) {
    if (d.id == k) return true;
  }
  return false;
}

std::set<ParamId> GaussianKpiModel::referenced_params() const {
  std::set<ParamId> out;
  for (const auto& [p, c] : center_coeffs) {
    (void)c;
    out.insert(p);
  }
  out.insert(width_param);
  return out;
}

namespace {

double lookup(const Assignment& a, const ParamId& p) {
  auto it = a.find(p);
  if (it == a.end()) {
    throw MissingParam("parameter " + p.str() + " absent from assignment");
  }
  return it->second;
}

}  // namespace

double eval_kpi(const GaussianKpiModel& model, const Assignment& assignment) {
  double num = model.center_offset;
  for (const auto& [p, coeff] : model.center_coeffs) {
    num += coeff * lookup(assignment, p);
  }
  const double width = lookup(assignment, model.width_param);
  if (width == 0.0) {
    throw DegenerateWidth("width parameter " + model.width_param.str() + " is zero");
  }
  const double t = num / width;
  return model.amplitude * std::exp(-0.5 * t * t);
}

const XAppSpec& ExampleModel::xapp(const XAppId& id) const {
  for (const XAppSpec& s : xapps) {
    if (s.id == id) return s;
  }
  throw ConfigError("unknown xApp " + id.str(), "model");
}

ExampleModel builtin_example_model() {
  ExampleModel m;

  const ParamId p1{"p1"}, p2{"p2"}, p3{"p3"}, p4{"p4"}, p5{"p5"}, p6{"p6"}, p7{"p7"}, p8{"p8"};
  const KpiId k1{"k1"}, k2{"k2"}, k3{"k3"}, k41{"k41"}, k42{"k42"}, k5{"k5"};

  m.xapps = {
      XAppSpec{XAppId{"x1"}, {p1, p2}, {KpiDef{k1, XAppId{"x1"}, 55.0, 0, 1.0}}},
      XAppSpec{XAppId{"x2"}, {p1, p2, p3}, {KpiDef{k2, XAppId{"x2"}, 95.0, 0, 1.0}}},
      XAppSpec{XAppId{"x3"}, {p1, p4}, {KpiDef{k3, XAppId{"x3"}, 85.0, 0, 1.0}}},
      XAppSpec{XAppId{"x4"},
               {p5, p6},
               {KpiDef{k41, XAppId{"x4"}, 75.0, 0, 0.5},
                KpiDef{k42, XAppId{"x4"}, 80.0, 0, 0.5}}},
      XAppSpec{XAppId{"x5"}, {p7, p8}, {KpiDef{k5, XAppId{"x5"}, -25.0, 1, 1.0}}},
  };

  m.kpi_models[k1] = GaussianKpiModel{80.0, {{p1, 1.0}}, 0.0, p2};
  m.kpi_models[k2] = GaussianKpiModel{100.0, {{p1, 1.0}, {p3, 1.0}}, 0.0, p2};
  m.kpi_models[k3] = GaussianKpiModel{120.0, {{p1, 1.0}}, 45.0, p4};
  m.kpi_models[k41] = GaussianKpiModel{120.0, {{p6, 1.0}, {p2, 1.0}}, -30.0, p5};
  m.kpi_models[k42] = GaussianKpiModel{150.0, {{p6, 1.0}, {p2, 1.0}}, -50.0, p5};
  m.kpi_models[k5] = GaussianKpiModel{-35.0, {{p8, 1.0}, {p1, 1.0}}, -25.0, p7};

  m.qos = {{k1, 55.0}, {k2, 95.0}, {k3, 85.0}, {k41, 75.0}, {k42, 80.0}, {k5, -25.0}};

  for (const XAppSpec& s : m.xapps) {
    s.validate();
  }
  return m;
}

std::map<KpiId, std::set<ParamId>> builtin_parameter_groups() {
  const ParamId p1{"p1"}, p2{"p2"}, p3{"p3"}, p4{"p4"}, p5{"p5"}, p6{"p6"}, p7{"p7"}, p8{"p8"};
  return {
      {KpiId{"k1"}, {p1, p2}},
      {KpiId{"k2"}, {p1, p2, p3}},
      {KpiId{"k3"}, {p1, p4}},
      {KpiId{"k41"}, {p2, p5, p6}},
      {KpiId{"k42"}, {p2, p5, p6}},
      {KpiId{"k5"}, {p7, p8}},
  };
}

}  // namespace cms
