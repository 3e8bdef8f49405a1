#pragma once

#include <map>
#include <set>
#include <vector>

#include "cms/ids.hpp"

namespace cms {

// A full or partial assignment of parameter values.
using Assignment = std::map<ParamId, double>;

// One KPI of one xApp: its QoS threshold in raw KPI units, the optimization
// direction (delta = 0 maximize, 1 minimize) and its weight when the owning
// xApp combines several KPIs into a single utility.
struct KpiDef {
  KpiId id;
  XAppId owner;
  double qos_threshold = 0.0;
  int delta = 0;
  double weight_in_xapp = 1.0;
};

struct XAppSpec {
  XAppId id;
  std::set<ParamId> icps;
  std::vector<KpiDef> kpis;

  // Nonempty id/icps/kpis, delta in {0,1}, KPI weights summing to 1.
  void validate() const;
  const KpiDef& kpi(const KpiId& k) const;  // UnknownKpi if absent
  bool owns_kpi(const KpiId& k) const;
};

// Analytic KPI generator of the form
//   A * exp(-(c0 + sum_j coeff_j * p_j)^2 / (2 * width^2)).
struct GaussianKpiModel {
  double amplitude = 0.0;
  std::map<ParamId, double> center_coeffs;
  double center_offset = 0.0;
  ParamId width_param;

  // Every parameter this model reads.
  std::set<ParamId> referenced_params() const;
};

// Evaluates the Gaussian generator at `assignment`.
// Throws MissingParam if a referenced parameter is absent and DegenerateWidth
// if the width parameter evaluates to zero.
double eval_kpi(const GaussianKpiModel& model, const Assignment& assignment);

struct ExampleModel {
  std::vector<XAppSpec> xapps;
  std::map<KpiId, GaussianKpiModel> kpi_models;
  std::map<KpiId, double> qos;

  const XAppSpec& xapp(const XAppId& id) const;
};

// The five-xApp reference model: x1{p1,p2}/k1, x2{p1,p2,p3}/k2, x3{p1,p4}/k3,
// x4{p5,p6}/k41+k42, x5{p7,p8}/k5, with their QoS thresholds.
ExampleModel builtin_example_model();

// Declared parameter groups of the reference model. Note the k5 group is
// {p7,p8} only: the p1 influence is deliberately undeclared, which is what
// makes the x5 conflict implicit rather than indirect.
std::map<KpiId, std::set<ParamId>> builtin_parameter_groups();

}  // namespace cms
