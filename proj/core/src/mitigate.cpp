#include "cms/mitigate.hpp"

#include <cmath>
#include <limits>

#include "cms/errors.hpp"

namespace cms {

const char* to_string(Method m) {
  switch (m) {
    case Method::kQacm:
      return "qacm";
    case Method::kQacmHeuristic:
      return "qacm-heuristic";
    case Method::kNswf:
      return "nswf";
    case Method::kEg:
      return "eg";
  }
  return "?";
}

std::optional<Method> method_from_string(const std::string& name) {
  if (name == "qacm") return Method::kQacm;
  if (name == "qacm-heuristic") return Method::kQacmHeuristic;
  if (name == "nswf") return Method::kNswf;
  if (name == "eg") return Method::kEg;
  return std::nullopt;
}

void MitigationInput::validate() const {
  conflict.validate();
  if (curves.size() != conflict.involved.size()) {
    throw GridMismatch("need exactly one curve per involved xApp");
  }
  const UtilityCurve* first = nullptr;
  for (const XAppId& x : conflict.involved) {
    auto it = curves.find(x);
    if (it == curves.end()) throw GridMismatch("no curve for involved xApp " + x.str());
    it->second.validate();
    if (it->second.param != conflict.param) {
      throw GridMismatch("curve for " + x.str() + " sweeps " + it->second.param.str() +
                         ", conflict is over " + conflict.param.str());
    }
    if (!first) {
      first = &it->second;
    } else if (it->second.grid != first->grid) {
      throw GridMismatch("curves do not share a grid");
    }
  }
  double wsum = 0.0;
  for (const XAppId& x : conflict.involved) {
    auto it = weights.find(x);
    if (it == weights.end()) throw WeightError("no weight for involved xApp " + x.str());
    if (it->second < 0.0) throw WeightError("negative weight for " + x.str());
    wsum += it->second;
  }
  if (std::abs(wsum - 1.0) > 1e-9) {
    throw WeightError("weights sum to " + std::to_string(wsum) + ", expected 1");
  }
  if (!(zeta > 0.0)) throw ConfigError("zeta must be > 0", "mitigate");
  if (!(big_m > 0.0)) throw ConfigError("big_m must be > 0", "mitigate");
}

const std::vector<double>& MitigationInput::grid() const {
  return curves.at(conflict.involved.front()).grid;
}

int MitigationResult::satisfied_count() const {
  int n = 0;
  for (const PerXApp& p : per_xapp) n += p.satisfied;
  return n;
}

std::pair<double, double> optimal_range(
    const std::map<XAppId, std::pair<double, double>>& per_xapp_ranges) {
  if (per_xapp_ranges.size() < 2) {
    throw EmptyInput("optimal_range needs at least two per-xApp ranges");
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& [x, r] : per_xapp_ranges) {
    if (r.first > r.second) {
      throw ConfigError("range for " + x.str() + " has min > max", "mitigate");
    }
    lo = std::min(lo, r.first);
    hi = std::max(hi, r.second);
  }
  return {lo, hi};
}

namespace {

// Distances and indicators at one grid point, used for the diagnostic rows
// the bargaining benchmarks report alongside their argmax.
struct PointDiag {
  std::vector<PerXApp> per_xapp;
  double objective = 0.0;
};

PointDiag diagnose_point(const MitigationInput& in, std::size_t g) {
  PointDiag out;
  double cost_sum = 0.0;
  int ssum = 0;
  for (const XAppId& x : in.conflict.involved) {
    const UtilityCurve& c = in.curves.at(x);
    const double u = c.values[g];
    const double q = c.threshold;
    double d;
    int s;
    if (c.delta == 0) {
      s = u >= q ? 1 : 0;
      d = u < q ? q - u : 0.0;
    } else {
      s = u <= q ? 1 : 0;
      d = u > q ? u - q : 0.0;
    }
    cost_sum += in.weights.at(x) * d * in.zeta;
    ssum += s;
    out.per_xapp.push_back(PerXApp{x, u, d, s});
  }
  out.objective = cost_sum - static_cast<double>(ssum) * static_cast<double>(ssum);
  return out;
}

MitigationResult result_at(const MitigationInput& in, std::size_t g, Method m) {
  PointDiag diag = diagnose_point(in, g);
  MitigationResult r;
  r.p_opt = in.grid()[g];
  r.grid_index = g;
  r.per_xapp = std::move(diag.per_xapp);
  r.objective = diag.objective;
  r.method = m;
  return r;
}

}  // namespace

namespace {

// Curve/weight resolution hoisted out of the grid scans.
struct ResolvedInput {
  std::vector<const UtilityCurve*> curves;
  std::vector<double> weights;
};

ResolvedInput resolve(const MitigationInput& input) {
  ResolvedInput r;
  r.curves.reserve(input.conflict.involved.size());
  r.weights.reserve(input.conflict.involved.size());
  for (const XAppId& x : input.conflict.involved) {
    r.curves.push_back(&input.curves.at(x));
    r.weights.push_back(input.weights.at(x));
  }
  return r;
}

}  // namespace

MitigationResult nswf(const MitigationInput& input) {
  input.validate();
  const auto& grid = input.grid();
  const ResolvedInput in = resolve(input);
  const std::size_t n = in.curves.size();

  std::vector<double> shift(n, 0.0);
  if (input.nswf_shift) {
    for (std::size_t i = 0; i < n; ++i) {
      double lo = in.curves[i]->values.front();
      for (double v : in.curves[i]->values) lo = std::min(lo, v);
      shift[i] = lo;
    }
  }

  std::size_t best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double prod = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      prod *= in.curves[i]->values[g] - shift[i];
    }
    if (prod > best_val) {
      best_val = prod;
      best = g;
    }
  }
  return result_at(input, best, Method::kNswf);
}

MitigationResult eg(const MitigationInput& input) {
  input.validate();
  const auto& grid = input.grid();
  const ResolvedInput in = resolve(input);
  const std::size_t n = in.curves.size();

  std::size_t best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sum += in.weights[i] * in.curves[i]->values[g];
    }
    if (sum > best_val) {
      best_val = sum;
      best = g;
    }
  }
  return result_at(input, best, Method::kEg);
}

MitigationResult qacm_exact(const MitigationInput& input) {
  input.validate();
  const auto& grid = input.grid();
  const auto& involved = input.conflict.involved;

  // Enumeration is exact: at a fixed grid value the binaries are forced, so
  // the program reduces to evaluating the objective pointwise. big_m only has
  // to dominate |U| + |q'| for the declarative form to be equivalent.
  for (const XAppId& x : involved) {
    const UtilityCurve& c = input.curves.at(x);
    double umax = 0.0;
    for (double v : c.values) umax = std::max(umax, std::abs(v));
    if (!(input.big_m > umax + std::abs(c.threshold))) {
      throw ConfigError("big_m must exceed max |U| + |q'| (xApp " + x.str() + ")", "mitigate");
    }
  }

  const ResolvedInput in = resolve(input);
  const std::size_t n = in.curves.size();

  std::size_t best = 0;
  double best_obj = std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double obj = 0.0;
    int ssum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const UtilityCurve& c = *in.curves[i];
      const double u = c.values[g];
      const double q = c.threshold;
      const double delta = static_cast<double>(c.delta);
      const double viol = (q - u) * (1.0 - delta) + (u - q) * delta;
      const double d = viol > 0.0 ? viol : 0.0;
      const int s = c.delta == 0 ? (u >= q ? 1 : 0) : (u <= q ? 1 : 0);
      obj += in.weights[i] * d * input.zeta;
      ssum += s;
    }
    obj -= static_cast<double>(ssum) * static_cast<double>(ssum);
    if (obj < best_obj) {
      best_obj = obj;
      best = g;
    }
  }
  MitigationResult r = result_at(input, best, Method::kQacm);
  r.objective = best_obj;
  return r;
}

MitigationResult qacm_heuristic(const MitigationInput& input) {
  input.validate();
  const auto& grid = input.grid();
  const ResolvedInput in = resolve(input);
  const std::size_t n = in.curves.size();

  std::vector<double> cost(n, 0.0);
  std::vector<int> s(n, 0);
  double min_cost = std::numeric_limits<double>::infinity();
  std::size_t p_opt_index = 0;

  for (std::size_t g = 0; g < grid.size(); ++g) {
    for (std::size_t i = 0; i < n; ++i) {
      const UtilityCurve& c = *in.curves[i];
      const double u = c.values[g];
      const double q = c.threshold;
      double d;
      if (c.delta == 0) {
        if (u < q) {
          d = q - u;
          s[i] = 0;
        } else {
          d = 0.0;
          s[i] = 1;
        }
      } else {
        if (u > q) {
          d = u - q;
          s[i] = 0;
        } else {
          d = 0.0;
          s[i] = 1;
        }
      }
      cost[i] = in.weights[i] * d * input.zeta;
    }
    double f_cost = 0.0;
    int ssum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      f_cost += cost[i];
      ssum += s[i];
    }
    f_cost -= static_cast<double>(ssum) * static_cast<double>(ssum);
    if (min_cost > f_cost) {
      min_cost = f_cost;
      p_opt_index = g;
    }
  }

  MitigationResult r = result_at(input, p_opt_index, Method::kQacmHeuristic);
  r.objective = min_cost;
  return r;
}

std::map<XAppId, double> assign_weights(const ConflictCase& conflict, const PolicyConfig& policy) {
  conflict.validate();
  const auto& involved = conflict.involved;

  std::map<XAppId, double> out;
  if (policy.ratios.empty() && !policy.default_ratio) {
    const double w = 1.0 / static_cast<double>(involved.size());
    for (const XAppId& x : involved) out[x] = w;
    return out;
  }

  double sum = 0.0;
  for (const XAppId& x : involved) {
    double r;
    auto it = policy.ratios.find(x);
    if (it != policy.ratios.end()) {
      r = it->second;
    } else if (policy.default_ratio) {
      r = *policy.default_ratio;
    } else {
      throw PolicyError("policy covers no ratio for " + x.str() + " and declares no default");
    }
    if (!(r > 0.0)) throw PolicyError("ratio for " + x.str() + " must be positive");
    out[x] = r;
    sum += r;
  }
  if (!(sum > 0.0)) throw PolicyError("policy ratios sum to zero");
  for (auto& [x, w] : out) w /= sum;
  return out;
}

}  // namespace cms
