#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cms/detect.hpp"
#include "cms/normalize.hpp"

namespace cms {

enum class Method { kQacm, kQacmHeuristic, kNswf, kEg };

const char* to_string(Method m);
std::optional<Method> method_from_string(const std::string& name);

// Operator policy: priority ratios per xApp, normalized over the involved set.
struct PolicyConfig {
  std::map<XAppId, double> ratios;
  std::optional<double> default_ratio;
};

// Everything a solver needs: the case, one utility curve per involved xApp
// (all on the shared grid of the conflicting parameter), normalized weights,
// and the objective constants.
struct MitigationInput {
  ConflictCase conflict;
  std::map<XAppId, UtilityCurve> curves;
  std::map<XAppId, double> weights;
  double zeta = 1000.0;
  double big_m = 10.0;
  bool nswf_shift = true;  // shift utilities to be nonnegative before the product

  void validate() const;
  const std::vector<double>& grid() const;
};

struct PerXApp {
  XAppId xapp;
  double utility = 0.0;
  double distance = 0.0;  // z-units, >= 0
  int satisfied = 0;
};

struct MitigationResult {
  double p_opt = 0.0;
  std::size_t grid_index = 0;
  std::vector<PerXApp> per_xapp;  // in conflict.involved order
  double objective = 0.0;         // sum w_i d_i zeta - (sum s_i)^2 at p_opt
  Method method = Method::kQacm;

  int satisfied_count() const;
};

// Overall search interval: elementwise (min of mins, max of maxes).
std::pair<double, double> optimal_range(
    const std::map<XAppId, std::pair<double, double>>& per_xapp_ranges);

// argmax over the grid of the product of (optionally min-shifted) utilities;
// priority weights are ignored by construction.
MitigationResult nswf(const MitigationInput& input);

// argmax over the grid of the weighted utility sum.
MitigationResult eg(const MitigationInput& input);

// Minimizes sum_i w_i d_i zeta - (sum_i s_i)^2 over the grid; the binaries
// are forced at each fixed grid value, so enumeration solves the program
// exactly. Earliest grid point wins ties.
MitigationResult qacm_exact(const MitigationInput& input);

// Literal ascending scan with per-xApp distance/indicator updates and a
// strict-improvement minimum, kept independent of qacm_exact so the two can
// cross-check each other.
MitigationResult qacm_heuristic(const MitigationInput& input);

// Normalized priority weights for the involved xApps from operator policy.
// An empty policy yields uniform weights.
std::map<XAppId, double> assign_weights(const ConflictCase& conflict, const PolicyConfig& policy);

}  // namespace cms
