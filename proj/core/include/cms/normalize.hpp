#pragma once

#include <span>
#include <vector>

#include "cms/dataset.hpp"

namespace cms {

// z(x) = (x - mean) / stddev with population stddev > 0.
struct ZScoreTransform {
  double mean = 0.0;
  double stddev = 1.0;

  double operator()(double x) const { return (x - mean) / stddev; }
  double inverse(double z) const { return z * stddev + mean; }
};

// Arithmetic mean and population standard deviation of `samples`.
// Throws DegenerateDistribution for fewer than 2 samples or zero stddev.
ZScoreTransform fit_zscore(std::span<const double> samples);

// z-score-normalized utility of one xApp along one parameter, with the QoS
// threshold mapped through the same transform.
struct UtilityCurve {
  XAppId xapp;
  ParamId param;
  std::vector<double> grid;    // strictly ascending
  std::vector<double> values;  // z-units, one per grid point
  double threshold = 0.0;      // z-units
  int delta = 0;

  void validate() const;
  std::size_t index_of_min() const;  // earliest minimum
};

// Normalizes one KPI column of `table`; the transform is fitted on exactly
// that column, so the curve has mean 0 and stddev 1 over its own grid.
UtilityCurve utility_curve(const ConflictTable& table, const KpiDef& kpi);

// Same normalization for a raw column sampled outside a table (the control
// loop samples through a predictor rather than a stored table).
UtilityCurve make_curve(const XAppId& xapp, const ParamId& param, std::vector<double> grid,
                        std::span<const double> raw_values, const KpiDef& kpi);

// Pointwise weighted average of values and thresholds. All curves must share
// xapp, param, grid and delta; weights must be nonnegative and sum to 1.
UtilityCurve combine_kpis(const std::vector<UtilityCurve>& curves,
                          std::span<const double> weights);

}  // namespace cms
