#include "cms/normalize.hpp"

#include <cmath>

#include "cms/errors.hpp"

namespace cms {

ZScoreTransform fit_zscore(std::span<const double> samples) {
  if (samples.size() < 2) {
    throw DegenerateDistribution("z-score fit needs at least 2 samples");
  }
  bool constant = true;
  for (double x : samples) {
    if (x != samples.front()) {
      constant = false;
      break;
    }
  }
  if (constant) {
    throw DegenerateDistribution("constant sample column has zero stddev");
  }
  double sum = 0.0;
  for (double x : samples) sum += x;
  const double mean = sum / static_cast<double>(samples.size());
  double ss = 0.0;
  for (double x : samples) {
    const double d = x - mean;
    ss += d * d;
  }
  const double var = ss / static_cast<double>(samples.size());
  const double stddev = std::sqrt(var);
  if (stddev == 0.0) {
    throw DegenerateDistribution("constant sample column has zero stddev");
  }
  return ZScoreTransform{mean, stddev};
}

void UtilityCurve::validate() const {
  if (grid.size() != values.size()) {
    throw GridMismatch("curve grid and values differ in length");
  }
  if (grid.size() < 2) {
    throw GridMismatch("curve needs at least 2 grid points");
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw GridMismatch("curve grid not strictly ascending");
    }
  }
  if (delta != 0 && delta != 1) {
    throw ConfigError("curve delta must be 0 or 1", "normalize");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw ConfigError("curve value not finite", "normalize");
  }
  if (!std::isfinite(threshold)) throw ConfigError("curve threshold not finite", "normalize");
}

std::size_t UtilityCurve::index_of_min() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] < values[best]) best = i;
  }
  return best;
}

UtilityCurve make_curve(const XAppId& xapp, const ParamId& param, std::vector<double> grid,
                        std::span<const double> raw_values, const KpiDef& kpi) {
  const ZScoreTransform z = fit_zscore(raw_values);

  UtilityCurve c;
  c.xapp = xapp;
  c.param = param;
  c.grid = std::move(grid);
  c.values.reserve(raw_values.size());
  for (double v : raw_values) c.values.push_back(z(v));
  c.threshold = z(kpi.qos_threshold);
  c.delta = kpi.delta;
  c.validate();
  return c;
}

UtilityCurve utility_curve(const ConflictTable& table, const KpiDef& kpi) {
  table.validate();
  const std::vector<double> raw = table.kpi_column(kpi.id);
  return make_curve(table.xapp, table.swept, table.swept_values(), raw, kpi);
}

UtilityCurve combine_kpis(const std::vector<UtilityCurve>& curves,
                          std::span<const double> weights) {
  if (curves.empty()) throw GridMismatch("combine_kpis: no curves");
  if (curves.size() != weights.size()) {
    throw WeightError("combine_kpis: curve and weight counts differ");
  }
  double wsum = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw WeightError("combine_kpis: negative weight");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > 1e-9) {
    throw WeightError("combine_kpis: weights must sum to 1");
  }

  const UtilityCurve& first = curves.front();
  for (const UtilityCurve& c : curves) {
    c.validate();
    if (c.xapp != first.xapp || c.param != first.param) {
      throw GridMismatch("combine_kpis: curves describe different xApps or parameters");
    }
    if (c.grid != first.grid) {
      throw GridMismatch("combine_kpis: curves have different grids");
    }
    if (c.delta != first.delta) {
      throw ConfigError("combine_kpis: mixed delta orientations for one xApp", "normalize");
    }
  }

  UtilityCurve out;
  out.xapp = first.xapp;
  out.param = first.param;
  out.grid = first.grid;
  out.delta = first.delta;
  out.values.assign(first.grid.size(), 0.0);
  out.threshold = 0.0;
  for (std::size_t j = 0; j < curves.size(); ++j) {
    const double w = weights[j];
    for (std::size_t i = 0; i < out.values.size(); ++i) {
      out.values[i] += w * curves[j].values[i];
    }
    out.threshold += w * curves[j].threshold;
  }
  out.validate();
  return out;
}

}  // namespace cms
