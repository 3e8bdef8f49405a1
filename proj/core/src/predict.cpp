#include "cms/predict.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "cms/errors.hpp"

namespace cms {

double AnalyticPredictor::eval(const KpiId& kpi, const Assignment& assignment) const {
  auto it = models_.find(kpi);
  if (it == models_.end()) throw UnknownKpi("no analytic model for " + kpi.str());
  return eval_kpi(it->second, assignment);
}

TablePredictor::TablePredictor(std::vector<ConflictTable> tables) : tables_(std::move(tables)) {
  for (std::size_t i = 0; i < tables_.size(); ++i) {
    tables_[i].validate();
    for (const KpiId& k : tables_[i].kpi_ids) {
      index_.emplace(k, i);  // first table covering a KPI wins
    }
  }
}

bool TablePredictor::covers(const KpiId& kpi) const { return index_.count(kpi) > 0; }

double TablePredictor::eval(const KpiId& kpi, const Assignment& assignment) const {
  auto it = index_.find(kpi);
  if (it == index_.end()) throw UnknownKpi("no table covers KPI " + kpi.str());
  const ConflictTable& t = tables_[it->second];

  auto sv = assignment.find(t.swept);
  if (sv == assignment.end()) {
    throw MissingParam("assignment lacks swept parameter " + t.swept.str());
  }
  for (const ParamId& p : t.fixed_params) {
    auto pv = assignment.find(p);
    if (pv == assignment.end()) throw MissingParam("assignment lacks parameter " + p.str());
    const double fixed = t.rows.front().params.at(p);
    const double tol = 1e-9 * std::max(1.0, std::abs(fixed));
    if (std::abs(pv->second - fixed) > tol) {
      throw ConfigError("table for " + kpi.str() + " was sampled at " + p.str() + "=" +
                            std::to_string(fixed) + ", queried at " + std::to_string(pv->second),
                        "predict");
    }
  }

  const double x = sv->second;
  const std::size_t n = t.rows.size();
  if (x <= t.swept_value(0)) return t.rows.front().kpis.at(kpi);
  if (x >= t.swept_value(n - 1)) return t.rows.back().kpis.at(kpi);
  std::size_t hi = 1;
  while (t.swept_value(hi) < x) ++hi;
  const double x0 = t.swept_value(hi - 1), x1 = t.swept_value(hi);
  const double y0 = t.rows[hi - 1].kpis.at(kpi), y1 = t.rows[hi].kpis.at(kpi);
  const double a = (x - x0) / (x1 - x0);
  return y0 + a * (y1 - y0);
}

std::vector<std::vector<int>> PolyRegressor::monomial_basis(std::size_t n_inputs, int degree) {
  std::vector<std::vector<int>> basis;
  std::vector<int> cur(n_inputs, 0);
  // enumerate exponent tuples of total degree d = 0..degree, lexicographic
  // within each degree
  auto rec = [&](auto&& self, std::size_t pos, int remaining) -> void {
    if (pos == n_inputs) {
      if (remaining == 0) basis.push_back(cur);
      return;
    }
    for (int e = remaining; e >= 0; --e) {
      cur[pos] = e;
      self(self, pos + 1, remaining - e);
    }
    cur[pos] = 0;
  };
  for (int d = 0; d <= degree; ++d) rec(rec, 0, d);
  return basis;
}

namespace {

double eval_monomial(const std::vector<int>& exps, const std::vector<double>& u) {
  double v = 1.0;
  for (std::size_t j = 0; j < exps.size(); ++j) {
    for (int e = 0; e < exps[j]; ++e) v *= u[j];
  }
  return v;
}

}  // namespace

PolyRegressor::PolyRegressor(int degree, std::vector<ParamId> inputs, KpiId target,
                             std::vector<double> coefficients, std::vector<double> input_center,
                             std::vector<double> input_halfwidth,
                             ZScoreTransform target_transform)
    : degree_(degree),
      inputs_(std::move(inputs)),
      target_(std::move(target)),
      coefficients_(std::move(coefficients)),
      input_center_(std::move(input_center)),
      input_halfwidth_(std::move(input_halfwidth)),
      target_transform_(target_transform) {
  if (coefficients_.size() != monomial_basis(inputs_.size(), degree_).size()) {
    throw ConfigError("coefficient count does not match basis size", "predict");
  }
}

PolyRegressor PolyRegressor::fit(const ConflictTable& table, const KpiId& target, int degree) {
  return fit(table, target, degree, {table.swept});
}

PolyRegressor PolyRegressor::fit(const ConflictTable& table, const KpiId& target, int degree,
                                 std::vector<ParamId> inputs) {
  if (degree < 1 || degree > 6) {
    throw ConfigError("degree must lie in [1, 6]", "predict");
  }
  table.validate();
  if (inputs.empty()) throw ConfigError("regressor needs at least one input", "predict");

  const std::vector<double> raw = table.kpi_column(target);
  const ZScoreTransform zt = fit_zscore(raw);

  const auto basis = monomial_basis(inputs.size(), degree);
  const std::size_t m = table.size();
  if (m < basis.size()) {
    throw ConfigError("fewer rows than basis monomials", "predict");
  }

  // Affine-scale each input to [-1,1] for a well-conditioned Vandermonde.
  std::vector<double> center(inputs.size()), halfwidth(inputs.size());
  for (std::size_t j = 0; j < inputs.size(); ++j) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& row : table.rows) {
      auto it = row.params.find(inputs[j]);
      if (it == row.params.end()) {
        throw MissingParam("table lacks input parameter " + inputs[j].str());
      }
      lo = std::min(lo, it->second);
      hi = std::max(hi, it->second);
    }
    center[j] = 0.5 * (lo + hi);
    halfwidth[j] = 0.5 * (hi - lo);  // zero for a constant input
  }

  Eigen::MatrixXd A(m, basis.size());
  Eigen::VectorXd y(m);
  std::vector<double> u(inputs.size());
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t j = 0; j < inputs.size(); ++j) {
      const double x = table.rows[r].params.at(inputs[j]);
      u[j] = halfwidth[j] > 0.0 ? (x - center[j]) / halfwidth[j] : 0.0;
    }
    for (std::size_t b = 0; b < basis.size(); ++b) {
      A(r, b) = eval_monomial(basis[b], u);
    }
    y(r) = zt(raw[r]);
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  qr.setThreshold(1e-10);
  if (static_cast<std::size_t>(qr.rank()) < basis.size()) {
    throw RankDeficient("design matrix rank " + std::to_string(qr.rank()) + " < basis size " +
                        std::to_string(basis.size()));
  }
  const Eigen::VectorXd c = qr.solve(y);

  std::vector<double> coeffs(c.data(), c.data() + c.size());
  return PolyRegressor(degree, std::move(inputs), target, std::move(coeffs), std::move(center),
                       std::move(halfwidth), zt);
}

double PolyRegressor::predict(const Assignment& assignment) const {
  std::vector<double> u(inputs_.size());
  for (std::size_t j = 0; j < inputs_.size(); ++j) {
    auto it = assignment.find(inputs_[j]);
    if (it == assignment.end()) {
      throw MissingParam("assignment lacks input parameter " + inputs_[j].str());
    }
    u[j] = input_halfwidth_[j] > 0.0 ? (it->second - input_center_[j]) / input_halfwidth_[j] : 0.0;
  }
  const auto basis = monomial_basis(inputs_.size(), degree_);
  double v = 0.0;
  for (std::size_t b = 0; b < basis.size(); ++b) {
    v += coefficients_[b] * eval_monomial(basis[b], u);
  }
  return v;
}

FitMetrics PolyRegressor::evaluate(const ConflictTable& table) const {
  const std::vector<double> raw = table.kpi_column(target_);
  const std::size_t n = raw.size();

  std::vector<double> target_z(n), resid(n);
  for (std::size_t i = 0; i < n; ++i) {
    target_z[i] = target_transform_(raw[i]);
    resid[i] = target_z[i] - predict(table.rows[i].params);
  }

  auto mean_of = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  auto var_of = [&](const std::vector<double>& v) {
    const double mu = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - mu) * (x - mu);
    return s / static_cast<double>(v.size());
  };

  const double target_mean = mean_of(target_z);
  double ss_res = 0.0, ss_tot = 0.0, mse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ss_res += resid[i] * resid[i];
    ss_tot += (target_z[i] - target_mean) * (target_z[i] - target_mean);
    mse += resid[i] * resid[i];
  }
  mse /= static_cast<double>(n);

  FitMetrics mtr;
  const double var_t = var_of(target_z);
  mtr.evs = var_t > 0.0 ? 1.0 - var_of(resid) / var_t : 0.0;
  mtr.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;
  mtr.mse = mse;
  return mtr;
}

double RegressorPredictor::eval(const KpiId& kpi, const Assignment& assignment) const {
  auto it = regressors_.find(kpi);
  if (it == regressors_.end()) throw UnknownKpi("no regressor for " + kpi.str());
  return it->second.target_transform().inverse(it->second.predict(assignment));
}

}  // namespace cms
