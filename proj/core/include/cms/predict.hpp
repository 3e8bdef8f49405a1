#pragma once

#include <map>
#include <memory>
#include <vector>

#include "cms/dataset.hpp"
#include "cms/normalize.hpp"

namespace cms {

// Raw-KPI oracle shared by the mitigation loop: analytic model, interpolated
// conflict table, or fitted regressor, used interchangeably.
class KpiPredictor {
 public:
  virtual ~KpiPredictor() = default;
  // Raw KPI units. Throws MissingParam when the assignment is incomplete.
  virtual double eval(const KpiId& kpi, const Assignment& assignment) const = 0;
  virtual bool covers(const KpiId& kpi) const = 0;
};

class AnalyticPredictor final : public KpiPredictor {
 public:
  explicit AnalyticPredictor(std::map<KpiId, GaussianKpiModel> models)
      : models_(std::move(models)) {}
  double eval(const KpiId& kpi, const Assignment& assignment) const override;
  bool covers(const KpiId& kpi) const override { return models_.count(kpi) > 0; }

 private:
  std::map<KpiId, GaussianKpiModel> models_;
};

// Linear interpolation along each table's swept column, clamped at the ends.
// Non-swept parameters of the query must match the table's fixed values.
class TablePredictor final : public KpiPredictor {
 public:
  explicit TablePredictor(std::vector<ConflictTable> tables);
  double eval(const KpiId& kpi, const Assignment& assignment) const override;
  bool covers(const KpiId& kpi) const override;

 private:
  std::vector<ConflictTable> tables_;
  std::map<KpiId, std::size_t> index_;
};

struct FitMetrics {
  double evs = 0.0;
  double r2 = 0.0;
  double mse = 0.0;  // squared z-units
};

// Least-squares polynomial in the table's swept parameter (or explicitly
// chosen inputs), fitted on the z-score-normalized KPI column. Predictions
// are in z-units of the stored target transform.
class PolyRegressor {
 public:
  // Inputs default to the swept parameter of the table.
  static PolyRegressor fit(const ConflictTable& table, const KpiId& target, int degree);
  static PolyRegressor fit(const ConflictTable& table, const KpiId& target, int degree,
                           std::vector<ParamId> inputs);

  // For tests: explicit construction from fields.
  PolyRegressor(int degree, std::vector<ParamId> inputs, KpiId target,
                std::vector<double> coefficients, std::vector<double> input_center,
                std::vector<double> input_halfwidth, ZScoreTransform target_transform);

  double predict(const Assignment& assignment) const;  // z-units
  FitMetrics evaluate(const ConflictTable& table) const;

  int degree() const { return degree_; }
  const std::vector<ParamId>& inputs() const { return inputs_; }
  const KpiId& target() const { return target_; }
  const std::vector<double>& coefficients() const { return coefficients_; }
  const ZScoreTransform& target_transform() const { return target_transform_; }
  std::size_t basis_size() const { return coefficients_.size(); }

  // Monomial exponent tuples for (inputs, degree), graded-lexicographic.
  static std::vector<std::vector<int>> monomial_basis(std::size_t n_inputs, int degree);

 private:
  int degree_;
  std::vector<ParamId> inputs_;
  KpiId target_;
  std::vector<double> coefficients_;      // one per basis monomial
  std::vector<double> input_center_;      // per-input affine scaling to [-1,1]
  std::vector<double> input_halfwidth_;
  ZScoreTransform target_transform_;
};

// Adapts per-KPI regressors to the raw-unit KpiPredictor interface.
class RegressorPredictor final : public KpiPredictor {
 public:
  explicit RegressorPredictor(std::map<KpiId, PolyRegressor> regressors)
      : regressors_(std::move(regressors)) {}
  double eval(const KpiId& kpi, const Assignment& assignment) const override;
  bool covers(const KpiId& kpi) const override { return regressors_.count(kpi) > 0; }

 private:
  std::map<KpiId, PolyRegressor> regressors_;
};

}  // namespace cms
