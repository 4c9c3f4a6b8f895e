#include <algorithm>
#include <cmath>
#include <numbers>

#include "classifier_impl.hpp"

namespace sitgrid::impl {

GnbModelParams gnb_fit(const Problem& problem, const GnbParams& params) {
  if (params.var_smoothing < 0.0) throw ConfigError("gnb requires var_smoothing >= 0");
  const FeatureMatrix& fm = *problem.fm;
  const std::size_t d = fm.n_cols;
  const int C = problem.n_classes;

  GnbModelParams model;
  model.priors.assign(C, 0.0);
  model.means.assign(C * d, 0.0);
  model.variances.assign(C * d, 0.0);

  std::vector<int> class_count(C, 0);
  for (std::size_t i = 0; i < fm.n_rows; ++i) {
    const int c = problem.y[i];
    ++class_count[c];
    const auto row = fm.row(i);
    for (std::size_t j = 0; j < d; ++j) model.means[c * d + j] += row[j];
  }
  for (int c = 0; c < C; ++c) {
    model.priors[c] = static_cast<double>(class_count[c]) / static_cast<double>(fm.n_rows);
    for (std::size_t j = 0; j < d; ++j) model.means[c * d + j] /= class_count[c];
  }
  for (std::size_t i = 0; i < fm.n_rows; ++i) {
    const int c = problem.y[i];
    const auto row = fm.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      const double delta = row[j] - model.means[c * d + j];
      model.variances[c * d + j] += delta * delta;
    }
  }
  for (int c = 0; c < C; ++c) {
    for (std::size_t j = 0; j < d; ++j) model.variances[c * d + j] /= class_count[c];
  }

  // Variance floor: var_smoothing times the largest overall feature variance.
  double max_var = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < fm.n_rows; ++i) mean += fm.at(i, j);
    mean /= static_cast<double>(fm.n_rows);
    double var = 0.0;
    for (std::size_t i = 0; i < fm.n_rows; ++i) {
      const double delta = fm.at(i, j) - mean;
      var += delta * delta;
    }
    var /= static_cast<double>(fm.n_rows);
    max_var = std::max(max_var, var);
  }
  const double epsilon = params.var_smoothing * max_var;
  for (double& v : model.variances) {
    v += epsilon;
    if (v <= 0.0) v = 1e-18;  // all-constant degenerate data
  }
  return model;
}

void gnb_log_posterior(const GnbModelParams& model, std::span<const double> row,
                       std::vector<double>& out) {
  const int C = static_cast<int>(model.priors.size());
  const std::size_t d = row.size();
  out.assign(C, 0.0);
  for (int c = 0; c < C; ++c) {
    double lp = std::log(model.priors[c]);
    for (std::size_t j = 0; j < d; ++j) {
      const double var = model.variances[c * d + j];
      const double delta = row[j] - model.means[c * d + j];
      lp += -0.5 * std::log(2.0 * std::numbers::pi * var) - delta * delta / (2.0 * var);
    }
    out[c] = lp;
  }
}

}  // namespace sitgrid::impl
