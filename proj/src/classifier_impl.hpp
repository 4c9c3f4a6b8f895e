#pragma once

#include <span>
#include <vector>

#include "sitgrid/classifier.hpp"
#include "sitgrid/errors.hpp"

namespace sitgrid::impl {

/// Label-encoded training view shared by the family fitters.
struct Problem {
  const FeatureMatrix* fm = nullptr;
  std::vector<int> y;                 // class index per row
  std::vector<PostureLabel> classes;  // canonical label order
  int n_classes = 0;

  std::size_t n() const { return fm->n_rows; }
  std::size_t d() const { return fm->n_cols; }
};

/// Validates the matrix (finite values, >= 2 classes, n >= C) and encodes
/// labels against the canonical label order.
Problem make_problem(const FeatureMatrix& fm);

Standardizer fit_standardizer(const FeatureMatrix& fm);

/// Row-major standardized copy of the matrix.
std::vector<double> standardized_matrix(const FeatureMatrix& fm, const Standardizer& scaler);

void softmax_inplace(std::span<double> scores);
int argmax(std::span<const double> scores);

double relative_error(double a, double b);

RfModelParams rf_fit(const Problem& problem, const RfParams& params, std::uint64_t seed,
                     std::vector<double>* importance_out);
void rf_votes(const RfModelParams& model, std::span<const double> row, int n_classes,
              std::vector<double>& out);

GnbModelParams gnb_fit(const Problem& problem, const GnbParams& params);
void gnb_log_posterior(const GnbModelParams& model, std::span<const double> row,
                       std::vector<double>& out);

LrModelParams lr_fit(const Problem& problem, const LrParams& params,
                     std::vector<std::string>& warnings);
double lr_gradient_check(const Problem& problem, const LrParams& params, std::uint64_t seed);

SvmModelParams svm_fit(const Problem& problem, const SvmParams& params, std::uint64_t seed);

DnnModelParams dnn_fit(const Problem& problem, const DnnParams& params, std::uint64_t seed,
                       std::vector<std::string>& warnings);
double dnn_gradient_check(const Problem& problem, const DnnParams& params, std::uint64_t seed);
void dnn_probs(const DnnModelParams& model, std::span<const double> standardized_row,
               std::vector<double>& out);

}  // namespace sitgrid::impl
