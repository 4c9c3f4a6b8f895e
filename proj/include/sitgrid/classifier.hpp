#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "sitgrid/features.hpp"

namespace sitgrid {

enum class Family { rf, gnb, lr, svm, dnn };

std::string to_string(Family family);
Family family_from_string(const std::string& s);

/// Forest hyperparameters. mtry = 0 means ceil(sqrt(d)); max_depth = 0 means
/// unlimited.
struct RfParams {
  int n_trees = 100;
  int max_depth = 0;
  int mtry = 0;
  bool bootstrap = true;
};

struct GnbParams {
  double var_smoothing = 1e-9;  // floor factor: eps = var_smoothing * max feature variance
};

/// Multinomial softmax regression trained by full-batch gradient descent with
/// step halving whenever the loss goes up.
struct LrParams {
  double lambda = 1e-4;
  double learning_rate = 0.1;
  int max_iters = 2000;
  double tol = 1e-6;
};

/// One-vs-rest linear hinge loss, epoch-shuffled subgradient descent with the
/// 1/(lambda * t) step schedule.
struct SvmParams {
  double lambda = 1e-4;
  int epochs = 200;
};

/// Feed-forward softmax network. An empty hidden_layers list degenerates to
/// softmax regression.
struct DnnParams {
  std::vector<int> hidden_layers = {64, 32};
  int batch_size = 32;
  double momentum = 0.9;
  double learning_rate = 0.01;
  int epochs = 200;
  double validation_fraction = 0.1;
  int patience = 20;
};

struct ClassifierSpec {
  Family family = Family::rf;
  std::uint64_t seed = 0;
  RfParams rf;
  GnbParams gnb;
  LrParams lr;
  SvmParams svm;
  DnnParams dnn;
};

/// Zero-mean unit-variance column transform fitted on training rows. Applied
/// for the gradient-trained families only; empty vectors mean identity.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> sd;

  bool active() const { return !mean.empty(); }
  double apply(double v, std::size_t j) const { return (v - mean[j]) / sd[j]; }
};

struct TreeNode {
  std::int32_t feature = -1;
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::int32_t leaf_class = -1;
};

using Tree = std::vector<TreeNode>;

struct RfModelParams {
  std::vector<Tree> trees;
};

struct GnbModelParams {
  std::vector<double> priors;     // C
  std::vector<double> means;      // C x d, row-major
  std::vector<double> variances;  // C x d, row-major (smoothed)
};

struct LrModelParams {
  std::vector<double> weights;  // C x d, row-major
  std::vector<double> bias;     // C
  Standardizer scaler;
};

struct SvmModelParams {
  std::vector<double> weights;  // C x d, one hyperplane per class
  std::vector<double> bias;     // C
  Standardizer scaler;
};

struct DnnModelParams {
  std::vector<int> layer_sizes;               // input, hidden..., output
  std::vector<std::vector<double>> weights;   // per layer, (in x out) row-major
  std::vector<std::vector<double>> biases;    // per layer, out
  Standardizer scaler;
};

/// A trained classifier. Immutable after fit; shapes are consistent with the
/// training feature count and class count; serialization round-trips exactly.
struct ClassifierModel {
  Family family = Family::rf;
  std::vector<PostureLabel> classes;       // canonical label order
  std::vector<std::string> feature_names;  // training column order
  std::uint64_t seed = 0;
  ClassifierSpec spec;                     // hyperparameter echo
  std::variant<RfModelParams, GnbModelParams, LrModelParams, SvmModelParams, DnnModelParams>
      params;
  std::vector<std::string> warnings;  // convergence notes; not serialized
};

/// Trains a model. Deterministic for a given (spec, data, seed). Throws
/// DegenerateLabels when fewer than two classes are present, NonFiniteInput
/// on non-finite features; convergence shortfalls land in model.warnings.
ClassifierModel fit(const ClassifierSpec& spec, const FeatureMatrix& fm);

/// Throws FeatureMismatch when the matrix columns differ from training.
std::vector<PostureLabel> predict(const ClassifierModel& model, const FeatureMatrix& fm);

/// Per-row class probabilities in model.classes order; rows sum to 1.
/// RF reports tree-vote fractions, SVM a softmax over margins.
std::vector<std::vector<double>> predict_proba(const ClassifierModel& model,
                                               const FeatureMatrix& fm);

/// Compares the analytic training-loss gradient against central finite
/// differences (h = 1e-5) over every parameter; returns the max relative
/// error. Families lr and dnn only.
double gradient_check(const ClassifierSpec& spec, const FeatureMatrix& fm);

/// Persistence: one JSON document {format_version, family, classes,
/// feature_names, seed, params}; floats as shortest round-trip decimals.
std::string model_to_json_string(const ClassifierModel& model);
ClassifierModel model_from_json_string(const std::string& text);
void save_model(const ClassifierModel& model, const std::filesystem::path& path);
ClassifierModel load_model(const std::filesystem::path& path);

/// Unnormalized per-feature impurity decrease summed over a forest.
std::vector<double> rf_raw_importance(const FeatureMatrix& fm, const RfParams& params,
                                      std::uint64_t seed);

}  // namespace sitgrid
