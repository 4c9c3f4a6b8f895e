#include <algorithm>
#include <cmath>
#include <numeric>

#include "classifier_impl.hpp"
#include "sitgrid/rng.hpp"

namespace sitgrid::impl {

namespace {

// Softmax cross-entropy with L2 on the weights (bias unregularized):
// L = -(1/n) sum_i log p_{i,y_i} + (lambda/2) ||W||^2.
double lr_loss_and_grad(const std::vector<double>& x, const std::vector<int>& y, std::size_t n,
                        std::size_t d, int n_classes, double lambda,
                        const std::vector<double>& weights, const std::vector<double>& bias,
                        std::vector<double>* grad_w, std::vector<double>* grad_b) {
  if (grad_w != nullptr) {
    grad_w->assign(weights.size(), 0.0);
    grad_b->assign(bias.size(), 0.0);
  }
  double loss = 0.0;
  std::vector<double> probs(n_classes);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = &x[i * d];
    for (int c = 0; c < n_classes; ++c) {
      double z = bias[c];
      const double* w = &weights[static_cast<std::size_t>(c) * d];
      for (std::size_t j = 0; j < d; ++j) z += w[j] * row[j];
      probs[c] = z;
    }
    softmax_inplace(probs);
    loss += -std::log(std::max(probs[y[i]], 1e-300));
    if (grad_w != nullptr) {
      for (int c = 0; c < n_classes; ++c) {
        const double delta = probs[c] - (y[i] == c ? 1.0 : 0.0);
        double* gw = &(*grad_w)[static_cast<std::size_t>(c) * d];
        for (std::size_t j = 0; j < d; ++j) gw[j] += delta * row[j];
        (*grad_b)[c] += delta;
      }
    }
  }
  loss /= static_cast<double>(n);
  double reg = 0.0;
  for (double w : weights) reg += w * w;
  loss += 0.5 * lambda * reg;
  if (grad_w != nullptr) {
    for (std::size_t k = 0; k < grad_w->size(); ++k) {
      (*grad_w)[k] = (*grad_w)[k] / static_cast<double>(n) + lambda * weights[k];
    }
    for (double& g : *grad_b) g /= static_cast<double>(n);
  }
  return loss;
}

}  // namespace

LrModelParams lr_fit(const Problem& problem, const LrParams& params,
                     std::vector<std::string>& warnings) {
  if (params.lambda < 0.0) throw ConfigError("lr requires lambda >= 0");
  if (params.learning_rate <= 0.0) throw ConfigError("lr requires learning_rate > 0");
  if (params.max_iters < 1) throw ConfigError("lr requires max_iters >= 1");
  if (params.tol < 0.0) throw ConfigError("lr requires tol >= 0");
  const FeatureMatrix& fm = *problem.fm;
  const std::size_t n = problem.n();
  const std::size_t d = problem.d();
  const int C = problem.n_classes;

  LrModelParams model;
  model.scaler = fit_standardizer(fm);
  const std::vector<double> x = standardized_matrix(fm, model.scaler);
  model.weights.assign(static_cast<std::size_t>(C) * d, 0.0);
  model.bias.assign(C, 0.0);

  std::vector<double> grad_w, grad_b;
  double lr = params.learning_rate;
  double loss = lr_loss_and_grad(x, problem.y, n, d, C, params.lambda, model.weights, model.bias,
                                 &grad_w, &grad_b);
  bool converged = false;
  for (int iter = 0; iter < params.max_iters; ++iter) {
    std::vector<double> next_w = model.weights;
    std::vector<double> next_b = model.bias;
    for (std::size_t k = 0; k < next_w.size(); ++k) next_w[k] -= lr * grad_w[k];
    for (int c = 0; c < C; ++c) next_b[c] -= lr * grad_b[c];

    std::vector<double> trial_gw, trial_gb;
    const double next_loss = lr_loss_and_grad(x, problem.y, n, d, C, params.lambda, next_w,
                                              next_b, &trial_gw, &trial_gb);
    if (next_loss > loss) {
      lr *= 0.5;  // overshoot: halve the step and retry from the same point
      if (lr < 1e-15) break;
      continue;
    }
    const double delta = loss - next_loss;
    model.weights = std::move(next_w);
    model.bias = std::move(next_b);
    grad_w = std::move(trial_gw);
    grad_b = std::move(trial_gb);
    loss = next_loss;
    if (delta < params.tol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    warnings.push_back("lr: reached max_iters without meeting tol (loss " +
                       std::to_string(loss) + ")");
  }
  return model;
}

double lr_gradient_check(const Problem& problem, const LrParams& params, std::uint64_t seed) {
  const FeatureMatrix& fm = *problem.fm;
  const std::size_t n = problem.n();
  const std::size_t d = problem.d();
  const int C = problem.n_classes;

  const Standardizer scaler = fit_standardizer(fm);
  const std::vector<double> x = standardized_matrix(fm, scaler);

  // Check at a generic random point, not the (symmetric) origin.
  SplitMix64 rng(derive_stream(seed, {0x6cull}));
  std::vector<double> weights(static_cast<std::size_t>(C) * d);
  std::vector<double> bias(C);
  for (double& w : weights) w = rng.next_uniform(-0.5, 0.5);
  for (double& b : bias) b = rng.next_uniform(-0.5, 0.5);

  std::vector<double> grad_w, grad_b;
  lr_loss_and_grad(x, problem.y, n, d, C, params.lambda, weights, bias, &grad_w, &grad_b);

  const double h = 1e-5;
  double max_err = 0.0;
  auto probe = [&](std::vector<double>& theta, std::size_t k, double analytic) {
    const double saved = theta[k];
    theta[k] = saved + h;
    const double up =
        lr_loss_and_grad(x, problem.y, n, d, C, params.lambda, weights, bias, nullptr, nullptr);
    theta[k] = saved - h;
    const double down =
        lr_loss_and_grad(x, problem.y, n, d, C, params.lambda, weights, bias, nullptr, nullptr);
    theta[k] = saved;
    max_err = std::max(max_err, relative_error(analytic, (up - down) / (2.0 * h)));
  };
  for (std::size_t k = 0; k < weights.size(); ++k) probe(weights, k, grad_w[k]);
  for (std::size_t k = 0; k < bias.size(); ++k) probe(bias, k, grad_b[k]);
  return max_err;
}

SvmModelParams svm_fit(const Problem& problem, const SvmParams& params, std::uint64_t seed) {
  if (params.lambda <= 0.0) throw ConfigError("svm requires lambda > 0");
  if (params.epochs < 1) throw ConfigError("svm requires epochs >= 1");
  const FeatureMatrix& fm = *problem.fm;
  const std::size_t n = problem.n();
  const std::size_t d = problem.d();
  const int C = problem.n_classes;

  SvmModelParams model;
  model.scaler = fit_standardizer(fm);
  const std::vector<double> x = standardized_matrix(fm, model.scaler);
  model.weights.assign(static_cast<std::size_t>(C) * d, 0.0);
  model.bias.assign(C, 0.0);

  // One-vs-rest hinge, 1/(lambda t) step schedule, epoch-wise shuffles.
  std::vector<std::size_t> order(n);
  for (int c = 0; c < C; ++c) {
    double* w = &model.weights[static_cast<std::size_t>(c) * d];
    double& b = model.bias[c];
    long t = 0;
    for (int epoch = 0; epoch < params.epochs; ++epoch) {
      SplitMix64 rng(derive_stream(seed, {0x57ull, static_cast<std::uint64_t>(c),
                                          static_cast<std::uint64_t>(epoch)}));
      std::iota(order.begin(), order.end(), 0);
      shuffle(order, rng);
      for (std::size_t i : order) {
        ++t;
        const double eta = 1.0 / (params.lambda * static_cast<double>(t));
        const double* row = &x[i * d];
        const double target = problem.y[i] == c ? 1.0 : -1.0;
        double margin = b;
        for (std::size_t j = 0; j < d; ++j) margin += w[j] * row[j];
        margin *= target;
        const double shrink = 1.0 - eta * params.lambda;
        if (margin < 1.0) {
          for (std::size_t j = 0; j < d; ++j) w[j] = shrink * w[j] + eta * target * row[j];
          b += eta * target;
        } else {
          for (std::size_t j = 0; j < d; ++j) w[j] *= shrink;
        }
      }
    }
  }
  return model;
}

}  // namespace sitgrid::impl
