#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "classifier_impl.hpp"
#include "sitgrid/rng.hpp"

namespace sitgrid::impl {

namespace {

// Weights are (in x out) row-major per layer; hidden activations are ReLU,
// the final layer emits logits.
struct NetState {
  std::vector<std::vector<double>> activations;  // per layer incl. input
  std::vector<double> probs;
};

void validate_params(const DnnParams& params) {
  for (int h : params.hidden_layers) {
    if (h < 1) throw ConfigError("dnn hidden layer sizes must be >= 1");
  }
  if (params.batch_size < 1) throw ConfigError("dnn requires batch_size >= 1");
  if (params.learning_rate <= 0.0) throw ConfigError("dnn requires learning_rate > 0");
  if (params.momentum < 0.0 || params.momentum >= 1.0) {
    throw ConfigError("dnn momentum must be in [0, 1)");
  }
  if (params.validation_fraction < 0.0 || params.validation_fraction >= 1.0) {
    throw ConfigError("dnn validation_fraction must be in [0, 1)");
  }
  if (params.epochs < 1) throw ConfigError("dnn requires epochs >= 1");
  if (params.patience < 1) throw ConfigError("dnn requires patience >= 1");
}

void init_glorot(DnnModelParams& net, SplitMix64& rng) {
  const std::size_t n_layers = net.layer_sizes.size() - 1;
  net.weights.resize(n_layers);
  net.biases.resize(n_layers);
  for (std::size_t l = 0; l < n_layers; ++l) {
    const int fan_in = net.layer_sizes[l];
    const int fan_out = net.layer_sizes[l + 1];
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    net.weights[l].resize(static_cast<std::size_t>(fan_in) * fan_out);
    for (double& w : net.weights[l]) w = rng.next_uniform(-bound, bound);
    net.biases[l].assign(fan_out, 0.0);
  }
}

void forward(const DnnModelParams& net, std::span<const double> input, NetState& state) {
  const std::size_t n_layers = net.weights.size();
  state.activations.resize(n_layers + 1);
  state.activations[0].assign(input.begin(), input.end());
  for (std::size_t l = 0; l < n_layers; ++l) {
    const int in_dim = net.layer_sizes[l];
    const int out_dim = net.layer_sizes[l + 1];
    const std::vector<double>& prev = state.activations[l];
    std::vector<double>& out = state.activations[l + 1];
    out.assign(out_dim, 0.0);
    for (int o = 0; o < out_dim; ++o) out[o] = net.biases[l][o];
    for (int i = 0; i < in_dim; ++i) {
      const double a = prev[i];
      if (a == 0.0) continue;
      const double* w = &net.weights[l][static_cast<std::size_t>(i) * out_dim];
      for (int o = 0; o < out_dim; ++o) out[o] += a * w[o];
    }
    if (l != n_layers - 1) {
      for (double& v : out) v = std::max(v, 0.0);
    }
  }
  state.probs = state.activations[n_layers];
  softmax_inplace(state.probs);
}

/// Accumulates per-sample gradients of the cross-entropy into grads (scaled
/// by `scale`), reusing the forward state. Returns the sample loss.
double backward(const DnnModelParams& net, const NetState& state, int target, double scale,
                std::vector<std::vector<double>>& grad_w,
                std::vector<std::vector<double>>& grad_b) {
  const std::size_t n_layers = net.weights.size();
  std::vector<double> delta = state.probs;
  delta[target] -= 1.0;
  for (std::size_t l = n_layers; l-- > 0;) {
    const int in_dim = net.layer_sizes[l];
    const int out_dim = net.layer_sizes[l + 1];
    const std::vector<double>& prev = state.activations[l];
    for (int o = 0; o < out_dim; ++o) grad_b[l][o] += scale * delta[o];
    for (int i = 0; i < in_dim; ++i) {
      const double a = prev[i];
      if (a != 0.0) {
        double* gw = &grad_w[l][static_cast<std::size_t>(i) * out_dim];
        for (int o = 0; o < out_dim; ++o) gw[o] += scale * a * delta[o];
      }
    }
    if (l > 0) {
      std::vector<double> prev_delta(in_dim, 0.0);
      for (int i = 0; i < in_dim; ++i) {
        if (prev[i] > 0.0) {  // ReLU derivative via the activation sign
          const double* w = &net.weights[l][static_cast<std::size_t>(i) * out_dim];
          double acc = 0.0;
          for (int o = 0; o < out_dim; ++o) acc += w[o] * delta[o];
          prev_delta[i] = acc;
        }
      }
      delta = std::move(prev_delta);
    }
  }
  return -std::log(std::max(state.probs[target], 1e-300));
}

double mean_loss(const DnnModelParams& net, const std::vector<double>& x, std::size_t d,
                 const std::vector<int>& y, const std::vector<std::size_t>& rows) {
  NetState state;
  double loss = 0.0;
  for (std::size_t i : rows) {
    forward(net, std::span<const double>(&x[i * d], d), state);
    loss += -std::log(std::max(state.probs[y[i]], 1e-300));
  }
  return loss / static_cast<double>(rows.size());
}

}  // namespace

DnnModelParams dnn_fit(const Problem& problem, const DnnParams& params, std::uint64_t seed,
                       std::vector<std::string>& warnings) {
  validate_params(params);
  const FeatureMatrix& fm = *problem.fm;
  const std::size_t n = problem.n();
  const std::size_t d = problem.d();
  const int C = problem.n_classes;

  DnnModelParams net;
  net.scaler = fit_standardizer(fm);
  const std::vector<double> x = standardized_matrix(fm, net.scaler);
  net.layer_sizes.push_back(static_cast<int>(d));
  for (int h : params.hidden_layers) net.layer_sizes.push_back(h);
  net.layer_sizes.push_back(C);

  SplitMix64 init_rng(derive_stream(seed, {0xD2ull}));
  init_glorot(net, init_rng);

  // Hold out a validation slice for early stopping when the data can spare it.
  std::vector<std::size_t> all_rows(n);
  std::iota(all_rows.begin(), all_rows.end(), 0);
  SplitMix64 split_rng(derive_stream(seed, {0xD1ull}));
  shuffle(all_rows, split_rng);
  std::size_t n_val = static_cast<std::size_t>(std::floor(params.validation_fraction *
                                                          static_cast<double>(n)));
  if (n - n_val < static_cast<std::size_t>(2 * C)) n_val = 0;
  std::vector<std::size_t> val_rows(all_rows.begin(), all_rows.begin() + n_val);
  std::vector<std::size_t> train_rows(all_rows.begin() + n_val, all_rows.end());

  std::vector<std::vector<double>> grad_w(net.weights.size()), grad_b(net.biases.size());
  std::vector<std::vector<double>> vel_w(net.weights.size()), vel_b(net.biases.size());
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    grad_w[l].assign(net.weights[l].size(), 0.0);
    grad_b[l].assign(net.biases[l].size(), 0.0);
    vel_w[l].assign(net.weights[l].size(), 0.0);
    vel_b[l].assign(net.biases[l].size(), 0.0);
  }

  const bool with_val = !val_rows.empty();
  double best_val_loss = std::numeric_limits<double>::infinity();
  DnnModelParams best = net;
  int stale_epochs = 0;
  bool stopped_early = false;
  NetState state;

  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    SplitMix64 epoch_rng(derive_stream(seed, {0xD3ull, static_cast<std::uint64_t>(epoch)}));
    shuffle(train_rows, epoch_rng);
    for (std::size_t start = 0; start < train_rows.size();
         start += static_cast<std::size_t>(params.batch_size)) {
      const std::size_t stop =
          std::min(train_rows.size(), start + static_cast<std::size_t>(params.batch_size));
      const double scale = 1.0 / static_cast<double>(stop - start);
      for (auto& g : grad_w) std::fill(g.begin(), g.end(), 0.0);
      for (auto& g : grad_b) std::fill(g.begin(), g.end(), 0.0);
      for (std::size_t k = start; k < stop; ++k) {
        const std::size_t i = train_rows[k];
        forward(net, std::span<const double>(&x[i * d], d), state);
        backward(net, state, problem.y[i], scale, grad_w, grad_b);
      }
      for (std::size_t l = 0; l < net.weights.size(); ++l) {
        for (std::size_t k = 0; k < net.weights[l].size(); ++k) {
          vel_w[l][k] = params.momentum * vel_w[l][k] - params.learning_rate * grad_w[l][k];
          net.weights[l][k] += vel_w[l][k];
        }
        for (std::size_t k = 0; k < net.biases[l].size(); ++k) {
          vel_b[l][k] = params.momentum * vel_b[l][k] - params.learning_rate * grad_b[l][k];
          net.biases[l][k] += vel_b[l][k];
        }
      }
    }
    if (with_val) {
      const double val_loss = mean_loss(net, x, d, problem.y, val_rows);
      if (val_loss < best_val_loss - 1e-12) {
        best_val_loss = val_loss;
        best = net;
        stale_epochs = 0;
      } else if (++stale_epochs >= params.patience) {
        stopped_early = true;
        break;
      }
    }
  }
  if (with_val) {
    net.weights = best.weights;
    net.biases = best.biases;
    if (!stopped_early) {
      warnings.push_back("dnn: reached max epochs without early stopping");
    }
  }
  return net;
}

void dnn_probs(const DnnModelParams& model, std::span<const double> standardized_row,
               std::vector<double>& out) {
  NetState state;
  forward(model, standardized_row, state);
  out = state.probs;
}

namespace {

/// Smallest |pre-activation| any hidden unit sees over the rows. The check
/// point must keep this above the finite-difference reach, or a probe walks
/// across a ReLU kink and the comparison measures the kink, not the math.
double min_hidden_preactivation(const DnnModelParams& net, const std::vector<double>& x,
                                std::size_t n, std::size_t d) {
  double min_abs = std::numeric_limits<double>::infinity();
  const std::size_t n_layers = net.weights.size();
  for (std::size_t r = 0; r < n; ++r) {
    std::vector<double> a(x.begin() + r * d, x.begin() + (r + 1) * d);
    for (std::size_t l = 0; l < n_layers; ++l) {
      const int in_dim = net.layer_sizes[l];
      const int out_dim = net.layer_sizes[l + 1];
      std::vector<double> z(net.biases[l]);
      for (int i = 0; i < in_dim; ++i) {
        for (int o = 0; o < out_dim; ++o) z[o] += a[i] * net.weights[l][i * out_dim + o];
      }
      if (l + 1 < n_layers) {
        for (double v : z) min_abs = std::min(min_abs, std::abs(v));
        for (double& v : z) v = std::max(v, 0.0);
      }
      a = std::move(z);
    }
  }
  return min_abs;
}

}  // namespace

double dnn_gradient_check(const Problem& problem, const DnnParams& params, std::uint64_t seed) {
  validate_params(params);
  const FeatureMatrix& fm = *problem.fm;
  const std::size_t n = problem.n();
  const std::size_t d = problem.d();
  const int C = problem.n_classes;

  DnnModelParams net;
  net.scaler = fit_standardizer(fm);
  const std::vector<double> x = standardized_matrix(fm, net.scaler);
  net.layer_sizes.push_back(static_cast<int>(d));
  for (int h : params.hidden_layers) net.layer_sizes.push_back(h);
  net.layer_sizes.push_back(C);
  for (std::uint64_t attempt = 0; attempt < 64; ++attempt) {
    net.weights.clear();
    net.biases.clear();
    SplitMix64 init_rng(derive_stream(seed, {0xD2ull, attempt}));
    init_glorot(net, init_rng);
    if (min_hidden_preactivation(net, x, n, d) > 1e-4) break;
  }

  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0);

  std::vector<std::vector<double>> grad_w(net.weights.size()), grad_b(net.biases.size());
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    grad_w[l].assign(net.weights[l].size(), 0.0);
    grad_b[l].assign(net.biases[l].size(), 0.0);
  }
  NetState state;
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    forward(net, std::span<const double>(&x[i * d], d), state);
    backward(net, state, problem.y[i], scale, grad_w, grad_b);
  }

  const double h = 1e-5;
  double max_err = 0.0;
  auto probe = [&](std::vector<double>& theta, std::size_t k, double analytic) {
    const double saved = theta[k];
    theta[k] = saved + h;
    const double up = mean_loss(net, x, d, problem.y, rows);
    theta[k] = saved - h;
    const double down = mean_loss(net, x, d, problem.y, rows);
    theta[k] = saved;
    max_err = std::max(max_err, relative_error(analytic, (up - down) / (2.0 * h)));
  };
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    for (std::size_t k = 0; k < net.weights[l].size(); ++k) probe(net.weights[l], k, grad_w[l][k]);
    for (std::size_t k = 0; k < net.biases[l].size(); ++k) probe(net.biases[l], k, grad_b[l][k]);
  }
  return max_err;
}

}  // namespace sitgrid::impl
