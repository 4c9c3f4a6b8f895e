#include "sitgrid/classifier.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "classifier_impl.hpp"
#include "sitgrid/errors.hpp"
#include "sitgrid/textio.hpp"

namespace sitgrid {

using ordered_json = nlohmann::ordered_json;

std::string to_string(Family family) {
  switch (family) {
    case Family::rf: return "rf";
    case Family::gnb: return "gnb";
    case Family::lr: return "lr";
    case Family::svm: return "svm";
    case Family::dnn: return "dnn";
  }
  return "?";
}

Family family_from_string(const std::string& s) {
  if (s == "rf") return Family::rf;
  if (s == "gnb") return Family::gnb;
  if (s == "lr") return Family::lr;
  if (s == "svm") return Family::svm;
  if (s == "dnn") return Family::dnn;
  throw ParseError("unknown classifier family: '" + s + "'");
}

namespace impl {

Problem make_problem(const FeatureMatrix& fm) {
  for (double v : fm.values) {
    if (!std::isfinite(v)) throw NonFiniteInput("feature matrix contains a non-finite value");
  }
  Problem problem;
  problem.fm = &fm;
  for (PostureLabel label : all_labels()) {
    if (std::find(fm.labels.begin(), fm.labels.end(), label) != fm.labels.end()) {
      problem.classes.push_back(label);
    }
  }
  problem.n_classes = static_cast<int>(problem.classes.size());
  if (problem.n_classes < 2) {
    throw DegenerateLabels("training data must contain at least two classes");
  }
  if (fm.n_rows < problem.classes.size()) {
    throw TooFewRows("need at least as many rows as classes");
  }
  problem.y.reserve(fm.n_rows);
  for (PostureLabel label : fm.labels) {
    const auto it = std::find(problem.classes.begin(), problem.classes.end(), label);
    problem.y.push_back(static_cast<int>(it - problem.classes.begin()));
  }
  return problem;
}

Standardizer fit_standardizer(const FeatureMatrix& fm) {
  Standardizer scaler;
  scaler.mean.assign(fm.n_cols, 0.0);
  scaler.sd.assign(fm.n_cols, 0.0);
  for (std::size_t i = 0; i < fm.n_rows; ++i) {
    const auto row = fm.row(i);
    for (std::size_t j = 0; j < fm.n_cols; ++j) scaler.mean[j] += row[j];
  }
  for (std::size_t j = 0; j < fm.n_cols; ++j) scaler.mean[j] /= static_cast<double>(fm.n_rows);
  for (std::size_t i = 0; i < fm.n_rows; ++i) {
    const auto row = fm.row(i);
    for (std::size_t j = 0; j < fm.n_cols; ++j) {
      const double d = row[j] - scaler.mean[j];
      scaler.sd[j] += d * d;
    }
  }
  for (std::size_t j = 0; j < fm.n_cols; ++j) {
    scaler.sd[j] = std::sqrt(scaler.sd[j] / static_cast<double>(fm.n_rows));
    if (scaler.sd[j] < 1e-12) scaler.sd[j] = 1.0;
  }
  return scaler;
}

std::vector<double> standardized_matrix(const FeatureMatrix& fm, const Standardizer& scaler) {
  std::vector<double> x(fm.values);
  if (!scaler.active()) return x;
  for (std::size_t i = 0; i < fm.n_rows; ++i) {
    for (std::size_t j = 0; j < fm.n_cols; ++j) {
      x[i * fm.n_cols + j] = scaler.apply(x[i * fm.n_cols + j], j);
    }
  }
  return x;
}

void softmax_inplace(std::span<double> scores) {
  double max_score = scores[0];
  for (double s : scores) max_score = std::max(max_score, s);
  double total = 0.0;
  for (double& s : scores) {
    s = std::exp(s - max_score);
    total += s;
  }
  for (double& s : scores) s /= total;
}

int argmax(std::span<const double> scores) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(scores.size()); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return best;
}

double relative_error(double a, double b) {
  return std::abs(a - b) / std::max(1e-8, std::abs(a) + std::abs(b));
}

}  // namespace impl

ClassifierModel fit(const ClassifierSpec& spec, const FeatureMatrix& fm) {
  const impl::Problem problem = impl::make_problem(fm);
  ClassifierModel model;
  model.family = spec.family;
  model.classes = problem.classes;
  model.feature_names = fm.names;
  model.seed = spec.seed;
  model.spec = spec;
  switch (spec.family) {
    case Family::rf:
      model.params = impl::rf_fit(problem, spec.rf, spec.seed, nullptr);
      break;
    case Family::gnb:
      model.params = impl::gnb_fit(problem, spec.gnb);
      break;
    case Family::lr:
      model.params = impl::lr_fit(problem, spec.lr, model.warnings);
      break;
    case Family::svm:
      model.params = impl::svm_fit(problem, spec.svm, spec.seed);
      break;
    case Family::dnn:
      model.params = impl::dnn_fit(problem, spec.dnn, spec.seed, model.warnings);
      break;
  }
  return model;
}

namespace {

void check_features(const ClassifierModel& model, const FeatureMatrix& fm) {
  if (fm.names != model.feature_names) {
    throw FeatureMismatch("feature columns differ from the model's training columns");
  }
}

std::vector<double> row_proba(const ClassifierModel& model, std::span<const double> row,
                              std::vector<double>& scratch) {
  const int n_classes = static_cast<int>(model.classes.size());
  std::vector<double> probs(n_classes, 0.0);
  switch (model.family) {
    case Family::rf: {
      impl::rf_votes(std::get<RfModelParams>(model.params), row, n_classes, probs);
      break;
    }
    case Family::gnb: {
      impl::gnb_log_posterior(std::get<GnbModelParams>(model.params), row, probs);
      impl::softmax_inplace(probs);
      break;
    }
    case Family::lr: {
      const auto& p = std::get<LrModelParams>(model.params);
      scratch.assign(row.begin(), row.end());
      for (std::size_t j = 0; j < scratch.size(); ++j) scratch[j] = p.scaler.apply(scratch[j], j);
      const std::size_t d = scratch.size();
      for (int c = 0; c < n_classes; ++c) {
        double z = p.bias[c];
        for (std::size_t j = 0; j < d; ++j) z += p.weights[c * d + j] * scratch[j];
        probs[c] = z;
      }
      impl::softmax_inplace(probs);
      break;
    }
    case Family::svm: {
      const auto& p = std::get<SvmModelParams>(model.params);
      scratch.assign(row.begin(), row.end());
      for (std::size_t j = 0; j < scratch.size(); ++j) scratch[j] = p.scaler.apply(scratch[j], j);
      const std::size_t d = scratch.size();
      for (int c = 0; c < n_classes; ++c) {
        double z = p.bias[c];
        for (std::size_t j = 0; j < d; ++j) z += p.weights[c * d + j] * scratch[j];
        probs[c] = z;
      }
      impl::softmax_inplace(probs);  // calibrationless squash of margins
      break;
    }
    case Family::dnn: {
      const auto& p = std::get<DnnModelParams>(model.params);
      scratch.assign(row.begin(), row.end());
      for (std::size_t j = 0; j < scratch.size(); ++j) scratch[j] = p.scaler.apply(scratch[j], j);
      impl::dnn_probs(p, scratch, probs);
      break;
    }
  }
  return probs;
}

}  // namespace

std::vector<PostureLabel> predict(const ClassifierModel& model, const FeatureMatrix& fm) {
  check_features(model, fm);
  std::vector<PostureLabel> out;
  out.reserve(fm.n_rows);
  std::vector<double> scratch;
  for (std::size_t i = 0; i < fm.n_rows; ++i) {
    const std::vector<double> probs = row_proba(model, fm.row(i), scratch);
    out.push_back(model.classes[impl::argmax(probs)]);
  }
  return out;
}

std::vector<std::vector<double>> predict_proba(const ClassifierModel& model,
                                               const FeatureMatrix& fm) {
  check_features(model, fm);
  std::vector<std::vector<double>> out;
  out.reserve(fm.n_rows);
  std::vector<double> scratch;
  for (std::size_t i = 0; i < fm.n_rows; ++i) {
    out.push_back(row_proba(model, fm.row(i), scratch));
  }
  return out;
}

double gradient_check(const ClassifierSpec& spec, const FeatureMatrix& fm) {
  const impl::Problem problem = impl::make_problem(fm);
  if (spec.family == Family::lr) return impl::lr_gradient_check(problem, spec.lr, spec.seed);
  if (spec.family == Family::dnn) return impl::dnn_gradient_check(problem, spec.dnn, spec.seed);
  throw SpecError("gradient_check supports the lr and dnn families only");
}

std::vector<double> rf_raw_importance(const FeatureMatrix& fm, const RfParams& params,
                                      std::uint64_t seed) {
  const impl::Problem problem = impl::make_problem(fm);
  std::vector<double> importance(fm.n_cols, 0.0);
  impl::rf_fit(problem, params, seed, &importance);
  return importance;
}

// --- persistence ---

namespace {

constexpr int kFormatVersion = 1;

ordered_json scaler_to_json(const Standardizer& scaler) {
  return ordered_json{{"mean", scaler.mean}, {"sd", scaler.sd}};
}

Standardizer scaler_from_json(const ordered_json& j) {
  Standardizer scaler;
  scaler.mean = j.at("mean").get<std::vector<double>>();
  scaler.sd = j.at("sd").get<std::vector<double>>();
  return scaler;
}

ordered_json params_to_json(const ClassifierModel& model) {
  ordered_json j;
  switch (model.family) {
    case Family::rf: {
      const auto& p = std::get<RfModelParams>(model.params);
      j["n_trees"] = model.spec.rf.n_trees;
      j["max_depth"] = model.spec.rf.max_depth;
      j["mtry"] = model.spec.rf.mtry;
      j["bootstrap"] = model.spec.rf.bootstrap;
      ordered_json trees = ordered_json::array();
      for (const Tree& tree : p.trees) {
        ordered_json nodes = ordered_json::array();
        for (const TreeNode& n : tree) {
          nodes.push_back({n.feature, n.threshold, n.left, n.right, n.leaf_class});
        }
        trees.push_back(std::move(nodes));
      }
      j["trees"] = std::move(trees);
      break;
    }
    case Family::gnb: {
      const auto& p = std::get<GnbModelParams>(model.params);
      j["var_smoothing"] = model.spec.gnb.var_smoothing;
      j["priors"] = p.priors;
      j["means"] = p.means;
      j["variances"] = p.variances;
      break;
    }
    case Family::lr: {
      const auto& p = std::get<LrModelParams>(model.params);
      j["lambda"] = model.spec.lr.lambda;
      j["learning_rate"] = model.spec.lr.learning_rate;
      j["max_iters"] = model.spec.lr.max_iters;
      j["tol"] = model.spec.lr.tol;
      j["weights"] = p.weights;
      j["bias"] = p.bias;
      j["scaler"] = scaler_to_json(p.scaler);
      break;
    }
    case Family::svm: {
      const auto& p = std::get<SvmModelParams>(model.params);
      j["lambda"] = model.spec.svm.lambda;
      j["epochs"] = model.spec.svm.epochs;
      j["weights"] = p.weights;
      j["bias"] = p.bias;
      j["scaler"] = scaler_to_json(p.scaler);
      break;
    }
    case Family::dnn: {
      const auto& p = std::get<DnnModelParams>(model.params);
      j["hidden_layers"] = model.spec.dnn.hidden_layers;
      j["batch_size"] = model.spec.dnn.batch_size;
      j["momentum"] = model.spec.dnn.momentum;
      j["learning_rate"] = model.spec.dnn.learning_rate;
      j["epochs"] = model.spec.dnn.epochs;
      j["validation_fraction"] = model.spec.dnn.validation_fraction;
      j["patience"] = model.spec.dnn.patience;
      j["layer_sizes"] = p.layer_sizes;
      j["weights"] = p.weights;
      j["biases"] = p.biases;
      j["scaler"] = scaler_to_json(p.scaler);
      break;
    }
  }
  return j;
}

void params_from_json(const ordered_json& j, ClassifierModel& model) {
  switch (model.family) {
    case Family::rf: {
      RfModelParams p;
      model.spec.rf.n_trees = j.at("n_trees").get<int>();
      model.spec.rf.max_depth = j.at("max_depth").get<int>();
      model.spec.rf.mtry = j.at("mtry").get<int>();
      model.spec.rf.bootstrap = j.at("bootstrap").get<bool>();
      for (const auto& nodes : j.at("trees")) {
        Tree tree;
        for (const auto& n : nodes) {
          if (!n.is_array() || n.size() != 5) throw CorruptModel("malformed tree node");
          tree.push_back({n[0].get<std::int32_t>(), n[1].get<double>(), n[2].get<std::int32_t>(),
                          n[3].get<std::int32_t>(), n[4].get<std::int32_t>()});
        }
        p.trees.push_back(std::move(tree));
      }
      model.params = std::move(p);
      break;
    }
    case Family::gnb: {
      GnbModelParams p;
      model.spec.gnb.var_smoothing = j.at("var_smoothing").get<double>();
      p.priors = j.at("priors").get<std::vector<double>>();
      p.means = j.at("means").get<std::vector<double>>();
      p.variances = j.at("variances").get<std::vector<double>>();
      const std::size_t expected = model.classes.size() * model.feature_names.size();
      if (p.priors.size() != model.classes.size() || p.means.size() != expected ||
          p.variances.size() != expected) {
        throw CorruptModel("gnb parameter shapes are inconsistent");
      }
      model.params = std::move(p);
      break;
    }
    case Family::lr: {
      LrModelParams p;
      model.spec.lr.lambda = j.at("lambda").get<double>();
      model.spec.lr.learning_rate = j.at("learning_rate").get<double>();
      model.spec.lr.max_iters = j.at("max_iters").get<int>();
      model.spec.lr.tol = j.at("tol").get<double>();
      p.weights = j.at("weights").get<std::vector<double>>();
      p.bias = j.at("bias").get<std::vector<double>>();
      p.scaler = scaler_from_json(j.at("scaler"));
      if (p.weights.size() != model.classes.size() * model.feature_names.size() ||
          p.bias.size() != model.classes.size()) {
        throw CorruptModel("lr parameter shapes are inconsistent");
      }
      model.params = std::move(p);
      break;
    }
    case Family::svm: {
      SvmModelParams p;
      model.spec.svm.lambda = j.at("lambda").get<double>();
      model.spec.svm.epochs = j.at("epochs").get<int>();
      p.weights = j.at("weights").get<std::vector<double>>();
      p.bias = j.at("bias").get<std::vector<double>>();
      p.scaler = scaler_from_json(j.at("scaler"));
      if (p.weights.size() != model.classes.size() * model.feature_names.size() ||
          p.bias.size() != model.classes.size()) {
        throw CorruptModel("svm parameter shapes are inconsistent");
      }
      model.params = std::move(p);
      break;
    }
    case Family::dnn: {
      DnnModelParams p;
      model.spec.dnn.hidden_layers = j.at("hidden_layers").get<std::vector<int>>();
      model.spec.dnn.batch_size = j.at("batch_size").get<int>();
      model.spec.dnn.momentum = j.at("momentum").get<double>();
      model.spec.dnn.learning_rate = j.at("learning_rate").get<double>();
      model.spec.dnn.epochs = j.at("epochs").get<int>();
      model.spec.dnn.validation_fraction = j.at("validation_fraction").get<double>();
      model.spec.dnn.patience = j.at("patience").get<int>();
      p.layer_sizes = j.at("layer_sizes").get<std::vector<int>>();
      p.weights = j.at("weights").get<std::vector<std::vector<double>>>();
      p.biases = j.at("biases").get<std::vector<std::vector<double>>>();
      p.scaler = scaler_from_json(j.at("scaler"));
      if (p.layer_sizes.size() < 2 || p.weights.size() != p.layer_sizes.size() - 1 ||
          p.biases.size() != p.weights.size()) {
        throw CorruptModel("dnn parameter shapes are inconsistent");
      }
      model.params = std::move(p);
      break;
    }
  }
}

}  // namespace

std::string model_to_json_string(const ClassifierModel& model) {
  ordered_json j;
  j["format_version"] = kFormatVersion;
  j["family"] = to_string(model.family);
  ordered_json classes = ordered_json::array();
  for (PostureLabel label : model.classes) classes.push_back(to_string(label));
  j["classes"] = std::move(classes);
  j["feature_names"] = model.feature_names;
  j["seed"] = model.seed;
  j["params"] = params_to_json(model);
  return j.dump(2) + "\n";
}

ClassifierModel model_from_json_string(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw CorruptModel(std::string("model JSON does not parse: ") + e.what());
  }
  try {
    const int version = j.at("format_version").get<int>();
    if (version != kFormatVersion) {
      throw FormatVersionMismatch("model format_version " + std::to_string(version) +
                                  " is not supported (expected " +
                                  std::to_string(kFormatVersion) + ")");
    }
    ClassifierModel model;
    model.family = family_from_string(j.at("family").get<std::string>());
    model.spec.family = model.family;
    for (const auto& s : j.at("classes")) {
      model.classes.push_back(posture_from_string(s.get<std::string>()));
    }
    if (model.classes.empty()) throw CorruptModel("model has no classes");
    model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    model.seed = j.at("seed").get<std::uint64_t>();
    model.spec.seed = model.seed;
    params_from_json(j.at("params"), model);
    return model;
  } catch (const FormatVersionMismatch&) {
    throw;
  } catch (const CorruptModel&) {
    throw;
  } catch (const std::exception& e) {
    throw CorruptModel(std::string("model JSON is malformed: ") + e.what());
  }
}

void save_model(const ClassifierModel& model, const std::filesystem::path& path) {
  write_text_file(path.string(), model_to_json_string(model));
}

ClassifierModel load_model(const std::filesystem::path& path) {
  return model_from_json_string(read_text_file(path.string()));
}

}  // namespace sitgrid
