// sitgrid: synthetic chair data, preprocessing, feature engineering, five
// classifier families, and a KFold experiment runner behind one binary.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sitgrid/errors.hpp"
#include "sitgrid/experiment.hpp"
#include "sitgrid/textio.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

json parse_json_file(const std::string& path) {
  try {
    return json::parse(sitgrid::read_text_file(path));
  } catch (const json::exception& e) {
    throw sitgrid::ConfigError(path + ": " + e.what());
  }
}

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    const std::size_t pos = csv.find(',', start);
    if (pos == std::string::npos) {
      if (start < csv.size()) out.push_back(csv.substr(start));
      break;
    }
    if (pos > start) out.push_back(csv.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

int cmd_synth(const std::string& variant_name, std::uint64_t seed, bool seed_given,
              const std::string& config_path, const std::string& out_path) {
  const sitgrid::Variant variant = sitgrid::variant_from_string(variant_name);
  sitgrid::GeneratorConfig cfg = variant == sitgrid::Variant::controlled
                                     ? sitgrid::GeneratorConfig::controlled_defaults(seed)
                                     : sitgrid::GeneratorConfig::realistic_defaults(seed);
  if (!config_path.empty()) {
    json j = parse_json_file(config_path);
    if (j.contains("variant") &&
        sitgrid::variant_from_string(j.at("variant").get<std::string>()) != variant) {
      throw sitgrid::ConfigError("config variant contradicts --variant");
    }
    j.erase("variant");
    cfg = sitgrid::generator_config_from_json(j, variant, seed);
    if (seed_given) cfg.seed = seed;  // an explicit flag beats the config file
  }
  const sitgrid::Dataset ds = variant == sitgrid::Variant::controlled
                                  ? sitgrid::generate_controlled(cfg)
                                  : sitgrid::generate_realistic(cfg);
  sitgrid::save_dataset(ds, out_path);
  std::cout << "wrote " << ds.records.size() << " records to " << out_path << "\n";
  return 0;
}

int cmd_preprocess(const std::string& in_path, const std::string& out_path, bool no_normalize,
                   double outlier_k, bool k_given, double outlier_cap, bool cap_given,
                   const std::string& baseline_name) {
  sitgrid::OutlierPolicy policy;
  if (cap_given) {
    policy.mode = sitgrid::OutlierMode::absolute_cap;
    policy.cap = outlier_cap;
  } else if (k_given) {
    policy.k = outlier_k;
  }
  sitgrid::BaselineChoice baseline = sitgrid::BaselineChoice::auto_by_variant;
  if (baseline_name == "still") {
    baseline = sitgrid::BaselineChoice::still_rows;
  } else if (baseline_name == "all") {
    baseline = sitgrid::BaselineChoice::all_rows;
  } else if (baseline_name != "auto") {
    throw sitgrid::ConfigError("--baseline must be one of auto|still|all");
  }
  const sitgrid::Dataset ds = sitgrid::load_dataset(in_path);
  const sitgrid::Dataset out = sitgrid::preprocess_pipeline(ds, policy, !no_normalize, baseline);
  sitgrid::save_dataset(out, out_path);
  std::cout << "preprocessed " << out.records.size() << " records to " << out_path << "\n";
  return 0;
}

int cmd_featurize(const std::string& in_path, const std::string& out_path,
                  const std::string& features_csv, const std::string& mats_name,
                  const std::string& recurrent_name, const std::string& whitelist_csv) {
  sitgrid::Dataset ds = sitgrid::load_dataset(in_path);
  const sitgrid::RecurrentSelector selector = sitgrid::recurrent_from_string(recurrent_name);
  if (selector != sitgrid::RecurrentSelector::full) {
    ds = sitgrid::select_recurrent(ds, selector);
  }

  sitgrid::FeatureSpec spec;
  spec.include_raw = spec.include_com = spec.include_quadrants = spec.include_edges = false;
  for (const std::string& group : split_list(features_csv)) {
    if (group == "raw") {
      spec.include_raw = true;
    } else if (group == "com") {
      spec.include_com = true;
    } else if (group == "quadrants") {
      spec.include_quadrants = true;
    } else if (group == "edges") {
      spec.include_edges = true;
    } else {
      throw sitgrid::ConfigError("unknown feature group '" + group +
                                 "' (expected raw,com,quadrants,edges)");
    }
  }
  if (mats_name == "auto") {
    spec.mats = !ds.records.empty() && ds.records.front().back.has_value()
                    ? sitgrid::MatSelection::both
                    : sitgrid::MatSelection::seat;
  } else {
    spec.mats = sitgrid::mats_from_string(mats_name);
  }
  spec.whitelist = split_list(whitelist_csv);

  const sitgrid::FeatureMatrix fm = sitgrid::build_feature_matrix(ds, spec);
  sitgrid::save_feature_matrix(fm, out_path);
  std::cout << "wrote " << fm.n_rows << " x " << fm.n_cols << " feature matrix to " << out_path
            << "\n";
  return 0;
}

int cmd_train(const std::string& in_path, const std::string& family_name, std::uint64_t seed,
              const std::string& config_path, const std::string& out_path) {
  sitgrid::ClassifierSpec spec;
  if (!config_path.empty()) {
    spec = sitgrid::classifier_spec_from_json(parse_json_file(config_path), seed);
    if (!family_name.empty() &&
        sitgrid::family_from_string(family_name) != spec.family) {
      throw sitgrid::ConfigError("--family contradicts the config file");
    }
  } else {
    if (family_name.empty()) {
      throw sitgrid::ConfigError("train needs --family or a --config with one");
    }
    spec.family = sitgrid::family_from_string(family_name);
    spec.seed = seed;
  }
  const sitgrid::FeatureMatrix fm = sitgrid::load_feature_matrix(in_path);
  const sitgrid::ClassifierModel model = sitgrid::fit(spec, fm);
  sitgrid::save_model(model, out_path);
  for (const std::string& w : model.warnings) std::cerr << "note: " << w << "\n";

  const std::vector<sitgrid::PostureLabel> preds = sitgrid::predict(model, fm);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i] == fm.labels[i]) ++correct;
  }
  std::printf("trained %s on %zu rows; training accuracy %.4f; model at %s\n",
              sitgrid::to_string(spec.family).c_str(), fm.n_rows,
              fm.n_rows ? static_cast<double>(correct) / fm.n_rows : 0.0, out_path.c_str());
  return 0;
}

int cmd_evaluate(const std::string& in_path, const std::string& model_path,
                 const std::string& out_dir) {
  const sitgrid::FeatureMatrix fm = sitgrid::load_feature_matrix(in_path);
  const sitgrid::ClassifierModel model = sitgrid::load_model(model_path);
  const std::vector<sitgrid::PostureLabel> preds = sitgrid::predict(model, fm);
  const sitgrid::ClassificationReport report =
      sitgrid::classification_report(fm.labels, preds, model.classes);

  fs::create_directories(out_dir);
  sitgrid::write_text_file((fs::path(out_dir) / "report.txt").string(),
                           sitgrid::report_to_text(report));
  ordered_json rj;
  rj["tool"] = sitgrid::kToolVersion;
  rj["model"] = model_path;
  rj["report"] = sitgrid::report_to_json(report);
  sitgrid::write_text_file((fs::path(out_dir) / "report.json").string(), rj.dump(2) + "\n");
  sitgrid::write_text_file((fs::path(out_dir) / "confusion.csv").string(),
                           sitgrid::confusion_to_csv(report));
  std::string pred_csv = "participant_id,event,true,predicted\n";
  for (std::size_t i = 0; i < fm.n_rows; ++i) {
    pred_csv += fm.groups[i].participant_id + "," + std::to_string(fm.groups[i].event) + "," +
                sitgrid::to_string(fm.labels[i]) + "," + sitgrid::to_string(preds[i]) + "\n";
  }
  sitgrid::write_text_file((fs::path(out_dir) / "predictions.csv").string(), pred_csv);
  std::printf("accuracy %.4f over %zu rows; reports in %s\n", report.accuracy, report.total,
              out_dir.c_str());
  return 0;
}

int cmd_experiment(const std::string& config_path, const std::string& out_override,
                   std::uint64_t seed, bool seed_given) {
  json j = parse_json_file(config_path);
  if (seed_given) j["seed"] = seed;
  sitgrid::ExperimentSpec spec =
      sitgrid::experiment_spec_from_json(j, fs::path(config_path).parent_path());
  if (!out_override.empty()) spec.out_dir = out_override;
  if (spec.out_dir.empty()) {
    throw sitgrid::ConfigError("no output directory: set out_dir in the spec or pass --out");
  }
  const sitgrid::ExperimentResult result = sitgrid::run_experiment(spec);
  sitgrid::write_experiment_outputs(result, spec.out_dir);
  std::printf("experiment '%s' finished in %.1f s; outputs in %s\n", spec.name.c_str(),
              result.wall_seconds, spec.out_dir.c_str());
  for (const sitgrid::ClassifierRunResult& run : result.runs) {
    std::printf("  %-4s pooled accuracy %.4f\n", sitgrid::to_string(run.family).c_str(),
                run.cv.pooled_accuracy);
  }
  return 0;
}

int cmd_matrix(const std::string& config_path, const std::string& out_dir) {
  const json j = parse_json_file(config_path);
  if (!j.is_object() || !j.contains("specs") || !j.at("specs").is_array()) {
    throw sitgrid::ConfigError("matrix config must be an object with a 'specs' array");
  }
  const fs::path base_dir = fs::path(config_path).parent_path();
  std::vector<sitgrid::ExperimentSpec> specs;
  for (const auto& item : j.at("specs")) {
    if (item.is_string()) {
      const fs::path spec_path = base_dir / item.get<std::string>();
      specs.push_back(sitgrid::experiment_spec_from_json(parse_json_file(spec_path.string()),
                                                         spec_path.parent_path()));
    } else {
      specs.push_back(sitgrid::experiment_spec_from_json(item, base_dir));
    }
  }
  const sitgrid::MatrixResult result = sitgrid::run_matrix(specs, out_dir);
  fs::create_directories(out_dir);
  const std::string summary = sitgrid::matrix_summary_text(result);
  sitgrid::write_text_file((fs::path(out_dir) / "summary.txt").string(), summary);
  sitgrid::write_text_file((fs::path(out_dir) / "summary.json").string(),
                           sitgrid::matrix_summary_json(result).dump(2) + "\n");
  std::cout << summary;
  for (const sitgrid::MatrixEntry& e : result.entries) {
    if (!e.ok) return 3;
  }
  return 0;
}

int cmd_plot(const std::string& in_path, const std::string& out_path) {
  const sitgrid::FeatureMatrix fm = sitgrid::load_feature_matrix(in_path);
  sitgrid::emit_posture_plot(fm, out_path);
  std::cout << "wrote " << fm.n_rows << " plot rows to " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"smart-chair sitting-posture pipeline"};
  app.require_subcommand(1);

  std::string variant, config, out, in, baseline = "auto", features = "raw,com,quadrants,edges";
  std::string mats = "auto", recurrent = "full", whitelist, family, model;
  std::uint64_t seed = 0;
  bool no_normalize = false;
  double outlier_k = 4.0, outlier_cap = 0.0;

  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  synth->add_option("--variant", variant, "controlled or realistic")->required();
  auto* synth_seed = synth->add_option("--seed", seed, "generator seed");
  synth->add_option("--config", config, "generator config JSON");
  synth->add_option("--out", out, "output CSV path")->required();

  auto* preprocess = app.add_subcommand("preprocess", "outlier replacement and normalization");
  preprocess->add_option("--in", in, "input dataset CSV")->required();
  preprocess->add_option("--out", out, "output dataset CSV")->required();
  preprocess->add_flag("--no-normalize", no_normalize, "skip baseline subtraction");
  auto* opt_k = preprocess->add_option("--outlier-k", outlier_k, "sigma-rule multiple");
  auto* opt_cap = preprocess->add_option("--outlier-cap", outlier_cap, "absolute threshold");
  opt_k->excludes(opt_cap);
  opt_cap->excludes(opt_k);
  preprocess->add_option("--baseline", baseline, "baseline rows: auto|still|all");

  auto* featurize = app.add_subcommand("featurize", "build a feature matrix CSV");
  featurize->add_option("--in", in, "input dataset CSV")->required();
  featurize->add_option("--out", out, "output feature CSV")->required();
  featurize->add_option("--features", features, "groups: raw,com,quadrants,edges");
  featurize->add_option("--mats", mats, "seat|back|both (default: by dataset)");
  featurize->add_option("--recurrent", recurrent, "full|t3|t234");
  featurize->add_option("--whitelist", whitelist, "explicit feature list (overrides groups)");

  auto* train = app.add_subcommand("train", "fit a classifier on a feature matrix");
  train->add_option("--in", in, "feature matrix CSV")->required();
  train->add_option("--family", family, "rf|gnb|lr|svm|dnn");
  auto* train_seed = train->add_option("--seed", seed, "training seed");
  train->add_option("--config", config, "classifier spec JSON");
  train->add_option("--out", out, "output model JSON")->required();
  (void)train_seed;

  auto* evaluate = app.add_subcommand("evaluate", "score a saved model on a feature matrix");
  evaluate->add_option("--in", in, "feature matrix CSV")->required();
  evaluate->add_option("--model", model, "model JSON")->required();
  evaluate->add_option("--out", out, "output directory")->required();

  auto* experiment = app.add_subcommand("experiment", "run one experiment spec");
  experiment->add_option("--config", config, "experiment spec JSON")->required();
  experiment->add_option("--out", out, "output directory (overrides out_dir)");
  auto* exp_seed = experiment->add_option("--seed", seed, "root seed (overrides spec)");

  auto* matrix = app.add_subcommand("matrix", "run a list of experiment specs");
  matrix->add_option("--config", config, "matrix config JSON")->required();
  matrix->add_option("--out", out, "output directory")->required();

  auto* plot = app.add_subcommand("plot", "emit class/CoM scatter data from features");
  plot->add_option("--in", in, "feature matrix CSV")->required();
  plot->add_option("--out", out, "output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (synth->parsed()) {
      return cmd_synth(variant, seed, synth_seed->count() > 0, config, out);
    }
    if (preprocess->parsed()) {
      return cmd_preprocess(in, out, no_normalize, outlier_k, opt_k->count() > 0, outlier_cap,
                            opt_cap->count() > 0, baseline);
    }
    if (featurize->parsed()) {
      return cmd_featurize(in, out, features, mats, recurrent, whitelist);
    }
    if (train->parsed()) {
      return cmd_train(in, family, seed, config, out);
    }
    if (evaluate->parsed()) {
      return cmd_evaluate(in, model, out);
    }
    if (experiment->parsed()) {
      return cmd_experiment(config, out, seed, exp_seed->count() > 0);
    }
    if (matrix->parsed()) {
      return cmd_matrix(config, out);
    }
    if (plot->parsed()) {
      return cmd_plot(in, out);
    }
  } catch (const sitgrid::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const sitgrid::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const sitgrid::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
