#include "sitgrid/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>

#include "sitgrid/errors.hpp"
#include "sitgrid/rng.hpp"
#include "sitgrid/textio.hpp"

namespace sitgrid {

using nlohmann::json;
using nlohmann::ordered_json;

AgeFilter age_filter_from_string(const std::string& s) {
  if (s == "young") return AgeFilter::young;
  if (s == "senior") return AgeFilter::senior;
  if (s == "both") return AgeFilter::both;
  throw ParseError("unknown age group filter: '" + s + "'");
}

std::string to_string(AgeFilter filter) {
  switch (filter) {
    case AgeFilter::young: return "young";
    case AgeFilter::senior: return "senior";
    case AgeFilter::both: return "both";
  }
  return "?";
}

namespace {

void require_keys(const json& j, const std::set<std::string>& allowed,
                  const std::string& context) {
  for (const auto& [key, value] : j.items()) {
    if (allowed.find(key) == allowed.end()) {
      throw ConfigError("unknown key '" + key + "' in " + context);
    }
  }
}

std::vector<PostureLabel> labels_from_json(const json& j) {
  std::vector<PostureLabel> labels;
  for (const auto& item : j) labels.push_back(posture_from_string(item.get<std::string>()));
  return labels;
}

json labels_to_json(const std::vector<PostureLabel>& labels) {
  json out = json::array();
  for (PostureLabel label : labels) out.push_back(to_string(label));
  return out;
}

}  // namespace

GeneratorConfig generator_config_from_json(const json& j, Variant variant,
                                           std::uint64_t default_seed) {
  require_keys(j,
               {"variant", "seed", "n_participants", "postures", "snapshots_or_events",
                "weight_scale_range", "noise_sd", "outlier_probability", "outlier_magnitude",
                "separation"},
               "synth config");
  GeneratorConfig cfg = variant == Variant::controlled
                            ? GeneratorConfig::controlled_defaults(default_seed)
                            : GeneratorConfig::realistic_defaults(default_seed);
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("n_participants")) cfg.n_participants = j.at("n_participants").get<int>();
  if (j.contains("postures")) cfg.postures = labels_from_json(j.at("postures"));
  if (j.contains("snapshots_or_events")) {
    cfg.snapshots_or_events = j.at("snapshots_or_events").get<int>();
  }
  if (j.contains("weight_scale_range")) {
    const auto& range = j.at("weight_scale_range");
    if (!range.is_array() || range.size() != 2) {
      throw ConfigError("weight_scale_range must be [low, high]");
    }
    cfg.weight_scale_low = range[0].get<double>();
    cfg.weight_scale_high = range[1].get<double>();
  }
  if (j.contains("noise_sd")) cfg.noise_sd = j.at("noise_sd").get<double>();
  if (j.contains("outlier_probability")) {
    cfg.outlier_probability = j.at("outlier_probability").get<double>();
  }
  if (j.contains("outlier_magnitude")) {
    cfg.outlier_magnitude = j.at("outlier_magnitude").get<double>();
  }
  if (j.contains("separation")) cfg.separation = j.at("separation").get<double>();
  return cfg;
}

ordered_json generator_config_to_json(const GeneratorConfig& cfg, Variant variant) {
  ordered_json j;
  j["variant"] = to_string(variant);
  j["seed"] = cfg.seed;
  j["n_participants"] = cfg.n_participants;
  j["postures"] = labels_to_json(cfg.postures);
  j["snapshots_or_events"] = cfg.snapshots_or_events;
  j["weight_scale_range"] = {cfg.weight_scale_low, cfg.weight_scale_high};
  j["noise_sd"] = cfg.noise_sd;
  j["outlier_probability"] = cfg.outlier_probability;
  j["outlier_magnitude"] = cfg.outlier_magnitude;
  j["separation"] = cfg.separation;
  return j;
}

ClassifierSpec classifier_spec_from_json(const json& j, std::uint64_t default_seed) {
  ClassifierSpec spec;
  spec.seed = default_seed;
  if (j.is_string()) {
    spec.family = family_from_string(j.get<std::string>());
    return spec;
  }
  if (!j.is_object()) throw ConfigError("classifier entry must be a family name or an object");
  if (!j.contains("family")) throw ConfigError("classifier entry lacks 'family'");
  spec.family = family_from_string(j.at("family").get<std::string>());
  if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
  switch (spec.family) {
    case Family::rf:
      require_keys(j, {"family", "seed", "n_trees", "max_depth", "mtry", "bootstrap"},
                   "rf classifier");
      if (j.contains("n_trees")) spec.rf.n_trees = j.at("n_trees").get<int>();
      if (j.contains("max_depth")) spec.rf.max_depth = j.at("max_depth").get<int>();
      if (j.contains("mtry")) spec.rf.mtry = j.at("mtry").get<int>();
      if (j.contains("bootstrap")) spec.rf.bootstrap = j.at("bootstrap").get<bool>();
      break;
    case Family::gnb:
      require_keys(j, {"family", "seed", "var_smoothing"}, "gnb classifier");
      if (j.contains("var_smoothing")) spec.gnb.var_smoothing = j.at("var_smoothing").get<double>();
      break;
    case Family::lr:
      require_keys(j, {"family", "seed", "lambda", "learning_rate", "max_iters", "tol"},
                   "lr classifier");
      if (j.contains("lambda")) spec.lr.lambda = j.at("lambda").get<double>();
      if (j.contains("learning_rate")) spec.lr.learning_rate = j.at("learning_rate").get<double>();
      if (j.contains("max_iters")) spec.lr.max_iters = j.at("max_iters").get<int>();
      if (j.contains("tol")) spec.lr.tol = j.at("tol").get<double>();
      break;
    case Family::svm:
      require_keys(j, {"family", "seed", "lambda", "epochs"}, "svm classifier");
      if (j.contains("lambda")) spec.svm.lambda = j.at("lambda").get<double>();
      if (j.contains("epochs")) spec.svm.epochs = j.at("epochs").get<int>();
      break;
    case Family::dnn:
      require_keys(j,
                   {"family", "seed", "hidden_layers", "batch_size", "momentum", "learning_rate",
                    "epochs", "validation_fraction", "patience"},
                   "dnn classifier");
      if (j.contains("hidden_layers")) {
        spec.dnn.hidden_layers = j.at("hidden_layers").get<std::vector<int>>();
      }
      if (j.contains("batch_size")) spec.dnn.batch_size = j.at("batch_size").get<int>();
      if (j.contains("momentum")) spec.dnn.momentum = j.at("momentum").get<double>();
      if (j.contains("learning_rate")) {
        spec.dnn.learning_rate = j.at("learning_rate").get<double>();
      }
      if (j.contains("epochs")) spec.dnn.epochs = j.at("epochs").get<int>();
      if (j.contains("validation_fraction")) {
        spec.dnn.validation_fraction = j.at("validation_fraction").get<double>();
      }
      if (j.contains("patience")) spec.dnn.patience = j.at("patience").get<int>();
      break;
  }
  return spec;
}

ordered_json classifier_spec_to_json(const ClassifierSpec& spec) {
  ordered_json j;
  j["family"] = to_string(spec.family);
  j["seed"] = spec.seed;
  switch (spec.family) {
    case Family::rf:
      j["n_trees"] = spec.rf.n_trees;
      j["max_depth"] = spec.rf.max_depth;
      j["mtry"] = spec.rf.mtry;
      j["bootstrap"] = spec.rf.bootstrap;
      break;
    case Family::gnb:
      j["var_smoothing"] = spec.gnb.var_smoothing;
      break;
    case Family::lr:
      j["lambda"] = spec.lr.lambda;
      j["learning_rate"] = spec.lr.learning_rate;
      j["max_iters"] = spec.lr.max_iters;
      j["tol"] = spec.lr.tol;
      break;
    case Family::svm:
      j["lambda"] = spec.svm.lambda;
      j["epochs"] = spec.svm.epochs;
      break;
    case Family::dnn:
      j["hidden_layers"] = spec.dnn.hidden_layers;
      j["batch_size"] = spec.dnn.batch_size;
      j["momentum"] = spec.dnn.momentum;
      j["learning_rate"] = spec.dnn.learning_rate;
      j["epochs"] = spec.dnn.epochs;
      j["validation_fraction"] = spec.dnn.validation_fraction;
      j["patience"] = spec.dnn.patience;
      break;
  }
  return j;
}

ExperimentSpec experiment_spec_from_json(const json& j, const std::filesystem::path& base_dir) {
  require_keys(j,
               {"name", "dataset", "variant", "normalized", "mats", "recurrent", "class_subset",
                "age_group", "features", "classifiers", "k", "stratified", "group_aware", "seed",
                "out_dir", "baseline", "outlier"},
               "experiment spec");
  ExperimentSpec spec;
  if (j.contains("name")) spec.name = j.at("name").get<std::string>();
  if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();

  if (!j.contains("dataset")) throw ConfigError("experiment spec lacks 'dataset'");
  const json& dataset = j.at("dataset");
  require_keys(dataset, {"path", "synth"}, "dataset");
  const bool has_path = dataset.contains("path");
  const bool has_synth = dataset.contains("synth");
  if (has_path == has_synth) {
    throw ConfigError("dataset must carry exactly one of 'path' or 'synth'");
  }

  if (has_synth) {
    const json& synth = dataset.at("synth");
    if (!synth.contains("variant")) throw ConfigError("synth config lacks 'variant'");
    spec.variant = variant_from_string(synth.at("variant").get<std::string>());
    if (j.contains("variant") &&
        variant_from_string(j.at("variant").get<std::string>()) != spec.variant) {
      throw ConfigError("spec variant contradicts the synth variant");
    }
    spec.dataset.synth = generator_config_from_json(synth, spec.variant, spec.seed);
  } else {
    if (!j.contains("variant")) throw ConfigError("experiment spec with a dataset path needs 'variant'");
    spec.variant = variant_from_string(j.at("variant").get<std::string>());
    spec.dataset.path = dataset.at("path").get<std::string>();
    std::filesystem::path p(spec.dataset.path);
    spec.dataset.resolved_path = p.is_absolute() ? p.string() : (base_dir / p).string();
  }

  if (j.contains("normalized")) spec.normalized = j.at("normalized").get<bool>();
  spec.mats = spec.variant == Variant::controlled ? MatSelection::seat : MatSelection::both;
  if (j.contains("mats")) spec.mats = mats_from_string(j.at("mats").get<std::string>());
  if (j.contains("recurrent")) {
    spec.recurrent = recurrent_from_string(j.at("recurrent").get<std::string>());
  }
  if (spec.variant == Variant::controlled) {
    spec.mats = MatSelection::seat;              // the controlled chair has seat sensors only
    spec.recurrent = RecurrentSelector::full;    // no timestamps to select
  }

  spec.class_subset = labels_for(spec.variant);
  if (j.contains("class_subset")) {
    spec.class_subset = labels_from_json(j.at("class_subset"));
    if (spec.class_subset.empty()) throw ConfigError("class_subset must not be empty");
    const std::vector<PostureLabel>& valid = labels_for(spec.variant);
    for (PostureLabel label : spec.class_subset) {
      if (std::find(valid.begin(), valid.end(), label) == valid.end()) {
        throw ConfigError("class_subset label '" + to_string(label) +
                          "' is invalid for the " + to_string(spec.variant) + " variant");
      }
    }
  }

  if (j.contains("age_group")) {
    spec.age_group = age_filter_from_string(j.at("age_group").get<std::string>());
  }

  spec.features.mats = spec.mats;
  if (j.contains("features")) {
    const json& f = j.at("features");
    require_keys(f, {"raw", "com", "quadrants", "edges", "whitelist"}, "features");
    if (f.contains("raw")) spec.features.include_raw = f.at("raw").get<bool>();
    if (f.contains("com")) spec.features.include_com = f.at("com").get<bool>();
    if (f.contains("quadrants")) spec.features.include_quadrants = f.at("quadrants").get<bool>();
    if (f.contains("edges")) spec.features.include_edges = f.at("edges").get<bool>();
    if (f.contains("whitelist")) {
      spec.features.whitelist = f.at("whitelist").get<std::vector<std::string>>();
    }
  }

  if (j.contains("classifiers")) {
    const json& list = j.at("classifiers");
    if (!list.is_array() || list.empty()) throw ConfigError("classifiers must be a non-empty list");
    for (std::size_t i = 0; i < list.size(); ++i) {
      spec.classifiers.push_back(classifier_spec_from_json(
          list[i], derive_stream(spec.seed, {0xC1a5ull, static_cast<std::uint64_t>(i)})));
    }
  } else {
    const Family families[] = {Family::rf, Family::gnb, Family::lr, Family::svm, Family::dnn};
    for (std::size_t i = 0; i < 5; ++i) {
      ClassifierSpec cs;
      cs.family = families[i];
      cs.seed = derive_stream(spec.seed, {0xC1a5ull, static_cast<std::uint64_t>(i)});
      spec.classifiers.push_back(cs);
    }
  }

  if (j.contains("k")) spec.k = j.at("k").get<int>();
  if (j.contains("stratified")) spec.stratified = j.at("stratified").get<bool>();
  if (j.contains("group_aware")) spec.group_aware = j.at("group_aware").get<bool>();
  if (j.contains("out_dir")) spec.out_dir = j.at("out_dir").get<std::string>();

  if (j.contains("baseline")) {
    const std::string b = j.at("baseline").get<std::string>();
    if (b == "auto") {
      spec.baseline = BaselineChoice::auto_by_variant;
    } else if (b == "still") {
      spec.baseline = BaselineChoice::still_rows;
    } else if (b == "all") {
      spec.baseline = BaselineChoice::all_rows;
    } else {
      throw ConfigError("baseline must be one of auto|still|all");
    }
  }

  if (j.contains("outlier")) {
    const json& o = j.at("outlier");
    require_keys(o, {"mode", "k", "cap"}, "outlier");
    const std::string mode = o.contains("mode") ? o.at("mode").get<std::string>() : "sigma";
    if (mode == "sigma") {
      spec.outlier.mode = OutlierMode::sigma_multiple;
      if (o.contains("k")) spec.outlier.k = o.at("k").get<double>();
    } else if (mode == "cap") {
      spec.outlier.mode = OutlierMode::absolute_cap;
      if (!o.contains("cap")) throw ConfigError("cap outlier mode requires 'cap'");
      spec.outlier.cap = o.at("cap").get<double>();
    } else {
      throw ConfigError("outlier mode must be sigma or cap");
    }
  }
  return spec;
}

ordered_json experiment_spec_to_json(const ExperimentSpec& spec) {
  ordered_json j;
  j["name"] = spec.name;
  if (spec.dataset.synth.has_value()) {
    j["dataset"] = {{"synth", generator_config_to_json(*spec.dataset.synth, spec.variant)}};
  } else {
    j["dataset"] = {{"path", spec.dataset.path}};
  }
  j["variant"] = to_string(spec.variant);
  j["normalized"] = spec.normalized;
  j["mats"] = to_string(spec.mats);
  j["recurrent"] = to_string(spec.recurrent);
  j["class_subset"] = labels_to_json(spec.class_subset);
  j["age_group"] = to_string(spec.age_group);
  j["features"] = {{"raw", spec.features.include_raw},
                   {"com", spec.features.include_com},
                   {"quadrants", spec.features.include_quadrants},
                   {"edges", spec.features.include_edges},
                   {"whitelist", spec.features.whitelist}};
  ordered_json classifiers = ordered_json::array();
  for (const ClassifierSpec& cs : spec.classifiers) classifiers.push_back(classifier_spec_to_json(cs));
  j["classifiers"] = std::move(classifiers);
  j["k"] = spec.k;
  j["stratified"] = spec.stratified;
  j["group_aware"] = spec.group_aware;
  j["seed"] = spec.seed;
  j["baseline"] = spec.baseline == BaselineChoice::auto_by_variant
                      ? "auto"
                      : (spec.baseline == BaselineChoice::still_rows ? "still" : "all");
  if (spec.outlier.mode == OutlierMode::sigma_multiple) {
    j["outlier"] = {{"mode", "sigma"}, {"k", spec.outlier.k}};
  } else {
    j["outlier"] = {{"mode", "cap"}, {"cap", spec.outlier.cap}};
  }
  return j;
}

namespace {

template <typename Fn>
auto run_stage(const std::string& name, Fn&& fn) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError("stage '" + name + "': " + e.what());
  }
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& input_spec) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentSpec spec = input_spec;
  if (spec.class_subset.empty()) spec.class_subset = labels_for(spec.variant);
  if (spec.classifiers.empty()) {
    throw ConfigError("experiment spec has no classifiers");
  }
  ExperimentResult result;
  result.spec = spec;

  Dataset ds = run_stage("load", [&] {
    if (spec.dataset.synth.has_value()) {
      return spec.variant == Variant::controlled ? generate_controlled(*spec.dataset.synth)
                                                 : generate_realistic(*spec.dataset.synth);
    }
    Dataset loaded = load_dataset(spec.dataset.resolved_path);
    if (loaded.variant != spec.variant && !loaded.records.empty()) {
      throw InvariantViolation("dataset variant '" + to_string(loaded.variant) +
                               "' contradicts the spec variant '" + to_string(spec.variant) + "'");
    }
    return loaded;
  });

  run_stage("filter", [&] {
    Dataset filtered;
    filtered.variant = ds.variant;
    filtered.provenance = ds.provenance + " | filtered";
    for (FrameRecord& rec : ds.records) {
      if (spec.age_group != AgeFilter::both) {
        const AgeGroup want =
            spec.age_group == AgeFilter::young ? AgeGroup::young : AgeGroup::senior;
        if (rec.age_group != want) continue;
      }
      if (std::find(spec.class_subset.begin(), spec.class_subset.end(), rec.posture) ==
          spec.class_subset.end()) {
        continue;
      }
      filtered.records.push_back(std::move(rec));
    }
    ds = std::move(filtered);
    return 0;
  });

  run_stage("preprocess", [&] {
    ds = preprocess_pipeline(ds, spec.outlier, spec.normalized, spec.baseline);
    return 0;
  });

  run_stage("recurrent", [&] {
    if (ds.variant == Variant::realistic) ds = select_recurrent(ds, spec.recurrent);
    return 0;
  });

  result.features = run_stage("featurize", [&] { return build_feature_matrix(ds, spec.features); });
  const FeatureMatrix& fm = result.features;

  const FoldPlan plan = run_stage("folds", [&] {
    return kfold_split(fm.n_rows, fm.labels, fm.groups, spec.k, spec.stratified, spec.group_aware,
                       derive_stream(spec.seed, {0xF01d5ull}));
  });

  for (const ClassifierSpec& cspec : spec.classifiers) {
    ClassifierRunResult run;
    run.family = cspec.family;
    run.cv = run_stage("cross_validate " + to_string(cspec.family),
                       [&] { return cross_validate(fm, cspec, plan); });
    run.report = run_stage("report " + to_string(cspec.family), [&] {
      return classification_report(fm.labels, run.cv.pooled_predictions, spec.class_subset);
    });
    run.model =
        run_stage("fit " + to_string(cspec.family), [&] { return fit(cspec, fm); });
    result.runs.push_back(std::move(run));
  }

  result.importance = run_stage("importance", [&] {
    return feature_importance(fm, RfParams{}, derive_stream(spec.seed, {0x1f9ull}));
  });

  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

ordered_json experiment_result_to_json(const ExperimentResult& result) {
  ordered_json j;
  j["tool"] = kToolVersion;
  j["spec"] = experiment_spec_to_json(result.spec);
  ordered_json importance = ordered_json::array();
  for (const auto& [name, score] : result.importance) {
    importance.push_back({{"feature", name}, {"score", score}});
  }
  j["feature_importance"] = std::move(importance);
  ordered_json runs = ordered_json::array();
  for (const ClassifierRunResult& run : result.runs) {
    runs.push_back({{"family", to_string(run.family)},
                    {"fold_accuracy", run.cv.fold_accuracy},
                    {"mean_accuracy", run.cv.mean_accuracy},
                    {"sd_accuracy", run.cv.sd_accuracy},
                    {"pooled_accuracy", run.cv.pooled_accuracy},
                    {"accuracy_percent",
                     static_cast<long>(std::llround(run.cv.pooled_accuracy * 100.0))},
                    {"warnings", run.cv.warnings},
                    {"report", report_to_json(run.report)}});
  }
  j["classifiers"] = std::move(runs);
  return j;
}

void write_experiment_outputs(const ExperimentResult& result,
                              const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  write_text_file((out_dir / "result.json").string(),
                  experiment_result_to_json(result).dump(2) + "\n");

  std::string report_txt;
  for (const ClassifierRunResult& run : result.runs) {
    report_txt += "== " + to_string(run.family) + " ==\n";
    report_txt += report_to_text(run.report);
    for (const std::string& w : run.cv.warnings) report_txt += "note: " + w + "\n";
    report_txt += "\n";
  }
  write_text_file((out_dir / "report.txt").string(), report_txt);

  std::string confusion_csv;
  for (const ClassifierRunResult& run : result.runs) {
    std::string block = confusion_to_csv(run.report);
    std::size_t pos = 0;
    bool first = true;
    while (pos < block.size()) {
      std::size_t end = block.find('\n', pos);
      confusion_csv += first ? "family," : to_string(run.family) + ",";
      confusion_csv += block.substr(pos, end - pos);
      confusion_csv.push_back('\n');
      pos = end + 1;
      first = false;
    }
  }
  write_text_file((out_dir / "confusion.csv").string(), confusion_csv);

  if (result.features.column_index("seat_com_row") >= 0 &&
      result.features.column_index("seat_com_col") >= 0) {
    emit_posture_plot(result.features, out_dir / "plot.csv");
  }

  for (const ClassifierRunResult& run : result.runs) {
    save_model(run.model, out_dir / ("model_" + to_string(run.family) + ".json"));
  }
}

MatrixResult run_matrix(const std::vector<ExperimentSpec>& specs,
                        const std::filesystem::path& out_root) {
  if (specs.empty()) throw ConfigError("experiment matrix is empty");
  MatrixResult result;
  for (const ExperimentSpec& spec : specs) {
    MatrixEntry entry;
    entry.name = spec.name;
    try {
      const ExperimentResult res = run_experiment(spec);
      const std::filesystem::path out_dir =
          spec.out_dir.empty() ? out_root / spec.name : std::filesystem::path(spec.out_dir);
      write_experiment_outputs(res, out_dir);
      for (const ClassifierRunResult& run : res.runs) {
        entry.accuracies.emplace_back(run.family, run.cv.pooled_accuracy);
      }
      entry.ok = true;
    } catch (const Error& e) {
      entry.ok = false;
      entry.error = e.what();
    }
    result.entries.push_back(std::move(entry));
  }
  return result;
}

std::string matrix_summary_text(const MatrixResult& result) {
  const Family order[] = {Family::rf, Family::gnb, Family::lr, Family::svm, Family::dnn};
  std::vector<Family> columns;
  for (Family f : order) {
    for (const MatrixEntry& e : result.entries) {
      const auto it = std::find_if(e.accuracies.begin(), e.accuracies.end(),
                                   [&](const auto& p) { return p.first == f; });
      if (it != e.accuracies.end()) {
        columns.push_back(f);
        break;
      }
    }
  }
  std::size_t name_width = 4;
  for (const MatrixEntry& e : result.entries) name_width = std::max(name_width, e.name.size());

  char buf[64];
  std::string out;
  std::snprintf(buf, sizeof(buf), "%-*s", static_cast<int>(name_width), "spec");
  out += buf;
  for (Family f : columns) {
    std::snprintf(buf, sizeof(buf), "  %5s", to_string(f).c_str());
    out += buf;
  }
  out.push_back('\n');
  for (const MatrixEntry& e : result.entries) {
    std::snprintf(buf, sizeof(buf), "%-*s", static_cast<int>(name_width), e.name.c_str());
    out += buf;
    if (!e.ok) {
      out += "  FAILED: " + e.error;
      out.push_back('\n');
      continue;
    }
    for (Family f : columns) {
      const auto it = std::find_if(e.accuracies.begin(), e.accuracies.end(),
                                   [&](const auto& p) { return p.first == f; });
      if (it == e.accuracies.end()) {
        std::snprintf(buf, sizeof(buf), "  %5s", "-");
      } else {
        std::snprintf(buf, sizeof(buf), "  %4ld%%", std::lround(it->second * 100.0));
      }
      out += buf;
    }
    out.push_back('\n');
  }
  return out;
}

ordered_json matrix_summary_json(const MatrixResult& result) {
  ordered_json entries = ordered_json::array();
  for (const MatrixEntry& e : result.entries) {
    ordered_json cells = ordered_json::array();
    for (const auto& [family, accuracy] : e.accuracies) {
      cells.push_back({{"family", to_string(family)},
                       {"pooled_accuracy", accuracy},
                       {"accuracy_percent", static_cast<long>(std::llround(accuracy * 100.0))}});
    }
    entries.push_back({{"name", e.name},
                       {"ok", e.ok},
                       {"error", e.error},
                       {"classifiers", std::move(cells)}});
  }
  return ordered_json{{"tool", kToolVersion}, {"experiments", std::move(entries)}};
}

void emit_posture_plot(const FeatureMatrix& fm, const std::filesystem::path& path) {
  const long row_col = fm.column_index("seat_com_row");
  const long col_col = fm.column_index("seat_com_col");
  if (row_col < 0 || col_col < 0) {
    throw MissingFeature("posture plot needs the seat_com_row and seat_com_col features");
  }
  std::string out = "class,com_row,com_col\n";
  for (std::size_t i = 0; i < fm.n_rows; ++i) {
    out += to_string(fm.labels[i]);
    out.push_back(',');
    out += format_double(fm.at(i, row_col));
    out.push_back(',');
    out += format_double(fm.at(i, col_col));
    out.push_back('\n');
  }
  write_text_file(path.string(), out);
}

}  // namespace sitgrid
