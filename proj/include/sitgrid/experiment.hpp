#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sitgrid/classifier.hpp"
#include "sitgrid/evaluation.hpp"
#include "sitgrid/preprocess.hpp"
#include "sitgrid/synth.hpp"

namespace sitgrid {

inline constexpr const char* kToolVersion = "sitgrid 0.1.0";

enum class AgeFilter { young, senior, both };

AgeFilter age_filter_from_string(const std::string& s);
std::string to_string(AgeFilter filter);

/// Where the experiment's dataset comes from: a canonical CSV on disk or the
/// seeded generator.
struct DatasetSource {
  std::string path;           // as written in the config; empty when synthetic
  std::string resolved_path;  // path resolved against the config location
  std::optional<GeneratorConfig> synth;
};

/// One cell of the experiment matrix, declaratively.
struct ExperimentSpec {
  std::string name = "experiment";
  DatasetSource dataset;
  Variant variant = Variant::controlled;
  bool normalized = true;
  MatSelection mats = MatSelection::seat;
  RecurrentSelector recurrent = RecurrentSelector::full;
  std::vector<PostureLabel> class_subset;  // report order; defaults to the variant's labels
  AgeFilter age_group = AgeFilter::both;
  FeatureSpec features;
  std::vector<ClassifierSpec> classifiers;
  int k = 10;
  bool stratified = true;
  bool group_aware = false;
  std::uint64_t seed = 0;
  std::string out_dir;
  OutlierPolicy outlier;
  BaselineChoice baseline = BaselineChoice::auto_by_variant;
};

/// Parses and resolves a spec: defaults filled, seeds derived, controlled
/// variants coerced to seat mats and the full recurrent selector.
ExperimentSpec experiment_spec_from_json(const nlohmann::json& j,
                                         const std::filesystem::path& base_dir);
nlohmann::ordered_json experiment_spec_to_json(const ExperimentSpec& spec);

GeneratorConfig generator_config_from_json(const nlohmann::json& j, Variant variant,
                                           std::uint64_t default_seed);
nlohmann::ordered_json generator_config_to_json(const GeneratorConfig& cfg, Variant variant);

ClassifierSpec classifier_spec_from_json(const nlohmann::json& j, std::uint64_t default_seed);
nlohmann::ordered_json classifier_spec_to_json(const ClassifierSpec& spec);

struct ClassifierRunResult {
  Family family = Family::rf;
  CrossValidationResult cv;
  ClassificationReport report;
  ClassifierModel model;  // fitted on the full matrix for persistence
};

struct ExperimentResult {
  ExperimentSpec spec;
  FeatureMatrix features;
  std::vector<ClassifierRunResult> runs;
  std::vector<std::pair<std::string, double>> importance;
  double wall_seconds = 0.0;  // console-only; never serialized
};

/// load/synth -> filter -> preprocess -> recurrent -> featurize ->
/// cross-validate each classifier. Stage errors carry the stage name.
ExperimentResult run_experiment(const ExperimentSpec& spec);

/// result.json, report.txt, confusion.csv, plot.csv (when CoM features are
/// present) and model_<family>.json under out_dir. Byte-deterministic.
void write_experiment_outputs(const ExperimentResult& result,
                              const std::filesystem::path& out_dir);

nlohmann::ordered_json experiment_result_to_json(const ExperimentResult& result);

struct MatrixEntry {
  std::string name;
  bool ok = false;
  std::string error;
  std::vector<std::pair<Family, double>> accuracies;  // pooled, spec order
};

struct MatrixResult {
  std::vector<MatrixEntry> entries;
};

/// Runs every spec, isolating per-spec failures. Throws ConfigError on an
/// empty list. Outputs for each spec land in its out_dir (or out_root/name).
MatrixResult run_matrix(const std::vector<ExperimentSpec>& specs,
                        const std::filesystem::path& out_root);

/// Accuracy table with one row per spec, integer percents as displayed.
std::string matrix_summary_text(const MatrixResult& result);
nlohmann::ordered_json matrix_summary_json(const MatrixResult& result);

/// CSV of (class, com_row, com_col) built from the seat CoM columns. Throws
/// MissingFeature when they are absent.
void emit_posture_plot(const FeatureMatrix& fm, const std::filesystem::path& path);

}  // namespace sitgrid
