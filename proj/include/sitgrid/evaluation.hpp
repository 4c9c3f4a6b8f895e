#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sitgrid/classifier.hpp"
#include "sitgrid/features.hpp"

namespace sitgrid {

/// A deterministic partition of rows into K folds. Stratified plans keep
/// per-class counts within 1 across folds; group-aware plans never split a
/// (participant, event) group (group atomicity overrides exact balance).
struct FoldPlan {
  int k = 0;
  std::vector<int> assignments;  // row -> fold id
  bool stratified = true;
  bool group_aware = false;
  std::uint64_t seed = 0;

  std::vector<std::size_t> fold_sizes() const;
};

FoldPlan kfold_split(std::size_t n, const std::vector<PostureLabel>& labels,
                     const std::vector<GroupKey>& groups, int k, bool stratified,
                     bool group_aware, std::uint64_t seed);

struct CrossValidationResult {
  std::vector<double> fold_accuracy;
  double mean_accuracy = 0.0;
  double sd_accuracy = 0.0;
  double pooled_accuracy = 0.0;
  std::vector<PostureLabel> pooled_predictions;  // out-of-fold, one per row
  std::vector<std::string> warnings;
};

/// Per fold: fit on the other folds, predict the held-out rows. Per-fold
/// seeds derive from (spec.seed, fold id) so parallel and serial runs agree.
CrossValidationResult cross_validate(const FeatureMatrix& fm, const ClassifierSpec& spec,
                                     const FoldPlan& plan);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
  bool zero_division = false;  // a denominator was 0 and the metric was forced to 0
};

struct ClassificationReport {
  std::vector<PostureLabel> class_order;
  std::vector<ClassMetrics> per_class;
  ClassMetrics macro_avg;
  ClassMetrics weighted_avg;
  double accuracy = 0.0;
  std::size_t total = 0;
  std::vector<std::vector<std::size_t>> confusion;  // [true][predicted]
};

ClassificationReport classification_report(const std::vector<PostureLabel>& y_true,
                                           const std::vector<PostureLabel>& y_pred,
                                           const std::vector<PostureLabel>& class_order);

/// Aligned plain-text table: per-class precision/recall/F1/support rows plus
/// a weighted "avg / total" row.
std::string report_to_text(const ClassificationReport& report);
nlohmann::ordered_json report_to_json(const ClassificationReport& report);
std::string confusion_to_csv(const ClassificationReport& report);

}  // namespace sitgrid
