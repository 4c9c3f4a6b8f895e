#include "sitgrid/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "sitgrid/errors.hpp"
#include "sitgrid/rng.hpp"

namespace sitgrid {

namespace {

/// Folds with the smallest current size (ties to the lowest id) receive the
/// remainders, which keeps overall sizes within 1 of each other.
std::vector<int> smallest_folds(const std::vector<std::size_t>& sizes, int count) {
  std::vector<int> ids(sizes.size());
  std::iota(ids.begin(), ids.end(), 0);
  std::stable_sort(ids.begin(), ids.end(), [&](int a, int b) { return sizes[a] < sizes[b]; });
  ids.resize(count);
  return ids;
}

FeatureMatrix subset_matrix(const FeatureMatrix& fm, const std::vector<std::size_t>& rows) {
  FeatureMatrix out;
  out.names = fm.names;
  out.n_cols = fm.n_cols;
  out.n_rows = rows.size();
  out.values.reserve(rows.size() * fm.n_cols);
  out.labels.reserve(rows.size());
  out.groups.reserve(rows.size());
  for (std::size_t i : rows) {
    const auto row = fm.row(i);
    out.values.insert(out.values.end(), row.begin(), row.end());
    out.labels.push_back(fm.labels[i]);
    out.groups.push_back(fm.groups[i]);
  }
  return out;
}

}  // namespace

std::vector<std::size_t> FoldPlan::fold_sizes() const {
  std::vector<std::size_t> sizes(k, 0);
  for (int f : assignments) ++sizes[f];
  return sizes;
}

FoldPlan kfold_split(std::size_t n, const std::vector<PostureLabel>& labels,
                     const std::vector<GroupKey>& groups, int k, bool stratified,
                     bool group_aware, std::uint64_t seed) {
  if (k < 2) throw ConfigError("kfold requires k >= 2");
  if (n < static_cast<std::size_t>(k)) {
    throw TooFewRows("cannot split " + std::to_string(n) + " rows into " + std::to_string(k) +
                     " folds");
  }
  if (stratified && labels.size() != n) throw LengthMismatch("labels length differs from n");
  if (group_aware && groups.size() != n) throw LengthMismatch("groups length differs from n");

  FoldPlan plan;
  plan.k = k;
  plan.stratified = stratified;
  plan.group_aware = group_aware;
  plan.seed = seed;
  plan.assignments.assign(n, -1);

  if (group_aware) {
    // Atomic units are (participant, event) groups, greedily packed into the
    // currently smallest fold.
    std::vector<std::pair<GroupKey, std::vector<std::size_t>>> units;
    for (std::size_t i = 0; i < n; ++i) {
      auto it = std::find_if(units.begin(), units.end(),
                             [&](const auto& u) { return u.first == groups[i]; });
      if (it == units.end()) {
        units.push_back({groups[i], {i}});
      } else {
        it->second.push_back(i);
      }
    }
    if (units.size() < static_cast<std::size_t>(k)) {
      throw TooFewRows("fewer groups than folds");
    }
    const std::size_t capacity = (n + k - 1) / k;
    for (const auto& [key, rows] : units) {
      if (rows.size() > capacity) {
        throw GroupLargerThanFold("group (" + key.participant_id + ", " +
                                  std::to_string(key.event) + ") has " +
                                  std::to_string(rows.size()) + " rows, fold capacity is " +
                                  std::to_string(capacity));
      }
    }

    std::vector<std::size_t> unit_order(units.size());
    std::iota(unit_order.begin(), unit_order.end(), 0);
    if (stratified) {
      // Keep per-label spread reasonable by assigning label-by-label.
      std::stable_sort(unit_order.begin(), unit_order.end(), [&](std::size_t a, std::size_t b) {
        return labels[units[a].second.front()] < labels[units[b].second.front()];
      });
    }
    SplitMix64 rng(derive_stream(seed, {0xF01dull}));
    // Shuffle within the (possibly label-sorted) order.
    std::vector<std::size_t> shuffled;
    {
      std::size_t start = 0;
      while (start < unit_order.size()) {
        std::size_t stop = start + 1;
        if (stratified) {
          const PostureLabel label = labels[units[unit_order[start]].second.front()];
          while (stop < unit_order.size() &&
                 labels[units[unit_order[stop]].second.front()] == label) {
            ++stop;
          }
        } else {
          stop = unit_order.size();
        }
        std::vector<std::size_t> block(unit_order.begin() + start, unit_order.begin() + stop);
        shuffle(block, rng);
        shuffled.insert(shuffled.end(), block.begin(), block.end());
        start = stop;
      }
    }
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t u : shuffled) {
      const int fold = smallest_folds(sizes, 1).front();
      for (std::size_t i : units[u].second) plan.assignments[i] = fold;
      sizes[fold] += units[u].second.size();
    }
    return plan;
  }

  if (stratified) {
    std::vector<std::size_t> sizes(k, 0);
    for (PostureLabel label : all_labels()) {
      std::vector<std::size_t> members;
      for (std::size_t i = 0; i < n; ++i) {
        if (labels[i] == label) members.push_back(i);
      }
      if (members.empty()) continue;
      SplitMix64 rng(derive_stream(seed, {0x57aull, static_cast<std::uint64_t>(label)}));
      shuffle(members, rng);
      const std::size_t base = members.size() / k;
      const int rem = static_cast<int>(members.size() % k);
      std::vector<std::size_t> quota(k, base);
      for (int f : smallest_folds(sizes, rem)) ++quota[f];
      std::size_t cursor = 0;
      for (int f = 0; f < k; ++f) {
        for (std::size_t q = 0; q < quota[f]; ++q) plan.assignments[members[cursor++]] = f;
        sizes[f] += quota[f];
      }
    }
    return plan;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  SplitMix64 rng(derive_stream(seed, {0xF00ull}));
  shuffle(order, rng);
  const std::size_t base = n / k;
  const std::size_t rem = n % k;
  std::size_t cursor = 0;
  for (int f = 0; f < k; ++f) {
    const std::size_t size = base + (static_cast<std::size_t>(f) < rem ? 1 : 0);
    for (std::size_t q = 0; q < size; ++q) plan.assignments[order[cursor++]] = f;
  }
  return plan;
}

CrossValidationResult cross_validate(const FeatureMatrix& fm, const ClassifierSpec& spec,
                                     const FoldPlan& plan) {
  if (plan.assignments.size() != fm.n_rows) {
    throw LengthMismatch("fold plan does not match the feature matrix rows");
  }
  CrossValidationResult result;
  result.pooled_predictions.assign(fm.n_rows, PostureLabel::still);
  std::size_t correct_total = 0;

  for (int f = 0; f < plan.k; ++f) {
    std::vector<std::size_t> train_rows, test_rows;
    for (std::size_t i = 0; i < fm.n_rows; ++i) {
      (plan.assignments[i] == f ? test_rows : train_rows).push_back(i);
    }
    try {
      const FeatureMatrix train = subset_matrix(fm, train_rows);
      const FeatureMatrix test = subset_matrix(fm, test_rows);
      ClassifierSpec fold_spec = spec;
      fold_spec.seed = derive_stream(spec.seed, {0xF0ull, static_cast<std::uint64_t>(f)});
      const ClassifierModel model = fit(fold_spec, train);
      for (const std::string& w : model.warnings) {
        result.warnings.push_back("fold " + std::to_string(f) + ": " + w);
      }
      const std::vector<PostureLabel> preds = predict(model, test);
      std::size_t correct = 0;
      for (std::size_t t = 0; t < test_rows.size(); ++t) {
        result.pooled_predictions[test_rows[t]] = preds[t];
        if (preds[t] == fm.labels[test_rows[t]]) ++correct;
      }
      correct_total += correct;
      result.fold_accuracy.push_back(static_cast<double>(correct) /
                                     static_cast<double>(test_rows.size()));
    } catch (const Error& e) {
      throw StageError("fold " + std::to_string(f) + ": " + e.what());
    }
  }

  const double k = static_cast<double>(plan.k);
  for (double a : result.fold_accuracy) result.mean_accuracy += a;
  result.mean_accuracy /= k;
  for (double a : result.fold_accuracy) {
    const double d = a - result.mean_accuracy;
    result.sd_accuracy += d * d;
  }
  result.sd_accuracy = std::sqrt(result.sd_accuracy / (k - 1.0));
  result.pooled_accuracy = static_cast<double>(correct_total) / static_cast<double>(fm.n_rows);
  return result;
}

ClassificationReport classification_report(const std::vector<PostureLabel>& y_true,
                                           const std::vector<PostureLabel>& y_pred,
                                           const std::vector<PostureLabel>& class_order) {
  if (y_true.size() != y_pred.size()) {
    throw LengthMismatch("y_true and y_pred lengths differ");
  }
  const int C = static_cast<int>(class_order.size());
  auto class_index = [&](PostureLabel label) {
    const auto it = std::find(class_order.begin(), class_order.end(), label);
    if (it == class_order.end()) {
      throw InvariantViolation("label '" + to_string(label) + "' is not in the class order");
    }
    return static_cast<int>(it - class_order.begin());
  };

  ClassificationReport report;
  report.class_order = class_order;
  report.total = y_true.size();
  report.confusion.assign(C, std::vector<std::size_t>(C, 0));
  std::size_t correct = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const int t = class_index(y_true[i]);
    const int p = class_index(y_pred[i]);
    ++report.confusion[t][p];
    if (t == p) ++correct;
  }
  report.accuracy = report.total == 0 ? 0.0
                                      : static_cast<double>(correct) /
                                            static_cast<double>(report.total);

  report.per_class.resize(C);
  for (int c = 0; c < C; ++c) {
    std::size_t tp = report.confusion[c][c];
    std::size_t support = 0, predicted = 0;
    for (int o = 0; o < C; ++o) {
      support += report.confusion[c][o];
      predicted += report.confusion[o][c];
    }
    ClassMetrics& m = report.per_class[c];
    m.support = support;
    if (predicted == 0) {
      m.precision = 0.0;
      m.zero_division = true;
    } else {
      m.precision = static_cast<double>(tp) / static_cast<double>(predicted);
    }
    if (support == 0) {
      m.recall = 0.0;
      m.zero_division = true;
    } else {
      m.recall = static_cast<double>(tp) / static_cast<double>(support);
    }
    if (m.precision + m.recall == 0.0) {
      m.f1 = 0.0;
      m.zero_division = true;
    } else {
      m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    }
  }

  report.macro_avg.support = report.total;
  report.weighted_avg.support = report.total;
  for (int c = 0; c < C; ++c) {
    const ClassMetrics& m = report.per_class[c];
    report.macro_avg.precision += m.precision / C;
    report.macro_avg.recall += m.recall / C;
    report.macro_avg.f1 += m.f1 / C;
    if (report.total > 0) {
      const double w = static_cast<double>(m.support) / static_cast<double>(report.total);
      report.weighted_avg.precision += w * m.precision;
      report.weighted_avg.recall += w * m.recall;
      report.weighted_avg.f1 += w * m.f1;
    }
  }
  return report;
}

std::string report_to_text(const ClassificationReport& report) {
  std::size_t width = 11;  // fits "avg / total"
  for (PostureLabel label : report.class_order) {
    width = std::max(width, to_string(label).size());
  }
  char line[160];
  std::string out;
  std::snprintf(line, sizeof(line), "%*s  precision    recall  f1-score   support\n\n",
                static_cast<int>(width), "");
  out += line;
  for (std::size_t c = 0; c < report.class_order.size(); ++c) {
    const ClassMetrics& m = report.per_class[c];
    std::snprintf(line, sizeof(line), "%*s       %.2f      %.2f      %.2f%10zu\n",
                  static_cast<int>(width), to_string(report.class_order[c]).c_str(), m.precision,
                  m.recall, m.f1, m.support);
    out += line;
  }
  const ClassMetrics& w = report.weighted_avg;
  std::snprintf(line, sizeof(line), "\n%*s       %.2f      %.2f      %.2f%10zu\n",
                static_cast<int>(width), "avg / total", w.precision, w.recall, w.f1, w.support);
  out += line;
  std::snprintf(line, sizeof(line), "\naccuracy: %.4f\n", report.accuracy);
  out += line;
  return out;
}

nlohmann::ordered_json report_to_json(const ClassificationReport& report) {
  using nlohmann::ordered_json;
  ordered_json per_class = ordered_json::array();
  for (std::size_t c = 0; c < report.class_order.size(); ++c) {
    const ClassMetrics& m = report.per_class[c];
    per_class.push_back({{"class", to_string(report.class_order[c])},
                         {"precision", m.precision},
                         {"recall", m.recall},
                         {"f1", m.f1},
                         {"support", m.support},
                         {"zero_division", m.zero_division}});
  }
  ordered_json confusion = ordered_json::array();
  for (const auto& row : report.confusion) confusion.push_back(row);
  return ordered_json{{"per_class", std::move(per_class)},
                      {"macro_avg",
                       {{"precision", report.macro_avg.precision},
                        {"recall", report.macro_avg.recall},
                        {"f1", report.macro_avg.f1}}},
                      {"weighted_avg",
                       {{"precision", report.weighted_avg.precision},
                        {"recall", report.weighted_avg.recall},
                        {"f1", report.weighted_avg.f1}}},
                      {"accuracy", report.accuracy},
                      {"total", report.total},
                      {"confusion", std::move(confusion)}};
}

std::string confusion_to_csv(const ClassificationReport& report) {
  std::string out = "true\\pred";
  for (PostureLabel label : report.class_order) {
    out.push_back(',');
    out += to_string(label);
  }
  out.push_back('\n');
  for (std::size_t t = 0; t < report.class_order.size(); ++t) {
    out += to_string(report.class_order[t]);
    for (std::size_t p = 0; p < report.class_order.size(); ++p) {
      out.push_back(',');
      out += std::to_string(report.confusion[t][p]);
    }
    out.push_back('\n');
  }
  return out;
}

}  // namespace sitgrid
