#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sitgrid/dataset.hpp"

namespace sitgrid {

struct RfParams;  // classifier.hpp

/// Pressure-weighted mean grid coordinate. Negative readings are clamped to
/// zero mass; a (near-)massless frame falls back to the grid centroid.
struct CenterOfMass {
  double row = 4.5;
  double col = 4.5;
  bool zero_mass = false;
};

CenterOfMass center_of_mass(const PressureFrame& frame);

/// Sums over rows 1-4 / 5-8 crossed with cols 1-4 / 5-8; 8 sensors each.
struct QuadrantSums {
  double tl = 0, tr = 0, bl = 0, br = 0;
};

QuadrantSums quadrant_sums(const PressureFrame& frame);

/// Sums over the outer two-row / two-column bands; 8 sensors each, corner
/// sensors counted in two bands.
struct EdgeSums {
  double top = 0, bottom = 0, left = 0, right = 0;
};

EdgeSums edge_sums(const PressureFrame& frame);

enum class RecurrentSelector { full, t3, t234 };

RecurrentSelector recurrent_from_string(const std::string& s);
std::string to_string(RecurrentSelector selector);

/// Realistic datasets only. t3 keeps the mid-event snapshot of every
/// (participant, posture, event); t234 replaces each event with the
/// element-wise mean of its t2..t4 rows.
Dataset select_recurrent(const Dataset& ds, RecurrentSelector selector);

enum class MatSelection { seat, back, both };

MatSelection mats_from_string(const std::string& s);
std::string to_string(MatSelection mats);

/// Which engineered columns to emit. A non-empty whitelist overrides the
/// group flags and fixes the exact column set and order.
struct FeatureSpec {
  bool include_raw = true;
  bool include_com = true;
  bool include_quadrants = true;
  bool include_edges = true;
  MatSelection mats = MatSelection::seat;
  std::vector<std::string> whitelist;
};

struct GroupKey {
  std::string participant_id;
  int event = 0;

  bool operator==(const GroupKey&) const = default;
  bool operator<(const GroupKey& o) const {
    return participant_id != o.participant_id ? participant_id < o.participant_id
                                              : event < o.event;
  }
};

/// Rows of engineered features with aligned labels and group keys.
struct FeatureMatrix {
  std::vector<std::string> names;
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<double> values;  // row-major
  std::vector<PostureLabel> labels;
  std::vector<GroupKey> groups;

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(values).subspan(i * n_cols, n_cols);
  }
  double at(std::size_t i, std::size_t j) const { return values[i * n_cols + j]; }

  /// Index of a named column, or -1.
  long column_index(const std::string& name) const;
};

/// Column order: raw seat, raw back, seat CoM, back CoM, seat quadrants,
/// back quadrants, seat edges, back edges, filtered by the spec.
FeatureMatrix build_feature_matrix(const Dataset& ds, const FeatureSpec& spec);

/// CSV with header participant_id,event,posture,<feature columns>.
void save_feature_matrix(const FeatureMatrix& fm, const std::filesystem::path& path);
FeatureMatrix load_feature_matrix(const std::filesystem::path& path);

/// Mean impurity-decrease score per feature across a forest, normalized to
/// sum 1, sorted descending. Deterministic given the seed.
std::vector<std::pair<std::string, double>> feature_importance(const FeatureMatrix& fm,
                                                               const RfParams& params,
                                                               std::uint64_t seed);

}  // namespace sitgrid
