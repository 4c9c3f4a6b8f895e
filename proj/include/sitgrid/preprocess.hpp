#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sitgrid/dataset.hpp"

namespace sitgrid {

enum class BaselineSource { still_rows, all_rows };

/// Which rows feed the baseline when the caller does not say: controlled
/// datasets use their still-labeled rows, realistic ones the whole
/// participant file.
enum class BaselineChoice { auto_by_variant, still_rows, all_rows };

/// Per-participant per-sensor reference statistics. `mean` (over the source
/// rows) is the normalization / replacement value; `column_mean` /
/// `column_sd` (over all of the participant's rows) anchor the sigma-rule
/// outlier threshold. Seat sensors occupy indices 0..31, back 32..63.
struct StillBaseline {
  std::string participant_id;
  std::vector<double> mean;
  std::vector<double> column_mean;
  std::vector<double> column_sd;
  BaselineSource source = BaselineSource::still_rows;
  int n_rows_used = 0;
  bool has_back = false;

  int n_sensors() const { return has_back ? 2 * kSensorCount : kSensorCount; }
};

enum class OutlierMode { sigma_multiple, absolute_cap };

struct OutlierPolicy {
  OutlierMode mode = OutlierMode::sigma_multiple;
  double k = 4.0;    // sigma_multiple: threshold = column_mean + k * column_sd
  double cap = 0.0;  // absolute_cap: threshold = cap
};

/// Threshold for one sensor column under a policy.
double outlier_threshold(const StillBaseline& baseline, const OutlierPolicy& policy, int sensor);

/// All records must belong to one participant. Throws NoRowsForBaseline when
/// no qualifying row exists.
StillBaseline compute_still_baseline(std::span<const FrameRecord> records, BaselineSource source);

/// Replaces every value above its column threshold with the column's baseline
/// mean, capped at the threshold so no value is ever left above it. Count and
/// order preserved; idempotent.
std::vector<FrameRecord> replace_outliers(std::span<const FrameRecord> records,
                                          const StillBaseline& baseline,
                                          const OutlierPolicy& policy);

/// Subtracts the baseline mean from every sensor value. Labels and metadata
/// unchanged.
std::vector<FrameRecord> normalize(std::span<const FrameRecord> records,
                                   const StillBaseline& baseline);

/// Adds the baseline back; inverse of normalize.
std::vector<FrameRecord> denormalize(std::span<const FrameRecord> records,
                                     const StillBaseline& baseline);

/// Per participant: baseline -> outlier replacement -> optional
/// normalization. Record count, order, labels, and metadata are preserved.
Dataset preprocess_pipeline(const Dataset& ds, const OutlierPolicy& policy, bool do_normalize,
                            BaselineChoice baseline = BaselineChoice::auto_by_variant);

}  // namespace sitgrid
