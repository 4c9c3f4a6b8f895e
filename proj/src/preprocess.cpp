#include "sitgrid/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include "sitgrid/errors.hpp"

namespace sitgrid {

namespace {

double sensor_value(const FrameRecord& rec, int sensor) {
  return sensor < kSensorCount ? rec.seat.values[sensor]
                               : rec.back->values[sensor - kSensorCount];
}

void set_sensor_value(FrameRecord& rec, int sensor, double value) {
  if (sensor < kSensorCount) {
    rec.seat.values[sensor] = value;
  } else {
    rec.back->values[sensor - kSensorCount] = value;
  }
}

}  // namespace

double outlier_threshold(const StillBaseline& baseline, const OutlierPolicy& policy, int sensor) {
  if (policy.mode == OutlierMode::absolute_cap) {
    if (policy.cap <= 0.0) throw ConfigError("absolute_cap policy requires cap > 0");
    return policy.cap;
  }
  if (policy.k <= 0.0) throw ConfigError("sigma_multiple policy requires k > 0");
  return baseline.column_mean[sensor] + policy.k * baseline.column_sd[sensor];
}

StillBaseline compute_still_baseline(std::span<const FrameRecord> records, BaselineSource source) {
  if (records.empty()) throw NoRowsForBaseline("no records supplied");
  const bool has_back = records.front().back.has_value();
  const int n_sensors = has_back ? 2 * kSensorCount : kSensorCount;

  StillBaseline baseline;
  baseline.participant_id = records.front().participant_id;
  baseline.source = source;
  baseline.has_back = has_back;
  baseline.mean.assign(n_sensors, 0.0);
  baseline.column_mean.assign(n_sensors, 0.0);
  baseline.column_sd.assign(n_sensors, 0.0);

  for (const FrameRecord& rec : records) {
    if (rec.participant_id != baseline.participant_id) {
      throw InvariantViolation("baseline rows span multiple participants");
    }
    if (rec.back.has_value() != has_back) {
      throw InvariantViolation("baseline rows mix back-frame presence");
    }
  }

  int n_source = 0;
  for (const FrameRecord& rec : records) {
    const bool qualifies = source == BaselineSource::all_rows || rec.posture == PostureLabel::still;
    for (int s = 0; s < n_sensors; ++s) {
      const double v = sensor_value(rec, s);
      baseline.column_mean[s] += v;
      if (qualifies) baseline.mean[s] += v;
    }
    if (qualifies) ++n_source;
  }
  if (n_source == 0) {
    throw NoRowsForBaseline("participant '" + baseline.participant_id + "' has no still rows");
  }
  const double n_all = static_cast<double>(records.size());
  for (int s = 0; s < n_sensors; ++s) {
    baseline.mean[s] /= static_cast<double>(n_source);
    baseline.column_mean[s] /= n_all;
  }
  for (const FrameRecord& rec : records) {
    for (int s = 0; s < n_sensors; ++s) {
      const double d = sensor_value(rec, s) - baseline.column_mean[s];
      baseline.column_sd[s] += d * d;
    }
  }
  for (int s = 0; s < n_sensors; ++s) {
    baseline.column_sd[s] = std::sqrt(baseline.column_sd[s] / n_all);
  }
  baseline.n_rows_used = n_source;
  return baseline;
}

std::vector<FrameRecord> replace_outliers(std::span<const FrameRecord> records,
                                          const StillBaseline& baseline,
                                          const OutlierPolicy& policy) {
  std::vector<FrameRecord> out(records.begin(), records.end());
  const int n_sensors = baseline.n_sensors();
  for (int s = 0; s < n_sensors; ++s) {
    const double threshold = outlier_threshold(baseline, policy, s);
    const double replacement = std::min(baseline.mean[s], threshold);
    for (FrameRecord& rec : out) {
      if (sensor_value(rec, s) > threshold) set_sensor_value(rec, s, replacement);
    }
  }
  return out;
}

std::vector<FrameRecord> normalize(std::span<const FrameRecord> records,
                                   const StillBaseline& baseline) {
  std::vector<FrameRecord> out(records.begin(), records.end());
  const int n_sensors = baseline.n_sensors();
  for (FrameRecord& rec : out) {
    for (int s = 0; s < n_sensors; ++s) {
      set_sensor_value(rec, s, sensor_value(rec, s) - baseline.mean[s]);
    }
  }
  return out;
}

std::vector<FrameRecord> denormalize(std::span<const FrameRecord> records,
                                     const StillBaseline& baseline) {
  std::vector<FrameRecord> out(records.begin(), records.end());
  const int n_sensors = baseline.n_sensors();
  for (FrameRecord& rec : out) {
    for (int s = 0; s < n_sensors; ++s) {
      set_sensor_value(rec, s, sensor_value(rec, s) + baseline.mean[s]);
    }
  }
  return out;
}

Dataset preprocess_pipeline(const Dataset& ds, const OutlierPolicy& policy, bool do_normalize,
                            BaselineChoice baseline) {
  BaselineSource source;
  switch (baseline) {
    case BaselineChoice::still_rows: source = BaselineSource::still_rows; break;
    case BaselineChoice::all_rows: source = BaselineSource::all_rows; break;
    case BaselineChoice::auto_by_variant:
    default:
      source = ds.variant == Variant::controlled ? BaselineSource::still_rows
                                                 : BaselineSource::all_rows;
      break;
  }

  Dataset out;
  out.variant = ds.variant;
  out.provenance = ds.provenance + " | preprocessed";
  out.records.resize(ds.records.size());

  // Group rows by participant, keeping each row's original position.
  std::vector<std::pair<std::string, std::vector<std::size_t>>> participants;
  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    const std::string& id = ds.records[i].participant_id;
    auto it = std::find_if(participants.begin(), participants.end(),
                           [&](const auto& p) { return p.first == id; });
    if (it == participants.end()) {
      participants.push_back({id, {i}});
    } else {
      it->second.push_back(i);
    }
  }

  for (const auto& [id, rows] : participants) {
    std::vector<FrameRecord> chunk;
    chunk.reserve(rows.size());
    for (std::size_t i : rows) chunk.push_back(ds.records[i]);

    const StillBaseline bl = compute_still_baseline(chunk, source);
    std::vector<FrameRecord> processed = replace_outliers(chunk, bl, policy);
    if (do_normalize) processed = normalize(processed, bl);

    for (std::size_t j = 0; j < rows.size(); ++j) {
      out.records[rows[j]] = std::move(processed[j]);
    }
  }
  return out;
}

}  // namespace sitgrid
