#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "sitgrid/dataset.hpp"
#include "sitgrid/rng.hpp"

namespace sitgrid {

/// Knobs of the seeded chair-data generator. (config, seed) -> Dataset is a
/// pure function; per-record streams derive from (seed, participant, posture,
/// event, timestamp), so generation order never changes the output.
struct GeneratorConfig {
  std::uint64_t seed = 0;
  int n_participants = 0;
  std::vector<PostureLabel> postures;
  int snapshots_or_events = 0;  // snapshots per posture (controlled) or events (realistic)
  double weight_scale_low = 0.7;
  double weight_scale_high = 1.3;
  double noise_sd = 8.0;
  double outlier_probability = 0.01;
  double outlier_magnitude = 1023.0;
  double separation = 1.0;  // how far posture templates shift mass

  /// 11 participants x 6 postures x 30 snapshots = 1980 seat-only records.
  static GeneratorConfig controlled_defaults(std::uint64_t seed);

  /// 39 participants x 5 postures x 5 events x 5 timestamps = 4875 records.
  static GeneratorConfig realistic_defaults(std::uint64_t seed);
};

/// Gaussian pressure bump over grid coordinates for one mat.
struct MatTemplate {
  double center_row = 4.5;
  double center_col = 4.5;
  double sigma_row = 1.9;
  double sigma_col = 1.9;
  double amplitude = 0.0;
};

/// Per-posture pressure model: a bump on each mat. Left/right shift the seat
/// center along the column axis (mirrored on the back mat), back/front trade
/// seat-row shift against backrest engagement, empty is a noise floor.
struct PostureTemplate {
  MatTemplate seat;
  MatTemplate back;
};

PostureTemplate posture_template(PostureLabel posture, double separation);

/// Linear blend of template parameters toward the still template;
/// keep = 1 returns the posture template, keep = 0 the still one.
PostureTemplate blend_toward_still(const PostureTemplate& posture, const PostureTemplate& still,
                                   double keep);

/// Evaluates a mat template at every occupied cell: weight * amplitude *
/// Gaussian(cell) + noise, clamped at 0; with probability
/// outlier_probability one sensor is replaced by outlier_magnitude.
std::pair<PressureFrame, PressureFrame> sample_frame(const PostureTemplate& tmpl, double weight,
                                                     const GeneratorConfig& cfg, SplitMix64& rng);

Dataset generate_controlled(const GeneratorConfig& cfg);
Dataset generate_realistic(const GeneratorConfig& cfg);

}  // namespace sitgrid
