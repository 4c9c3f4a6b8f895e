#include "sitgrid/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "sitgrid/errors.hpp"

namespace sitgrid {

namespace {

constexpr double kBodyAmplitude = 620.0;   // peak raw count, 10-bit ADC convention
constexpr double kEmptyAmplitude = 6.0;    // an empty chair still reads a little
constexpr double kBackRestFactor = 0.35;   // backrest engagement while sitting still

// Blend factors toward the full posture template per realistic timestamp
// t01..t05: the subject is barely moving at t1 and already returning at t5.
constexpr double kTimestampKeep[5] = {0.30, 0.85, 1.00, 0.90, 0.40};

void validate_config(const GeneratorConfig& cfg) {
  if (cfg.n_participants < 0) throw ConfigError("n_participants must be >= 0");
  if (cfg.snapshots_or_events < 0) throw ConfigError("snapshots_or_events must be >= 0");
  if (cfg.weight_scale_low > cfg.weight_scale_high || cfg.weight_scale_low <= 0.0) {
    throw ConfigError("weight_scale_range must satisfy 0 < low <= high");
  }
  if (cfg.noise_sd < 0.0) throw ConfigError("noise_sd must be >= 0");
  if (cfg.outlier_probability < 0.0 || cfg.outlier_probability > 1.0) {
    throw ConfigError("outlier_probability must be in [0, 1]");
  }
  if (cfg.separation < 0.0) throw ConfigError("separation must be >= 0");
}

MatTemplate blend_mat(const MatTemplate& a, const MatTemplate& b, double keep) {
  // keep = 1 -> a, keep = 0 -> b
  MatTemplate out;
  out.center_row = b.center_row + keep * (a.center_row - b.center_row);
  out.center_col = b.center_col + keep * (a.center_col - b.center_col);
  out.sigma_row = b.sigma_row + keep * (a.sigma_row - b.sigma_row);
  out.sigma_col = b.sigma_col + keep * (a.sigma_col - b.sigma_col);
  out.amplitude = b.amplitude + keep * (a.amplitude - b.amplitude);
  return out;
}

PressureFrame sample_mat(const MatTemplate& tmpl, Mat mat, double weight,
                         const GeneratorConfig& cfg, SplitMix64& rng) {
  PressureFrame frame;
  frame.mat = mat;
  for (int s = 0; s < kSensorCount; ++s) {
    const GridCell cell = GridMapping::cell_of(s);
    const double dr = (cell.row - tmpl.center_row) / tmpl.sigma_row;
    const double dc = (cell.col - tmpl.center_col) / tmpl.sigma_col;
    const double bump = std::exp(-0.5 * (dr * dr + dc * dc));
    const double noise = cfg.noise_sd * rng.next_normal(0.0, 1.0);
    frame.values[s] = std::max(0.0, weight * tmpl.amplitude * bump + noise);
  }
  if (rng.next_unit() < cfg.outlier_probability) {
    frame.values[rng.next_index(kSensorCount)] = cfg.outlier_magnitude;
  }
  return frame;
}

struct Subject {
  double weight = 1.0;
  double jitter_row = 0.0;
  double jitter_col = 0.0;
};

Subject draw_subject(const GeneratorConfig& cfg, Variant variant, int participant) {
  SplitMix64 rng(derive_stream(cfg.seed, {0ull, static_cast<std::uint64_t>(variant),
                                          static_cast<std::uint64_t>(participant)}));
  Subject s;
  s.weight = rng.next_uniform(cfg.weight_scale_low, cfg.weight_scale_high);
  s.jitter_row = rng.next_normal(0.0, 0.12);
  s.jitter_col = rng.next_normal(0.0, 0.12);
  return s;
}

PostureTemplate apply_jitter(PostureTemplate tmpl, const Subject& subject) {
  tmpl.seat.center_row += subject.jitter_row;
  tmpl.seat.center_col += subject.jitter_col;
  tmpl.back.center_row += subject.jitter_row;
  tmpl.back.center_col -= subject.jitter_col;  // mirror view of the backrest
  return tmpl;
}

std::string participant_id(Variant variant, int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%c%02d", variant == Variant::controlled ? 'c' : 'r', index + 1);
  return buf;
}

SplitMix64 record_stream(const GeneratorConfig& cfg, Variant variant, int participant,
                         PostureLabel posture, int event, int timestamp) {
  return SplitMix64(derive_stream(
      cfg.seed,
      {1ull + static_cast<std::uint64_t>(variant), static_cast<std::uint64_t>(participant),
       static_cast<std::uint64_t>(posture), static_cast<std::uint64_t>(event),
       static_cast<std::uint64_t>(timestamp)}));
}

}  // namespace

GeneratorConfig GeneratorConfig::controlled_defaults(std::uint64_t seed) {
  GeneratorConfig cfg;
  cfg.seed = seed;
  cfg.n_participants = 11;
  cfg.postures = all_labels();
  cfg.snapshots_or_events = 30;
  return cfg;
}

GeneratorConfig GeneratorConfig::realistic_defaults(std::uint64_t seed) {
  GeneratorConfig cfg;
  cfg.seed = seed;
  cfg.n_participants = 39;
  cfg.postures = labels_for(Variant::realistic);
  cfg.snapshots_or_events = 5;
  return cfg;
}

PostureTemplate posture_template(PostureLabel posture, double separation) {
  PostureTemplate t;
  t.seat = {4.5, 4.5, 1.9, 1.9, kBodyAmplitude};
  t.back = {4.5, 4.5, 2.2, 2.2, kBodyAmplitude * kBackRestFactor};
  switch (posture) {
    case PostureLabel::still:
      break;
    case PostureLabel::empty:
      t.seat.amplitude = kEmptyAmplitude;
      t.back.amplitude = kEmptyAmplitude;
      break;
    case PostureLabel::left:
      // Seat columns 1..4 sit under the left leg; the back mat is mirrored.
      t.seat.center_col -= 1.4 * separation;
      t.back.center_col += 1.2 * separation;
      t.back.amplitude = kBodyAmplitude * 0.30;
      break;
    case PostureLabel::right:
      t.seat.center_col += 1.4 * separation;
      t.back.center_col -= 1.2 * separation;
      t.back.amplitude = kBodyAmplitude * 0.30;
      break;
    case PostureLabel::front:
      // Leaning forward loads the thighs (low rows) and leaves the backrest.
      t.seat.center_row -= 1.0 * separation;
      t.seat.amplitude = kBodyAmplitude * 1.05;
      t.back.amplitude = kBodyAmplitude * 0.04;
      break;
    case PostureLabel::back:
      t.seat.center_row += 1.0 * separation;
      t.back.amplitude = kBodyAmplitude * 0.95;
      t.back.sigma_row = 2.5;
      break;
  }
  return t;
}

PostureTemplate blend_toward_still(const PostureTemplate& posture, const PostureTemplate& still,
                                   double keep) {
  PostureTemplate out;
  out.seat = blend_mat(posture.seat, still.seat, keep);
  out.back = blend_mat(posture.back, still.back, keep);
  return out;
}

std::pair<PressureFrame, PressureFrame> sample_frame(const PostureTemplate& tmpl, double weight,
                                                     const GeneratorConfig& cfg, SplitMix64& rng) {
  PressureFrame seat = sample_mat(tmpl.seat, Mat::seat, weight, cfg, rng);
  PressureFrame back = sample_mat(tmpl.back, Mat::back, weight, cfg, rng);
  return {seat, back};
}

Dataset generate_controlled(const GeneratorConfig& cfg) {
  validate_config(cfg);
  Dataset ds;
  ds.variant = Variant::controlled;
  ds.provenance = "synthetic controlled (seed " + std::to_string(cfg.seed) + ")";
  for (int p = 0; p < cfg.n_participants; ++p) {
    const Subject subject = draw_subject(cfg, Variant::controlled, p);
    const std::string id = participant_id(Variant::controlled, p);
    for (PostureLabel posture : cfg.postures) {
      const PostureTemplate tmpl = apply_jitter(posture_template(posture, cfg.separation), subject);
      for (int snap = 0; snap < cfg.snapshots_or_events; ++snap) {
        SplitMix64 rng = record_stream(cfg, Variant::controlled, p, posture, 0, snap);
        FrameRecord rec;
        rec.participant_id = id;
        rec.age_group = AgeGroup::unspecified;
        rec.posture = posture;
        rec.timestamp_index = 0;
        rec.snapshot_index = snap;
        rec.seat = sample_frame(tmpl, subject.weight, cfg, rng).first;
        ds.records.push_back(std::move(rec));
      }
    }
  }
  return ds;
}

Dataset generate_realistic(const GeneratorConfig& cfg) {
  validate_config(cfg);
  for (PostureLabel posture : cfg.postures) {
    if (posture == PostureLabel::empty) {
      throw ConfigError("realistic generation excludes the 'empty' posture");
    }
  }
  Dataset ds;
  ds.variant = Variant::realistic;
  ds.provenance = "synthetic realistic (seed " + std::to_string(cfg.seed) + ")";
  for (int p = 0; p < cfg.n_participants; ++p) {
    const Subject subject = draw_subject(cfg, Variant::realistic, p);
    const std::string id = participant_id(Variant::realistic, p);
    const AgeGroup age = (p % 2 == 0) ? AgeGroup::young : AgeGroup::senior;
    const PostureTemplate still_tmpl =
        apply_jitter(posture_template(PostureLabel::still, cfg.separation), subject);
    for (PostureLabel posture : cfg.postures) {
      const PostureTemplate full_tmpl =
          apply_jitter(posture_template(posture, cfg.separation), subject);
      for (int event = 0; event < cfg.snapshots_or_events; ++event) {
        for (int t = 1; t <= 5; ++t) {
          SplitMix64 rng = record_stream(cfg, Variant::realistic, p, posture, event, t);
          const PostureTemplate tmpl =
              blend_toward_still(full_tmpl, still_tmpl, kTimestampKeep[t - 1]);
          auto [seat, back] = sample_frame(tmpl, subject.weight, cfg, rng);
          FrameRecord rec;
          rec.participant_id = id;
          rec.age_group = age;
          rec.posture = posture;
          rec.timestamp_index = t;
          rec.snapshot_index = event;
          rec.seat = seat;
          rec.back = back;
          ds.records.push_back(std::move(rec));
        }
      }
    }
  }
  return ds;
}

}  // namespace sitgrid
