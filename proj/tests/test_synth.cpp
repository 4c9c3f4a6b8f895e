#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <map>

#include "sitgrid/errors.hpp"
#include "sitgrid/features.hpp"
#include "sitgrid/synth.hpp"
#include "sitgrid/textio.hpp"

using namespace sitgrid;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "sitgrid_test_synth";
  fs::create_directories(dir);
  return dir / name;
}

double fisher_ratio_left_right(const Dataset& ds) {
  double mean[2] = {0, 0}, var[2] = {0, 0};
  std::size_t count[2] = {0, 0};
  for (const FrameRecord& rec : ds.records) {
    if (rec.posture != PostureLabel::left && rec.posture != PostureLabel::right) continue;
    const int side = rec.posture == PostureLabel::left ? 0 : 1;
    mean[side] += center_of_mass(rec.seat).col;
    ++count[side];
  }
  mean[0] /= count[0];
  mean[1] /= count[1];
  for (const FrameRecord& rec : ds.records) {
    if (rec.posture != PostureLabel::left && rec.posture != PostureLabel::right) continue;
    const int side = rec.posture == PostureLabel::left ? 0 : 1;
    const double d = center_of_mass(rec.seat).col - mean[side];
    var[side] += d * d;
  }
  var[0] /= count[0];
  var[1] /= count[1];
  const double gap = mean[0] - mean[1];
  return gap * gap / (var[0] + var[1]);
}

}  // namespace

TEST_CASE("controlled defaults produce 1980 seat-only records") {
  const Dataset ds = generate_controlled(GeneratorConfig::controlled_defaults(42));
  CHECK(ds.variant == Variant::controlled);
  CHECK(ds.records.size() == 1980);
  for (const FrameRecord& rec : ds.records) {
    CHECK_FALSE(rec.back.has_value());
    CHECK(rec.timestamp_index == 0);
    for (double v : rec.seat.values) CHECK(v >= 0.0);
  }
}

TEST_CASE("realistic defaults produce 4875 two-mat records, 195 per posture per timestamp") {
  const Dataset ds = generate_realistic(GeneratorConfig::realistic_defaults(42));
  CHECK(ds.variant == Variant::realistic);
  CHECK(ds.records.size() == 4875);
  std::map<std::pair<PostureLabel, int>, int> counts;
  for (const FrameRecord& rec : ds.records) {
    CHECK(rec.back.has_value());
    ++counts[{rec.posture, rec.timestamp_index}];
  }
  for (const auto& [key, count] : counts) CHECK(count == 195);  // 39 x 5 events
}

TEST_CASE("zero participants means zero records") {
  GeneratorConfig cfg = GeneratorConfig::controlled_defaults(1);
  cfg.n_participants = 0;
  CHECK(generate_controlled(cfg).records.empty());
}

TEST_CASE("the same seed regenerates byte-identical files") {
  const GeneratorConfig cfg = GeneratorConfig::controlled_defaults(7);
  const fs::path a = temp_file("seed_a.csv");
  const fs::path b = temp_file("seed_b.csv");
  save_dataset(generate_controlled(cfg), a);
  save_dataset(generate_controlled(cfg), b);
  CHECK(read_text_file(a.string()) == read_text_file(b.string()));
}

TEST_CASE("realistic generation rejects the empty posture") {
  GeneratorConfig cfg = GeneratorConfig::realistic_defaults(1);
  cfg.postures.push_back(PostureLabel::empty);
  CHECK_THROWS_AS(generate_realistic(cfg), ConfigError);
}

TEST_CASE("config validation") {
  GeneratorConfig cfg = GeneratorConfig::controlled_defaults(1);
  cfg.weight_scale_low = 2.0;
  cfg.weight_scale_high = 1.0;
  CHECK_THROWS_AS(generate_controlled(cfg), ConfigError);
  cfg = GeneratorConfig::controlled_defaults(1);
  cfg.outlier_probability = 1.5;
  CHECK_THROWS_AS(generate_controlled(cfg), ConfigError);
}

TEST_CASE("sample_frame is a deterministic template evaluation without noise") {
  GeneratorConfig cfg = GeneratorConfig::controlled_defaults(3);
  cfg.noise_sd = 0.0;
  cfg.outlier_probability = 0.0;
  const PostureTemplate tmpl = posture_template(PostureLabel::still, 1.0);

  SplitMix64 rng_a(5);
  SplitMix64 rng_b(5);
  const auto a = sample_frame(tmpl, 1.0, cfg, rng_a);
  const auto b = sample_frame(tmpl, 1.0, cfg, rng_b);
  CHECK(a.first == b.first);
  CHECK(a.second == b.second);
  // center cell (5,5) hosts sensor 15; it should carry the near-peak value
  CHECK(a.first.values[15] > 0.8 * 620.0);

  SUBCASE("doubling the weight exactly doubles every value") {
    SplitMix64 rng_c(5);
    const auto c = sample_frame(tmpl, 2.0, cfg, rng_c);
    for (int s = 0; s < kSensorCount; ++s) {
      CHECK(c.first.values[s] == 2.0 * a.first.values[s]);
      CHECK(c.second.values[s] == 2.0 * a.second.values[s]);
    }
  }
}

TEST_CASE("left frames have smaller CoM column than right frames") {
  GeneratorConfig cfg = GeneratorConfig::controlled_defaults(11);
  cfg.postures = {PostureLabel::left, PostureLabel::right};
  cfg.snapshots_or_events = 25;  // 11 x 2 x 25 = 550 frames
  const Dataset ds = generate_controlled(cfg);
  double left_mean = 0, right_mean = 0;
  std::size_t left_n = 0, right_n = 0;
  for (const FrameRecord& rec : ds.records) {
    const double col = center_of_mass(rec.seat).col;
    if (rec.posture == PostureLabel::left) {
      left_mean += col;
      ++left_n;
    } else {
      right_mean += col;
      ++right_n;
    }
  }
  left_mean /= left_n;
  right_mean /= right_n;
  CHECK(left_n >= 250);
  CHECK(left_mean < right_mean);
}

TEST_CASE("timestamps t1 and t5 sit closer to still than t3 does") {
  const Dataset ds = generate_realistic(GeneratorConfig::realistic_defaults(5));

  // Reference: mean still frame across all still records.
  std::array<double, kSensorCount> still_seat{}, still_back{};
  std::size_t still_n = 0;
  for (const FrameRecord& rec : ds.records) {
    if (rec.posture != PostureLabel::still) continue;
    for (int s = 0; s < kSensorCount; ++s) {
      still_seat[s] += rec.seat.values[s];
      still_back[s] += rec.back->values[s];
    }
    ++still_n;
  }
  for (int s = 0; s < kSensorCount; ++s) {
    still_seat[s] /= still_n;
    still_back[s] /= still_n;
  }

  std::array<double, 6> dist{};
  std::array<std::size_t, 6> count{};
  for (const FrameRecord& rec : ds.records) {
    if (rec.posture == PostureLabel::still) continue;
    double d2 = 0.0;
    for (int s = 0; s < kSensorCount; ++s) {
      const double ds_ = rec.seat.values[s] - still_seat[s];
      const double db = rec.back->values[s] - still_back[s];
      d2 += ds_ * ds_ + db * db;
    }
    dist[rec.timestamp_index] += std::sqrt(d2);
    ++count[rec.timestamp_index];
  }
  for (int t = 1; t <= 5; ++t) dist[t] /= count[t];
  CHECK(dist[3] >= dist[1]);
  CHECK(dist[3] >= dist[5]);
}

TEST_CASE("left/right Fisher ratio grows with the separation parameter") {
  double previous = -1.0;
  for (double separation : {0.5, 1.0, 2.0}) {
    GeneratorConfig cfg = GeneratorConfig::controlled_defaults(123);
    cfg.postures = {PostureLabel::left, PostureLabel::right};
    cfg.separation = separation;
    const double ratio = fisher_ratio_left_right(generate_controlled(cfg));
    CHECK(ratio > previous);
    previous = ratio;
  }
}
