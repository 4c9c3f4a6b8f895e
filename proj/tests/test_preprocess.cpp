#include <doctest.h>

#include <cmath>

#include "sitgrid/errors.hpp"
#include "sitgrid/features.hpp"
#include "sitgrid/preprocess.hpp"
#include "sitgrid/rng.hpp"
#include "sitgrid/synth.hpp"

using namespace sitgrid;

namespace {

FrameRecord seat_record(const std::string& id, PostureLabel posture, double fill) {
  FrameRecord rec;
  rec.participant_id = id;
  rec.posture = posture;
  rec.seat.values.fill(fill);
  return rec;
}

}  // namespace

TEST_CASE("baseline of a single still row is that row") {
  std::vector<FrameRecord> rows = {seat_record("p", PostureLabel::still, 10.0)};
  const StillBaseline bl = compute_still_baseline(rows, BaselineSource::still_rows);
  CHECK(bl.n_rows_used == 1);
  for (int s = 0; s < kSensorCount; ++s) CHECK(bl.mean[s] == 10.0);
}

TEST_CASE("baseline is the arithmetic mean of qualifying rows") {
  std::vector<FrameRecord> rows = {seat_record("p", PostureLabel::still, 10.0),
                                   seat_record("p", PostureLabel::still, 20.0),
                                   seat_record("p", PostureLabel::still, 30.0),
                                   seat_record("p", PostureLabel::left, 999.0)};
  const StillBaseline still = compute_still_baseline(rows, BaselineSource::still_rows);
  CHECK(still.n_rows_used == 3);
  for (int s = 0; s < kSensorCount; ++s) CHECK(still.mean[s] == doctest::Approx(20.0));

  const StillBaseline all = compute_still_baseline(rows, BaselineSource::all_rows);
  CHECK(all.n_rows_used == 4);
  for (int s = 0; s < kSensorCount; ++s) {
    CHECK(all.mean[s] == doctest::Approx((10.0 + 20.0 + 30.0 + 999.0) / 4.0));
  }
}

TEST_CASE("no still rows raises NoRowsForBaseline") {
  std::vector<FrameRecord> rows = {seat_record("p", PostureLabel::left, 5.0)};
  CHECK_THROWS_AS(compute_still_baseline(rows, BaselineSource::still_rows), NoRowsForBaseline);
}

TEST_CASE("baseline matches an independent brute-force mean on synthetic data") {
  GeneratorConfig cfg = GeneratorConfig::realistic_defaults(31);
  cfg.n_participants = 1;
  const Dataset ds = generate_realistic(cfg);
  REQUIRE(ds.records.size() == 125);
  const StillBaseline bl = compute_still_baseline(ds.records, BaselineSource::all_rows);

  for (int s = 0; s < 2 * kSensorCount; ++s) {
    double sum = 0.0;
    for (const FrameRecord& rec : ds.records) {
      sum += s < kSensorCount ? rec.seat.values[s] : rec.back->values[s - kSensorCount];
    }
    CHECK(bl.mean[s] == doctest::Approx(sum / 125.0).epsilon(1e-12));
  }
}

TEST_CASE("values above the threshold are replaced by the baseline mean") {
  // Column stats chosen so the sigma threshold lands at 400.
  std::vector<FrameRecord> rows;
  rows.push_back(seat_record("p", PostureLabel::still, 100.0));
  rows.push_back(seat_record("p", PostureLabel::still, 100.0));
  rows.push_back(seat_record("p", PostureLabel::left, 900.0));
  StillBaseline bl = compute_still_baseline(rows, BaselineSource::still_rows);
  bl.column_mean.assign(kSensorCount, 100.0);
  bl.column_sd.assign(kSensorCount, 75.0);
  OutlierPolicy policy;  // sigma mode, k = 4 -> threshold 400
  CHECK(outlier_threshold(bl, policy, 0) == doctest::Approx(400.0));

  const std::vector<FrameRecord> cleaned = replace_outliers(rows, bl, policy);
  CHECK(cleaned.size() == rows.size());
  for (int s = 0; s < kSensorCount; ++s) {
    CHECK(cleaned[2].seat.values[s] == doctest::Approx(100.0));
    CHECK(cleaned[0].seat.values[s] == 100.0);
  }

  SUBCASE("no-op when everything is below the threshold") {
    const std::vector<FrameRecord> again = replace_outliers(cleaned, bl, policy);
    CHECK(again == cleaned);
  }
}

TEST_CASE("replacement is idempotent and never leaves a value above the threshold") {
  GeneratorConfig cfg = GeneratorConfig::controlled_defaults(17);
  cfg.n_participants = 1;
  cfg.outlier_probability = 0.15;
  cfg.outlier_magnitude = 5000.0;
  const Dataset ds = generate_controlled(cfg);
  const StillBaseline bl = compute_still_baseline(ds.records, BaselineSource::still_rows);

  for (OutlierPolicy policy : {OutlierPolicy{OutlierMode::sigma_multiple, 4.0, 0.0},
                               OutlierPolicy{OutlierMode::absolute_cap, 0.0, 800.0}}) {
    const std::vector<FrameRecord> once = replace_outliers(ds.records, bl, policy);
    for (int s = 0; s < kSensorCount; ++s) {
      const double threshold = outlier_threshold(bl, policy, s);
      for (const FrameRecord& rec : once) CHECK(rec.seat.values[s] <= threshold);
    }
    CHECK(replace_outliers(once, bl, policy) == once);
  }
}

TEST_CASE("normalize subtracts the baseline and denormalize restores it") {
  std::vector<FrameRecord> rows = {seat_record("p", PostureLabel::still, 100.0),
                                   seat_record("p", PostureLabel::left, 120.0)};
  const StillBaseline bl = compute_still_baseline(rows, BaselineSource::still_rows);
  const std::vector<FrameRecord> normed = normalize(rows, bl);
  for (int s = 0; s < kSensorCount; ++s) {
    CHECK(normed[0].seat.values[s] == 0.0);
    CHECK(normed[1].seat.values[s] == doctest::Approx(20.0));
  }
  const std::vector<FrameRecord> restored = denormalize(normed, bl);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int s = 0; s < kSensorCount; ++s) {
      CHECK(restored[i].seat.values[s] ==
            doctest::Approx(rows[i].seat.values[s]).epsilon(1e-12));
    }
  }
}

TEST_CASE("normalized baseline-source rows have column means of zero") {
  GeneratorConfig cfg = GeneratorConfig::controlled_defaults(23);
  cfg.n_participants = 2;
  const Dataset ds = generate_controlled(cfg);
  for (const std::string id : {"c01", "c02"}) {
    std::vector<FrameRecord> chunk;
    for (const FrameRecord& rec : ds.records) {
      if (rec.participant_id == id) chunk.push_back(rec);
    }
    const StillBaseline bl = compute_still_baseline(chunk, BaselineSource::still_rows);
    const std::vector<FrameRecord> normed = normalize(chunk, bl);
    for (int s = 0; s < kSensorCount; ++s) {
      double mean = 0.0;
      std::size_t n = 0;
      for (const FrameRecord& rec : normed) {
        if (rec.posture == PostureLabel::still) {
          mean += rec.seat.values[s];
          ++n;
        }
      }
      mean /= static_cast<double>(n);
      CHECK(std::abs(mean) < 1e-12);
    }
  }
}

TEST_CASE("pipeline preserves count, order, labels and metadata") {
  const Dataset ds = generate_controlled(GeneratorConfig::controlled_defaults(3));
  const Dataset out = preprocess_pipeline(ds, OutlierPolicy{}, true);
  REQUIRE(out.records.size() == ds.records.size());
  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    CHECK(out.records[i].participant_id == ds.records[i].participant_id);
    CHECK(out.records[i].posture == ds.records[i].posture);
    CHECK(out.records[i].snapshot_index == ds.records[i].snapshot_index);
    CHECK(out.records[i].timestamp_index == ds.records[i].timestamp_index);
  }
}

TEST_CASE("normalize flag off leaves the post-replacement values") {
  const Dataset ds = generate_realistic(GeneratorConfig::realistic_defaults(3));
  const Dataset raw = preprocess_pipeline(ds, OutlierPolicy{}, false);

  // Rebuild by hand for one participant.
  std::vector<FrameRecord> chunk;
  for (const FrameRecord& rec : ds.records) {
    if (rec.participant_id == "r01") chunk.push_back(rec);
  }
  const StillBaseline bl = compute_still_baseline(chunk, BaselineSource::all_rows);
  const std::vector<FrameRecord> expected = replace_outliers(chunk, bl, OutlierPolicy{});
  std::size_t j = 0;
  for (std::size_t i = 0; i < ds.records.size() && j < expected.size(); ++i) {
    if (ds.records[i].participant_id != "r01") continue;
    CHECK(raw.records[i] == expected[j]);
    ++j;
  }
  CHECK(j == expected.size());
}

TEST_CASE("normalization makes the CoM of scaled participants coincide") {
  // Two participants with identical geometry, different weight, no noise.
  GeneratorConfig cfg = GeneratorConfig::controlled_defaults(77);
  cfg.noise_sd = 0.0;
  cfg.outlier_probability = 0.0;
  cfg.postures = {PostureLabel::still, PostureLabel::left};
  cfg.snapshots_or_events = 1;

  const PostureTemplate still_tmpl = posture_template(PostureLabel::still, cfg.separation);
  const PostureTemplate left_tmpl = posture_template(PostureLabel::left, cfg.separation);
  Dataset ds;
  ds.variant = Variant::controlled;
  SplitMix64 rng(1);  // noise_sd = 0 so the stream content is irrelevant
  for (const auto& [id, weight] : std::vector<std::pair<std::string, double>>{
           {"a", 1.0}, {"b", 2.0}}) {
    FrameRecord still_rec;
    still_rec.participant_id = id;
    still_rec.posture = PostureLabel::still;
    still_rec.seat = sample_frame(still_tmpl, weight, cfg, rng).first;
    ds.records.push_back(still_rec);
    FrameRecord left_rec;
    left_rec.participant_id = id;
    left_rec.posture = PostureLabel::left;
    left_rec.seat = sample_frame(left_tmpl, weight, cfg, rng).first;
    ds.records.push_back(left_rec);
  }

  const Dataset normed = preprocess_pipeline(ds, OutlierPolicy{}, true);
  const CenterOfMass com_a = center_of_mass(normed.records[1].seat);
  const CenterOfMass com_b = center_of_mass(normed.records[3].seat);
  CHECK(com_a.row == doctest::Approx(com_b.row).epsilon(1e-9));
  CHECK(com_a.col == doctest::Approx(com_b.col).epsilon(1e-9));
}
