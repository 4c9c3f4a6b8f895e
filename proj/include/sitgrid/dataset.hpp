#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sitgrid/grid.hpp"

namespace sitgrid {

enum class PostureLabel { back, empty, left, right, front, still };
enum class AgeGroup { young, senior, unspecified };
enum class Variant { controlled, realistic };

std::string to_string(PostureLabel label);
std::string to_string(AgeGroup group);
std::string to_string(Variant variant);
PostureLabel posture_from_string(const std::string& s);
AgeGroup age_group_from_string(const std::string& s);
Variant variant_from_string(const std::string& s);

/// All six labels in canonical order.
const std::vector<PostureLabel>& all_labels();

/// Labels valid for a variant: realistic datasets never contain `empty`.
const std::vector<PostureLabel>& labels_for(Variant variant);

/// One labeled observation. Controlled-style records carry the seat frame
/// only; realistic-style records carry both mats and a timestamp in 1..5.
struct FrameRecord {
  std::string participant_id;
  AgeGroup age_group = AgeGroup::unspecified;
  PostureLabel posture = PostureLabel::still;
  int timestamp_index = 0;  // 1..5 for realistic, 0 for controlled snapshots
  int snapshot_index = 0;   // controlled snapshot or realistic event index
  PressureFrame seat;
  std::optional<PressureFrame> back;

  bool operator==(const FrameRecord&) const = default;
};

struct Dataset {
  Variant variant = Variant::controlled;
  std::vector<FrameRecord> records;
  std::string provenance;  // in-memory note, not persisted

  bool same_contents(const Dataset& other) const {
    return variant == other.variant && records == other.records;
  }
};

/// Throws InvariantViolation when any record breaks the variant rules
/// (back-frame presence, timestamp range, label set, finite values).
void validate_dataset(const Dataset& ds);

/// Canonical CSV: header
/// participant_id,age_group,variant,posture,timestamp_index,snapshot_index,s00..s31,b00..b31
/// with b-columns left empty for controlled records. LF line endings.
Dataset load_dataset(const std::filesystem::path& path);

/// Deterministic byte output for a given Dataset.
void save_dataset(const Dataset& ds, const std::filesystem::path& path);

/// One row of an original-layout raw file: ordered named fields.
struct RawRow {
  std::vector<std::pair<std::string, std::string>> fields;

  const std::string* find(const std::string& name) const;
  bool operator==(const RawRow&) const = default;
};

/// Declares which of the raw file's fields to keep. The original files carry
/// 80 fields; the map names the 64 sensor fields plus the posture field (the
/// 65 retained data fields) and any metadata passed through alongside them.
struct RawFieldMap {
  std::vector<std::string> sensor_fields;  // seat then back, 64 names
  std::string posture_field;
  std::vector<std::string> passthrough_fields;  // metadata outside the 65-count
};

/// Keeps exactly the mapped sensor fields + posture (+ passthrough metadata),
/// dropping everything else. Throws SchemaMismatch when an expected field is
/// absent. Idempotent.
RawRow prune_raw_columns(const RawRow& row, const RawFieldMap& map);

}  // namespace sitgrid
