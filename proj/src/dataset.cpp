#include "sitgrid/dataset.hpp"

#include <cmath>
#include <cstdio>

#include "sitgrid/errors.hpp"
#include "sitgrid/textio.hpp"

namespace sitgrid {

std::string to_string(PostureLabel label) {
  switch (label) {
    case PostureLabel::back: return "back";
    case PostureLabel::empty: return "empty";
    case PostureLabel::left: return "left";
    case PostureLabel::right: return "right";
    case PostureLabel::front: return "front";
    case PostureLabel::still: return "still";
  }
  return "?";
}

std::string to_string(AgeGroup group) {
  switch (group) {
    case AgeGroup::young: return "young";
    case AgeGroup::senior: return "senior";
    case AgeGroup::unspecified: return "unspecified";
  }
  return "?";
}

std::string to_string(Variant variant) {
  return variant == Variant::controlled ? "controlled" : "realistic";
}

PostureLabel posture_from_string(const std::string& s) {
  if (s == "back") return PostureLabel::back;
  if (s == "empty") return PostureLabel::empty;
  if (s == "left") return PostureLabel::left;
  if (s == "right") return PostureLabel::right;
  if (s == "front") return PostureLabel::front;
  if (s == "still") return PostureLabel::still;
  throw ParseError("unknown posture label: '" + s + "'");
}

AgeGroup age_group_from_string(const std::string& s) {
  if (s == "young") return AgeGroup::young;
  if (s == "senior") return AgeGroup::senior;
  if (s == "unspecified") return AgeGroup::unspecified;
  throw ParseError("unknown age group: '" + s + "'");
}

Variant variant_from_string(const std::string& s) {
  if (s == "controlled") return Variant::controlled;
  if (s == "realistic") return Variant::realistic;
  throw ParseError("unknown variant: '" + s + "'");
}

const std::vector<PostureLabel>& all_labels() {
  static const std::vector<PostureLabel> labels = {PostureLabel::back,  PostureLabel::empty,
                                                   PostureLabel::left,  PostureLabel::right,
                                                   PostureLabel::front, PostureLabel::still};
  return labels;
}

const std::vector<PostureLabel>& labels_for(Variant variant) {
  static const std::vector<PostureLabel> realistic = {PostureLabel::back, PostureLabel::left,
                                                      PostureLabel::right, PostureLabel::front,
                                                      PostureLabel::still};
  return variant == Variant::controlled ? all_labels() : realistic;
}

namespace {

void validate_record(const FrameRecord& rec, Variant variant, std::size_t row) {
  const std::string at = "record " + std::to_string(row) + ": ";
  if (variant == Variant::realistic) {
    if (rec.posture == PostureLabel::empty) {
      throw InvariantViolation(at + "realistic dataset contains 'empty' label");
    }
    if (!rec.back.has_value()) {
      throw InvariantViolation(at + "realistic record lacks the back frame");
    }
    if (rec.timestamp_index < 1 || rec.timestamp_index > 5) {
      throw InvariantViolation(at + "realistic timestamp_index out of 1..5: " +
                               std::to_string(rec.timestamp_index));
    }
  } else {
    if (rec.back.has_value()) {
      throw InvariantViolation(at + "controlled record carries a back frame");
    }
    if (rec.timestamp_index != 0) {
      throw InvariantViolation(at + "controlled timestamp_index must be 0");
    }
  }
  if (rec.snapshot_index < 0) {
    throw InvariantViolation(at + "negative snapshot_index");
  }
  for (double v : rec.seat.values) {
    if (!std::isfinite(v)) throw InvariantViolation(at + "non-finite seat value");
  }
  if (rec.back) {
    for (double v : rec.back->values) {
      if (!std::isfinite(v)) throw InvariantViolation(at + "non-finite back value");
    }
  }
}

std::vector<std::string> canonical_header() {
  std::vector<std::string> h = {"participant_id", "age_group",      "variant",
                                "posture",        "timestamp_index", "snapshot_index"};
  char buf[8];
  for (int i = 0; i < kSensorCount; ++i) {
    std::snprintf(buf, sizeof(buf), "s%02d", i);
    h.emplace_back(buf);
  }
  for (int i = 0; i < kSensorCount; ++i) {
    std::snprintf(buf, sizeof(buf), "b%02d", i);
    h.emplace_back(buf);
  }
  return h;
}

}  // namespace

void validate_dataset(const Dataset& ds) {
  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    validate_record(ds.records[i], ds.variant, i);
  }
}

Dataset load_dataset(const std::filesystem::path& path) {
  const std::string text = read_text_file(path.string());
  const std::vector<std::string> header = canonical_header();

  Dataset ds;
  ds.provenance = "loaded from " + path.string();

  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool header_seen = false;
  bool variant_seen = false;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;

    std::vector<std::string> fields = split_csv_line(line);
    if (!header_seen) {
      if (fields != header) {
        throw ParseError(path.string() + ":1: header does not match the canonical schema");
      }
      header_seen = true;
      continue;
    }
    const std::string at = path.string() + ":" + std::to_string(line_no);
    if (fields.size() != header.size()) {
      throw ParseError(at + ": expected " + std::to_string(header.size()) + " fields, got " +
                       std::to_string(fields.size()));
    }

    FrameRecord rec;
    try {
      rec.participant_id = fields[0];
      rec.age_group = age_group_from_string(fields[1]);
      const Variant row_variant = variant_from_string(fields[2]);
      if (!variant_seen) {
        ds.variant = row_variant;
        variant_seen = true;
      } else if (row_variant != ds.variant) {
        throw InvariantViolation("mixed variants in one file");
      }
      rec.posture = posture_from_string(fields[3]);
      rec.timestamp_index = static_cast<int>(parse_long(fields[4]));
      rec.snapshot_index = static_cast<int>(parse_long(fields[5]));
      rec.seat.mat = Mat::seat;
      for (int i = 0; i < kSensorCount; ++i) {
        rec.seat.values[i] = parse_double(fields[6 + i]);
      }
      const bool back_present = !fields[6 + kSensorCount].empty();
      for (int i = 1; i < kSensorCount; ++i) {
        if (fields[6 + kSensorCount + i].empty() == back_present) {
          throw ParseError("back columns must be all empty or all filled");
        }
      }
      if (back_present) {
        PressureFrame back;
        back.mat = Mat::back;
        for (int i = 0; i < kSensorCount; ++i) {
          back.values[i] = parse_double(fields[6 + kSensorCount + i]);
        }
        rec.back = back;
      }
    } catch (const ParseError& e) {
      throw ParseError(at + ": " + e.what());
    }
    validate_record(rec, ds.variant, ds.records.size());
    ds.records.push_back(std::move(rec));
  }
  if (!header_seen) {
    throw ParseError(path.string() + ": missing header row");
  }
  return ds;
}

void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
  validate_dataset(ds);
  std::string out;
  out.reserve(ds.records.size() * 256 + 512);
  out += join_csv(canonical_header());
  out.push_back('\n');
  for (const FrameRecord& rec : ds.records) {
    if (rec.participant_id.find(',') != std::string::npos ||
        rec.participant_id.find('\n') != std::string::npos) {
      throw IoError("participant_id contains a separator: '" + rec.participant_id + "'");
    }
    out += rec.participant_id;
    out.push_back(',');
    out += to_string(rec.age_group);
    out.push_back(',');
    out += to_string(ds.variant);
    out.push_back(',');
    out += to_string(rec.posture);
    out.push_back(',');
    out += std::to_string(rec.timestamp_index);
    out.push_back(',');
    out += std::to_string(rec.snapshot_index);
    for (double v : rec.seat.values) {
      out.push_back(',');
      out += format_double(v);
    }
    if (rec.back) {
      for (double v : rec.back->values) {
        out.push_back(',');
        out += format_double(v);
      }
    } else {
      for (int i = 0; i < kSensorCount; ++i) out.push_back(',');
    }
    out.push_back('\n');
  }
  write_text_file(path.string(), out);
}

const std::string* RawRow::find(const std::string& name) const {
  for (const auto& [field, value] : fields) {
    if (field == name) return &value;
  }
  return nullptr;
}

RawRow prune_raw_columns(const RawRow& row, const RawFieldMap& map) {
  RawRow out;
  out.fields.reserve(map.passthrough_fields.size() + map.sensor_fields.size() + 1);
  auto take = [&](const std::string& name) {
    const std::string* value = row.find(name);
    if (value == nullptr) {
      throw SchemaMismatch("raw row is missing expected field '" + name + "'");
    }
    out.fields.emplace_back(name, *value);
  };
  for (const std::string& name : map.passthrough_fields) take(name);
  for (const std::string& name : map.sensor_fields) take(name);
  take(map.posture_field);
  return out;
}

}  // namespace sitgrid
