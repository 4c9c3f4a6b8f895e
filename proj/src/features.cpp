#include "sitgrid/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>

#include "sitgrid/classifier.hpp"
#include "sitgrid/errors.hpp"
#include "sitgrid/textio.hpp"

namespace sitgrid {

CenterOfMass center_of_mass(const PressureFrame& frame) {
  double total = 0.0, row_sum = 0.0, col_sum = 0.0;
  for (int s = 0; s < kSensorCount; ++s) {
    const double m = std::max(frame.values[s], 0.0);
    const GridCell cell = GridMapping::cell_of(s);
    total += m;
    row_sum += m * cell.row;
    col_sum += m * cell.col;
  }
  if (total < 1e-9) {
    return {4.5, 4.5, true};
  }
  return {row_sum / total, col_sum / total, false};
}

QuadrantSums quadrant_sums(const PressureFrame& frame) {
  QuadrantSums q;
  for (int s = 0; s < kSensorCount; ++s) {
    const GridCell cell = GridMapping::cell_of(s);
    const double v = frame.values[s];
    if (cell.row <= 4) {
      (cell.col <= 4 ? q.tl : q.tr) += v;
    } else {
      (cell.col <= 4 ? q.bl : q.br) += v;
    }
  }
  return q;
}

EdgeSums edge_sums(const PressureFrame& frame) {
  EdgeSums e;
  for (int s = 0; s < kSensorCount; ++s) {
    const GridCell cell = GridMapping::cell_of(s);
    const double v = frame.values[s];
    if (cell.row <= 2) e.top += v;
    if (cell.row >= 7) e.bottom += v;
    if (cell.col <= 2) e.left += v;
    if (cell.col >= 7) e.right += v;
  }
  return e;
}

RecurrentSelector recurrent_from_string(const std::string& s) {
  if (s == "full") return RecurrentSelector::full;
  if (s == "t3") return RecurrentSelector::t3;
  if (s == "t234") return RecurrentSelector::t234;
  throw ParseError("unknown recurrent selector: '" + s + "'");
}

std::string to_string(RecurrentSelector selector) {
  switch (selector) {
    case RecurrentSelector::full: return "full";
    case RecurrentSelector::t3: return "t3";
    case RecurrentSelector::t234: return "t234";
  }
  return "?";
}

Dataset select_recurrent(const Dataset& ds, RecurrentSelector selector) {
  if (ds.variant != Variant::realistic) {
    throw VariantError("recurrent selection requires a realistic dataset");
  }
  validate_dataset(ds);
  if (selector == RecurrentSelector::full) {
    return ds;
  }

  using EventKey = std::tuple<std::string, PostureLabel, int>;
  struct EventRows {
    std::vector<std::size_t> rows;  // indices into ds.records
  };
  std::vector<std::pair<EventKey, EventRows>> events;  // first-occurrence order
  std::map<EventKey, std::size_t> index;
  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    const FrameRecord& rec = ds.records[i];
    const EventKey key{rec.participant_id, rec.posture, rec.snapshot_index};
    auto it = index.find(key);
    if (it == index.end()) {
      index.emplace(key, events.size());
      events.push_back({key, {{i}}});
    } else {
      events[it->second].second.rows.push_back(i);
    }
  }

  Dataset out;
  out.variant = Variant::realistic;
  out.provenance = ds.provenance + " | " + to_string(selector);

  if (selector == RecurrentSelector::t3) {
    for (const auto& [key, ev] : events) {
      const bool has_t3 = std::any_of(ev.rows.begin(), ev.rows.end(), [&](std::size_t i) {
        return ds.records[i].timestamp_index == 3;
      });
      if (!has_t3) {
        throw MissingTimestamp("event (" + std::get<0>(key) + ", " +
                               to_string(std::get<1>(key)) + ", " +
                               std::to_string(std::get<2>(key)) + ") lacks timestamp t03");
      }
    }
    for (const FrameRecord& rec : ds.records) {
      if (rec.timestamp_index == 3) out.records.push_back(rec);
    }
    return out;
  }

  // t234: one combined row per event, in first-occurrence order.
  for (const auto& [key, ev] : events) {
    FrameRecord combined;
    int found = 0;
    for (int t = 2; t <= 4; ++t) {
      std::vector<std::size_t> matches;
      for (std::size_t i : ev.rows) {
        if (ds.records[i].timestamp_index == t) matches.push_back(i);
      }
      if (matches.empty()) {
        throw MissingTimestamp("event (" + std::get<0>(key) + ", " +
                               to_string(std::get<1>(key)) + ", " +
                               std::to_string(std::get<2>(key)) + ") lacks timestamp t0" +
                               std::to_string(t));
      }
      for (std::size_t i : matches) {
        const FrameRecord& rec = ds.records[i];
        if (found == 0) {
          combined = rec;
          for (double& v : combined.seat.values) v = 0.0;
          for (double& v : combined.back->values) v = 0.0;
        }
        for (int s = 0; s < kSensorCount; ++s) {
          combined.seat.values[s] += rec.seat.values[s];
          combined.back->values[s] += rec.back->values[s];
        }
        ++found;
      }
    }
    for (int s = 0; s < kSensorCount; ++s) {
      combined.seat.values[s] /= found;
      combined.back->values[s] /= found;
    }
    combined.timestamp_index = 3;  // the combination stands in for mid-event
    out.records.push_back(std::move(combined));
  }
  return out;
}

MatSelection mats_from_string(const std::string& s) {
  if (s == "seat") return MatSelection::seat;
  if (s == "back") return MatSelection::back;
  if (s == "both") return MatSelection::both;
  throw ParseError("unknown mat selection: '" + s + "'");
}

std::string to_string(MatSelection mats) {
  switch (mats) {
    case MatSelection::seat: return "seat";
    case MatSelection::back: return "back";
    case MatSelection::both: return "both";
  }
  return "?";
}

long FeatureMatrix::column_index(const std::string& name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  return it == names.end() ? -1 : static_cast<long>(it - names.begin());
}

namespace {

// One canonical column: which mat it reads and how to compute it.
struct ColumnDef {
  std::string name;
  Mat mat;
  enum Kind { raw, com_row, com_col, quad_tl, quad_tr, quad_bl, quad_br,
              edge_top, edge_bottom, edge_left, edge_right } kind;
  int sensor = -1;  // for raw
};

std::vector<ColumnDef> canonical_columns(bool with_back) {
  std::vector<ColumnDef> cols;
  char buf[8];
  for (int s = 0; s < kSensorCount; ++s) {
    std::snprintf(buf, sizeof(buf), "s%02d", s);
    cols.push_back({buf, Mat::seat, ColumnDef::raw, s});
  }
  if (with_back) {
    for (int s = 0; s < kSensorCount; ++s) {
      std::snprintf(buf, sizeof(buf), "b%02d", s);
      cols.push_back({buf, Mat::back, ColumnDef::raw, s});
    }
  }
  const std::vector<std::pair<std::string, ColumnDef::Kind>> engineered = {
      {"com_row", ColumnDef::com_row},     {"com_col", ColumnDef::com_col},
  };
  const std::vector<std::pair<std::string, ColumnDef::Kind>> quads = {
      {"quad_tl", ColumnDef::quad_tl}, {"quad_tr", ColumnDef::quad_tr},
      {"quad_bl", ColumnDef::quad_bl}, {"quad_br", ColumnDef::quad_br},
  };
  const std::vector<std::pair<std::string, ColumnDef::Kind>> edges = {
      {"edge_top", ColumnDef::edge_top},     {"edge_bottom", ColumnDef::edge_bottom},
      {"edge_left", ColumnDef::edge_left},   {"edge_right", ColumnDef::edge_right},
  };
  auto add_group = [&](const auto& group) {
    for (const auto& [suffix, kind] : group) {
      cols.push_back({"seat_" + suffix, Mat::seat, kind, -1});
    }
    if (with_back) {
      for (const auto& [suffix, kind] : group) {
        cols.push_back({"back_" + suffix, Mat::back, kind, -1});
      }
    }
  };
  add_group(engineered);
  add_group(quads);
  add_group(edges);
  return cols;
}

bool group_enabled(const ColumnDef& col, const FeatureSpec& spec) {
  switch (col.kind) {
    case ColumnDef::raw: return spec.include_raw;
    case ColumnDef::com_row:
    case ColumnDef::com_col: return spec.include_com;
    case ColumnDef::quad_tl:
    case ColumnDef::quad_tr:
    case ColumnDef::quad_bl:
    case ColumnDef::quad_br: return spec.include_quadrants;
    default: return spec.include_edges;
  }
}

bool mat_enabled(const ColumnDef& col, MatSelection mats) {
  if (mats == MatSelection::both) return true;
  return (mats == MatSelection::seat) == (col.mat == Mat::seat);
}

}  // namespace

FeatureMatrix build_feature_matrix(const Dataset& ds, const FeatureSpec& spec) {
  const bool with_back = !ds.records.empty() && ds.records.front().back.has_value();
  if ((spec.mats == MatSelection::back || spec.mats == MatSelection::both) && !with_back &&
      !ds.records.empty()) {
    throw SpecError("dataset has no back frames; mats must be 'seat'");
  }

  const std::vector<ColumnDef> canonical = canonical_columns(with_back);
  std::vector<ColumnDef> selected;
  if (!spec.whitelist.empty()) {
    for (const std::string& name : spec.whitelist) {
      const auto it = std::find_if(canonical.begin(), canonical.end(),
                                   [&](const ColumnDef& c) { return c.name == name; });
      if (it == canonical.end()) {
        throw SpecError("whitelisted feature '" + name + "' does not exist for this dataset");
      }
      selected.push_back(*it);
    }
  } else {
    if (!spec.include_raw && !spec.include_com && !spec.include_quadrants && !spec.include_edges) {
      throw SpecError("no feature group enabled");
    }
    for (const ColumnDef& col : canonical) {
      if (group_enabled(col, spec) && mat_enabled(col, spec.mats)) selected.push_back(col);
    }
  }

  FeatureMatrix fm;
  fm.n_rows = ds.records.size();
  fm.n_cols = selected.size();
  fm.names.reserve(selected.size());
  for (const ColumnDef& col : selected) fm.names.push_back(col.name);
  fm.values.resize(fm.n_rows * fm.n_cols);
  fm.labels.reserve(fm.n_rows);
  fm.groups.reserve(fm.n_rows);

  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    const FrameRecord& rec = ds.records[i];
    fm.labels.push_back(rec.posture);
    fm.groups.push_back({rec.participant_id, rec.snapshot_index});

    // Engineered values per mat, computed once per row.
    CenterOfMass com[2];
    QuadrantSums quad[2];
    EdgeSums edge[2];
    com[0] = center_of_mass(rec.seat);
    quad[0] = quadrant_sums(rec.seat);
    edge[0] = edge_sums(rec.seat);
    if (rec.back) {
      com[1] = center_of_mass(*rec.back);
      quad[1] = quadrant_sums(*rec.back);
      edge[1] = edge_sums(*rec.back);
    }

    for (std::size_t j = 0; j < selected.size(); ++j) {
      const ColumnDef& col = selected[j];
      const int m = col.mat == Mat::seat ? 0 : 1;
      double v = 0.0;
      switch (col.kind) {
        case ColumnDef::raw:
          v = m == 0 ? rec.seat.values[col.sensor] : rec.back->values[col.sensor];
          break;
        case ColumnDef::com_row: v = com[m].row; break;
        case ColumnDef::com_col: v = com[m].col; break;
        case ColumnDef::quad_tl: v = quad[m].tl; break;
        case ColumnDef::quad_tr: v = quad[m].tr; break;
        case ColumnDef::quad_bl: v = quad[m].bl; break;
        case ColumnDef::quad_br: v = quad[m].br; break;
        case ColumnDef::edge_top: v = edge[m].top; break;
        case ColumnDef::edge_bottom: v = edge[m].bottom; break;
        case ColumnDef::edge_left: v = edge[m].left; break;
        case ColumnDef::edge_right: v = edge[m].right; break;
      }
      fm.values[i * fm.n_cols + j] = v;
    }
  }
  return fm;
}

void save_feature_matrix(const FeatureMatrix& fm, const std::filesystem::path& path) {
  std::string out;
  out.reserve(fm.n_rows * fm.n_cols * 12 + 256);
  out += "participant_id,event,posture";
  for (const std::string& name : fm.names) {
    out.push_back(',');
    out += name;
  }
  out.push_back('\n');
  for (std::size_t i = 0; i < fm.n_rows; ++i) {
    out += fm.groups[i].participant_id;
    out.push_back(',');
    out += std::to_string(fm.groups[i].event);
    out.push_back(',');
    out += to_string(fm.labels[i]);
    for (double v : fm.row(i)) {
      out.push_back(',');
      out += format_double(v);
    }
    out.push_back('\n');
  }
  write_text_file(path.string(), out);
}

FeatureMatrix load_feature_matrix(const std::filesystem::path& path) {
  const std::string text = read_text_file(path.string());
  FeatureMatrix fm;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields = split_csv_line(line);
    if (!header_seen) {
      if (fields.size() < 4 || fields[0] != "participant_id" || fields[1] != "event" ||
          fields[2] != "posture") {
        throw ParseError(path.string() + ":1: not a feature matrix header");
      }
      fm.names.assign(fields.begin() + 3, fields.end());
      fm.n_cols = fm.names.size();
      header_seen = true;
      continue;
    }
    const std::string at = path.string() + ":" + std::to_string(line_no);
    if (fields.size() != fm.n_cols + 3) {
      throw ParseError(at + ": expected " + std::to_string(fm.n_cols + 3) + " fields, got " +
                       std::to_string(fields.size()));
    }
    try {
      fm.groups.push_back({fields[0], static_cast<int>(parse_long(fields[1]))});
      fm.labels.push_back(posture_from_string(fields[2]));
      for (std::size_t j = 0; j < fm.n_cols; ++j) {
        fm.values.push_back(parse_double(fields[3 + j]));
      }
    } catch (const ParseError& e) {
      throw ParseError(at + ": " + e.what());
    }
    ++fm.n_rows;
  }
  if (!header_seen) throw ParseError(path.string() + ": missing header row");
  return fm;
}

std::vector<std::pair<std::string, double>> feature_importance(const FeatureMatrix& fm,
                                                               const RfParams& params,
                                                               std::uint64_t seed) {
  std::vector<double> raw = rf_raw_importance(fm, params, seed);
  const double total = std::accumulate(raw.begin(), raw.end(), 0.0);
  if (total > 0.0) {
    for (double& v : raw) v /= total;
  }
  std::vector<std::size_t> order(raw.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return raw[a] > raw[b]; });
  std::vector<std::pair<std::string, double>> ranked;
  ranked.reserve(raw.size());
  for (std::size_t idx : order) ranked.emplace_back(fm.names[idx], raw[idx]);
  return ranked;
}

}  // namespace sitgrid
