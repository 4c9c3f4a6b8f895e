#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "sitgrid/dataset.hpp"
#include "sitgrid/errors.hpp"
#include "sitgrid/rng.hpp"
#include "sitgrid/synth.hpp"
#include "sitgrid/textio.hpp"

using namespace sitgrid;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "sitgrid_test_dataset";
  fs::create_directories(dir);
  return dir / name;
}

Dataset tiny_controlled() {
  Dataset ds;
  ds.variant = Variant::controlled;
  SplitMix64 rng(7);
  for (int snap = 0; snap < 3; ++snap) {
    FrameRecord rec;
    rec.participant_id = "c01";
    rec.posture = snap == 0 ? PostureLabel::still : PostureLabel::left;
    rec.snapshot_index = snap;
    for (double& v : rec.seat.values) v = rng.next_uniform(0.0, 900.0);
    ds.records.push_back(rec);
  }
  return ds;
}

}  // namespace

TEST_CASE("header-only file loads as an empty dataset") {
  const fs::path path = temp_file("empty.csv");
  {
    Dataset ds;
    save_dataset(ds, path);
  }
  const Dataset loaded = load_dataset(path);
  CHECK(loaded.records.empty());
}

TEST_CASE("save then load round-trips the dataset") {
  const Dataset ds = tiny_controlled();
  const fs::path path = temp_file("tiny.csv");
  save_dataset(ds, path);
  const Dataset loaded = load_dataset(path);
  CHECK(loaded.same_contents(ds));
}

TEST_CASE("save is byte-deterministic and save-load-save is stable") {
  const Dataset ds = tiny_controlled();
  const fs::path a = temp_file("a.csv");
  const fs::path b = temp_file("b.csv");
  save_dataset(ds, a);
  save_dataset(ds, b);
  CHECK(read_text_file(a.string()) == read_text_file(b.string()));

  const Dataset loaded = load_dataset(a);
  const fs::path c = temp_file("c.csv");
  save_dataset(loaded, c);
  CHECK(read_text_file(a.string()) == read_text_file(c.string()));
}

TEST_CASE("realistic synthetic default round-trips with 4875 records") {
  const Dataset ds = generate_realistic(GeneratorConfig::realistic_defaults(99));
  CHECK(ds.records.size() == 4875);
  const fs::path path = temp_file("realistic.csv");
  save_dataset(ds, path);
  const Dataset loaded = load_dataset(path);
  CHECK(loaded.records.size() == 4875);
  CHECK(loaded.same_contents(ds));
}

TEST_CASE("parse errors carry row diagnostics") {
  const fs::path path = temp_file("bad.csv");
  Dataset ds = tiny_controlled();
  save_dataset(ds, path);
  std::string text = read_text_file(path.string());
  text += "only,three,fields\n";
  write_text_file(path.string(), text);
  CHECK_THROWS_AS(load_dataset(path), ParseError);
  try {
    load_dataset(path);
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find(":5") != std::string::npos);  // header + 3 rows + bad row
  }
}

TEST_CASE("empty label in a realistic file violates the invariant") {
  Dataset ds = generate_realistic(GeneratorConfig::realistic_defaults(1));
  ds.records.resize(10);
  const fs::path path = temp_file("invalid_label.csv");
  save_dataset(ds, path);
  std::string text = read_text_file(path.string());
  const std::size_t pos = text.find(",back,");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 6, ",empty,");
  write_text_file(path.string(), text);
  CHECK_THROWS_AS(load_dataset(path), InvariantViolation);
}

TEST_CASE("wrong header is rejected") {
  const fs::path path = temp_file("badheader.csv");
  write_text_file(path.string(), "nope,nope\n");
  CHECK_THROWS_AS(load_dataset(path), ParseError);
}

TEST_CASE("prune keeps the 64 sensor fields plus posture from an 80-field row") {
  RawRow row;
  RawFieldMap map;
  for (int i = 0; i < 64; ++i) {
    const std::string name = "sensor_" + std::to_string(i);
    map.sensor_fields.push_back(name);
    row.fields.emplace_back(name, std::to_string(i * 2));
  }
  map.posture_field = "posture";
  row.fields.emplace_back("posture", "left");
  map.passthrough_fields = {"subject"};
  row.fields.emplace_back("subject", "p07");
  for (int i = 0; i < 14; ++i) {
    row.fields.emplace_back("aux_" + std::to_string(i), "x");
  }
  REQUIRE(row.fields.size() == 80);

  const RawRow pruned = prune_raw_columns(row, map);
  CHECK(pruned.fields.size() == 66);  // 65 data fields + 1 passthrough
  CHECK(*pruned.find("posture") == "left");
  CHECK(*pruned.find("subject") == "p07");
  CHECK(pruned.find("aux_0") == nullptr);
  CHECK(*pruned.find("sensor_63") == "126");

  SUBCASE("idempotent") { CHECK(prune_raw_columns(pruned, map) == pruned); }
}

TEST_CASE("prune rejects a row missing a sensor field") {
  RawRow row;
  RawFieldMap map;
  map.sensor_fields = {"s_a", "s_b"};
  map.posture_field = "posture";
  row.fields.emplace_back("s_a", "1");
  row.fields.emplace_back("posture", "still");
  CHECK_THROWS_AS(prune_raw_columns(row, map), SchemaMismatch);
}
