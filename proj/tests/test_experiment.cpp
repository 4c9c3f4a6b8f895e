#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "sitgrid/errors.hpp"
#include "sitgrid/experiment.hpp"
#include "sitgrid/textio.hpp"

using namespace sitgrid;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "sitgrid_test_experiment" / name;
  fs::create_directories(dir);
  return dir;
}

json small_controlled_spec() {
  return json::parse(R"({
    "name": "small_controlled",
    "dataset": {"synth": {"variant": "controlled", "n_participants": 4,
                          "snapshots_or_events": 6}},
    "normalized": true,
    "classifiers": [{"family": "gnb"}, {"family": "rf", "n_trees": 10}],
    "k": 4,
    "seed": 77
  })");
}

json small_realistic_spec() {
  return json::parse(R"({
    "name": "small_realistic",
    "dataset": {"synth": {"variant": "realistic", "n_participants": 6}},
    "recurrent": "t3",
    "class_subset": ["left", "right"],
    "classifiers": [{"family": "rf", "n_trees": 15}],
    "k": 5,
    "seed": 31
  })");
}

}  // namespace

TEST_CASE("spec parsing fills defaults and derives classifier seeds") {
  const ExperimentSpec spec = experiment_spec_from_json(small_controlled_spec(), ".");
  CHECK(spec.variant == Variant::controlled);
  CHECK(spec.mats == MatSelection::seat);
  CHECK(spec.recurrent == RecurrentSelector::full);
  CHECK(spec.class_subset == labels_for(Variant::controlled));
  CHECK(spec.classifiers.size() == 2);
  CHECK(spec.classifiers[0].family == Family::gnb);
  CHECK(spec.classifiers[0].seed != 0);
  CHECK(spec.classifiers[1].rf.n_trees == 10);

  SUBCASE("unknown keys are rejected") {
    json j = small_controlled_spec();
    j["typo_key"] = 1;
    CHECK_THROWS_AS(experiment_spec_from_json(j, "."), ConfigError);
  }
  SUBCASE("class subset must fit the variant") {
    json j = small_realistic_spec();
    j["class_subset"] = {"left", "empty"};
    CHECK_THROWS_AS(experiment_spec_from_json(j, "."), ConfigError);
  }
  SUBCASE("controlled specs are coerced to seat mats and full recurrent") {
    json j = small_controlled_spec();
    j["mats"] = "both";
    j["recurrent"] = "t3";
    const ExperimentSpec coerced = experiment_spec_from_json(j, ".");
    CHECK(coerced.mats == MatSelection::seat);
    CHECK(coerced.recurrent == RecurrentSelector::full);
  }
}

TEST_CASE("run_experiment produces aligned reports and a full pipeline result") {
  const ExperimentSpec spec = experiment_spec_from_json(small_realistic_spec(), ".");
  const ExperimentResult result = run_experiment(spec);
  // 6 participants x 2 classes x 5 events, t3 -> 60 rows
  CHECK(result.features.n_rows == 60);
  CHECK(result.features.n_cols == 84);
  REQUIRE(result.runs.size() == 1);
  CHECK(result.runs[0].report.total == 60);
  CHECK(result.runs[0].report.per_class[0].support == 30);
  CHECK(result.runs[0].report.per_class[1].support == 30);
  CHECK(result.importance.size() == 84);
}

TEST_CASE("class_subset equal to all labels changes nothing") {
  json j = small_controlled_spec();
  const ExperimentResult base = run_experiment(experiment_spec_from_json(j, "."));
  j["class_subset"] = {"back", "empty", "left", "right", "front", "still"};
  const ExperimentResult subset = run_experiment(experiment_spec_from_json(j, "."));
  CHECK(base.features.n_rows == subset.features.n_rows);
  CHECK(base.features.values == subset.features.values);
}

TEST_CASE("disabling normalization changes values but never row counts or labels") {
  json j = small_controlled_spec();
  const ExperimentResult normalized = run_experiment(experiment_spec_from_json(j, "."));
  j["normalized"] = false;
  const ExperimentResult raw = run_experiment(experiment_spec_from_json(j, "."));
  CHECK(raw.features.n_rows == normalized.features.n_rows);
  CHECK(raw.features.labels == normalized.features.labels);
  CHECK(raw.features.values != normalized.features.values);
}

TEST_CASE("experiment outputs are byte-identical across runs") {
  const ExperimentSpec spec = experiment_spec_from_json(small_realistic_spec(), ".");
  const fs::path dir_a = temp_dir("run_a");
  const fs::path dir_b = temp_dir("run_b");
  write_experiment_outputs(run_experiment(spec), dir_a);
  write_experiment_outputs(run_experiment(spec), dir_b);
  for (const std::string name :
       {"result.json", "report.txt", "confusion.csv", "plot.csv", "model_rf.json"}) {
    CAPTURE(name);
    CHECK(read_text_file((dir_a / name).string()) == read_text_file((dir_b / name).string()));
  }
}

TEST_CASE("age filter keeps only the requested participants") {
  json j = small_realistic_spec();
  j["age_group"] = "young";
  const ExperimentResult young = run_experiment(experiment_spec_from_json(j, "."));
  // participants alternate young/senior; 6 -> 3 young x 2 classes x 5 events
  CHECK(young.features.n_rows == 30);
}

TEST_CASE("matrix runs isolate failures and cross-check single runs") {
  json good = small_realistic_spec();
  json bad = small_realistic_spec();
  bad["name"] = "will_fail";
  bad["k"] = 500;  // more folds than rows
  const fs::path out_root = temp_dir("matrix");
  std::vector<ExperimentSpec> specs = {experiment_spec_from_json(good, "."),
                                       experiment_spec_from_json(bad, ".")};
  const MatrixResult result = run_matrix(specs, out_root);
  REQUIRE(result.entries.size() == 2);
  CHECK(result.entries[0].ok);
  CHECK_FALSE(result.entries[1].ok);
  CHECK(result.entries[1].error.find("folds") != std::string::npos);

  const ExperimentResult single = run_experiment(specs[0]);
  CHECK(result.entries[0].accuracies[0].second ==
        doctest::Approx(single.runs[0].cv.pooled_accuracy));

  const std::string summary = matrix_summary_text(result);
  CHECK(summary.find("small_realistic") != std::string::npos);
  CHECK(summary.find("FAILED") != std::string::npos);

  CHECK_THROWS_AS(run_matrix({}, out_root), ConfigError);
}

TEST_CASE("posture plot emits one row per sample") {
  const ExperimentSpec spec = experiment_spec_from_json(small_realistic_spec(), ".");
  const ExperimentResult result = run_experiment(spec);
  const fs::path path = temp_dir("plot") / "plot.csv";
  emit_posture_plot(result.features, path);
  const std::string text = read_text_file(path.string());
  std::size_t lines = 0;
  for (char ch : text) {
    if (ch == '\n') ++lines;
  }
  CHECK(lines == result.features.n_rows + 1);
  CHECK(text.rfind("class,com_row,com_col\n", 0) == 0);

  // left/right clouds separate in the column coordinate
  double left_mean = 0, right_mean = 0;
  std::size_t left_n = 0, right_n = 0;
  const long col = result.features.column_index("seat_com_col");
  REQUIRE(col >= 0);
  for (std::size_t i = 0; i < result.features.n_rows; ++i) {
    if (result.features.labels[i] == PostureLabel::left) {
      left_mean += result.features.at(i, col);
      ++left_n;
    } else {
      right_mean += result.features.at(i, col);
      ++right_n;
    }
  }
  CHECK(left_mean / left_n < right_mean / right_n);

  FeatureMatrix no_com;
  no_com.names = {"s00"};
  no_com.n_cols = 1;
  no_com.n_rows = 1;
  no_com.values = {1.0};
  no_com.labels = {PostureLabel::left};
  no_com.groups = {{"p", 0}};
  CHECK_THROWS_AS(emit_posture_plot(no_com, temp_dir("plot") / "missing.csv"), MissingFeature);
}

TEST_CASE("every bundled experiment config parses") {
  const fs::path root = fs::path(SITGRID_SOURCE_DIR) / "paper_matrix";
  REQUIRE(fs::exists(root));
  std::size_t specs_seen = 0;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.path().extension() != ".json") continue;
    CAPTURE(entry.path().string());
    const json j = json::parse(read_text_file(entry.path().string()));
    if (j.contains("specs")) {
      for (const auto& item : j.at("specs")) {
        if (item.is_string()) {
          const fs::path spec_path = entry.path().parent_path() / item.get<std::string>();
          CHECK(fs::exists(spec_path));
        } else {
          const ExperimentSpec spec =
              experiment_spec_from_json(item, entry.path().parent_path());
          CHECK_FALSE(spec.classifiers.empty());
          ++specs_seen;
        }
      }
    } else {
      const ExperimentSpec spec =
          experiment_spec_from_json(j, entry.path().parent_path());
      CHECK_FALSE(spec.classifiers.empty());
      ++specs_seen;
    }
  }
  CHECK(specs_seen >= 20);  // 8 controlled + 6 realistic + 3 + 4 table rows
}

TEST_CASE("experiment stage errors carry the stage name") {
  json j = small_realistic_spec();
  j["dataset"] = {{"path", "does_not_exist.csv"}};
  j["variant"] = "realistic";
  const ExperimentSpec spec = experiment_spec_from_json(j, temp_dir("stages"));
  try {
    run_experiment(spec);
    FAIL("expected StageError");
  } catch (const StageError& e) {
    CHECK(std::string(e.what()).find("stage 'load'") != std::string::npos);
  }
}
