#include "mcslam/scenario_io.hpp"

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "mcslam/presets.hpp"
#include "scenario_support.hpp"
#include "support.hpp"

using namespace mcslam;

namespace {

/// Random feature set re-observed by the anchor cameras, no visibility
/// filtering (the sweep rank analysis does not need images to exist).
Scenario anchored_features(const ClusterCalibration& calib, int nf,
                           const KeyframeMotion& motion,
                           testsupport::Rng& rng) {
  Scenario s;
  s.calibration = calib;
  s.motion = motion;
  for (int j = 0; j < nf; ++j) {
    FeatureParam f;
    f.anchor_camera = j % calib.camera_count();
    f.bearing = Bearing{testsupport::uniform(rng, -0.5, 0.5),
                        testsupport::uniform(rng, -0.5, 0.5)};
    f.depth = testsupport::uniform(rng, 2.0, 8.0);
    s.features.push_back(f);
    s.observations.observers.push_back({f.anchor_camera});
  }
  return s;
}

bool scenarios_match(const Scenario& a, const Scenario& b) {
  if (a.camera_count() != b.camera_count()) return false;
  for (int c = 0; c < a.camera_count(); ++c) {
    if (a.calibration.extrinsics[c].rotation.matrix() !=
        b.calibration.extrinsics[c].rotation.matrix())
      return false;
    if (a.calibration.extrinsics[c].translation !=
        b.calibration.extrinsics[c].translation)
      return false;
  }
  if (a.feature_count() != b.feature_count()) return false;
  for (int j = 0; j < a.feature_count(); ++j) {
    if (a.features[j].anchor_camera != b.features[j].anchor_camera)
      return false;
    if (a.features[j].bearing.phi != b.features[j].bearing.phi) return false;
    if (a.features[j].bearing.theta != b.features[j].bearing.theta)
      return false;
    if (a.features[j].depth != b.features[j].depth) return false;
  }
  if (a.observations.observers != b.observations.observers) return false;
  return a.motion.translation == b.motion.translation &&
         a.motion.omega == b.motion.omega;
}

}  // namespace

TEST_CASE("scenario text round trip preserves every number bit for bit") {
  testsupport::Rng rng(31001);
  for (int trial = 0; trial < 10; ++trial) {
    ScenarioDocument doc;
    doc.scenario = testsupport::random_scenario(rng);
    doc.seed = rng();
    doc.description = "trial " + std::to_string(trial);
    doc.expected_classification = "non_degenerate";

    const std::string text = scenario_to_text(doc);
    const ScenarioDocument back = parse_scenario_text(text);

    CHECK(scenarios_match(doc.scenario, back.scenario));
    CHECK(back.seed == doc.seed);
    CHECK(back.description == doc.description);
    CHECK(back.expected_classification == doc.expected_classification);
    CHECK(back.warnings.empty());
    // A second pass through the serializer is byte-stable.
    CHECK(scenario_to_text(back) == text);
  }
}

TEST_CASE("scenario file round trip through save and load") {
  testsupport::Rng rng(31002);
  ScenarioDocument doc;
  doc.scenario = testsupport::random_scenario(rng);
  doc.description = "file round trip";

  const std::filesystem::path path =
      std::filesystem::temp_directory_path() / "mcslam_io_roundtrip.json";
  save_scenario(doc, path.string());
  const ScenarioDocument back = load_scenario(path.string());
  std::filesystem::remove(path);

  CHECK(scenarios_match(doc.scenario, back.scenario));
  CHECK(back.description == doc.description);

  CHECK_THROWS_AS(load_scenario("/nonexistent/dir/missing.json"),
                  std::runtime_error);
}

TEST_CASE("parser reports every defect with its document path") {
  const std::string text = R"({
    "cameras": [
      {"rotation": [0, 0, 0], "translation": [0, 0, 0]},
      {"rotation": [0, 0, 0], "translation": [1, 2]}
    ],
    "features": [
      {"anchor": 0, "phi": 0.1, "theta": 0.0, "depth": "deep"},
      {"anchor": 1.5, "phi": 0.0, "theta": 0.1, "depth": 3.0}
    ],
    "observations": [[0], ["a"]],
    "motion": {"t": [0, 0, 0], "omega": [0, 0]}
  })";

  try {
    parse_scenario_text(text);
    FAIL("expected ScenarioParseError");
  } catch (const ScenarioParseError& e) {
    REQUIRE(e.issues().size() == 5);
    auto mentions = [&](const std::string& token) {
      for (const std::string& issue : e.issues())
        if (issue.find(token) != std::string::npos) return true;
      return false;
    };
    CHECK(mentions("cameras[1].translation"));
    CHECK(mentions("features[0].depth"));
    CHECK(mentions("features[1].anchor"));
    CHECK(mentions("observations[1][0]"));
    CHECK(mentions("motion.omega"));
    CHECK(std::string(e.what()).find("5 problems") != std::string::npos);
  }
}

TEST_CASE("parser failure modes") {
  SUBCASE("malformed json") {
    CHECK_THROWS_AS(parse_scenario_text("{not json"), ScenarioParseError);
  }
  SUBCASE("missing sections are all named") {
    try {
      parse_scenario_text(R"({"cameras": []})");
      FAIL("expected ScenarioParseError");
    } catch (const ScenarioParseError& e) {
      CHECK(e.issues().size() == 3);  // features, observations, motion
    }
  }
  SUBCASE("camera zero must be the identity extrinsic") {
    const std::string text = R"({
      "cameras": [{"rotation": [0, 0, 0], "translation": [0.5, 0, 0]}],
      "features": [{"anchor": 0, "phi": 0, "theta": 0, "depth": 2}],
      "observations": [[0]],
      "motion": {"t": [0, 0, 0], "omega": [0, 0, 0]}
    })";
    try {
      parse_scenario_text(text);
      FAIL("expected ScenarioParseError");
    } catch (const ScenarioParseError& e) {
      REQUIRE(e.issues().size() == 1);
      CHECK(e.issues()[0].find("cameras") != std::string::npos);
    }
  }
  SUBCASE("negative depth parses; the validator owns range checks") {
    const std::string text = R"({
      "cameras": [{"rotation": [0, 0, 0], "translation": [0, 0, 0]}],
      "features": [{"anchor": 0, "phi": 0, "theta": 0, "depth": -1}],
      "observations": [[0]],
      "motion": {"t": [0.1, 0, 0], "omega": [0, 0, 0]}
    })";
    const ScenarioDocument doc = parse_scenario_text(text);
    CHECK(doc.scenario.features[0].depth == -1.0);
    const ValidationReport report = validate_assumptions(doc.scenario);
    CHECK_FALSE(report.ok());
    bool depth_flagged = false;
    for (const ValidationIssue& issue : report.violations)
      if (issue.message.find("depth must be positive") != std::string::npos)
        depth_flagged = true;
    CHECK(depth_flagged);
  }
}

TEST_CASE("rotation input forms") {
  auto document_with_rotation = [](const std::string& rotation_json) {
    return std::string(R"({
      "cameras": [
        {"rotation": [0, 0, 0], "translation": [0, 0, 0]},
        {"rotation": )") +
           rotation_json + R"(, "translation": [0.4, 0, 0]}
      ],
      "features": [{"anchor": 0, "phi": 0, "theta": 0, "depth": 2}],
      "observations": [[0]],
      "motion": {"t": [0.1, 0, 0], "omega": [0, 0, 0]}
    })";
  };
  const Vec3 axis_angle(0.1, -0.2, 0.3);
  const Mat3 r = exp_so3(axis_angle).matrix();
  auto matrix_json = [](const Mat3& m) {
    std::ostringstream out;
    out << "[";
    for (int i = 0; i < 3; ++i) {
      out << "[" << format_double(m(i, 0)) << "," << format_double(m(i, 1))
          << "," << format_double(m(i, 2)) << "]";
      if (i < 2) out << ",";
    }
    out << "]";
    return out.str();
  };

  SUBCASE("axis-angle triple goes through the exponential map") {
    const ScenarioDocument doc =
        parse_scenario_text(document_with_rotation("[0.1, -0.2, 0.3]"));
    CHECK((doc.scenario.calibration.extrinsics[1].rotation.matrix() - r)
              .norm() < 1e-15);
    CHECK(doc.warnings.empty());
  }
  SUBCASE("clean matrix is taken verbatim") {
    const ScenarioDocument doc =
        parse_scenario_text(document_with_rotation(matrix_json(r)));
    CHECK(doc.scenario.calibration.extrinsics[1].rotation.matrix() == r);
    CHECK(doc.warnings.empty());
  }
  SUBCASE("slightly off matrix is re-orthonormalized with a warning") {
    Mat3 off = r;
    off(0, 1) += 3e-8;
    const ScenarioDocument doc =
        parse_scenario_text(document_with_rotation(matrix_json(off)));
    REQUIRE(doc.warnings.size() == 1);
    CHECK(doc.warnings[0].find("re-orthonormalized") != std::string::npos);
    const Mat3 fixed =
        doc.scenario.calibration.extrinsics[1].rotation.matrix();
    CHECK((fixed.transpose() * fixed - Mat3::Identity()).norm() < 1e-14);
    CHECK((fixed - r).norm() < 1e-6);
  }
  SUBCASE("badly off matrix is rejected") {
    Mat3 off = r;
    off(0, 1) += 0.01;
    CHECK_THROWS_AS(
        parse_scenario_text(document_with_rotation(matrix_json(off))),
        ScenarioParseError);
  }
  SUBCASE("reflection is rejected") {
    Mat3 reflection = Mat3::Identity();
    reflection(2, 2) = -1.0;
    try {
      parse_scenario_text(document_with_rotation(matrix_json(reflection)));
      FAIL("expected ScenarioParseError");
    } catch (const ScenarioParseError& e) {
      CHECK(e.issues()[0].find("reflection") != std::string::npos);
    }
  }
  SUBCASE("other shapes are rejected") {
    CHECK_THROWS_AS(parse_scenario_text(document_with_rotation("[1, 2]")),
                    ScenarioParseError);
    CHECK_THROWS_AS(
        parse_scenario_text(document_with_rotation("\"identity\"")),
        ScenarioParseError);
  }
}

TEST_CASE("intersections companion path naming") {
  CHECK(sweep_intersections_path("loci.csv") == "loci_intersections.csv");
  CHECK(sweep_intersections_path("/a/b.c/loci.csv") ==
        "/a/b.c/loci_intersections.csv");
  CHECK(sweep_intersections_path("/a.b/loci") == "/a.b/loci_intersections");
  CHECK(sweep_intersections_path("loci") == "loci_intersections");
}

TEST_CASE("format_double round trips exactly through strtod") {
  const double samples[] = {0.0,        -0.0,   1.0 / 3.0, 3.141592653589793,
                            -2.75e-13,  1e300,  -1e-300,   123456789.12345678,
                            0.1 + 0.2};
  for (double x : samples) {
    const std::string s = format_double(x);
    CHECK(std::strtod(s.c_str(), nullptr) == x);
  }
}

TEST_CASE("sweep csv export and re-import") {
  testsupport::Rng rng(31003);
  KeyframeMotion motion;
  motion.omega = Vec3(0.0, 1.0, 0.0);
  Scenario s = anchored_features(back_to_back_two(), 8, motion, rng);

  SweepOptions options;
  options.grid.resolution = 12;
  options.grid.u_min = -3.0;
  options.grid.u_max = 3.0;
  options.grid.v_min = -3.0;
  options.grid.v_max = 3.0;
  options.grid.slice = Vec3(0.0, 0.0, 1.0);
  options.threads = 2;
  const SweepResult sweep = sweep_translations(s, options);

  std::ostringstream grid_out;
  write_sweep_csv(sweep, grid_out);
  const std::string csv = grid_out.str();

  SUBCASE("header and row count") {
    std::istringstream header_in(csv);
    std::string header;
    std::getline(header_in, header);
    CHECK(header == "t_x,t_y,t_z,subset_id,normalized_det");
    std::istringstream in(csv);
    const std::vector<SweepCsvRow> rows = read_sweep_csv(in);
    CHECK(static_cast<int>(rows.size()) ==
          sweep.cells() * sweep.subset_count());
  }

  SUBCASE("every row matches the in-memory grid bit for bit") {
    std::istringstream in(csv);
    const std::vector<SweepCsvRow> rows = read_sweep_csv(in);
    REQUIRE(static_cast<int>(rows.size()) ==
            sweep.cells() * sweep.subset_count());
    size_t k = 0;
    for (int iu = 0; iu < sweep.grid.resolution; ++iu)
      for (int iv = 0; iv < sweep.grid.resolution; ++iv) {
        const Vec3 t = sweep.grid.translation_at(iu, iv);
        for (int sub = 0; sub < sweep.subset_count(); ++sub, ++k) {
          CHECK(rows[k].t_x == t.x());
          CHECK(rows[k].t_y == t.y());
          CHECK(rows[k].t_z == t.z());
          CHECK(rows[k].subset_id == sub);
          CHECK(rows[k].normalized_det == sweep.det_at(iu, iv, sub));
        }
      }
  }

  SUBCASE("re-imported determinants reproduce crossings and intersections") {
    std::istringstream in(csv);
    const std::vector<SweepCsvRow> rows = read_sweep_csv(in);
    std::vector<double> determinants(rows.size());
    for (size_t k = 0; k < rows.size(); ++k)
      determinants[k] = rows[k].normalized_det;

    const std::vector<std::uint8_t> crossings =
        detect_crossings(determinants, sweep.grid.resolution,
                         sweep.subset_count(), options.abs_tol);
    CHECK(crossings == sweep.crossings);

    SweepResult imported = sweep;
    imported.determinants = determinants;
    imported.crossings = crossings;
    CHECK(intersect_loci(imported, sweep.intersection_radius) ==
          sweep.intersections);
  }

  SUBCASE("intersections companion file lists grid translations") {
    std::ostringstream out;
    write_intersections_csv(sweep, out);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "t_x,t_y,t_z");
    size_t count = 0;
    while (std::getline(in, line)) {
      REQUIRE(count < sweep.intersections.size());
      const auto [iu, iv] = sweep.intersections[count];
      const Vec3 t = sweep.grid.translation_at(iu, iv);
      CHECK(line == format_double(t.x()) + "," + format_double(t.y()) +
                        "," + format_double(t.z()));
      ++count;
    }
    CHECK(count == sweep.intersections.size());
  }

  SUBCASE("malformed csv is rejected") {
    std::istringstream bad_header("x,y\n");
    CHECK_THROWS_AS(read_sweep_csv(bad_header), std::runtime_error);
    std::istringstream short_row(
        "t_x,t_y,t_z,subset_id,normalized_det\n1,2,3\n");
    CHECK_THROWS_AS(read_sweep_csv(short_row), std::runtime_error);
    std::istringstream bad_number(
        "t_x,t_y,t_z,subset_id,normalized_det\n1,2,3,0,abc\n");
    CHECK_THROWS_AS(read_sweep_csv(bad_number), std::runtime_error);
  }
}
