#include "mcslam/scenario_io.hpp"

#include <Eigen/SVD>

#include <array>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace mcslam {

namespace {

using Json = nlohmann::ordered_json;

std::string join_issues(const std::vector<std::string>& issues) {
  std::ostringstream out;
  out << "scenario document has " << issues.size()
      << (issues.size() == 1 ? " problem:" : " problems:");
  for (const std::string& issue : issues) out << "\n  " << issue;
  return out.str();
}

struct IssueList {
  std::vector<std::string> items;

  void add(const std::string& path, const std::string& what) {
    items.push_back(path + ": " + what);
  }
};

bool read_vec3(const Json& node, const std::string& path, IssueList& issues,
               Vec3& out) {
  if (!node.is_array() || node.size() != 3) {
    issues.add(path, "expected an array of three numbers");
    return false;
  }
  for (int i = 0; i < 3; ++i) {
    if (!node[static_cast<size_t>(i)].is_number()) {
      issues.add(path + "[" + std::to_string(i) + "]", "expected a number");
      return false;
    }
    out[i] = node[static_cast<size_t>(i)].get<double>();
  }
  return true;
}

bool read_rotation(const Json& node, const std::string& path,
                   IssueList& issues, std::vector<std::string>& warnings,
                   Rotation& out) {
  if (node.is_array() && node.size() == 3 &&
      node[0].is_number()) {  // axis-angle triple
    Vec3 axis_angle;
    if (!read_vec3(node, path, issues, axis_angle)) return false;
    out = exp_so3(axis_angle);
    return true;
  }
  if (node.is_array() && node.size() == 3 && node[0].is_array()) {
    Mat3 m;
    for (int r = 0; r < 3; ++r) {
      const Json& row = node[static_cast<size_t>(r)];
      if (!row.is_array() || row.size() != 3) {
        issues.add(path, "matrix rows must hold three numbers each");
        return false;
      }
      for (int c = 0; c < 3; ++c) {
        if (!row[static_cast<size_t>(c)].is_number()) {
          issues.add(path, "matrix entries must be numbers");
          return false;
        }
        m(r, c) = row[static_cast<size_t>(c)].get<double>();
      }
    }
    if (m.determinant() < 0.0) {
      issues.add(path, "matrix is a reflection (negative determinant)");
      return false;
    }
    const double off = (m.transpose() * m - Mat3::Identity()).norm();
    if (off <= 1e-12) {
      out = Rotation::from_matrix_unchecked(m);
      return true;
    }
    if (off < 1e-6) {
      Eigen::JacobiSVD<Mat3> svd(
          m, Eigen::ComputeFullU | Eigen::ComputeFullV);
      Mat3 nearest = svd.matrixU() * svd.matrixV().transpose();
      if (nearest.determinant() < 0.0) {
        issues.add(path, "matrix is a reflection (negative determinant)");
        return false;
      }
      out = Rotation::from_matrix_unchecked(nearest);
      std::ostringstream note;
      note << path << ": matrix re-orthonormalized (off by " << off << ")";
      warnings.push_back(note.str());
      return true;
    }
    std::ostringstream what;
    what << "matrix is not orthonormal (off by " << off
         << ", tolerance 1e-6)";
    issues.add(path, what.str());
    return false;
  }
  issues.add(path,
             "expected three axis-angle numbers or a row-major 3x3 matrix");
  return false;
}

}  // namespace

ScenarioParseError::ScenarioParseError(std::vector<std::string> issues_in)
    : std::runtime_error(join_issues(issues_in)),
      issues_(std::move(issues_in)) {}

ScenarioDocument parse_scenario_text(const std::string& text) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ScenarioParseError({std::string("document: ") + e.what()});
  }

  IssueList issues;
  ScenarioDocument doc;

  if (!root.is_object())
    throw ScenarioParseError({"document: top level must be an object"});

  for (const char* section : {"cameras", "features", "observations",
                              "motion"})
    if (!root.contains(section))
      issues.add(section, "required section is missing");
  if (!issues.items.empty()) throw ScenarioParseError(issues.items);

  // Cameras.
  std::vector<RigidTransform> extrinsics;
  if (!root["cameras"].is_array() || root["cameras"].empty()) {
    issues.add("cameras", "expected a non-empty array");
  } else {
    for (size_t i = 0; i < root["cameras"].size(); ++i) {
      const std::string path = "cameras[" + std::to_string(i) + "]";
      const Json& cam = root["cameras"][i];
      if (!cam.is_object()) {
        issues.add(path, "expected an object");
        continue;
      }
      RigidTransform tf;
      bool good = true;
      if (!cam.contains("rotation")) {
        issues.add(path + ".rotation", "missing");
        good = false;
      } else {
        good = read_rotation(cam["rotation"], path + ".rotation", issues,
                             doc.warnings, tf.rotation) &&
               good;
      }
      if (!cam.contains("translation")) {
        issues.add(path + ".translation", "missing");
        good = false;
      } else {
        good = read_vec3(cam["translation"], path + ".translation", issues,
                         tf.translation) &&
               good;
      }
      if (good) extrinsics.push_back(tf);
    }
  }
  if (issues.items.empty()) {
    try {
      doc.scenario.calibration = ClusterCalibration::make(extrinsics);
    } catch (const std::invalid_argument& e) {
      issues.add("cameras", e.what());
    }
  }

  // Features.
  if (!root["features"].is_array()) {
    issues.add("features", "expected an array");
  } else {
    for (size_t j = 0; j < root["features"].size(); ++j) {
      const std::string path = "features[" + std::to_string(j) + "]";
      const Json& fj = root["features"][j];
      if (!fj.is_object()) {
        issues.add(path, "expected an object");
        continue;
      }
      FeatureParam f;
      if (fj.contains("anchor") && fj["anchor"].is_number_integer())
        f.anchor_camera = fj["anchor"].get<int>();
      else
        issues.add(path + ".anchor", "expected an integer camera index");
      for (const char* key : {"phi", "theta", "depth"}) {
        if (!fj.contains(key) || !fj[key].is_number()) {
          issues.add(path + "." + key, "expected a number");
          continue;
        }
        const double value = fj[key].get<double>();
        if (std::string(key) == "phi") f.bearing.phi = value;
        if (std::string(key) == "theta") f.bearing.theta = value;
        if (std::string(key) == "depth") f.depth = value;
      }
      doc.scenario.features.push_back(f);
    }
  }

  // Observations.
  if (!root["observations"].is_array()) {
    issues.add("observations", "expected an array of index lists");
  } else {
    for (size_t j = 0; j < root["observations"].size(); ++j) {
      const std::string path = "observations[" + std::to_string(j) + "]";
      const Json& oj = root["observations"][j];
      std::vector<int> observers;
      if (!oj.is_array()) {
        issues.add(path, "expected an array of camera indices");
      } else {
        for (size_t k = 0; k < oj.size(); ++k) {
          if (!oj[k].is_number_integer()) {
            issues.add(path + "[" + std::to_string(k) + "]",
                       "expected an integer camera index");
            continue;
          }
          observers.push_back(oj[k].get<int>());
        }
      }
      doc.scenario.observations.observers.push_back(std::move(observers));
    }
  }

  // Motion.
  if (!root["motion"].is_object()) {
    issues.add("motion", "expected an object with t and omega");
  } else {
    const Json& motion = root["motion"];
    if (motion.contains("t"))
      read_vec3(motion["t"], "motion.t", issues,
                doc.scenario.motion.translation);
    else
      issues.add("motion.t", "missing");
    if (motion.contains("omega"))
      read_vec3(motion["omega"], "motion.omega", issues,
                doc.scenario.motion.omega);
    else
      issues.add("motion.omega", "missing");
  }

  // Metadata (optional, all fields optional).
  if (root.contains("metadata")) {
    const Json& meta = root["metadata"];
    if (!meta.is_object()) {
      issues.add("metadata", "expected an object");
    } else {
      if (meta.contains("seed")) {
        if (meta["seed"].is_number_unsigned())
          doc.seed = meta["seed"].get<std::uint64_t>();
        else
          issues.add("metadata.seed", "expected a non-negative integer");
      }
      if (meta.contains("description")) {
        if (meta["description"].is_string())
          doc.description = meta["description"].get<std::string>();
        else
          issues.add("metadata.description", "expected a string");
      }
      if (meta.contains("expected_classification")) {
        if (meta["expected_classification"].is_string())
          doc.expected_classification =
              meta["expected_classification"].get<std::string>();
        else
          issues.add("metadata.expected_classification",
                     "expected a string");
      }
    }
  }

  if (!issues.items.empty()) throw ScenarioParseError(issues.items);
  return doc;
}

ScenarioDocument load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw ScenarioParseError({"cannot open scenario file: " + path});
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario_text(buffer.str());
}

std::string scenario_to_text(const ScenarioDocument& doc) {
  Json root;

  Json cameras = Json::array();
  for (const RigidTransform& tf : doc.scenario.calibration.extrinsics) {
    Json cam;
    Json rotation = Json::array();
    const Mat3 m = tf.rotation.matrix();
    for (int r = 0; r < 3; ++r)
      rotation.push_back({m(r, 0), m(r, 1), m(r, 2)});
    cam["rotation"] = std::move(rotation);
    cam["translation"] = {tf.translation.x(), tf.translation.y(),
                          tf.translation.z()};
    cameras.push_back(std::move(cam));
  }
  root["cameras"] = std::move(cameras);

  Json features = Json::array();
  for (const FeatureParam& f : doc.scenario.features) {
    Json fj;
    fj["anchor"] = f.anchor_camera;
    fj["phi"] = f.bearing.phi;
    fj["theta"] = f.bearing.theta;
    fj["depth"] = f.depth;
    features.push_back(std::move(fj));
  }
  root["features"] = std::move(features);

  Json observations = Json::array();
  for (const std::vector<int>& observers :
       doc.scenario.observations.observers)
    observations.push_back(observers);
  root["observations"] = std::move(observations);

  root["motion"]["t"] = {doc.scenario.motion.translation.x(),
                         doc.scenario.motion.translation.y(),
                         doc.scenario.motion.translation.z()};
  root["motion"]["omega"] = {doc.scenario.motion.omega.x(),
                             doc.scenario.motion.omega.y(),
                             doc.scenario.motion.omega.z()};

  Json meta;
  meta["seed"] = doc.seed;
  if (!doc.description.empty()) meta["description"] = doc.description;
  if (!doc.expected_classification.empty())
    meta["expected_classification"] = doc.expected_classification;
  root["metadata"] = std::move(meta);

  return root.dump(2) + "\n";
}

void save_scenario(const ScenarioDocument& doc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write scenario file: " + path);
  out << scenario_to_text(doc);
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

void write_sweep_csv(const SweepResult& sweep, std::ostream& out) {
  out << "t_x,t_y,t_z,subset_id,normalized_det\n";
  const int res = sweep.grid.resolution;
  const int nsub = sweep.subset_count();
  for (int iu = 0; iu < res; ++iu)
    for (int iv = 0; iv < res; ++iv) {
      const Vec3 t = sweep.grid.translation_at(iu, iv);
      const std::string prefix = format_double(t.x()) + "," +
                                 format_double(t.y()) + "," +
                                 format_double(t.z()) + ",";
      for (int s = 0; s < nsub; ++s)
        out << prefix << s << ','
            << format_double(sweep.det_at(iu, iv, s)) << '\n';
    }
}

std::string sweep_intersections_path(const std::string& grid_path) {
  const size_t slash = grid_path.find_last_of('/');
  const size_t dot = grid_path.find_last_of('.');
  if (dot == std::string::npos ||
      (slash != std::string::npos && dot < slash))
    return grid_path + "_intersections";
  return grid_path.substr(0, dot) + "_intersections" + grid_path.substr(dot);
}

void write_intersections_csv(const SweepResult& sweep, std::ostream& out) {
  out << "t_x,t_y,t_z\n";
  for (const auto& [iu, iv] : sweep.intersections) {
    const Vec3 t = sweep.grid.translation_at(iu, iv);
    out << format_double(t.x()) << ',' << format_double(t.y()) << ','
        << format_double(t.z()) << '\n';
  }
}

std::vector<SweepCsvRow> read_sweep_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("sweep csv: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t_x,t_y,t_z,subset_id,normalized_det")
    throw std::runtime_error("sweep csv: unexpected header: " + line);

  std::vector<SweepCsvRow> rows;
  size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    std::array<std::string, 5> fields;
    size_t start = 0;
    for (int f = 0; f < 5; ++f) {
      const size_t comma = line.find(',', start);
      if (f < 4 && comma == std::string::npos)
        throw std::runtime_error("sweep csv: short row at line " +
                                 std::to_string(line_number));
      if (f == 4 && comma != std::string::npos)
        throw std::runtime_error("sweep csv: extra fields at line " +
                                 std::to_string(line_number));
      fields[static_cast<size_t>(f)] =
          line.substr(start, comma == std::string::npos ? std::string::npos
                                                        : comma - start);
      start = comma + 1;
    }

    try {
      SweepCsvRow row;
      row.t_x = std::stod(fields[0]);
      row.t_y = std::stod(fields[1]);
      row.t_z = std::stod(fields[2]);
      row.subset_id = std::stoi(fields[3]);
      row.normalized_det = std::stod(fields[4]);
      rows.push_back(row);
    } catch (const std::exception&) {
      throw std::runtime_error("sweep csv: bad number at line " +
                               std::to_string(line_number));
    }
  }
  return rows;
}

}  // namespace mcslam
