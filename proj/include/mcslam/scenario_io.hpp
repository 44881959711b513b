// Scenario files are JSON documents with five sections:
//
//   cameras:      [{rotation, translation: [x,y,z]}, ...]  (camera 0 first,
//                 identity extrinsic); rotation is either three axis-angle
//                 numbers or a row-major 3x3 matrix
//   features:     [{anchor: index, phi, theta, depth}, ...]
//   observations: one observer-index list per feature
//   motion:       {t: [x,y,z], omega: [x,y,z]}
//   metadata:     optional {seed, description, expected_classification}
//
// The parser collects every problem it can find, each tagged with a path
// into the document (e.g. "features[2].depth"), before giving up.
//
// Sweep exports are two CSV files: the determinant grid
// (t_x,t_y,t_z,subset_id,normalized_det; cell-major, subset fastest) and
// the intersections companion (t_x,t_y,t_z). All numbers carry 17
// significant digits.

#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "mcslam/degeneracy.hpp"

namespace mcslam {

struct ScenarioDocument {
  Scenario scenario;
  std::uint64_t seed = 0;
  std::string description;
  std::string expected_classification;  // free-form label used by examples
  std::vector<std::string> warnings;    // e.g. a re-orthonormalized rotation
};

class ScenarioParseError : public std::runtime_error {
 public:
  explicit ScenarioParseError(std::vector<std::string> issues_in);
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

/// Throws ScenarioParseError listing every defect found;
/// std::runtime_error for an unreadable file.
ScenarioDocument load_scenario(const std::string& path);
ScenarioDocument parse_scenario_text(const std::string& text);

std::string scenario_to_text(const ScenarioDocument& doc);
void save_scenario(const ScenarioDocument& doc, const std::string& path);

/// "%.17g" rendering used by every numeric CSV field.
std::string format_double(double value);

void write_sweep_csv(const SweepResult& sweep, std::ostream& out);
void write_intersections_csv(const SweepResult& sweep, std::ostream& out);

/// Companion-file naming: "loci.csv" -> "loci_intersections.csv";
/// extensionless paths get the suffix appended.
std::string sweep_intersections_path(const std::string& grid_path);

struct SweepCsvRow {
  double t_x = 0.0;
  double t_y = 0.0;
  double t_z = 0.0;
  int subset_id = 0;
  double normalized_det = 0.0;
};

/// Reads rows in file order (cell-major, subset fastest). Throws
/// std::runtime_error on a malformed header or row.
std::vector<SweepCsvRow> read_sweep_csv(std::istream& in);

}  // namespace mcslam
