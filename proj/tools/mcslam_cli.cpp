// Command-line front end over the cluster observability library:
//
//   validate  check a scenario file against the modelling assumptions
//   analyze   rank/degeneracy report for a scenario
//   sweep     zero-determinant loci over a translation window, as CSV
//   solve     bundle adjustment on synthetic measurements from a scenario
//   synth     generate a scenario file from a preset cluster and a motion
//
// Exit codes: 0 success, 1 parse or validation failure (or infeasible
// synthesis), 2 degenerate classification under `analyze --strict`,
// 3 internal error.
//
// Every randomized command takes --seed and defaults to the fixed
// constant 2026; nothing reads wall-clock entropy.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mcslam/estimator.hpp"
#include "mcslam/presets.hpp"
#include "mcslam/scenario_io.hpp"

namespace {

using namespace mcslam;

constexpr std::uint64_t kDefaultSeed = 2026;

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string current;
  for (char c : text) {
    if (c == sep) {
      parts.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  parts.push_back(current);
  return parts;
}

std::vector<double> number_list(const std::string& text, size_t count,
                                const std::string& what) {
  const std::vector<std::string> parts = split(text, ',');
  if (parts.size() != count)
    throw std::invalid_argument(what + ": expected " +
                                std::to_string(count) +
                                " comma-separated numbers, got '" + text +
                                "'");
  std::vector<double> values;
  for (const std::string& part : parts) {
    size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(part, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument(what + ": bad number '" + part + "'");
    }
    if (used != part.size())
      throw std::invalid_argument(what + ": bad number '" + part + "'");
    values.push_back(value);
  }
  return values;
}

// Motion specs come in two shapes. Explicit components:
//     "t=X,Y,Z;omega=A,B,C"        (either part may be omitted)
// or a named family, some of which depend on the cluster:
//     "pure-translation:X,Y,Z"
//     "planar-inplane:ANGLE,LAMBDA"
//     "quarter-turn:LAMBDA"
//     "concentric:BETA,AX,AY,AZ,ANGLE"
KeyframeMotion parse_motion_spec(const std::string& spec,
                                 const ClusterCalibration& calib) {
  if (spec.empty()) return {};

  const size_t colon = spec.find(':');
  if (colon != std::string::npos) {
    const std::string name = spec.substr(0, colon);
    const std::string args = spec.substr(colon + 1);
    if (name == "pure-translation") {
      const auto v = number_list(args, 3, "pure-translation");
      return pure_translation_motion(Vec3(v[0], v[1], v[2]));
    }
    if (name == "planar-inplane") {
      const auto v = number_list(args, 2, "planar-inplane");
      return planar_inplane_rotation_motion(v[0], v[1]);
    }
    if (name == "quarter-turn") {
      const auto v = number_list(args, 1, "quarter-turn");
      return quarter_turn_translation_motion(calib, v[0]);
    }
    if (name == "concentric") {
      const auto v = number_list(args, 5, "concentric");
      return concentric_arcs_motion(calib, v[0], Vec3(v[1], v[2], v[3]),
                                    v[4]);
    }
    throw std::invalid_argument("unknown motion family '" + name + "'");
  }

  KeyframeMotion motion;
  for (const std::string& part : split(spec, ';')) {
    if (part.empty()) continue;
    const size_t eq = part.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("motion part '" + part +
                                  "' is not key=X,Y,Z");
    const std::string key = part.substr(0, eq);
    const auto v = number_list(part.substr(eq + 1), 3, "motion " + key);
    if (key == "t")
      motion.translation = Vec3(v[0], v[1], v[2]);
    else if (key == "omega")
      motion.omega = Vec3(v[0], v[1], v[2]);
    else
      throw std::invalid_argument("unknown motion key '" + key + "'");
  }
  return motion;
}

int axis_index(const std::string& name) {
  if (name == "x") return 0;
  if (name == "y") return 1;
  if (name == "z") return 2;
  throw std::invalid_argument("axis must be x, y or z, got '" + name + "'");
}

void print_warnings(const ScenarioDocument& doc) {
  for (const std::string& warning : doc.warnings)
    std::cout << "warning: " << warning << "\n";
}

void print_validation(const ValidationReport& report) {
  for (const ValidationIssue& issue : report.violations)
    std::cout << "violation [" << issue.assumption << "]: " << issue.message
              << "\n";
  for (const std::string& note : report.notes)
    std::cout << "note: " << note << "\n";
}

int cmd_validate(const std::string& path) {
  const ScenarioDocument doc = load_scenario(path);
  print_warnings(doc);
  const ValidationReport report = validate_assumptions(doc.scenario);
  print_validation(report);
  if (!report.ok()) return 1;
  std::cout << "ok: " << doc.scenario.camera_count() << " cameras, "
            << doc.scenario.feature_count() << " features, "
            << doc.scenario.observation_count()
            << " keyframe-2 observations\n";
  return 0;
}

int cmd_analyze(const std::string& path, double tol, bool strict) {
  const ScenarioDocument doc = load_scenario(path);
  print_warnings(doc);

  // The rank analysis needs a structurally sound scenario but not visible
  // images, so only index-level defects stop it.
  const ValidationReport report = validate_assumptions(doc.scenario);
  bool structural = false;
  for (const ValidationIssue& issue : report.violations) {
    if (issue.assumption <= 1) structural = true;
  }
  if (structural) {
    print_validation(report);
    std::cout << "analysis refused: structural defects above\n";
    return 1;
  }
  for (const ValidationIssue& issue : report.violations)
    std::cout << "note: proceeding despite: " << issue.message << "\n";

  ClassifyThresholds thresholds;
  thresholds.rank_rel_tol = tol;
  const DegeneracyReport rep = classify(doc.scenario, thresholds);

  std::cout << "rank_m2: " << rep.rank_m2 << "\n";
  std::cout << "sigma_ratio: " << format_double(rep.sigma_ratio) << "\n";
  std::cout << "singular_values:";
  for (int i = 0; i < rep.singular_values.size(); ++i)
    std::cout << " " << format_double(rep.singular_values[i]);
  std::cout << "\n";
  std::cout << "flags:";
  bool any_flag = false;
  if (rep.flags.single_camera) {
    std::cout << " single_camera";
    any_flag = true;
  }
  if (rep.flags.single_feature_many_obs) {
    std::cout << " single_feature_many_obs";
    any_flag = true;
  }
  if (rep.flags.parallel_observation_vectors) {
    std::cout << " parallel_observation_vectors";
    any_flag = true;
  }
  if (!any_flag) std::cout << " none";
  std::cout << "\n";
  std::cout << "classification: " << motion_class_name(rep.classification)
            << "\n";
  for (const std::string& reason : rep.reasons)
    std::cout << "reason: " << reason << "\n";

  if (strict && rep.classification == MotionClass::Degenerate) return 2;
  return 0;
}

int cmd_sweep(const std::string& path, const std::string& axes,
              const std::string& ranges, int steps, double slice_value,
              const std::string& out, int threads, double abs_tol,
              int max_subsets, std::uint64_t subset_seed, int radius) {
  const ScenarioDocument doc = load_scenario(path);
  print_warnings(doc);

  const std::vector<std::string> axis_names = split(axes, ',');
  if (axis_names.size() != 2)
    throw std::invalid_argument("--axes wants two of x,y,z");
  SweepOptions options;
  options.grid.axis_u = axis_index(axis_names[0]);
  options.grid.axis_v = axis_index(axis_names[1]);
  const auto r = number_list(ranges, 4, "--axis-ranges");
  options.grid.u_min = r[0];
  options.grid.u_max = r[1];
  options.grid.v_min = r[2];
  options.grid.v_max = r[3];
  options.grid.resolution = steps;
  options.grid.slice = Vec3::Constant(slice_value);
  options.abs_tol = abs_tol;
  options.max_subsets = max_subsets;
  options.subset_seed = subset_seed;
  options.threads = threads;
  options.intersection_radius = radius;

  const SweepResult sweep = sweep_translations(doc.scenario, options);
  for (const std::string& warning : sweep.warnings)
    std::cout << "warning: " << warning << "\n";

  std::ofstream grid_out(out);
  if (!grid_out) throw std::runtime_error("cannot write " + out);
  write_sweep_csv(sweep, grid_out);
  if (!grid_out) throw std::runtime_error("write failed: " + out);

  const std::string companion = sweep_intersections_path(out);
  std::ofstream inter_out(companion);
  if (!inter_out) throw std::runtime_error("cannot write " + companion);
  write_intersections_csv(sweep, inter_out);
  if (!inter_out) throw std::runtime_error("write failed: " + companion);

  int crossing_cells = 0;
  const int nsub = sweep.subset_count();
  for (int cell = 0; cell < sweep.cells(); ++cell)
    for (int s = 0; s < nsub; ++s)
      if (sweep.crossings[static_cast<size_t>(cell) * nsub + s]) {
        ++crossing_cells;
        break;
      }

  std::cout << "subsets: " << nsub << "\n";
  std::cout << "grid: " << steps << "x" << steps << " cells\n";
  std::cout << "cells_on_some_locus: " << crossing_cells << "\n";
  std::cout << "intersection_cells: " << sweep.intersections.size() << "\n";
  std::cout << "wrote: " << out << "\n";
  std::cout << "wrote: " << companion << "\n";
  return 0;
}

int cmd_solve(const std::string& path, double noise, double perturb,
              std::uint64_t seed, int max_iterations,
              bool no_rank_diagnostics) {
  const ScenarioDocument doc = load_scenario(path);
  print_warnings(doc);
  const ValidationReport report = validate_assumptions(doc.scenario);
  if (!report.ok()) {
    print_validation(report);
    std::cout << "solve refused: scenario violates the assumptions\n";
    return 1;
  }

  MeasurementSet measurements = stack_measurements(doc.scenario);
  if (noise > 0.0) measurements = add_noise(measurements, noise, seed);
  const VecX truth = assemble_state(doc.scenario);
  const VecX initial = perturb_state(truth, perturb, seed + 1);

  SolverOptions options;
  options.max_iterations = max_iterations;
  options.rank_diagnostics = !no_rank_diagnostics;
  const SolveResult result =
      lm_solve(doc.scenario, measurements, initial, options);

  std::cout << "termination: " << termination_name(result.termination)
            << "\n";
  std::cout << "iterations: " << result.iterations << "\n";
  std::cout << "initial_cost: " << format_double(result.cost_history.front())
            << "\n";
  std::cout << "final_cost: " << format_double(result.cost_history.back())
            << "\n";
  std::cout << "sigma_ratio: " << format_double(result.sigma_ratio) << "\n";
  std::cout << "scale_alignment: " << format_double(result.scale_alignment)
            << "\n";
  const double deviation = (result.state - truth).cwiseAbs().maxCoeff();
  std::cout << "max_deviation_from_file_state: " << format_double(deviation)
            << "\n";
  return 0;
}

int cmd_synth(const std::string& cameras, int features, int cross_camera,
              const std::string& topology, const std::string& motion_spec,
              std::uint64_t seed, const std::string& out,
              double bearing_range, double min_depth, double max_depth,
              const std::string& describe, const std::string& expect) {
  GeneratorConfig config;
  if (cameras == "back-to-back-2")
    config.calibration = back_to_back_two();
  else if (cameras == "side-by-side-2")
    config.calibration = side_by_side_two();
  else if (cameras == "noncollinear-3")
    config.calibration = noncollinear_three();
  else if (cameras == "planar-4")
    config.calibration = planar_four();
  else
    config.calibration = load_scenario(cameras).scenario.calibration;

  config.feature_count = features;
  if (cross_camera > 0) {
    config.topology = TopologyMode::CrossCamera;
    config.cross_camera_count = cross_camera;
  } else if (topology == "same-camera") {
    config.topology = TopologyMode::SameCamera;
  } else if (topology == "auto") {
    config.topology = TopologyMode::Auto;
  } else {
    throw std::invalid_argument("--topology must be auto or same-camera");
  }
  const KeyframeMotion motion =
      parse_motion_spec(motion_spec, config.calibration);
  config.translation = motion.translation;
  config.omega = motion.omega;
  config.bearing_range = bearing_range;
  config.min_depth = min_depth;
  config.max_depth = max_depth;

  ScenarioDocument doc;
  try {
    doc.scenario = synthesize_scenario(config, seed);
  } catch (const std::runtime_error& e) {
    std::cout << "synthesis infeasible: " << e.what() << "\n";
    return 1;
  }
  doc.seed = seed;
  doc.description = describe.empty()
                        ? "synthesized " + cameras + " cluster, " +
                              std::to_string(features) + " features"
                        : describe;
  doc.expected_classification = expect;

  if (out.empty()) {
    std::cout << scenario_to_text(doc);
  } else {
    save_scenario(doc, out);
    std::cout << "wrote: " << out << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Observability analysis for two-keyframe multicamera cluster "
      "adjustment"};
  app.require_subcommand(1);
  int exit_code = 0;

  // validate
  std::string validate_file;
  CLI::App* validate =
      app.add_subcommand("validate", "check a scenario file against the "
                                     "modelling assumptions");
  validate->add_option("file", validate_file, "scenario file")->required();
  validate->callback([&] { exit_code = cmd_validate(validate_file); });

  // analyze
  std::string analyze_file;
  double analyze_tol = 1e-9;
  bool analyze_strict = false;
  CLI::App* analyze = app.add_subcommand(
      "analyze", "rank and degeneracy report for a scenario");
  analyze->add_option("file", analyze_file, "scenario file")->required();
  analyze->add_option("--tol", analyze_tol,
                      "relative singular-value tolerance for rank");
  analyze->add_flag("--strict", analyze_strict,
                    "exit 2 when the classification is degenerate");
  analyze->callback(
      [&] { exit_code = cmd_analyze(analyze_file, analyze_tol,
                                    analyze_strict); });

  // sweep
  std::string sweep_file, sweep_axes = "x,y", sweep_ranges = "-1,1,-1,1";
  std::string sweep_out;
  int sweep_steps = 200, sweep_threads = 0, sweep_max_subsets = 210;
  double sweep_slice = 0.0, sweep_abs_tol = 1e-8;
  std::uint64_t sweep_seed = kDefaultSeed;
  CLI::App* sweep = app.add_subcommand(
      "sweep",
      "zero-determinant loci over a translation window, exported as CSV");
  sweep->add_option("file", sweep_file, "scenario file")->required();
  sweep->add_option("--axes", sweep_axes,
                    "the two translation components swept, e.g. x,y");
  sweep->add_option("--axis-ranges", sweep_ranges,
                    "window as umin,umax,vmin,vmax");
  sweep->add_option("--steps", sweep_steps, "grid resolution per axis");
  sweep->add_option("--slice-tz", sweep_slice,
                    "value of the translation component held fixed (named "
                    "for the default x,y sweep)");
  sweep->add_option("--out", sweep_out, "grid CSV path; the intersections "
                                        "companion gets _intersections "
                                        "inserted before the extension")
      ->required();
  sweep->add_option("--threads", sweep_threads,
                    "worker threads, 0 = hardware concurrency");
  sweep->add_option("--abs-tol", sweep_abs_tol,
                    "normalized |det| below this marks a crossing");
  sweep->add_option("--max-subsets", sweep_max_subsets,
                    "sample this many six-row subsets when the full count "
                    "exceeds it");
  sweep->add_option("--seed", sweep_seed, "subset sampling seed");
  int sweep_radius = 2;
  sweep->add_option("--intersection-radius", sweep_radius,
                    "Chebyshev radius (cells) for the loci intersection "
                    "test");
  sweep->callback([&] {
    exit_code = cmd_sweep(sweep_file, sweep_axes, sweep_ranges, sweep_steps,
                          sweep_slice, sweep_out, sweep_threads,
                          sweep_abs_tol, sweep_max_subsets, sweep_seed,
                          sweep_radius);
  });

  // solve
  std::string solve_file;
  double solve_noise = 0.0, solve_perturb = 0.01;
  std::uint64_t solve_seed = kDefaultSeed;
  int solve_max_iterations = 100;
  bool solve_no_diag = false;
  CLI::App* solve = app.add_subcommand(
      "solve", "bundle adjustment on measurements synthesized from the "
               "scenario; noise uses --seed, the initial-state perturbation "
               "uses --seed + 1");
  solve->add_option("file", solve_file, "scenario file")->required();
  solve->add_option("--noise", solve_noise,
                    "measurement noise standard deviation");
  solve->add_option("--perturb", solve_perturb,
                    "relative perturbation of the initial state");
  solve->add_option("--seed", solve_seed, "noise / perturbation seed");
  solve->add_option("--max-iterations", solve_max_iterations,
                    "iteration cap");
  solve->add_flag("--no-rank-diagnostics", solve_no_diag,
                  "skip the per-iteration rank check");
  solve->callback([&] {
    exit_code = cmd_solve(solve_file, solve_noise, solve_perturb, solve_seed,
                          solve_max_iterations, solve_no_diag);
  });

  // synth
  std::string synth_cameras = "back-to-back-2", synth_topology = "auto";
  std::string synth_motion, synth_out, synth_describe, synth_expect;
  int synth_features = 8, synth_cross = 0;
  double synth_bearing_range = 0.6, synth_min_depth = 1.0,
         synth_max_depth = 10.0;
  std::uint64_t synth_seed = kDefaultSeed;
  CLI::App* synth = app.add_subcommand(
      "synth", "generate a scenario file from a cluster preset and a "
               "motion spec");
  synth->add_option("--cameras", synth_cameras,
                    "back-to-back-2 | side-by-side-2 | noncollinear-3 | "
                    "planar-4 | path to a scenario file whose cluster is "
                    "reused");
  synth->add_option("--features", synth_features, "feature count");
  synth->add_option("--cross-camera", synth_cross,
                    "hand this many camera-0 features to other cameras");
  synth->add_option("--topology", synth_topology,
                    "auto (visibility) or same-camera");
  synth->add_option("--motion", synth_motion,
                    "\"t=X,Y,Z;omega=A,B,C\" or pure-translation:X,Y,Z | "
                    "planar-inplane:ANGLE,LAMBDA | quarter-turn:LAMBDA | "
                    "concentric:BETA,AX,AY,AZ,ANGLE");
  synth->add_option("--seed", synth_seed, "feature drawing seed");
  synth->add_option("--out", synth_out, "output path (stdout when omitted)");
  synth->add_option("--bearing-range", synth_bearing_range,
                    "synthesis cone half-angle in radians");
  synth->add_option("--min-depth", synth_min_depth, "depth range low end");
  synth->add_option("--max-depth", synth_max_depth, "depth range high end");
  synth->add_option("--describe", synth_describe, "metadata description");
  synth->add_option("--expect", synth_expect,
                    "metadata expected_classification label");
  synth->callback([&] {
    exit_code =
        cmd_synth(synth_cameras, synth_features, synth_cross, synth_topology,
                  synth_motion, synth_seed, synth_out, synth_bearing_range,
                  synth_min_depth, synth_max_depth, synth_describe,
                  synth_expect);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const mcslam::ScenarioParseError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return exit_code;
}
