#include "mcslam/degeneracy.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace mcslam {

namespace {

Eigen::Matrix<double, 1, 6> m2_row(const Vec3& a_hat, const Vec3& v,
                                   const Vec3& w) {
  const Vec3 first = v.cross(a_hat);
  Eigen::Matrix<double, 1, 6> row;
  row << first.transpose(), w.cross(first).transpose();
  return row;
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) /
                                    static_cast<std::uint64_t>(i);
  return r;
}

std::vector<std::array<int, 6>> enumerate_subsets(int row_count,
                                                  int max_subsets,
                                                  std::uint64_t seed,
                                                  std::vector<std::string>&
                                                      warnings) {
  const std::uint64_t total = binomial(row_count, 6);
  std::vector<std::array<int, 6>> subsets;

  if (total <= static_cast<std::uint64_t>(max_subsets)) {
    std::array<int, 6> c = {0, 1, 2, 3, 4, 5};
    while (true) {
      subsets.push_back(c);
      int i = 5;
      while (i >= 0 && c[static_cast<size_t>(i)] == row_count - 6 + i) --i;
      if (i < 0) break;
      ++c[static_cast<size_t>(i)];
      for (int j = i + 1; j < 6; ++j)
        c[static_cast<size_t>(j)] = c[static_cast<size_t>(j - 1)] + 1;
    }
    return subsets;
  }

  // Deterministic sample of distinct combinations; the set keeps the final
  // order independent of draw order.
  std::mt19937_64 rng(seed);
  std::set<std::array<int, 6>> chosen;
  std::vector<int> indices(static_cast<size_t>(row_count));
  for (int i = 0; i < row_count; ++i) indices[static_cast<size_t>(i)] = i;
  const int wanted = max_subsets;
  for (long attempt = 0; attempt < 200L * wanted &&
                         static_cast<int>(chosen.size()) < wanted;
       ++attempt) {
    for (int i = 0; i < 6; ++i) {
      std::uniform_int_distribution<int> pick(i, row_count - 1);
      std::swap(indices[static_cast<size_t>(i)],
                indices[static_cast<size_t>(pick(rng))]);
    }
    std::array<int, 6> c;
    std::copy_n(indices.begin(), 6, c.begin());
    std::sort(c.begin(), c.end());
    chosen.insert(c);
  }
  subsets.assign(chosen.begin(), chosen.end());
  std::ostringstream note;
  note << "subset cap applied: sampled " << subsets.size() << " of " << total
       << " six-row subsets (seed " << seed << ")";
  warnings.push_back(note.str());
  return subsets;
}

}  // namespace

M2Bundle build_m2(const Scenario& s) {
  M2Bundle bundle;
  const int mo = s.observation_count();
  bundle.matrix.resize(mo, 6);
  bundle.rows.reserve(static_cast<size_t>(mo));

  int r = 0;
  for (int j = 0; j < s.feature_count(); ++j) {
    const auto& observers = s.observations.observers[static_cast<size_t>(j)];
    for (int k = 0; k < static_cast<int>(observers.size()); ++k) {
      const IntermediateVectors iv = intermediate_vectors(s, j, k);
      bundle.matrix.row(r) = m2_row(iv.a_hat, iv.v, iv.w);
      bundle.rows.push_back(
          M2RowInfo{j, k, observers[static_cast<size_t>(k)]});
      ++r;
    }
  }
  return bundle;
}

RankReport rank_m2(const M2Bundle& m2, double rel_tol) {
  RankReport report;
  report.spectrum = VecX::Zero(6);
  report.min_direction = VecX::Zero(6);
  if (m2.matrix.rows() == 0) return report;

  Eigen::JacobiSVD<MatX> svd(m2.matrix, Eigen::ComputeFullV);
  report.spectrum.head(svd.singularValues().size()) = svd.singularValues();
  report.sigma_max = report.spectrum[0];
  report.sigma_min = report.spectrum[5];
  report.sigma_second_min = report.spectrum[4];
  report.min_direction = svd.matrixV().col(5);
  if (report.sigma_max > 0.0) {
    const double cut = rel_tol * report.sigma_max;
    for (int i = 0; i < 6; ++i)
      if (report.spectrum[i] > cut) ++report.rank;
  }
  return report;
}

SufficientFlags detect_sufficient_conditions(const Scenario& s) {
  SufficientFlags flags;
  flags.single_camera = s.camera_count() == 1;
  flags.single_feature_many_obs =
      s.feature_count() == 1 && s.observation_count() >= 6;

  std::vector<Vec3> vectors;
  for (int j = 0; j < s.feature_count(); ++j) {
    const int count = static_cast<int>(
        s.observations.observers[static_cast<size_t>(j)].size());
    for (int k = 0; k < count; ++k) {
      const Vec3 v = intermediate_vectors(s, j, k).v;
      if (v.norm() > 1e-12) vectors.push_back(v);
    }
  }
  bool parallel = true;
  for (size_t a = 0; a < vectors.size() && parallel; ++a)
    for (size_t b = a + 1; b < vectors.size() && parallel; ++b)
      if (vectors[a].cross(vectors[b]).norm() >
          1e-9 * vectors[a].norm() * vectors[b].norm())
        parallel = false;
  flags.parallel_observation_vectors = parallel;
  return flags;
}

const char* motion_class_name(MotionClass c) {
  switch (c) {
    case MotionClass::NonDegenerate: return "non_degenerate";
    case MotionClass::NearDegenerate: return "near_degenerate";
    case MotionClass::Degenerate: return "degenerate";
  }
  return "unknown";
}

DegeneracyReport classify(const Scenario& s,
                          const ClassifyThresholds& thresholds) {
  DegeneracyReport report;
  report.flags = detect_sufficient_conditions(s);

  const M2Bundle m2 = build_m2(s);
  const RankReport rr = rank_m2(m2, thresholds.rank_rel_tol);
  report.rank_m2 = rr.rank;
  report.sigma_ratio = rr.ratio();
  report.singular_values = rr.spectrum;

  if (s.observation_count() < 6) {
    report.classification = MotionClass::Degenerate;
    report.reasons.push_back(
        "fewer than six keyframe-2 observations, rank cannot reach 6");
  } else if (report.sigma_ratio < thresholds.degenerate_ratio) {
    report.classification = MotionClass::Degenerate;
    std::ostringstream why;
    why << "rank(M2) = " << report.rank_m2
        << " < 6 (sigma_6/sigma_1 = " << report.sigma_ratio << ")";
    report.reasons.push_back(why.str());
  } else if (report.sigma_ratio < thresholds.near_ratio) {
    report.classification = MotionClass::NearDegenerate;
    std::ostringstream why;
    why << "sigma_6/sigma_1 = " << report.sigma_ratio
        << " falls in the near-degenerate band";
    report.reasons.push_back(why.str());
  } else {
    report.classification = MotionClass::NonDegenerate;
  }

  if (report.flags.single_camera)
    report.reasons.push_back("cluster has a single camera");
  if (report.flags.single_feature_many_obs)
    report.reasons.push_back("a single feature supplies every observation");
  if (report.flags.parallel_observation_vectors)
    report.reasons.push_back("all observation vectors are parallel");
  return report;
}

SweepResult sweep_translations(const Scenario& scenario_template,
                               const SweepOptions& options) {
  const SweepGrid& grid = options.grid;
  if (grid.axis_u < 0 || grid.axis_u > 2 || grid.axis_v < 0 ||
      grid.axis_v > 2 || grid.axis_u == grid.axis_v)
    throw std::invalid_argument("sweep axes must be two distinct of x, y, z");
  if (grid.resolution < 2)
    throw std::invalid_argument("sweep needs at least two samples per axis");
  if (!(grid.u_max > grid.u_min) || !(grid.v_max > grid.v_min))
    throw std::invalid_argument("sweep ranges must be non-empty");
  if (!(options.abs_tol > 0.0))
    throw std::invalid_argument("abs_tol must be positive");
  if (options.max_subsets < 1)
    throw std::invalid_argument("max_subsets must be positive");
  if (options.intersection_radius < 0)
    throw std::invalid_argument("intersection radius must be non-negative");

  const int mo = scenario_template.observation_count();
  if (mo < 6)
    throw std::invalid_argument(
        "sweep needs at least six keyframe-2 observations");

  SweepResult result;
  result.grid = grid;
  result.omega = scenario_template.motion.omega;
  result.intersection_radius = options.intersection_radius;
  result.subsets = enumerate_subsets(mo, options.max_subsets,
                                     options.subset_seed, result.warnings);

  // Only v = t + c + d moves with the swept translation; a_hat, c + d and
  // w are fixed per row.
  struct RowIngredients {
    Vec3 a_hat;
    Vec3 cd;
    Vec3 w;
  };
  std::vector<RowIngredients> ingredients;
  ingredients.reserve(static_cast<size_t>(mo));
  Scenario probe = scenario_template;
  probe.motion.translation = Vec3::Zero();
  for (int j = 0; j < probe.feature_count(); ++j) {
    const int count = static_cast<int>(
        probe.observations.observers[static_cast<size_t>(j)].size());
    for (int k = 0; k < count; ++k) {
      const IntermediateVectors iv = intermediate_vectors(probe, j, k);
      ingredients.push_back(RowIngredients{iv.a_hat, iv.c + iv.d, iv.w});
    }
  }

  const int res = grid.resolution;
  const int nsub = result.subset_count();
  const int cells = res * res;
  result.determinants.assign(static_cast<size_t>(cells) *
                                 static_cast<size_t>(nsub),
                             0.0);

  auto evaluate_cells = [&](int begin, int end) {
    MatX rows(mo, 6);
    Eigen::Matrix<double, 6, 6> sub;
    for (int cell = begin; cell < end; ++cell) {
      const int iu = cell / res;
      const int iv = cell % res;
      const Vec3 t = grid.translation_at(iu, iv);
      for (int r = 0; r < mo; ++r) {
        const RowIngredients& ing = ingredients[static_cast<size_t>(r)];
        Eigen::Matrix<double, 1, 6> row =
            m2_row(ing.a_hat, t + ing.cd, ing.w);
        const double norm = row.norm();
        if (norm > 0.0) row /= norm;
        rows.row(r) = row;
      }
      for (int s = 0; s < nsub; ++s) {
        const std::array<int, 6>& idx = result.subsets[static_cast<size_t>(s)];
        for (int r = 0; r < 6; ++r) sub.row(r) = rows.row(idx[static_cast<size_t>(r)]);
        result.determinants[static_cast<size_t>(cell) *
                                static_cast<size_t>(nsub) +
                            static_cast<size_t>(s)] =
            Eigen::PartialPivLU<Eigen::Matrix<double, 6, 6>>(sub)
                .determinant();
      }
    }
  };

  int threads = options.threads;
  if (threads <= 0)
    threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, cells);

  if (threads == 1) {
    evaluate_cells(0, cells);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads));
    const int chunk = (cells + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const int begin = t * chunk;
      const int end = std::min(cells, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(evaluate_cells, begin, end);
    }
    for (std::thread& worker : pool) worker.join();
  }

  result.crossings =
      detect_crossings(result.determinants, res, nsub, options.abs_tol);

  int silent = 0;
  for (int s = 0; s < nsub; ++s) {
    bool seen = false;
    for (int cell = 0; cell < cells && !seen; ++cell)
      seen = result.crossings[static_cast<size_t>(cell * nsub + s)] != 0;
    if (!seen) ++silent;
  }
  if (silent > 0) {
    std::ostringstream note;
    note << silent << " of " << nsub
         << " subsets have no zero crossing in the window; the grid may be "
            "too coarse or the locus lies outside the range";
    result.warnings.push_back(note.str());
  }

  result.intersections = intersect_loci(result, options.intersection_radius);
  return result;
}

std::vector<std::uint8_t> detect_crossings(
    const std::vector<double>& determinants, int resolution,
    int subset_count, double abs_tol) {
  if (resolution < 1 || subset_count < 1 ||
      determinants.size() != static_cast<size_t>(resolution) *
                                 static_cast<size_t>(resolution) *
                                 static_cast<size_t>(subset_count))
    throw std::invalid_argument("determinant grid has the wrong size");

  std::vector<std::uint8_t> crossings(determinants.size(), 0);
  auto det = [&](int iu, int iv, int s) {
    return determinants[static_cast<size_t>(
        (iu * resolution + iv) * subset_count + s)];
  };
  auto mark = [&](int iu, int iv, int s) {
    crossings[static_cast<size_t>((iu * resolution + iv) * subset_count +
                                  s)] = 1;
  };
  for (int s = 0; s < subset_count; ++s)
    for (int iu = 0; iu < resolution; ++iu)
      for (int iv = 0; iv < resolution; ++iv) {
        const double d = det(iu, iv, s);
        if (std::abs(d) < abs_tol) mark(iu, iv, s);
        if (iu + 1 < resolution && d * det(iu + 1, iv, s) < 0.0) {
          mark(iu, iv, s);
          mark(iu + 1, iv, s);
        }
        if (iv + 1 < resolution && d * det(iu, iv + 1, s) < 0.0) {
          mark(iu, iv, s);
          mark(iu, iv + 1, s);
        }
      }
  return crossings;
}

std::vector<std::pair<int, int>> intersect_loci(const SweepResult& sweep,
                                                int radius) {
  if (radius < 0)
    throw std::invalid_argument("intersection radius must be non-negative");
  const int res = sweep.grid.resolution;
  const int nsub = sweep.subset_count();
  const int cells = res * res;

  std::vector<std::uint8_t> all(static_cast<size_t>(cells), 1);
  std::vector<std::uint8_t> dilated(static_cast<size_t>(cells));
  for (int s = 0; s < nsub; ++s) {
    std::fill(dilated.begin(), dilated.end(), 0);
    for (int iu = 0; iu < res; ++iu)
      for (int iv = 0; iv < res; ++iv) {
        if (sweep.crossings[static_cast<size_t>((iu * res + iv) * nsub + s)] ==
            0)
          continue;
        const int u0 = std::max(0, iu - radius);
        const int u1 = std::min(res - 1, iu + radius);
        const int v0 = std::max(0, iv - radius);
        const int v1 = std::min(res - 1, iv + radius);
        for (int du = u0; du <= u1; ++du)
          for (int dv = v0; dv <= v1; ++dv)
            dilated[static_cast<size_t>(du * res + dv)] = 1;
      }
    for (int cell = 0; cell < cells; ++cell)
      all[static_cast<size_t>(cell)] &= dilated[static_cast<size_t>(cell)];
  }

  std::vector<std::pair<int, int>> out;
  for (int iu = 0; iu < res; ++iu)
    for (int iv = 0; iv < res; ++iv)
      if (all[static_cast<size_t>(iu * res + iv)] != 0)
        out.emplace_back(iu, iv);
  return out;
}

}  // namespace mcslam
