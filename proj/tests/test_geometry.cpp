#include "mcslam/geometry.hpp"

#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "support.hpp"

using namespace mcslam;
namespace ts = testsupport;

TEST_CASE("skew matches the cross product") {
  CHECK(skew(Vec3::Zero()).isZero(0.0));

  // frozen example: e_x x e_y = e_z
  const Vec3 ez = skew(Vec3(1, 0, 0)) * Vec3(0, 1, 0);
  CHECK(ez.isApprox(Vec3(0, 0, 1), 1e-15));

  ts::Rng rng(101);
  for (int i = 0; i < 200; ++i) {
    const Vec3 v = ts::random_vec3(rng, -5.0, 5.0);
    const Vec3 w = ts::random_vec3(rng, -5.0, 5.0);
    CHECK((skew(v) * w - v.cross(w)).norm() == 0.0);
    CHECK((skew(v) + skew(v).transpose()).isZero(0.0));
  }
}

TEST_CASE("exp_so3 agrees with series summation") {
  CHECK(exp_so3(Vec3::Zero()).matrix().isIdentity(0.0));

  // quarter turn about z sends e_x to e_y
  const Vec3 rotated = exp_so3(Vec3(0, 0, M_PI_2)) * Vec3(1, 0, 0);
  CHECK(rotated.isApprox(Vec3(0, 1, 0), 1e-12));

  ts::Rng rng(202);
  for (int i = 0; i < 300; ++i) {
    const Vec3 w = ts::random_unit3(rng) * ts::uniform(rng, 0.0, M_PI);
    const Mat3 r = exp_so3(w).matrix();
    CHECK((r - ts::series_exp_skew(w)).cwiseAbs().maxCoeff() < 1e-12);
    // inverse composition
    CHECK((exp_so3(-w).matrix() * r - Mat3::Identity())
              .cwiseAbs()
              .maxCoeff() < 1e-12);
  }
}

TEST_CASE("exp_so3 small-angle branch stays on the series") {
  for (double mag : {1e-12, 1e-10, 5e-9, 1e-8, 2e-8}) {
    const Vec3 w = mag * Vec3(0.3, -0.7, 0.64).normalized();
    CHECK((exp_so3(w).matrix() - ts::series_exp_skew(w))
              .cwiseAbs()
              .maxCoeff() < 1e-15);
  }
}

TEST_CASE("log_so3 inverts exp_so3") {
  ts::Rng rng(303);
  for (int i = 0; i < 200; ++i) {
    const Vec3 w = ts::random_unit3(rng) * ts::uniform(rng, 1e-6, 3.0);
    CHECK((log_so3(exp_so3(w)) - w).norm() < 1e-9 * (1.0 + w.norm()));
  }
  CHECK(log_so3(Rotation()).norm() == 0.0);
}

TEST_CASE("rotation factory validates its input") {
  const Mat3 good = exp_so3(Vec3(0.1, 0.2, 0.3)).matrix();
  CHECK_NOTHROW(Rotation::from_matrix(good));

  Mat3 bent = good;
  bent(0, 1) += 1e-6;
  CHECK_THROWS_AS(Rotation::from_matrix(bent), std::invalid_argument);

  Mat3 reflection = Mat3::Identity();
  reflection(2, 2) = -1.0;
  CHECK_THROWS_AS(Rotation::from_matrix(reflection), std::invalid_argument);
}

TEST_CASE("rigid transform composition and inverse") {
  ts::Rng rng(404);
  for (int i = 0; i < 100; ++i) {
    const RigidTransform a{exp_so3(ts::random_vec3(rng)),
                           ts::random_vec3(rng, -2.0, 2.0)};
    const RigidTransform b{exp_so3(ts::random_vec3(rng)),
                           ts::random_vec3(rng, -2.0, 2.0)};
    const Vec3 p = ts::random_vec3(rng, -3.0, 3.0);

    // against the homogeneous-matrix oracle
    const Eigen::Matrix4d ab_mat =
        ts::homogeneous(a.rotation.matrix(), a.translation) *
        ts::homogeneous(b.rotation.matrix(), b.translation);
    CHECK((a.compose(b).matrix() - ab_mat).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((a.compose(b).apply(p) - (ab_mat * promote(p)).head<3>()).norm() <
          1e-12);

    const RigidTransform id = a.compose(a.inverse());
    CHECK((id.rotation.matrix() - Mat3::Identity()).cwiseAbs().maxCoeff() <
          1e-12);
    CHECK(id.translation.norm() < 1e-12);
  }
}

TEST_CASE("promote and demote") {
  CHECK(promote(Vec3(1, 2, 3)) == Vec4(1, 2, 3, 1));
  CHECK(demote(Vec4(2, 4, 6, 2)) == Vec3(1, 2, 3));
  CHECK(demote(Vec3(2, 4, 2)) == Vec2(1, 2));
  CHECK_THROWS_AS(demote(Vec4(1, 0, 0, 0)), std::domain_error);
  CHECK_THROWS_AS(demote(Vec3(1, 1, 0)), std::domain_error);
}

TEST_CASE("pinhole projection") {
  CHECK(project_pinhole(Vec3(0, 0, 1)).vec() == Vec2(0, 0));
  CHECK(project_pinhole(Vec3(1, 2, 2)).vec() == Vec2(-0.5, -1.0));
  CHECK_THROWS_AS(project_pinhole(Vec3(1, 1, 0)), std::domain_error);
  CHECK_THROWS_AS(project_pinhole(Vec3(0, 0, -1)), std::domain_error);

  // scale invariance along the ray
  ts::Rng rng(505);
  for (int i = 0; i < 100; ++i) {
    Vec3 p = ts::random_vec3(rng);
    p.z() = ts::uniform(rng, 0.1, 4.0);
    const double lam = ts::uniform(rng, 0.2, 9.0);
    CHECK((project_pinhole(lam * p).vec() - project_pinhole(p).vec()).norm() <
          1e-13);
  }
}

TEST_CASE("bearing to unit direction and back") {
  CHECK(bearing_to_unit({0.0, 0.0}).isApprox(Vec3(0, 0, 1), 1e-15));
  const Vec3 quarter = bearing_to_unit({M_PI_4, 0.0});
  CHECK(quarter.isApprox(Vec3(std::sqrt(0.5), 0.0, std::sqrt(0.5)), 1e-15));

  const Bearing back = unit_to_bearing(Vec3(0, 0, 1));
  CHECK(back.phi == 0.0);
  CHECK(back.theta == 0.0);

  ts::Rng rng(606);
  for (int i = 0; i < 1000; ++i) {
    const Bearing b{ts::uniform(rng, -1.5, 1.5), ts::uniform(rng, -1.5, 1.5)};
    const Vec3 u = bearing_to_unit(b);
    CHECK(std::abs(u.norm() - 1.0) < 1e-15);
    CHECK(u.z() > 0.0);
    const Bearing rb = unit_to_bearing(u);
    CHECK(std::abs(rb.phi - b.phi) < 1e-12);
    CHECK(std::abs(rb.theta - b.theta) < 1e-12);
  }

  CHECK_THROWS_AS(bearing_to_unit({M_PI_2, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(bearing_to_unit({0.0, -M_PI_2}), std::invalid_argument);
  CHECK_THROWS_AS(unit_to_bearing(Vec3(0, 0, -1)), std::invalid_argument);
  CHECK_THROWS_AS(unit_to_bearing(Vec3(0, 0, 2)), std::invalid_argument);
}
