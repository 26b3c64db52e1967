#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "doctest.h"
#include "smsearch/camera.hpp"

using namespace smsearch;

namespace {

constexpr double kPi = std::numbers::pi;

CameraIntrinsics full_camera() { return CameraIntrinsics::from_aperture(360, 480, kPi / 4, kPi / 6, 300); }

// v in cone(d1..d4)? Carathéodory: try every triple, solve exactly, check signs.
bool in_cone(const std::array<Vec3, 4>& d, const Vec3& v) {
  for (int skip = 0; skip < 4; ++skip) {
    Mat3 m;
    int c = 0;
    for (int i = 0; i < 4; ++i)
      if (i != skip) m.col(c++) = d[i];
    if (std::abs(m.determinant()) < 1e-14) continue;
    const Vec3 lam = m.colPivHouseholderQr().solve(v);
    if ((m * lam - v).norm() < 1e-9 && lam.minCoeff() >= -1e-9) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("world_to_camera frames") {
  const CameraIntrinsics intr = full_camera();
  UavPose pose{{10, -4, 60}, 0.7, {0.2, 0.05, -0.1}};
  CHECK(world_to_camera(pose, intr, optical_center(pose)).norm() < 1e-12);

  CameraIntrinsics flat = intr;
  flat.theta = 0;
  const Vec3 q = world_to_camera(UavPose{}, flat, Vec3(7.5, 0, 0));
  CHECK(q.x() == doctest::Approx(0.0));
  CHECK(q.y() == doctest::Approx(0.0));
  CHECK(q.z() == doctest::Approx(7.5));

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(-100, 100);
  for (int i = 0; i < 100; ++i) {
    UavPose p{{U(rng), U(rng), 50 + U(rng) / 4}, U(rng), {U(rng) / 100, U(rng) / 100, U(rng) / 100}};
    const Vec3 w(U(rng), U(rng), U(rng));
    CHECK((camera_to_world(p, intr, world_to_camera(p, intr, w)) - w).norm() < 1e-9);
  }
}

TEST_CASE("camera z axis points forward and down in the body frame") {
  const Mat3 m = body_to_camera(kPi / 6);
  const Vec3 z_in_body = m.transpose() * Vec3(0, 0, 1);
  CHECK(z_in_body.x() == doctest::Approx(std::cos(kPi / 6)));
  CHECK(z_in_body.z() == doctest::Approx(-std::sin(kPi / 6)));
}

TEST_CASE("project") {
  const CameraIntrinsics intr = full_camera();
  const UavPose pose{{0, 0, 60}, 0.3, Vec3::Zero()};
  const Vec3 axis = world_to_camera_rotation(pose, intr).transpose() * Vec3(0, 0, 1);
  const Point2 c = project(pose, intr, optical_center(pose) + 42.0 * axis);
  CHECK(c.x() == doctest::Approx(240.0));
  CHECK(c.y() == doctest::Approx(180.0));
  CHECK_THROWS_AS(project(pose, intr, optical_center(pose) - axis), std::domain_error);

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> X(0, 480), Y(0, 360), S(0.1, 500);
  for (int i = 0; i < 200; ++i) {
    const double x = X(rng), y = Y(rng);
    const Point2 p = project(pose, intr, optical_center(pose) + S(rng) * pixel_ray_world(pose, intr, x, y));
    CHECK(std::abs(p.x() - x) < 1e-9);
    CHECK(std::abs(p.y() - y) < 1e-9);
  }
  const PixelCoord px = pixel_of({3.0, 7.2});
  CHECK(px.row == 8);
  CHECK(px.col == 3);
}

TEST_CASE("pixel_ray") {
  const CameraIntrinsics intr = full_camera();
  const Vec3 c = pixel_ray(intr, 240, 180);
  CHECK(c.x() == doctest::Approx(0.0));
  CHECK(c.y() == doctest::Approx(0.0));
  CHECK(c.z() == doctest::Approx(1.0));
  const Vec3 v = pixel_ray(intr, 0, 0);
  const double a = 240.0 / intr.f_c, b = 180.0 / intr.f_r, nu = std::sqrt(a * a + b * b + 1);
  CHECK(v.x() > 0);
  CHECK(v.y() > 0);
  CHECK(v.x() == doctest::Approx(a / nu));
  CHECK(v.y() == doctest::Approx(b / nu));
  CHECK(v.z() == doctest::Approx(1 / nu));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> X(0, 480), Y(0, 360);
  for (int i = 0; i < 100; ++i) CHECK(std::abs(pixel_ray(intr, X(rng), Y(rng)).norm() - 1) < 1e-12);
}

TEST_CASE("pixel_cone") {
  const CameraIntrinsics intr = full_camera();
  const UavPose pose{{5, 5, 60}, 1.1, Vec3::Zero()};
  const auto a = pixel_cone(pose, intr, {10, 20});
  const auto b = pixel_cone(pose, intr, {10, 21});
  // right edge of (10,20) is the left edge of (10,21)
  CHECK((a[0] - b[3]).norm() < 1e-15);
  CHECK((a[1] - b[2]).norm() < 1e-15);
  for (const auto& d : a) CHECK(std::abs(d.norm() - 1) < 1e-12);

  const CameraIntrinsics odd = CameraIntrinsics::from_aperture(5, 7, kPi / 4, kPi / 6, 300);
  const Vec3 axis = world_to_camera_rotation(pose, odd).transpose() * Vec3(0, 0, 1);
  CHECK(in_cone(pixel_cone(pose, odd, {3, 4}), axis));

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U(0, 1);
  for (int i = 0; i < 200; ++i) {
    const PixelCoord px{1 + static_cast<int>(rng() % 360), 1 + static_cast<int>(rng() % 480)};
    const double x = px.col - 1 + U(rng), y = px.row - 1 + U(rng);
    CHECK(in_cone(pixel_cone(pose, intr, px), pixel_ray_world(pose, intr, x, y)));
  }
  // corner round trip
  for (const auto& d : pixel_cone(pose, intr, {100, 200})) {
    const Point2 p = project(pose, intr, optical_center(pose) + 77.0 * d);
    CHECK(std::abs(p.x() - std::round(p.x())) < 1e-9);
    CHECK(std::abs(p.y() - std::round(p.y())) < 1e-9);
  }
}

TEST_CASE("fov_ground_region") {
  SUBCASE("nadir view is symmetric") {
    const CameraIntrinsics intr = CameraIntrinsics::from_aperture(360, 480, kPi / 4, kPi / 2, 300);
    const UavPose pose{{12, -3, 60}, 0.0, Vec3::Zero()};
    const GroundRegion r = fov_ground_region(pose, intr);
    const Point2 c = barycenter(r);
    CHECK(std::abs(c.x() - 12) < 1e-6);
    CHECK(std::abs(c.y() + 3) < 1e-6);
  }
  SUBCASE("full-scale camera: area equals the four-corner quadrangle") {
    const CameraIntrinsics intr = full_camera();
    const UavPose pose{{0, 0, 60}, 0.4, Vec3::Zero()};
    std::vector<Point2> q;
    const double cs[4][2] = {{480, 360}, {480, 0}, {0, 0}, {0, 360}};
    for (const auto& xy : cs) {
      const Vec3 d = pixel_ray_world(pose, intr, xy[0], xy[1]);
      const double t = -60.0 / d.z();
      q.emplace_back(t * d.x(), t * d.y());
    }
    double shoelace = 0;
    for (int i = 0; i < 4; ++i) shoelace += q[i].x() * q[(i + 1) % 4].y() - q[(i + 1) % 4].x() * q[i].y();
    shoelace = std::abs(shoelace) / 2;
    for (const auto& g : q) REQUIRE(std::hypot(std::hypot(g.x(), g.y()), 60.0) < 300.0 * 0.9999);
    CHECK(area(fov_ground_region(pose, intr)) == doctest::Approx(shoelace).epsilon(1e-7));
  }
  SUBCASE("top edge parallel to ground is clipped by d_max") {
    CameraIntrinsics intr = full_camera();
    intr.theta = std::atan(180.0 / intr.f_r);
    const UavPose pose{{0, 0, 60}, 0.0, Vec3::Zero()};
    const GroundRegion r = fov_ground_region(pose, intr);
    REQUIRE(!r.empty());
    const auto b = r.bounds();
    const double rho = std::sqrt(300.0 * 300.0 - 60.0 * 60.0);
    CHECK(b[2] <= rho + 1e-6);
    CHECK(b[2] > 0.99 * rho);
  }
  SUBCASE("looking up sees no ground") {
    CameraIntrinsics intr = full_camera();
    intr.theta = -kPi / 3;
    CHECK(fov_ground_region(UavPose{{0, 0, 60}, 0.0, Vec3::Zero()}, intr).empty());
    CHECK(pixel_ground_quad(UavPose{{0, 0, 60}, 0.0, Vec3::Zero()}, intr, {1, 1}).empty());
  }
}

TEST_CASE("pixel_ground_quad") {
  const CameraIntrinsics nadir = CameraIntrinsics::from_aperture(5, 7, kPi / 4, kPi / 2, 300);
  const UavPose pose{{3, 4, 50}, 0.2, Vec3::Zero()};
  const ConvexPolygon q = pixel_ground_quad(pose, nadir, {3, 4});
  CHECK(contains(q, Point2(3, 4)));

  // the union of every pixel quad matches the whole FoV region
  const CameraIntrinsics small = CameraIntrinsics::from_aperture(36, 48, kPi / 4, kPi / 6, 300);
  const UavPose p2{{0, 0, 60}, 0.9, Vec3::Zero()};
  std::vector<ConvexPolygon> quads;
  for (int r = 1; r <= 36; ++r)
    for (int c = 1; c <= 48; ++c) quads.push_back(pixel_ground_quad(p2, small, {r, c}));
  const GroundRegion u = GroundRegion::from_convex(quads, Tag::exact);
  const GroundRegion f = fov_ground_region(p2, small);
  CHECK(symmetric_difference_area(u, f) < 0.005 * area(f));

  // every FoV ground point lies in the quad of the pixel it projects to
  const CameraIntrinsics intr = full_camera();
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(-300, 300);
  const GroundRegion fr = fov_ground_region(p2, intr);
  int hits = 0;
  for (int i = 0; i < 4000 && hits < 300; ++i) {
    const Point2 g(U(rng), U(rng));
    if (!fr.contains(g)) continue;
    ++hits;
    const Point2 xy = project(p2, intr, Vec3(g.x(), g.y(), 0));
    CHECK(in_image(intr, xy));
    CHECK(contains(pixel_ground_quad(p2, intr, pixel_of(xy)), g, 1e-6));
  }
  CHECK(hits > 50);
}
