#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "smsearch/perception_sets.hpp"

using namespace smsearch;

namespace {

constexpr double kPi = std::numbers::pi;

Prism box_prism(double x0, double y0, double x1, double y1, double z0, double z1) {
  return {{{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}}, z0, z1};
}

// Facets of the hull of a small 3D point set by brute force over triples.
struct Plane {
  Vec3 n;
  double b;  // inside: n.x <= b
};
std::vector<Plane> hull_planes(const std::vector<Vec3>& p) {
  std::vector<Plane> out;
  double scale = 0;
  for (const auto& q : p) scale = std::max(scale, q.norm());
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j)
      for (std::size_t k = j + 1; k < p.size(); ++k) {
        Vec3 n = (p[j] - p[i]).cross(p[k] - p[i]);
        if (n.norm() < 1e-12 * scale * scale) continue;
        n.normalize();
        const double b = n.dot(p[i]);
        int above = 0, below = 0;
        for (const auto& q : p) {
          const double s = n.dot(q) - b;
          above += s > 1e-9 * scale;
          below += s < -1e-9 * scale;
        }
        if (above == 0) out.push_back({n, b});
        if (below == 0) out.push_back({-n, -b});
      }
  return out;
}

World town(std::uint64_t seed, int n_targets = 6) {
  World w;
  w.roi = GroundBox::centered(80);
  std::mt19937_64 rng(seed);
  for (int i = 0; i < 3; ++i) {
    const double x = uniform(rng, -60, 40), y = uniform(rng, -60, 40);
    Obstacle ob;
    ob.levels.push_back(box_prism(x, y, x + uniform(rng, 6, 20), y + uniform(rng, 6, 20), 0, uniform(rng, 5, 25)));
    w.obstacles.push_back(ob);
  }
  while (static_cast<int>(w.targets.size()) < n_targets) {
    TargetTruth t;
    t.p = {uniform(rng, -70, 70), uniform(rng, -70, 70)};
    t.heading = uniform(rng, -3, 3);
    if (obstacle_clearance(w, t.p) > 3.5) w.targets.push_back(t);
  }
  w.uavs.push_back({{uniform(rng, -30, 0), uniform(rng, -30, 0)}, 30, uniform(rng, -kPi, kPi), 5});
  w.uavs.push_back({{uniform(rng, -10, 10), uniform(rng, -10, 10)}, 40, uniform(rng, -kPi, kPi), 5});
  return w;
}

CameraIntrinsics cam() { return CameraIntrinsics::from_aperture(90, 120, kPi / 4, kPi / 4, 300); }

}  // namespace

TEST_CASE("depth interval of the worked example") {
  const DepthInterval d = depth_interval(201, -0.01, 0.01);
  CHECK(std::round(d.lo * 100) / 100 == doctest::Approx(199.01));
  CHECK(std::round(d.hi * 100) / 100 == doctest::Approx(203.03));
}

TEST_CASE("truncated pyramid contains the exact frustum") {
  const CameraIntrinsics intr = CameraIntrinsics::from_aperture(360, 480, kPi / 4, kPi / 6, 300);
  const UavPose pose{{10, 20, 60}, 0.8, Vec3::Zero()};
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const PixelCoord px{1 + static_cast<int>(rng() % 360), 1 + static_cast<int>(rng() % 480)};
    const double D = uniform(rng, 5, 300);
    const TruncatedPyramid tp = pixel_frustum(pose, intr, px, D, -0.01, 0.01);
    std::vector<Vec3> pts(tp.near.begin(), tp.near.end());
    pts.insert(pts.end(), tp.far.begin(), tp.far.end());
    const auto planes = hull_planes(pts);
    REQUIRE(planes.size() >= 6);
    const DepthInterval di = depth_interval(D, -0.01, 0.01);
    const Vec3 c = optical_center(pose);
    for (int s = 0; s < 2000; ++s) {
      const Vec3 v = pixel_ray_world(pose, intr, px.col - uniform01(rng), px.row - uniform01(rng));
      const Vec3 x = c + uniform(rng, di.lo, di.hi) * v;
      for (const auto& pl : planes) CHECK(pl.n.dot(x) <= pl.b + 1e-9 * D);
    }
  }
  // degenerate noise: near and far collapse onto the range shell
  const TruncatedPyramid z = pixel_frustum(pose, intr, {180, 240}, 100, 0, 0);
  for (int l = 0; l < 4; ++l) CHECK((z.near[l] - optical_center(pose)).norm() == doctest::Approx(100).epsilon(1e-6));
}

TEST_CASE("mask rectangles partition the mask") {
  std::mt19937_64 rng(3);
  Mask m(40, 50, 0);
  for (auto& x : m.data) x = (rng() % 5) != 0;
  for (int r = 10; r < 30; ++r)
    for (int c = 5; c < 45; ++c) m.at(r, c) = 1;
  Image<int> cover(40, 50, 0);
  for (const auto& rc : mask_rectangles(m))
    for (int r = rc.r0; r <= rc.r1; ++r)
      for (int c = rc.c0; c <= rc.c1; ++c) cover.at(r, c)++;
  for (std::size_t i = 0; i < m.data.size(); ++i) CHECK(cover.data[i] == m.data[i]);
}

TEST_CASE("single nadir pixel target set area") {
  const CameraIntrinsics intr = CameraIntrinsics::from_aperture(3, 3, 0.03, kPi / 2, 300);
  const UavPose pose{{0, 0, 50}, 0, Vec3::Zero()};
  LabelMap labels(3, 3, Label::Ground);
  labels.at(2, 2) = Label::Target;
  DepthMap depth(3, 3, 50);
  Mask rel(3, 3, 1);
  PerceptionParams p;
  const GroundRegion s =
      target_measurement_set(pose, intr, {0, 2, 2, 2, 2}, labels, depth, rel, p, GroundBox::centered(100));
  const auto g = pixel_frustum(pose, intr, {2, 2}, 50, p.w_lo, p.w_hi).ground();
  const ConvexPolygon hull = convex_hull({g.begin(), g.end()});
  double perim = 0;
  for (std::size_t i = 0, j = hull.v.size() - 1; i < hull.v.size(); j = i++) perim += (hull.v[i] - hull.v[j]).norm();
  const double r = p.r_t;
  const double kgon = 16 * std::tan(kPi / 16) * r * r;  // circumscribed 16-gon area
  CHECK(area(s) >= kPi * r * r);
  CHECK(area(s) <= area(hull) + perim * (r / std::cos(kPi / 16)) + kgon + 1e-3);
  // at least r_t from the projected hull in every direction
  for (int k = 0; k < 360; ++k) {
    const Point2 d(std::cos(k * kPi / 180), std::sin(k * kPi / 180));
    for (const auto& q : hull.v) CHECK(s.contains(q + (r - 1e-6) * d));
  }
  CHECK_THROWS_AS(target_measurement_set(pose, intr, {0, 1, 1, 1, 1}, labels, depth, rel, p, GroundBox::centered(100)),
                  HypothesisViolation);
}

TEST_CASE("open ground: free ground matches the FoV") {
  World w;
  w.roi = GroundBox::centered(500);
  w.uavs.push_back({{0, 0}, 60, 0.4, 5});
  const CameraIntrinsics intr = CameraIntrinsics::from_aperture(90, 120, kPi / 4, kPi / 6, 300);
  CvsParams cp;
  const CvsFrame f = render(w, 0, intr, cp, 0);
  const Mask rel = reliable_mask(f.depth, intr, cp.noise_lo);
  const UavPose pose = uav_pose(w.uavs[0]);
  const GroundRegion fg = free_ground(pose, intr, f.labels, rel, w.roi);
  const GroundRegion fov = fov_ground_region(pose, intr, &w.roi);
  CHECK(symmetric_difference_area(fg, fov) < 0.01 * area(fov));
  CHECK(hidden_ground(pose, intr, f.labels, rel, w.roi).empty());
  // one piece, no seams between pixel strips
  CHECK(fg.polygons().size() == 1);
  CHECK(fg.polygons()[0].holes.empty());
  CHECK(fg.tag() == Tag::inner);
}

TEST_CASE("enclosure and exclusion on random towns") {
  const CameraIntrinsics intr = cam();
  PerceptionParams p;
  CvsParams cp;
  cp.min_pixels = 4;
  cp.d_ident = 300;
  int detections = 0, margin_vertices = 0, shadow_points = 0;
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const World w = town(seed);
    for (int u = 0; u < 2; ++u) {
      const CvsFrame f = render(w, u, intr, cp, seed);
      const Mask rel = reliable_mask(f.depth, intr, cp.noise_lo);
      const auto dets = detect(f, rel, cp, static_cast<int>(w.targets.size()));
      const UavPose pose = uav_pose(w.uavs[u]);
      const FramePerception fp = perceive(pose, intr, f, rel, dets, p, w.roi);
      for (const auto& d : dets) {
        ++detections;
        CHECK(fp.target_sets.at(d.target_id).contains(w.targets[d.target_id].p));
      }
      for (const auto& t : w.targets) {
        CHECK(!fp.free_ground.contains(t.p));
        CHECK(!fp.obstacle_margin.contains(t.p));
      }
      for (const auto& poly : fp.obstacle_margin.polygons())
        for (const auto& g : poly.outer) {
          ++margin_vertices;
          CHECK(obstacle_clearance(w, to_point(g)) <= p.r_s + 1e-6);
        }
      // ground behind a building, inside the reliable FoV, is hidden
      const Vec3 c = optical_center(pose);
      const GroundRegion fov = fov_ground_region(pose, intr, &w.roi);
      std::mt19937_64 rng(seed * 7 + u);
      for (int s = 0; s < 400; ++s) {
        const Point2 g(uniform(rng, -80, 80), uniform(rng, -80, 80));
        if (!fov.contains(g)) continue;
        const Vec3 x(g.x(), g.y(), 0);
        const double len = (x - c).norm();
        const RayHit h = ray_cast(w, c, (x - c) / len, u);
        const bool blocked = h.cls != HitClass::Ground || h.distance < len * (1 - 1e-9);
        CHECK((fp.hidden.contains(g) || fp.free_ground.contains(g)));
        if (blocked) {
          ++shadow_points;
          CHECK(fp.hidden.contains(g));
        }
      }
    }
  }
  CHECK(detections > 5);
  CHECK(margin_vertices > 10);
  CHECK(shadow_points > 10);
}

TEST_CASE("free ground holds exactly the reliable ground pixels") {
  const CameraIntrinsics intr = CameraIntrinsics::from_aperture(30, 40, kPi / 4, kPi / 6, 300);
  const UavPose pose{{0, 0, 40}, 0.3, Vec3::Zero()};
  std::mt19937_64 rng(8);
  LabelMap labels(30, 40, Label::Ground);
  for (auto& l : labels.data)
    if (rng() % 4 == 0) l = Label::Obstacle;
  Mask rel(30, 40, 1);
  const GroundRegion fg = free_ground(pose, intr, labels, rel, GroundBox::centered(1000));
  const Vec3 o = optical_center(pose);
  int inside = 0, checked = 0;
  for (int r = 1; r <= 30; ++r)
    for (int c = 1; c <= 40; ++c) {
      // pixel centre and a point near a corner, both mapped to the ground
      for (const auto& q : {Point2(c - 0.5, r - 0.5), Point2(c - 0.02, r - 0.98)}) {
        const Vec3 d = pixel_ray_world(pose, intr, q.x(), q.y());
        const double t = -o.z() / d.z();
        const Point2 g(o.x() + t * d.x(), o.y() + t * d.y());
        const bool ground = labels.at(r, c) == Label::Ground;
        CHECK(fg.contains(g) == ground);
        inside += ground;
        ++checked;
      }
    }
  CHECK(inside > checked / 2);
}
