#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "smsearch/world.hpp"

using namespace smsearch;

namespace {

constexpr double kPi = std::numbers::pi;
const std::vector<double> kU{-kPi / 18, -kPi / 36, 0, kPi / 36, kPi / 18};

Prism box_prism(double x0, double y0, double x1, double y1, double z0, double z1) {
  return {{{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}}, z0, z1};
}

// Textbook slab test for an axis-aligned box.
double slab(const Vec3& lo, const Vec3& hi, const Vec3& o, const Vec3& d) {
  double t0 = 0, t1 = 1e300;
  for (int a = 0; a < 3; ++a) {
    if (d[a] == 0) {
      if (o[a] < lo[a] || o[a] > hi[a]) return INFINITY;
      continue;
    }
    double u = (lo[a] - o[a]) / d[a], v = (hi[a] - o[a]) / d[a];
    if (u > v) std::swap(u, v);
    t0 = std::max(t0, u);
    t1 = std::min(t1, v);
  }
  return t0 <= t1 ? t0 : INFINITY;
}

World full_world(std::uint64_t seed) {
  World w;
  w.roi = GroundBox::centered(250);
  CityParams cp;
  cp.seed = seed;
  w.obstacles = make_city(w.roi, cp);
  w.roads = make_road_grid(w.roi, 100, 10);
  std::mt19937_64 rng(seed);
  w.targets = place_targets(w.roads, 8, 1.0, rng);
  w.road_rng.seed(seed + 1);
  for (int i = 0; i < 4; ++i) w.uavs.push_back({{-260, -260}, 55.0 + 5 * i, kPi / 4, 5});
  return w;
}

}  // namespace

TEST_CASE("step_target") {
  TargetTruth t;
  t.speed = 1;
  const TargetTruth n = step_target(t, 0, 0.5);
  CHECK(n.p.x() == doctest::Approx(0.5));
  CHECK(n.p.y() == doctest::Approx(0.0));
  t.speed = 0;
  CHECK(step_target(t, 0.3, 0.5).p == t.p);

  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    TargetTruth r;
    r.p = {uniform(rng, -9, 9), uniform(rng, -9, 9)};
    r.heading = uniform(rng, -4, 4);
    r.speed = uniform(rng, 0, 1);
    const TargetTruth s = step_target(r, uniform(rng, -1, 1), 0.5);
    CHECK((s.p - r.p).norm() == doctest::Approx(0.5 * r.speed).epsilon(1e-12));
  }
}

TEST_CASE("step_uav") {
  UavTruth u;
  u.speed = 5;
  const UavTruth n = step_uav(u, 0, 0.5, kU);
  CHECK(n.p.x() == doctest::Approx(2.5));
  CHECK(n.altitude == u.altitude);
  CHECK_THROWS_AS(step_uav(u, kPi / 10, 0.5, kU), std::invalid_argument);

  UavTruth r = u;
  for (int i = 0; i < 36; ++i) r = step_uav(r, kPi / 18, 0.5, kU);
  CHECK(std::abs(wrap_angle(r.yaw - u.yaw)) < 1e-12);
  // 36 steps of a regular polygon close the loop
  CHECK((r.p - u.p).norm() < 1e-9);
}

TEST_CASE("ray_cast basics") {
  World w;
  w.roi = GroundBox::centered(100);
  CHECK(ray_cast(w, {3, 4, 60}, {0, 0, -1}).cls == HitClass::Ground);
  CHECK(ray_cast(w, {3, 4, 60}, {0, 0, -1}).distance == doctest::Approx(60));
  CHECK(ray_cast(w, {3, 4, 60}, {1, 0, 0}).cls == HitClass::None);

  Obstacle ob;
  ob.levels.push_back(box_prism(20, -10, 40, 10, 0, 30));
  w.obstacles.push_back(ob);
  const Vec3 o(0, 0, 50);
  const Vec3 d = Vec3(1, 0.1, -1).normalized();
  const RayHit h = ray_cast(w, o, d);
  CHECK(h.cls == HitClass::Obstacle);
  CHECK(h.distance < 50 / -d.z());
  CHECK(h.distance == doctest::Approx(slab({20, -10, 0}, {40, 10, 30}, o, d)).epsilon(1e-12));
}

TEST_CASE("ray_prism agrees with the slab test on random boxes") {
  std::mt19937_64 rng(11);
  int hits = 0;
  for (int i = 0; i < 2000; ++i) {
    const double x0 = uniform(rng, -20, 20), y0 = uniform(rng, -20, 20), z0 = uniform(rng, 0, 10);
    const Vec3 lo(x0, y0, z0), hi(x0 + uniform(rng, 1, 20), y0 + uniform(rng, 1, 20), z0 + uniform(rng, 1, 20));
    const Prism p = box_prism(lo.x(), lo.y(), hi.x(), hi.y(), lo.z(), hi.z());
    const Vec3 o(uniform(rng, -50, 50), uniform(rng, -50, 50), uniform(rng, 40, 60));
    const Vec3 aim(uniform(rng, lo.x() - 5, hi.x() + 5), uniform(rng, lo.y() - 5, hi.y() + 5), uniform(rng, lo.z() - 5, hi.z() + 5));
    const Vec3 d = (aim - o).normalized();
    const double a = ray_prism(p, o, d), b = slab(lo, hi, o, d);
    if (std::isinf(b)) {
      CHECK(std::isinf(a));
    } else {
      ++hits;
      CHECK(a == doctest::Approx(b).epsilon(1e-10));
    }
  }
  CHECK(hits > 500);
}

TEST_CASE("hit point lies on the reported solid's boundary") {
  const World w = full_world(3);
  std::mt19937_64 rng(12);
  int checked = 0;
  for (int i = 0; i < 20000 && checked < 300; ++i) {
    const Vec3 o(uniform(rng, -250, 250), uniform(rng, -250, 250), 60);
    const Vec3 d = Vec3(uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, -0.05)).normalized();
    const RayHit h = ray_cast(w, o, d);
    if (h.cls != HitClass::Obstacle) continue;
    ++checked;
    const Vec3 x = o + h.distance * d;
    bool on_boundary = false;
    for (const auto& lv : w.obstacles[h.id].levels) {
      if (x.z() < lv.z0 - 1e-6 || x.z() > lv.z1 + 1e-6 || !contains(lv.footprint, {x.x(), x.y()}, 1e-6)) continue;
      double gap = std::min(std::abs(x.z() - lv.z0), std::abs(x.z() - lv.z1));
      const auto& v = lv.footprint.v;
      for (std::size_t a = 0, b = v.size() - 1; a < v.size(); b = a++) {
        const Point2 e = (v[a] - v[b]).normalized();
        gap = std::min(gap, std::abs(e.x() * (x.y() - v[b].y()) - e.y() * (x.x() - v[b].x())));
      }
      on_boundary |= gap <= 1e-6;
    }
    CHECK(on_boundary);
  }
  CHECK(checked > 50);
}

TEST_CASE("validate_world") {
  const World w = full_world(1);
  double cover = 0;
  for (const auto& ob : w.obstacles) cover += area(ob.base());
  CHECK(cover / w.roi.area() == doctest::Approx(0.05).epsilon(0.02));
  for (const auto& ob : w.obstacles) CHECK(ob.height() < 50);
  CHECK(validate_world(w).empty());

  World bad = w;
  bad.obstacles.clear();
  Obstacle ob;
  ob.levels.push_back(box_prism(0, 0, 10, 10, 0, 50));
  bad.obstacles.push_back(ob);
  bad.targets.resize(1);
  bad.targets[0].p = {12, 5};
  bad.tp.r_s = 3;
  bad.uavs = {UavTruth{{0, 0}, 40, 0, 5}};
  const auto v = validate_world(bad);
  auto has = [&](const std::string& s) {
    for (const auto& m : v)
      if (m.find(s) != std::string::npos) return true;
    return false;
  };
  CHECK(has("within r_s"));
  CHECK(has("above all obstacles"));
}

TEST_CASE("road-following targets keep clearance and bounded steps") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    World w = full_world(seed);
    for (int k = 0; k < 600; ++k) {
      for (int j = 0; j < static_cast<int>(w.targets.size()); ++j) {
        const Point2 before = w.targets[j].p;
        drive_target(w, j, 0.5);
        CHECK((w.targets[j].p - before).norm() <= 0.5 * w.tp.v_max + 1e-12);
        CHECK(std::abs(w.targets[j].turn_rate) <= w.tp.max_turn_rate);
      }
      CHECK(validate_world(w).empty());
    }
  }
}

TEST_CASE("desk road graph is a plus with dead ends") {
  const RoadGraph g = make_road_grid(GroundBox::centered(50), 100, 10);
  REQUIRE(g.nodes.size() == 5);
  int dead = 0;
  for (const auto& a : g.adj) dead += a.size() == 1;
  CHECK(dead == 4);
  World w;
  w.roi = GroundBox::centered(50);
  w.roads = g;
  std::mt19937_64 rng(4);
  w.targets = place_targets(g, 3, 1.0, rng);
  for (auto& t : w.targets) t.speed = 1.0;
  for (int k = 0; k < 1000; ++k)
    for (int j = 0; j < 3; ++j) {
      drive_target(w, j, 0.5);
      CHECK(w.roi.contains(w.targets[j].p));
    }
}
