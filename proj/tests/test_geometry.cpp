#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "raster_oracle.hpp"
#include "smsearch/geometry.hpp"
#include "smsearch/region_json.hpp"

using namespace smsearch;

namespace {

GroundRegion sq(double x0, double y0, double x1, double y1, Tag t = Tag::exact) {
  return GroundRegion::box({x0, y0, x1, y1}, t);
}

oracle::Shape shape_of(const GroundRegion& r) {
  oracle::Shape s;
  for (const auto& p : r.polygons()) {
    oracle::RingD o;
    for (const auto& g : p.outer) o.push_back({from_grid(g.x), from_grid(g.y)});
    s.push_back(o);
    for (const auto& h : p.holes) {
      oracle::RingD hr;
      for (const auto& g : h) hr.push_back({from_grid(g.x), from_grid(g.y)});
      s.push_back(hr);
    }
  }
  return s;
}

oracle::Shape box_shape(double x0, double y0, double x1, double y1) {
  return {{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}};
}

}  // namespace

TEST_CASE("area of basic regions") {
  CHECK(area(GroundRegion()) == 0.0);
  CHECK(area(sq(0, 0, 1, 1)) == doctest::Approx(1.0));
  const GroundRegion u = unite(sq(0, 0, 1, 1), sq(0.5, 0, 1.5, 1));
  const auto ras = oracle::rasterize(
      {box_shape(0, 0, 1, 1), box_shape(0.5, 0, 1.5, 1)},
      [](const std::vector<bool>& m) { return m[0] || m[1]; }, 1e-3);
  CHECK(ras.area() == doctest::Approx(1.5).epsilon(1e-6));
  CHECK(area(u) == doctest::Approx(ras.area()).epsilon(1e-6));
}

TEST_CASE("union") {
  const GroundRegion a = sq(0, 0, 1, 1);
  CHECK(area(unite(a, GroundRegion())) == doctest::Approx(1.0));
  CHECK(area(unite(a, a)) == doctest::Approx(1.0));
  const auto ras = oracle::rasterize(
      {box_shape(0, 0, 1, 1), box_shape(3, 0, 4, 1)},
      [](const std::vector<bool>& m) { return m[0] || m[1]; }, 1e-3);
  CHECK(area(unite(a, sq(3, 0, 4, 1))) == doctest::Approx(ras.area()).epsilon(1e-6));
  CHECK(ras.area() == doctest::Approx(2.0));
}

TEST_CASE("intersect") {
  const GroundRegion a = sq(0, 0, 2, 2), b = sq(1, 1, 3, 3);
  CHECK(intersect(a, GroundRegion()).empty());
  const auto ras = oracle::rasterize({box_shape(0, 0, 2, 2), box_shape(1, 1, 3, 3)},
                                     [](const std::vector<bool>& m) { return m[0] && m[1]; }, 1e-3);
  CHECK(area(intersect(a, b)) == doctest::Approx(ras.area()).epsilon(1e-6));
  CHECK(ras.area() == doctest::Approx(1.0));
  const GroundRegion xg = sq(-250, -250, 250, 250);
  CHECK(intersect(a, xg).polygons().size() == 1);
  CHECK(area(intersect(a, xg)) == doctest::Approx(area(a)));
}

TEST_CASE("subtract and barycenter of L-shape") {
  const GroundRegion a = sq(0, 0, 2, 2), b = sq(1, 1, 3, 3);
  CHECK(area(subtract(a, GroundRegion())) == doctest::Approx(4.0));
  CHECK(subtract(a, a).empty());
  const GroundRegion l = subtract(a, b);
  const auto ras = oracle::rasterize({box_shape(0, 0, 2, 2), box_shape(1, 1, 3, 3)},
                                     [](const std::vector<bool>& m) { return m[0] && !m[1]; }, 1e-3);
  CHECK(ras.area() == doctest::Approx(3.0).epsilon(1e-4));
  CHECK(area(l) == doctest::Approx(ras.area()).epsilon(1e-6));
  const Point2 c = barycenter(l);
  CHECK(std::abs(c.x() - ras.cx()) < 1e-3);
  CHECK(std::abs(c.y() - ras.cy()) < 1e-3);
  CHECK(area(intersect(l, b)) <= 1e-6);
}

TEST_CASE("barycenter") {
  const Point2 c = barycenter(sq(0, 0, 1, 1));
  CHECK(c.x() == doctest::Approx(0.5));
  CHECK(c.y() == doctest::Approx(0.5));
  const Point2 d = barycenter(unite(sq(0, 0, 1, 1), sq(4, 2, 5, 3)));
  CHECK(d.x() == doctest::Approx(2.5));
  CHECK(d.y() == doctest::Approx(1.5));
  CHECK_THROWS_AS(barycenter(GroundRegion()), std::domain_error);
}

TEST_CASE("distance_point_region") {
  const GroundRegion u = sq(0, 0, 1, 1);
  CHECK(distance_point_region({0.5, 0.5}, u) == 0.0);
  CHECK(distance_point_region({2, 0}, u) == doctest::Approx(1.0));
  CHECK_THROWS(distance_point_region({0, 0}, GroundRegion()));

  // dense boundary sampling oracle
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-3, 3);
  const GroundRegion l = subtract(sq(0, 0, 2, 2), sq(1, 1, 3, 3));
  const auto shape = shape_of(l);
  for (int t = 0; t < 20; ++t) {
    const Point2 p(U(rng), U(rng));
    double best = 1e300;
    for (const auto& r : shape)
      for (std::size_t i = 0, j = r.size() - 1; i < r.size(); j = i++) {
        const int n = 20000;
        for (int s = 0; s <= n; ++s) {
          const double f = static_cast<double>(s) / n;
          const double x = r[j].x + f * (r[i].x - r[j].x), y = r[j].y + f * (r[i].y - r[j].y);
          best = std::min(best, std::hypot(x - p.x(), y - p.y()));
        }
      }
    if (l.contains(p)) best = 0.0;
    CHECK(std::abs(distance_point_region(p, l) - best) < 1e-4);
  }
}

TEST_CASE("dilate_outer") {
  CHECK(dilate_outer(GroundRegion(), 2.0, 16).empty());
  CHECK_THROWS(dilate_outer(sq(0, 0, 1, 1), 1.0, 2));
  const double lo = 1 + 4 + std::numbers::pi;
  const double hi = 1 + 4 + std::numbers::pi / std::pow(std::cos(std::numbers::pi / 16), 2);
  const double a = area(dilate_outer(sq(0, 0, 1, 1), 1.0, 16));
  CHECK(a >= lo);
  CHECK(a <= hi);

  // single point: k-gon containing the disc of radius 2.5
  const ConvexPolygon kp = dilate_points_outer({{3, 4}}, 2.5, 16);
  REQUIRE(kp.v.size() == 16);
  for (int i = 0; i < 720; ++i) {
    const double t = 2 * std::numbers::pi * i / 720;
    CHECK(contains(kp, Point2(3 + 2.5 * std::cos(t), 4 + 2.5 * std::sin(t))));
  }
}

TEST_CASE("dilate_outer contains the exact Minkowski boundary samples") {
  // L-shape with a hole: sample the boundary, add exact disc offsets
  GroundRegion r = subtract(sq(0, 0, 6, 6), sq(3, 3, 7, 7));
  r = subtract(r, sq(1, 1, 2, 2));
  const double rho = 0.5;
  const GroundRegion d = dilate_outer(r, rho, 16);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0, 1);
  const auto shape = shape_of(r);
  int escapes = 0;
  for (int s = 0; s < 10000; ++s) {
    const auto& ring = shape[rng() % shape.size()];
    const std::size_t i = rng() % ring.size(), j = (i + 1) % ring.size();
    const double f = U(rng), ang = 2 * std::numbers::pi * U(rng), rad = rho * std::sqrt(U(rng));
    const Point2 p(ring[i].x + f * (ring[j].x - ring[i].x) + rad * std::cos(ang),
                   ring[i].y + f * (ring[j].y - ring[i].y) + rad * std::sin(ang));
    if (!d.contains(p)) ++escapes;
  }
  CHECK(escapes == 0);
  // the 1x1 hole shrinks to nothing after a 0.5 dilation
  CHECK(d.contains({1.5, 1.5}));
}

TEST_CASE("disc_intersection_inner") {
  const ConvexPolygon one = disc_intersection_inner({{0, 0}}, 3.0, 16);
  CHECK(area(one) >= 0.95 * std::numbers::pi * 9);
  const ConvexPolygon tangent = disc_intersection_inner({{0, 0}, {6, 0}}, 3.0, 16);
  CHECK(tangent.empty());

  std::vector<Point2> centers;
  for (int i = 0; i < 4; ++i) {
    centers.emplace_back(0.1 * (i & 1), 0.1 * (i >> 1));
    centers.emplace_back(0.1 * (i & 1) + 1e-3, 0.1 * (i >> 1));
  }
  const ConvexPolygon lens = disc_intersection_inner(centers, 3.0, 16);
  REQUIRE(!lens.empty());
  for (const auto& v : lens.v)
    for (const auto& c : centers) CHECK((v - c).norm() < 3.0);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-2, 2);
  for (int t = 0; t < 200; ++t) {
    std::vector<Point2> cs;
    const int n = 1 + static_cast<int>(rng() % 8);
    for (int i = 0; i < n; ++i) cs.emplace_back(U(rng), U(rng));
    const ConvexPolygon p = disc_intersection_inner(cs, 3.0, 16);
    for (const auto& v : p.v)
      for (const auto& c : cs) CHECK((v - c).norm() < 3.0);
  }
}

TEST_CASE("convex_hull") {
  const ConvexPolygon tri = convex_hull({{0, 0}, {1, 0}, {0, 1}});
  CHECK(tri.v.size() == 3);
  CHECK(area(tri) == doctest::Approx(0.5));
  const ConvexPolygon s = convex_hull({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}});
  CHECK(s.v.size() == 4);
  CHECK(area(s) == doctest::Approx(1.0));
  CHECK(convex_hull({{0, 0}, {1, 1}, {2, 2}}).empty());

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-10, 10);
  std::vector<Point2> pts;
  for (int i = 0; i < 8; ++i) pts.emplace_back(U(rng), U(rng));
  const ConvexPolygon h = convex_hull(pts);
  for (const auto& p : pts) CHECK(contains(h, p, 1e-9));
}

TEST_CASE("lattice law and subtraction residue on random pairs") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> U(0, 1);
  for (int t = 0; t < 20; ++t) {
    std::vector<std::vector<Point2>> ra, rb;
    for (auto* dst : {&ra, &rb}) {
      std::vector<Point2> ring;
      const int n = 5 + static_cast<int>(rng() % 10);
      const double cx = U(rng) * 3, cy = U(rng) * 3;
      std::vector<double> ang;
      for (int i = 0; i < n; ++i) ang.push_back(U(rng) * 2 * std::numbers::pi);
      std::sort(ang.begin(), ang.end());
      for (double a : ang) {
        const double rr = 0.3 + 1.5 * U(rng);
        ring.emplace_back(cx + rr * std::cos(a), cy + rr * std::sin(a));
      }
      dst->push_back(ring);
    }
    const GroundRegion a = GroundRegion::from_rings(ra, Tag::exact);
    const GroundRegion b = GroundRegion::from_rings(rb, Tag::exact);
    const double m = std::max(area(a), area(b));
    CHECK(std::abs(area(unite(a, b)) + area(intersect(a, b)) - area(a) - area(b)) <= 1e-6 * m + 1e-9);
    CHECK(area(intersect(subtract(a, b), b)) <= 1e-6);
  }
}

TEST_CASE("simplify keeps the conservatism direction") {
  // a jagged ring with many sub-threshold notches
  std::vector<Point2> ring;
  for (int i = 0; i <= 200; ++i) ring.emplace_back(0.05 * i, (i % 2) ? 0.001 : 0.0);
  ring.emplace_back(10, 5);
  ring.emplace_back(0, 5);
  const GroundRegion raw = GroundRegion::from_rings({ring}, Tag::exact);
  GroundRegion o = raw;
  o.set_tag(Tag::outer);
  GroundRegion in = raw;
  in.set_tag(Tag::inner);
  const GroundRegion so = simplify(o), si = simplify(in);
  CHECK(so.vertex_count() < raw.vertex_count());
  CHECK(si.vertex_count() < raw.vertex_count());
  CHECK(area(so) >= area(raw));
  CHECK(area(si) <= area(raw));
  CHECK(area(subtract(raw, so)) == 0.0);
  CHECK(area(subtract(si, raw)) == 0.0);
}

TEST_CASE("region JSON round trip") {
  GroundRegion r = subtract(sq(0, 0, 6, 6, Tag::outer), sq(1, 1, 2, 2, Tag::inner));
  const auto j = to_json(r);
  const GroundRegion back = region_from_json(nlohmann::json::parse(j.dump()));
  CHECK(back == r);
  CHECK(back.tag() == Tag::outer);
  REQUIRE(r.polygons().size() == 1);
  CHECK(r.polygons()[0].holes.size() == 1);
}

TEST_CASE("island inside a hole") {
  const GroundRegion frame = subtract(sq(0, 0, 10, 10), sq(2, 2, 8, 8));
  const GroundRegion r = unite(frame, sq(4, 4, 6, 6));
  REQUIRE(r.polygons().size() == 2);
  int with_hole = 0;
  for (const auto& p : r.polygons()) with_hole += static_cast<int>(p.holes.size());
  CHECK(with_hole == 1);
  CHECK(area(r) == doctest::Approx(100 - 36 + 4));
  CHECK(r.contains({5, 5}));
  CHECK(!r.contains({3, 5}));
  CHECK(r.contains({1, 5}));
}

TEST_CASE("union of many edge-sharing cells") {
  std::vector<ConvexPolygon> cells;
  for (int i = 0; i < 90; ++i)
    for (int j = 0; j < 120; ++j)
      if ((i * 7 + j * 3) % 11 != 0) cells.push_back({{{double(j), double(i)}, {j + 1.0, double(i)}, {j + 1.0, i + 1.0}, {double(j), i + 1.0}}});
  const GroundRegion r = GroundRegion::from_convex(cells, Tag::exact);
  CHECK(area(r) == doctest::Approx(double(cells.size())));
  for (int i = 0; i < 90; ++i)
    for (int j = 0; j < 120; ++j) CHECK(r.contains({j + 0.5, i + 0.5}) == ((i * 7 + j * 3) % 11 != 0));
}
