#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

namespace smsearch {

using Point2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Region vertices live on a fixed 1 micrometre grid.
inline constexpr double kGridPerMeter = 1e6;
// Removal budget per vertex for the direction-preserving simplifier.
inline constexpr double kSimplifyArea = 1e-4;

enum class Tag { exact, outer, inner };

const char* tag_name(Tag t);
Tag tag_from_name(const char* s);

struct ConvexPolygon {
  std::vector<Point2> v;  // counter-clockwise
  bool empty() const { return v.size() < 3; }
};

double area(const ConvexPolygon& p);
bool contains(const ConvexPolygon& p, const Point2& q, double eps = 0.0);

struct Disc {
  Point2 center;
  double radius;
};

struct GridPoint {
  std::int64_t x = 0, y = 0;
  bool operator==(const GridPoint&) const = default;
};
using Ring = std::vector<GridPoint>;

// Outer ring counter-clockwise, holes clockwise; the interior is always on
// the left of every directed edge.
struct Polygon {
  Ring outer;
  std::vector<Ring> holes;
  bool operator==(const Polygon&) const = default;
};

struct GroundBox {
  double x0, y0, x1, y1;
  static GroundBox centered(double half) { return {-half, -half, half, half}; }
  bool contains(const Point2& p) const {
    return p.x() >= x0 && p.x() <= x1 && p.y() >= y0 && p.y() <= y1;
  }
  double area() const { return (x1 - x0) * (y1 - y0); }
};

class GroundRegion {
 public:
  GroundRegion() = default;
  explicit GroundRegion(Tag t) : tag_(t) {}
  GroundRegion(std::vector<Polygon> polys, Tag t) : polys_(std::move(polys)), tag_(t) {}

  static GroundRegion box(const GroundBox& b, Tag t = Tag::exact);
  static GroundRegion from_convex(const ConvexPolygon& p, Tag t);
  static GroundRegion from_convex(const std::vector<ConvexPolygon>& ps, Tag t);
  // Nonzero-winding union of arbitrary closed rings (metres).
  static GroundRegion from_rings(const std::vector<std::vector<Point2>>& rings, Tag t);

  bool empty() const { return polys_.empty(); }
  Tag tag() const { return tag_; }
  void set_tag(Tag t) { tag_ = t; }
  const std::vector<Polygon>& polygons() const { return polys_; }
  std::size_t vertex_count() const;
  // Closed membership: boundary points count as inside.
  bool contains(const Point2& p) const;
  std::array<double, 4> bounds() const;  // x0, y0, x1, y1; zeros if empty

  bool operator==(const GroundRegion& o) const { return polys_ == o.polys_ && tag_ == o.tag_; }

 private:
  std::vector<Polygon> polys_;
  Tag tag_ = Tag::exact;
};

inline std::int64_t to_grid(double m) { return static_cast<std::int64_t>(std::llround(m * kGridPerMeter)); }
inline double from_grid(std::int64_t g) { return static_cast<double>(g) / kGridPerMeter; }
inline Point2 to_point(const GridPoint& g) { return {from_grid(g.x), from_grid(g.y)}; }

double area(const GroundRegion& r);

// Result tags follow the direction that survives the operation: outer with
// outer stays outer, exact mixes take the other side, and conflicting
// directions fall back to exact (no simplification).
GroundRegion unite(const GroundRegion& a, const GroundRegion& b);
GroundRegion unite_all(const std::vector<GroundRegion>& rs, Tag t);
GroundRegion intersect(const GroundRegion& a, const GroundRegion& b);
GroundRegion subtract(const GroundRegion& a, const GroundRegion& b);
GroundRegion clip_to_box(const GroundRegion& r, const GroundBox& b);
double symmetric_difference_area(const GroundRegion& a, const GroundRegion& b);

// Removes vertices whose triangle is below `area_tol`, only in the direction
// allowed by the tag. Exact regions only lose collinear vertices.
GroundRegion simplify(const GroundRegion& r, double area_tol = kSimplifyArea);

ConvexPolygon regular_polygon(const Point2& c, double circumradius, int k, double phase = 0.0);
// Regular k-gon whose inscribed circle has the given radius.
ConvexPolygon circumscribed_polygon(const Point2& c, double radius, int k);
ConvexPolygon inscribed_polygon(const Point2& c, double radius, int k);

GroundRegion dilate_outer(const GroundRegion& r, double radius, int k = 16);
// Outer dilation of a point set; never degenerates, unlike a hull.
ConvexPolygon dilate_points_outer(const std::vector<Point2>& pts, double radius, int k = 16);

ConvexPolygon disc_intersection_inner(const std::vector<Point2>& centers, double radius, int k = 16);
ConvexPolygon convex_hull(std::vector<Point2> pts);

// Keeps the part with a.x*p.x + a.y*p.y >= b.
ConvexPolygon clip_halfplane(const ConvexPolygon& p, const Point2& a, double b);
ConvexPolygon clip_box(const ConvexPolygon& p, const GroundBox& b);
ConvexPolygon erode_convex(const ConvexPolygon& p, double r);

Point2 barycenter(const GroundRegion& r);
Point2 barycenter(const ConvexPolygon& p);
double distance_point_region(const Point2& p, const GroundRegion& r);

}  // namespace smsearch
