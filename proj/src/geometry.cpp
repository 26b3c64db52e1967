#include "smsearch/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "clipper.hpp"

namespace smsearch {

namespace cl = ClipperLib;
using i128 = __int128;

namespace {

// Slack (grid units) added to outward constructions so that rounding to the
// grid never cuts into the exact set.
constexpr double kOuterSlackM = 3e-6;

int direction(Tag t) { return t == Tag::outer ? 1 : (t == Tag::inner ? -1 : 0); }
Tag from_direction(int d) { return d > 0 ? Tag::outer : (d < 0 ? Tag::inner : Tag::exact); }

Tag combine(int da, int db) {
  if (da == 0) return from_direction(db);
  if (db == 0 || db == da) return from_direction(da);
  return Tag::exact;
}

i128 ring_area2(const Ring& r) {
  i128 s = 0;
  const std::size_t n = r.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++)
    s += static_cast<i128>(r[j].x) * r[i].y - static_cast<i128>(r[i].x) * r[j].y;
  return s;
}

cl::Path to_path(const Ring& r) {
  cl::Path p;
  p.reserve(r.size());
  for (const auto& g : r) p.emplace_back(g.x, g.y);
  return p;
}

Ring to_ring(const cl::Path& p) {
  Ring r;
  r.reserve(p.size());
  for (const auto& q : p) r.push_back({q.X, q.Y});
  return r;
}

cl::Path to_path(const ConvexPolygon& p) {
  cl::Path out;
  out.reserve(p.v.size());
  for (const auto& q : p.v) out.emplace_back(to_grid(q.x()), to_grid(q.y()));
  return out;
}

void append_paths(const GroundRegion& r, cl::Paths& out) {
  for (const auto& poly : r.polygons()) {
    out.push_back(to_path(poly.outer));
    for (const auto& h : poly.holes) out.push_back(to_path(h));
  }
}

struct Bounds {
  cl::cInt x0, y0, x1, y1;
  bool covers(const Bounds& o) const { return x0 <= o.x0 && y0 <= o.y0 && x1 >= o.x1 && y1 >= o.y1; }
};

Bounds bounds_of(const cl::Path& p) {
  Bounds b{p[0].X, p[0].Y, p[0].X, p[0].Y};
  for (const auto& q : p) {
    b.x0 = std::min(b.x0, q.X);
    b.y0 = std::min(b.y0, q.Y);
    b.x1 = std::max(b.x1, q.X);
    b.y1 = std::max(b.y1, q.Y);
  }
  return b;
}

// Flat Clipper output to polygons with holes. A hole belongs to the smallest
// outer ring containing it. (PolyTree output is quadratic on big inputs.)
std::vector<Polygon> nest(const cl::Paths& paths) {
  struct Item {
    const cl::Path* path;
    Bounds box;
    double area;
  };
  std::vector<Item> outers, holes;
  for (const auto& p : paths) {
    if (p.size() < 3) continue;
    const double a = cl::Area(p);
    if (a == 0) continue;
    (a > 0 ? outers : holes).push_back({&p, bounds_of(p), std::abs(a)});
  }
  std::vector<Polygon> out(outers.size());
  for (std::size_t i = 0; i < outers.size(); ++i) out[i].outer = to_ring(*outers[i].path);
  for (const auto& h : holes) {
    int best = -1;
    for (std::size_t i = 0; i < outers.size(); ++i) {
      if (!outers[i].box.covers(h.box)) continue;
      if (best >= 0 && outers[i].area >= outers[best].area) continue;
      int verdict = -1;
      for (const auto& q : *h.path) {
        verdict = cl::PointInPolygon(q, *outers[i].path);
        if (verdict != -1) break;
      }
      if (verdict != 0) best = static_cast<int>(i);
    }
    if (best >= 0) out[best].holes.push_back(to_ring(*h.path));
  }
  return out;
}

cl::Paths run_paths(cl::ClipType op, const cl::Paths& subj, const cl::Paths& clip) {
  cl::Clipper c;
  c.AddPaths(subj, cl::ptSubject, true);
  if (!clip.empty()) c.AddPaths(clip, cl::ptClip, true);
  cl::Paths out;
  c.Execute(op, out, cl::pftNonZero, cl::pftNonZero);
  return out;
}

std::vector<Polygon> run(cl::ClipType op, const cl::Paths& subj, const cl::Paths& clip) {
  return nest(run_paths(op, subj, clip));
}

// Pairwise merging: one flat call over many edge-sharing pieces is far slower.
std::vector<Polygon> union_groups(std::vector<cl::Paths> groups) {
  if (groups.empty()) return {};
  while (groups.size() > 1) {
    std::vector<cl::Paths> next;
    next.reserve((groups.size() + 1) / 2);
    for (std::size_t i = 0; i < groups.size(); i += 2) {
      if (i + 1 == groups.size()) {
        next.push_back(std::move(groups[i]));
        continue;
      }
      cl::Paths m = std::move(groups[i]);
      m.insert(m.end(), groups[i + 1].begin(), groups[i + 1].end());
      next.push_back(run_paths(cl::ctUnion, m, {}));
    }
    groups.swap(next);
  }
  return run(cl::ctUnion, groups[0], {});
}

void push_chunks(const cl::Paths& pieces, std::vector<cl::Paths>& groups) {
  constexpr std::size_t kLeaf = 16;
  for (std::size_t i = 0; i < pieces.size(); i += kLeaf)
    groups.emplace_back(pieces.begin() + i, pieces.begin() + std::min(pieces.size(), i + kLeaf));
}

GroundRegion finish(std::vector<Polygon> polys, Tag t) {
  GroundRegion r(std::move(polys), t);
  if (t == Tag::exact) return r;
  return simplify(r);
}

double cross(const Point2& a, const Point2& b) { return a.x() * b.y() - a.y() * b.x(); }

i128 cross3(const GridPoint& a, const GridPoint& b, const GridPoint& c) {
  return static_cast<i128>(b.x - a.x) * (c.y - a.y) - static_cast<i128>(b.y - a.y) * (c.x - a.x);
}

// Integer monotone chain, counter-clockwise, collinear points dropped.
std::vector<GridPoint> hull_grid(std::vector<GridPoint> pts) {
  std::sort(pts.begin(), pts.end(), [](const GridPoint& a, const GridPoint& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return {};
  std::vector<GridPoint> h(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross3(h[k - 2], h[k - 1], p) <= 0) --k;
    h[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross3(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  if (h.size() < 3) return {};
  return h;
}

bool point_in_ring(const Ring& r, double px, double py, bool& on_edge) {
  // crossing test with explicit boundary detection, grid units
  bool inside = false;
  const std::size_t n = r.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const double xi = static_cast<double>(r[i].x), yi = static_cast<double>(r[i].y);
    const double xj = static_cast<double>(r[j].x), yj = static_cast<double>(r[j].y);
    const double ex = xi - xj, ey = yi - yj;
    const double c = ex * (py - yj) - ey * (px - xj);
    const double len2 = ex * ex + ey * ey;
    if (std::abs(c) <= 1e-9 * std::max(1.0, len2) &&
        px >= std::min(xi, xj) - 1e-9 && px <= std::max(xi, xj) + 1e-9 &&
        py >= std::min(yi, yj) - 1e-9 && py <= std::max(yi, yj) + 1e-9) {
      on_edge = true;
      return true;
    }
    if ((yi > py) != (yj > py)) {
      const double xc = xj + (py - yj) * ex / ey;
      if (px < xc) inside = !inside;
    }
  }
  return inside;
}

double point_segment_distance(const Point2& p, const Point2& a, const Point2& b) {
  const Point2 ab = b - a;
  const double l2 = ab.squaredNorm();
  double t = l2 > 0 ? (p - a).dot(ab) / l2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (a + t * ab - p).norm();
}

}  // namespace

const char* tag_name(Tag t) {
  switch (t) {
    case Tag::outer: return "outer";
    case Tag::inner: return "inner";
    default: return "exact";
  }
}

Tag tag_from_name(const char* s) {
  if (std::strcmp(s, "outer") == 0) return Tag::outer;
  if (std::strcmp(s, "inner") == 0) return Tag::inner;
  if (std::strcmp(s, "exact") == 0) return Tag::exact;
  throw std::invalid_argument(std::string("unknown conservatism tag: ") + s);
}

double area(const ConvexPolygon& p) {
  if (p.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0, j = p.v.size() - 1; i < p.v.size(); j = i++) s += cross(p.v[j], p.v[i]);
  return 0.5 * s;
}

bool contains(const ConvexPolygon& p, const Point2& q, double eps) {
  if (p.empty()) return false;
  for (std::size_t i = 0, j = p.v.size() - 1; i < p.v.size(); j = i++) {
    const Point2 e = p.v[i] - p.v[j];
    if (cross(e, q - p.v[j]) < -eps * e.norm()) return false;
  }
  return true;
}

// ---------------------------------------------------------------- regions

GroundRegion GroundRegion::box(const GroundBox& b, Tag t) {
  ConvexPolygon p{{{b.x0, b.y0}, {b.x1, b.y0}, {b.x1, b.y1}, {b.x0, b.y1}}};
  return from_convex(p, t);
}

GroundRegion GroundRegion::from_convex(const ConvexPolygon& p, Tag t) {
  if (p.empty()) return GroundRegion(t);
  return GroundRegion(run(cl::ctUnion, {to_path(p)}, {}), t);
}

GroundRegion GroundRegion::from_convex(const std::vector<ConvexPolygon>& ps, Tag t) {
  cl::Paths paths;
  paths.reserve(ps.size());
  for (const auto& p : ps) {
    if (p.empty()) continue;
    paths.push_back(to_path(p));
    if (cl::Area(paths.back()) < 0) cl::ReversePath(paths.back());
  }
  if (paths.empty()) return GroundRegion(t);
  std::vector<cl::Paths> groups;
  push_chunks(paths, groups);
  return finish(union_groups(std::move(groups)), t);
}

GroundRegion GroundRegion::from_rings(const std::vector<std::vector<Point2>>& rings, Tag t) {
  cl::Paths paths;
  for (const auto& r : rings) {
    cl::Path p;
    for (const auto& q : r) p.emplace_back(to_grid(q.x()), to_grid(q.y()));
    if (p.size() >= 3) paths.push_back(std::move(p));
  }
  if (paths.empty()) return GroundRegion(t);
  return GroundRegion(run(cl::ctUnion, paths, {}), t);
}

std::size_t GroundRegion::vertex_count() const {
  std::size_t n = 0;
  for (const auto& p : polys_) {
    n += p.outer.size();
    for (const auto& h : p.holes) n += h.size();
  }
  return n;
}

bool GroundRegion::contains(const Point2& p) const {
  const double px = p.x() * kGridPerMeter, py = p.y() * kGridPerMeter;
  for (const auto& poly : polys_) {
    bool edge = false;
    if (!point_in_ring(poly.outer, px, py, edge)) continue;
    if (edge) return true;
    bool in_hole = false;
    for (const auto& h : poly.holes) {
      bool hedge = false;
      if (point_in_ring(h, px, py, hedge)) {
        if (hedge) return true;
        in_hole = true;
        break;
      }
    }
    if (!in_hole) return true;
  }
  return false;
}

std::array<double, 4> GroundRegion::bounds() const {
  if (polys_.empty()) return {0, 0, 0, 0};
  std::int64_t x0 = std::numeric_limits<std::int64_t>::max(), y0 = x0;
  std::int64_t x1 = std::numeric_limits<std::int64_t>::min(), y1 = x1;
  for (const auto& p : polys_)
    for (const auto& g : p.outer) {
      x0 = std::min(x0, g.x), y0 = std::min(y0, g.y);
      x1 = std::max(x1, g.x), y1 = std::max(y1, g.y);
    }
  return {from_grid(x0), from_grid(y0), from_grid(x1), from_grid(y1)};
}

double area(const GroundRegion& r) {
  i128 s = 0;
  for (const auto& p : r.polygons()) {
    s += ring_area2(p.outer);
    for (const auto& h : p.holes) s += ring_area2(h);
  }
  return static_cast<double>(s) / 2.0 / (kGridPerMeter * kGridPerMeter);
}

GroundRegion unite(const GroundRegion& a, const GroundRegion& b) {
  const Tag t = combine(direction(a.tag()), direction(b.tag()));
  if (b.empty()) return GroundRegion(a.polygons(), t);
  if (a.empty()) return GroundRegion(b.polygons(), t);
  cl::Paths s;
  append_paths(a, s);
  append_paths(b, s);
  return finish(run(cl::ctUnion, s, {}), t);
}

GroundRegion unite_all(const std::vector<GroundRegion>& rs, Tag t) {
  std::vector<cl::Paths> groups;
  for (const auto& r : rs) {
    if (r.empty()) continue;
    groups.emplace_back();
    append_paths(r, groups.back());
  }
  if (groups.empty()) return GroundRegion(t);
  return finish(union_groups(std::move(groups)), t);
}

GroundRegion intersect(const GroundRegion& a, const GroundRegion& b) {
  const Tag t = combine(direction(a.tag()), direction(b.tag()));
  if (a.empty() || b.empty()) return GroundRegion(t);
  cl::Paths s, c;
  append_paths(a, s);
  append_paths(b, c);
  return finish(run(cl::ctIntersection, s, c), t);
}

GroundRegion subtract(const GroundRegion& a, const GroundRegion& b) {
  const Tag t = combine(direction(a.tag()), -direction(b.tag()));
  if (a.empty()) return GroundRegion(t);
  if (b.empty()) return GroundRegion(a.polygons(), t);
  cl::Paths s, c;
  append_paths(a, s);
  append_paths(b, c);
  return finish(run(cl::ctDifference, s, c), t);
}

GroundRegion clip_to_box(const GroundRegion& r, const GroundBox& b) {
  if (r.empty()) return r;
  const auto bb = r.bounds();
  if (bb[0] >= b.x0 && bb[1] >= b.y0 && bb[2] <= b.x1 && bb[3] <= b.y1) return r;
  GroundRegion box = GroundRegion::box(b);
  GroundRegion out = intersect(r, box);
  out.set_tag(r.tag());
  return out;
}

double symmetric_difference_area(const GroundRegion& a, const GroundRegion& b) {
  cl::Paths s, c;
  append_paths(a, s);
  append_paths(b, c);
  GroundRegion x(run(cl::ctXor, s, c), Tag::exact);
  return area(x);
}

// ---------------------------------------------------------------- simplify

namespace {

struct VRef {
  std::uint64_t key;
  int ring;
  int idx;
};

constexpr int kCellShift = 20;  // ~1.05 m cells

std::uint64_t cell_key(std::int64_t cx, std::int64_t cy) {
  return (static_cast<std::uint64_t>(cx + (1LL << 31)) << 32) |
         static_cast<std::uint64_t>(cy + (1LL << 31));
}

bool in_closed_triangle(const GridPoint& a, const GridPoint& b, const GridPoint& c, const GridPoint& p) {
  const i128 d1 = cross3(a, b, p), d2 = cross3(b, c, p), d3 = cross3(c, a, p);
  const bool neg = d1 < 0 || d2 < 0 || d3 < 0;
  const bool pos = d1 > 0 || d2 > 0 || d3 > 0;
  return !(neg && pos);
}

}  // namespace

GroundRegion simplify(const GroundRegion& r, double area_tol) {
  if (r.empty()) return r;
  const int dir = direction(r.tag());
  const i128 limit2 = static_cast<i128>(2.0 * area_tol * kGridPerMeter * kGridPerMeter);

  std::vector<Ring> rings;
  std::vector<int> owner;  // polygon index per ring
  for (std::size_t i = 0; i < r.polygons().size(); ++i) {
    const auto& p = r.polygons()[i];
    rings.push_back(p.outer);
    owner.push_back(static_cast<int>(i));
    for (const auto& h : p.holes) {
      rings.push_back(h);
      owner.push_back(static_cast<int>(i));
    }
  }

  std::vector<VRef> index;
  for (int ri = 0; ri < static_cast<int>(rings.size()); ++ri)
    for (int vi = 0; vi < static_cast<int>(rings[ri].size()); ++vi) {
      const auto& g = rings[ri][vi];
      index.push_back({cell_key(g.x >> kCellShift, g.y >> kCellShift), ri, vi});
    }
  std::sort(index.begin(), index.end(), [](const VRef& a, const VRef& b) {
    return a.key < b.key || (a.key == b.key && (a.ring < b.ring || (a.ring == b.ring && a.idx < b.idx)));
  });

  std::vector<std::vector<int>> next(rings.size()), prev(rings.size());
  std::vector<std::vector<char>> alive(rings.size());
  std::vector<int> count(rings.size());
  for (std::size_t ri = 0; ri < rings.size(); ++ri) {
    const int n = static_cast<int>(rings[ri].size());
    next[ri].resize(n), prev[ri].resize(n), alive[ri].assign(n, 1);
    for (int i = 0; i < n; ++i) next[ri][i] = (i + 1) % n, prev[ri][i] = (i + n - 1) % n;
    count[ri] = n;
  }

  auto blocked = [&](int ri, int ia, int iv, int ib) {
    const GridPoint& a = rings[ri][ia];
    const GridPoint& v = rings[ri][iv];
    const GridPoint& b = rings[ri][ib];
    const std::int64_t x0 = std::min({a.x, v.x, b.x}) >> kCellShift, x1 = std::max({a.x, v.x, b.x}) >> kCellShift;
    const std::int64_t y0 = std::min({a.y, v.y, b.y}) >> kCellShift, y1 = std::max({a.y, v.y, b.y}) >> kCellShift;
    if ((x1 - x0 + 1) * (y1 - y0 + 1) > 256) return true;
    for (std::int64_t cx = x0; cx <= x1; ++cx)
      for (std::int64_t cy = y0; cy <= y1; ++cy) {
        const std::uint64_t key = cell_key(cx, cy);
        auto it = std::lower_bound(index.begin(), index.end(), key,
                                   [](const VRef& e, std::uint64_t k) { return e.key < k; });
        for (; it != index.end() && it->key == key; ++it) {
          if (!alive[it->ring][it->idx]) continue;
          if (it->ring == ri && (it->idx == ia || it->idx == iv || it->idx == ib)) continue;
          if (in_closed_triangle(a, v, b, rings[it->ring][it->idx])) return true;
        }
      }
    return false;
  };

  for (std::size_t ri = 0; ri < rings.size(); ++ri) {
    std::vector<int> work(rings[ri].size());
    for (std::size_t i = 0; i < work.size(); ++i) work[i] = static_cast<int>(work.size() - 1 - i);
    while (!work.empty() && count[ri] > 3) {
      const int iv = work.back();
      work.pop_back();
      if (!alive[ri][iv]) continue;
      const int ia = prev[ri][iv], ib = next[ri][iv];
      const i128 c = cross3(rings[ri][ia], rings[ri][iv], rings[ri][ib]);
      bool ok = false;
      if (c == 0) {
        ok = true;
      } else if ((dir > 0 && c < 0) || (dir < 0 && c > 0)) {
        const i128 mag = c < 0 ? -c : c;
        ok = mag < limit2 && !blocked(static_cast<int>(ri), ia, iv, ib);
      }
      if (!ok) continue;
      alive[ri][iv] = 0;
      next[ri][ia] = ib;
      prev[ri][ib] = ia;
      --count[ri];
      work.push_back(ib);
      work.push_back(ia);
    }
  }

  std::vector<Polygon> out;
  int last_owner = -1;
  bool outer_kept = false;
  for (std::size_t ri = 0; ri < rings.size(); ++ri) {
    Ring nr;
    int start = -1;
    for (int i = 0; i < static_cast<int>(rings[ri].size()); ++i)
      if (alive[ri][i]) { start = i; break; }
    if (start >= 0) {
      int i = start;
      do {
        nr.push_back(rings[ri][i]);
        i = next[ri][i];
      } while (i != start);
    }
    const bool is_outer = owner[ri] != last_owner;
    const bool valid = nr.size() >= 3 && ring_area2(nr) != 0;
    if (is_outer) {
      last_owner = owner[ri];
      outer_kept = valid;
      if (valid) out.push_back(Polygon{std::move(nr), {}});
    } else if (outer_kept && valid) {
      out.back().holes.push_back(std::move(nr));
    }
  }
  return GroundRegion(std::move(out), r.tag());
}

// ---------------------------------------------------------------- discs

ConvexPolygon regular_polygon(const Point2& c, double circumradius, int k, double phase) {
  ConvexPolygon p;
  p.v.reserve(k);
  for (int i = 0; i < k; ++i) {
    const double a = phase + 2.0 * std::numbers::pi * i / k;
    p.v.emplace_back(c.x() + circumradius * std::cos(a), c.y() + circumradius * std::sin(a));
  }
  return p;
}

ConvexPolygon circumscribed_polygon(const Point2& c, double radius, int k) {
  if (k < 3) throw std::invalid_argument("polygon vertex count must be >= 3");
  // edge normals at multiples of 2*pi/k, so axis-aligned edges exist when 4 | k
  return regular_polygon(c, radius / std::cos(std::numbers::pi / k), k, std::numbers::pi / k);
}

ConvexPolygon inscribed_polygon(const Point2& c, double radius, int k) {
  if (k < 3) throw std::invalid_argument("polygon vertex count must be >= 3");
  return regular_polygon(c, radius, k, 0.0);
}

GroundRegion dilate_outer(const GroundRegion& r, double radius, int k) {
  if (k < 3) throw std::invalid_argument("dilate_outer: k must be >= 3");
  if (radius < 0) throw std::invalid_argument("dilate_outer: negative radius");
  Tag t = r.tag() == Tag::inner ? Tag::exact : Tag::outer;
  if (r.empty() || radius == 0) return GroundRegion(r.polygons(), r.tag());
  const ConvexPolygon kp = circumscribed_polygon({0, 0}, radius + kOuterSlackM, k);
  std::vector<GridPoint> kg;
  for (const auto& q : kp.v) kg.push_back({to_grid(q.x()), to_grid(q.y())});

  cl::Paths paths;
  std::vector<GridPoint> pts(2 * kg.size());
  auto add_edges = [&](const Ring& ring) {
    const std::size_t n = ring.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
      for (std::size_t m = 0; m < kg.size(); ++m) {
        pts[2 * m] = {ring[j].x + kg[m].x, ring[j].y + kg[m].y};
        pts[2 * m + 1] = {ring[i].x + kg[m].x, ring[i].y + kg[m].y};
      }
      auto h = hull_grid(pts);
      if (!h.empty()) paths.push_back(to_path(h));
    }
  };
  for (const auto& p : r.polygons()) {
    add_edges(p.outer);
    for (const auto& h : p.holes) add_edges(h);
  }
  std::vector<cl::Paths> groups(1);
  append_paths(r, groups[0]);
  push_chunks(paths, groups);
  return finish(union_groups(std::move(groups)), t);
}

ConvexPolygon dilate_points_outer(const std::vector<Point2>& pts, double radius, int k) {
  if (k < 3) throw std::invalid_argument("dilate_points_outer: k must be >= 3");
  const ConvexPolygon kp = circumscribed_polygon({0, 0}, radius + kOuterSlackM, k);
  const ConvexPolygon base = convex_hull(pts);
  std::vector<Point2> all;
  const std::vector<Point2>& src = base.empty() ? pts : base.v;
  all.reserve(src.size() * kp.v.size());
  for (const auto& p : src)
    for (const auto& q : kp.v) all.push_back(p + q);
  return convex_hull(std::move(all));
}

ConvexPolygon disc_intersection_inner(const std::vector<Point2>& centers, double radius, int k) {
  if (centers.empty() || radius <= 0) return {};
  // stay strictly inside every disc, even after grid rounding
  const double r = radius - kOuterSlackM;
  if (r <= 0) return {};
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<Point2> pts;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    bool full = true;
    double s = 0, e = two_pi;
    bool empty = false;
    for (std::size_t j = 0; j < centers.size() && !empty; ++j) {
      if (j == i) continue;
      const Point2 d = centers[j] - centers[i];
      const double dist = d.norm();
      if (dist < 1e-12) continue;
      if (dist >= 2.0 * r) return {};
      const double half = std::acos(dist / (2.0 * r));
      const double mid = std::atan2(d.y(), d.x());
      double s2 = mid - half, e2 = mid + half;
      if (full) {
        s = s2, e = e2, full = false;
        continue;
      }
      double best_s = 0, best_e = -1;
      for (int shift = -2; shift <= 2; ++shift) {
        const double ss = std::max(s, s2 + shift * two_pi), ee = std::min(e, e2 + shift * two_pi);
        if (ee - ss > best_e - best_s) best_s = ss, best_e = ee;
      }
      if (best_e < best_s) empty = true;
      s = best_s, e = best_e;
    }
    if (empty) continue;  // this circle contributes no boundary
    const double span = e - s;
    const int n = full ? k : std::max(1, static_cast<int>(std::ceil(span / (two_pi / k))));
    for (int m = 0; m <= n; ++m) {
      if (full && m == n) break;
      const double a = s + span * m / n;
      pts.emplace_back(centers[i].x() + r * std::cos(a), centers[i].y() + r * std::sin(a));
    }
  }
  return convex_hull(std::move(pts));
}

ConvexPolygon convex_hull(std::vector<Point2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Point2& a, const Point2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Point2& a, const Point2& b) { return (a - b).norm() <= 1e-9; }),
            pts.end());
  if (pts.size() < 3) return {};
  std::vector<Point2> h(2 * pts.size());
  std::size_t k = 0;
  auto turn = [](const Point2& o, const Point2& a, const Point2& b) { return cross(a - o, b - o); };
  for (const auto& p : pts) {
    while (k >= 2 && turn(h[k - 2], h[k - 1], p) <= 0) --k;
    h[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && turn(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  ConvexPolygon out{std::move(h)};
  if (out.v.size() < 3 || area(out) <= 1e-12) return {};
  return out;
}

ConvexPolygon clip_halfplane(const ConvexPolygon& p, const Point2& a, double b) {
  if (p.empty()) return {};
  ConvexPolygon out;
  const std::size_t n = p.v.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& cur = p.v[i];
    const Point2& nxt = p.v[(i + 1) % n];
    const double dc = a.dot(cur) - b, dn = a.dot(nxt) - b;
    if (dc >= 0) out.v.push_back(cur);
    if ((dc >= 0) != (dn >= 0)) {
      const double t = dc / (dc - dn);
      out.v.push_back(cur + t * (nxt - cur));
    }
  }
  if (out.v.size() < 3) return {};
  return out;
}

ConvexPolygon clip_box(const ConvexPolygon& p, const GroundBox& b) {
  ConvexPolygon q = clip_halfplane(p, {1, 0}, b.x0);
  q = clip_halfplane(q, {-1, 0}, -b.x1);
  q = clip_halfplane(q, {0, 1}, b.y0);
  q = clip_halfplane(q, {0, -1}, -b.y1);
  if (q.empty() || area(q) <= 1e-12) return {};
  return q;
}

ConvexPolygon erode_convex(const ConvexPolygon& p, double r) {
  if (p.empty()) return {};
  ConvexPolygon q = p;
  const std::size_t n = p.v.size();
  for (std::size_t i = 0; i < n && !q.empty(); ++i) {
    const Point2 e = p.v[(i + 1) % n] - p.v[i];
    const double len = e.norm();
    if (len <= 0) continue;
    const Point2 nrm(-e.y() / len, e.x() / len);  // inward for CCW
    q = clip_halfplane(q, nrm, nrm.dot(p.v[i]) + r);
  }
  if (q.empty() || area(q) <= 1e-12) return {};
  return q;
}

// ---------------------------------------------------------------- metric helpers

Point2 barycenter(const ConvexPolygon& p) {
  if (p.empty()) throw std::domain_error("empty region has no barycenter");
  const Point2 o = p.v[0];
  double a = 0, cx = 0, cy = 0;
  for (std::size_t i = 0, j = p.v.size() - 1; i < p.v.size(); j = i++) {
    const Point2 pj = p.v[j] - o, pi = p.v[i] - o;
    const double c = cross(pj, pi);
    a += c, cx += (pj.x() + pi.x()) * c, cy += (pj.y() + pi.y()) * c;
  }
  if (a == 0) throw std::domain_error("empty region has no barycenter");
  return o + Point2(cx / (3 * a), cy / (3 * a));
}

Point2 barycenter(const GroundRegion& r) {
  if (r.empty()) throw std::domain_error("empty region has no barycenter");
  const GridPoint& g0 = r.polygons()[0].outer[0];
  double a = 0, cx = 0, cy = 0;
  auto acc = [&](const Ring& ring) {
    for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
      const double xj = from_grid(ring[j].x - g0.x), yj = from_grid(ring[j].y - g0.y);
      const double xi = from_grid(ring[i].x - g0.x), yi = from_grid(ring[i].y - g0.y);
      const double c = xj * yi - xi * yj;
      a += c, cx += (xj + xi) * c, cy += (yj + yi) * c;
    }
  };
  for (const auto& p : r.polygons()) {
    acc(p.outer);
    for (const auto& h : p.holes) acc(h);
  }
  if (a <= 0) throw std::domain_error("empty region has no barycenter");
  return to_point(g0) + Point2(cx / (3 * a), cy / (3 * a));
}

double distance_point_region(const Point2& p, const GroundRegion& r) {
  if (r.empty()) throw std::domain_error("distance to an empty region is undefined");
  if (r.contains(p)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  auto scan = [&](const Ring& ring) {
    for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++)
      best = std::min(best, point_segment_distance(p, to_point(ring[j]), to_point(ring[i])));
  };
  for (const auto& poly : r.polygons()) {
    scan(poly.outer);
    for (const auto& h : poly.holes) scan(h);
  }
  return best;
}

}  // namespace smsearch
