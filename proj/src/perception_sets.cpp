#include "smsearch/perception_sets.hpp"

#include <cmath>
#include <unordered_map>

namespace smsearch {

namespace {

// Keeps the double rounding of the range products from shrinking the pyramid.
constexpr double kRangeSlack = 1e-9;

GroundRegion cone_union(const UavPose& pose, const CameraIntrinsics& intr, const Mask& m, Approx side,
                        const GroundBox& roi) {
  std::vector<ConvexPolygon> polys;
  for (const auto& r : mask_rectangles(m)) {
    ConvexPolygon q = cone_ground_polygon(pose, intr, r.c0 - 1, r.r0 - 1, r.c1, r.r1, side, &roi);
    if (!q.empty()) polys.push_back(std::move(q));
  }
  return GroundRegion::from_convex(polys, side == Approx::inner ? Tag::inner : Tag::outer);
}

}  // namespace

DepthInterval depth_interval(double D, double w_lo, double w_hi) { return {D / (1 + w_hi), D / (1 + w_lo)}; }

std::array<Point2, 8> TruncatedPyramid::ground() const {
  std::array<Point2, 8> g;
  for (int i = 0; i < 4; ++i) {
    g[i] = {near[i].x(), near[i].y()};
    g[4 + i] = {far[i].x(), far[i].y()};
  }
  return g;
}

TruncatedPyramid pixel_frustum(const UavPose& pose, const CameraIntrinsics& intr, const PixelCoord& px, double D,
                               double w_lo, double w_hi) {
  const DepthInterval di = depth_interval(D, w_lo, w_hi);
  const Vec3 c = optical_center(pose);
  const auto v = pixel_cone(pose, intr, px);
  const Vec3 mid = pixel_ray_world(pose, intr, px.col - 0.5, px.row - 0.5);
  TruncatedPyramid p;
  for (int l = 0; l < 4; ++l) {
    const double cos_l = v[l].dot(mid);
    p.near[l] = c + di.lo * (1 - kRangeSlack) * v[l];
    p.far[l] = c + di.hi * (1 + kRangeSlack) / cos_l * v[l];
  }
  return p;
}

std::vector<PixelRect> mask_rectangles(const Mask& m) {
  // runs per row, then stack identical runs of consecutive rows
  std::vector<PixelRect> done;
  std::vector<PixelRect> open;
  for (int r = 1; r <= m.rows; ++r) {
    std::vector<PixelRect> runs;
    for (int c = 1; c <= m.cols;) {
      if (!m.at(r, c)) {
        ++c;
        continue;
      }
      int e = c;
      while (e < m.cols && m.at(r, e + 1)) ++e;
      runs.push_back({r, r, c, e});
      c = e + 1;
    }
    std::vector<PixelRect> next;
    std::size_t i = 0;
    for (auto& run : runs) {
      while (i < open.size() && open[i].c0 < run.c0) done.push_back(open[i++]);
      if (i < open.size() && open[i].c0 == run.c0 && open[i].c1 == run.c1) {
        PixelRect grown = open[i++];
        grown.r1 = r;
        next.push_back(grown);
      } else {
        next.push_back(run);
      }
    }
    while (i < open.size()) done.push_back(open[i++]);
    open.swap(next);
  }
  done.insert(done.end(), open.begin(), open.end());
  return done;
}

GroundRegion target_measurement_set(const UavPose& pose, const CameraIntrinsics& intr, const Detection& det,
                                    const LabelMap& labels, const DepthMap& depth, const Mask& reliable,
                                    const PerceptionParams& p, const GroundBox& roi) {
  std::vector<ConvexPolygon> pieces;
  for (int r = det.r_lo; r <= det.r_hi; ++r)
    for (int c = det.c_lo; c <= det.c_hi; ++c) {
      if (labels.at(r, c) != Label::Target || !reliable.at(r, c)) continue;
      const auto g = pixel_frustum(pose, intr, {r, c}, depth.at(r, c), p.w_lo, p.w_hi).ground();
      pieces.push_back(dilate_points_outer({g.begin(), g.end()}, p.r_t, p.dilation_vertices));
    }
  if (pieces.empty())
    throw HypothesisViolation("detection of target " + std::to_string(det.target_id) +
                              " has no reliable target pixel in its box");
  return intersect(GroundRegion::from_convex(pieces, Tag::outer), GroundRegion::box(roi));
}

// Ground pixels lie wholly below the horizon, where the image-to-ground map is
// a homography. The pixel union is exact in image coordinates, and mapping its
// vertices gives the ground union without seams between neighbouring pieces.
GroundRegion free_ground(const UavPose& pose, const CameraIntrinsics& intr, const LabelMap& labels,
                         const Mask& reliable, const GroundBox& roi) {
  Mask m(labels.rows, labels.cols, 0);
  for (std::size_t i = 0; i < m.data.size(); ++i) m.data[i] = reliable.data[i] && labels.data[i] == Label::Ground;
  std::vector<ConvexPolygon> rects;
  for (const auto& r : mask_rectangles(m)) {
    const double x0 = r.c0 - 1, x1 = r.c1, y0 = r.r0 - 1, y1 = r.r1;
    rects.push_back(ConvexPolygon{{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}});
  }
  if (rects.empty()) return GroundRegion(Tag::inner);
  const GroundRegion image = GroundRegion::from_convex(rects, Tag::exact);

  const Vec3 o = optical_center(pose);
  auto to_ground = [&](const GridPoint& g) {
    const Point2 q = to_point(g);
    const Vec3 d = pixel_ray_world(pose, intr, q.x(), q.y());
    const double t = -o.z() / d.z();
    return Point2(o.x() + t * d.x(), o.y() + t * d.y());
  };
  std::vector<std::vector<Point2>> rings;
  auto map_ring = [&](const Ring& r) {
    std::vector<Point2> out;
    out.reserve(r.size());
    for (const auto& g : r) out.push_back(to_ground(g));
    rings.push_back(std::move(out));
  };
  for (const auto& poly : image.polygons()) {
    map_ring(poly.outer);
    for (const auto& h : poly.holes) map_ring(h);
  }
  const GroundRegion mapped = GroundRegion::from_rings(rings, Tag::inner);
  // reliable range: ground within d_max of the optical centre
  const double reach2 = intr.d_max * intr.d_max - o.z() * o.z();
  if (reach2 <= 0) return GroundRegion(Tag::inner);
  const ConvexPolygon range =
      clip_box(inscribed_polygon({o.x(), o.y()}, std::sqrt(reach2), kFootprintVertices), roi);
  return intersect(mapped, GroundRegion::from_convex(range, Tag::inner));
}

GroundRegion hidden_ground(const UavPose& pose, const CameraIntrinsics& intr, const LabelMap& labels,
                           const Mask& reliable, const GroundBox& roi) {
  Mask m(labels.rows, labels.cols, 0);
  for (std::size_t i = 0; i < m.data.size(); ++i) m.data[i] = !(reliable.data[i] && labels.data[i] == Label::Ground);
  return cone_union(pose, intr, m, Approx::outer, roi);
}

GroundRegion obstacle_margin(const UavPose& pose, const CameraIntrinsics& intr, const LabelMap& labels,
                             const DepthMap& depth, const Mask& reliable, const PerceptionParams& p,
                             const GroundBox& roi) {
  // one polygon per cell: dropping pixels only shrinks an inner set
  struct Best {
    ConvexPolygon poly;
    double area = 0;
  };
  std::unordered_map<std::int64_t, Best> cells;
  std::vector<std::int64_t> order;
  for (int r = 1; r <= labels.rows; ++r)
    for (int c = 1; c <= labels.cols; ++c) {
      if (labels.at(r, c) != Label::Obstacle || !reliable.at(r, c)) continue;
      const auto g = pixel_frustum(pose, intr, {r, c}, depth.at(r, c), p.w_lo, p.w_hi).ground();
      ConvexPolygon q = disc_intersection_inner({g.begin(), g.end()}, p.r_s, p.dilation_vertices);
      if (q.empty()) continue;
      const double a = area(q);
      if (a <= 0) continue;
      Point2 m = Point2::Zero();
      for (const auto& x : g) m += x / 8.0;
      const std::int64_t key = (static_cast<std::int64_t>(std::floor(m.x() / p.margin_cell)) << 32) ^
                               (static_cast<std::int64_t>(std::floor(m.y() / p.margin_cell)) & 0xffffffff);
      auto [it, fresh] = cells.try_emplace(key);
      if (fresh) order.push_back(key);
      if (a > it->second.area) it->second = {std::move(q), a};
    }
  std::vector<ConvexPolygon> polys;
  polys.reserve(order.size());
  for (auto k : order) polys.push_back(std::move(cells[k].poly));
  return intersect(GroundRegion::from_convex(polys, Tag::inner), GroundRegion::box(roi, Tag::inner));
}

FramePerception perceive(const UavPose& pose, const CameraIntrinsics& intr, const CvsFrame& frame,
                         const Mask& reliable, const std::vector<Detection>& dets, const PerceptionParams& p,
                         const GroundBox& roi) {
  FramePerception fp;
  fp.free_ground = free_ground(pose, intr, frame.labels, reliable, roi);
  fp.hidden = hidden_ground(pose, intr, frame.labels, reliable, roi);
  fp.obstacle_margin = obstacle_margin(pose, intr, frame.labels, frame.depth, reliable, p, roi);
  for (const auto& d : dets)
    fp.target_sets[d.target_id] = target_measurement_set(pose, intr, d, frame.labels, frame.depth, reliable, p, roi);
  return fp;
}

}  // namespace smsearch
