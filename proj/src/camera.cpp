#include "smsearch/camera.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace smsearch {

CameraIntrinsics CameraIntrinsics::from_aperture(int n_rows, int n_cols, double aperture, double theta,
                                                 double d_max) {
  if (n_rows <= 0 || n_cols <= 0) throw std::invalid_argument("image size must be positive");
  if (!(aperture > 0 && aperture < std::numbers::pi)) throw std::invalid_argument("aperture must be in (0, pi)");
  if (!(d_max > 0)) throw std::invalid_argument("d_max must be positive");
  CameraIntrinsics c;
  c.n_rows = n_rows;
  c.n_cols = n_cols;
  c.f_c = 0.5 * n_cols / std::tan(0.5 * aperture);
  c.f_r = c.f_c;
  c.theta = theta;
  c.d_max = d_max;
  return c;
}

CameraIntrinsics CameraIntrinsics::from_physical(int n_rows, int n_cols, double f, double h_r, double h_c,
                                                 double theta, double d_max) {
  CameraIntrinsics c;
  c.n_rows = n_rows;
  c.n_cols = n_cols;
  c.f_c = f * n_cols / h_c;
  c.f_r = f * n_rows / h_r;
  c.theta = theta;
  c.d_max = d_max;
  return c;
}

Mat3 world_to_body(double yaw) {
  const double c = std::cos(yaw), s = std::sin(yaw);
  Mat3 m;
  m << c, s, 0, -s, c, 0, 0, 0, 1;
  return m;
}

Mat3 body_to_camera(double theta) {
  Mat3 a, r;
  a << 0, -1, 0, 0, 0, -1, 1, 0, 0;
  const double c = std::cos(theta), s = std::sin(theta);
  r << c, 0, -s, 0, 1, 0, s, 0, c;
  return a * r;
}

Mat3 world_to_camera_rotation(const UavPose& pose, const CameraIntrinsics& intr) {
  return body_to_camera(intr.theta) * world_to_body(pose.yaw);
}

Vec3 optical_center(const UavPose& pose) {
  return pose.position + world_to_body(pose.yaw).transpose() * pose.camera_offset;
}

Vec3 world_to_camera(const UavPose& pose, const CameraIntrinsics& intr, const Vec3& p) {
  return body_to_camera(intr.theta) * (world_to_body(pose.yaw) * (p - pose.position) - pose.camera_offset);
}

Vec3 camera_to_world(const UavPose& pose, const CameraIntrinsics& intr, const Vec3& q) {
  return pose.position +
         world_to_body(pose.yaw).transpose() * (body_to_camera(intr.theta).transpose() * q + pose.camera_offset);
}

Point2 project(const UavPose& pose, const CameraIntrinsics& intr, const Vec3& p) {
  const Vec3 q = world_to_camera(pose, intr, p);
  if (!(q.z() > 0)) throw std::domain_error("behind camera");
  return {-intr.f_c * q.x() / q.z() + 0.5 * intr.n_cols, -intr.f_r * q.y() / q.z() + 0.5 * intr.n_rows};
}

PixelCoord pixel_of(const Point2& xy) {
  return {static_cast<int>(std::ceil(xy.y())), static_cast<int>(std::ceil(xy.x()))};
}

bool in_image(const CameraIntrinsics& intr, const Point2& xy) {
  return xy.x() > 0 && xy.x() <= intr.n_cols && xy.y() > 0 && xy.y() <= intr.n_rows;
}

Vec3 pixel_ray(const CameraIntrinsics& intr, double x, double y) {
  const Vec3 v((0.5 * intr.n_cols - x) / intr.f_c, (0.5 * intr.n_rows - y) / intr.f_r, 1.0);
  return v / v.norm();
}

Vec3 pixel_ray_world(const UavPose& pose, const CameraIntrinsics& intr, double x, double y) {
  return world_to_camera_rotation(pose, intr).transpose() * pixel_ray(intr, x, y);
}

std::array<Vec3, 4> pixel_cone(const UavPose& pose, const CameraIntrinsics& intr, const PixelCoord& px) {
  const Mat3 m = world_to_camera_rotation(pose, intr).transpose();
  const double c = px.col, r = px.row;
  return {m * pixel_ray(intr, c, r), m * pixel_ray(intr, c, r - 1), m * pixel_ray(intr, c - 1, r - 1),
          m * pixel_ray(intr, c - 1, r)};
}

namespace {

const std::vector<Point2>& unit_footprint() {
  static const std::vector<Point2> u = [] {
    std::vector<Point2> v;
    for (int i = 0; i < kFootprintVertices; ++i) {
      const double a = 2.0 * std::numbers::pi * i / kFootprintVertices;
      v.emplace_back(std::cos(a), std::sin(a));
    }
    return v;
  }();
  return u;
}

}  // namespace

ConvexPolygon cone_ground_polygon(const UavPose& pose, const CameraIntrinsics& intr, double x0, double y0,
                                  double x1, double y1, Approx side, const GroundBox* clip) {
  const Vec3 c = optical_center(pose);
  const double rho2 = intr.d_max * intr.d_max - c.z() * c.z();
  if (c.z() <= 0 || rho2 <= 0) return {};
  const double rho = std::sqrt(rho2);
  const double circ = side == Approx::inner ? rho : rho / std::cos(std::numbers::pi / kFootprintVertices);
  const double safe = side == Approx::inner ? rho * std::cos(std::numbers::pi / kFootprintVertices) : rho;

  const Mat3 m = world_to_camera_rotation(pose, intr).transpose();
  const std::array<Vec3, 4> d = {m * pixel_ray(intr, x1, y1), m * pixel_ray(intr, x1, y0),
                                 m * pixel_ray(intr, x0, y0), m * pixel_ray(intr, x0, y1)};

  ConvexPolygon poly;
  bool direct = true;
  const double down = -std::sin(1e-6);
  for (const auto& di : d) {
    if (!(di.z() < down)) {
      direct = false;
      break;
    }
    const double t = -c.z() / di.z();
    const Point2 g(c.x() + t * di.x(), c.y() + t * di.y());
    if ((g - Point2(c.x(), c.y())).norm() > safe) {
      direct = false;
      break;
    }
    poly.v.push_back(g);
  }
  if (direct) {
    if (area(poly) < 0) std::reverse(poly.v.begin(), poly.v.end());
  } else {
    poly.v.clear();
    for (const auto& u : unit_footprint()) poly.v.emplace_back(c.x() + circ * u.x(), c.y() + circ * u.y());
    const Vec3 mid = m * pixel_ray(intr, 0.5 * (x0 + x1), 0.5 * (y0 + y1));
    for (int i = 0; i < 4 && !poly.empty(); ++i) {
      Vec3 n = d[i].cross(d[(i + 1) % 4]);
      if (n.dot(mid) < 0) n = -n;
      n.normalize();
      poly = clip_halfplane(poly, Point2(n.x(), n.y()), n.dot(c));
    }
  }
  if (clip) poly = clip_box(poly, *clip);
  if (poly.empty() || area(poly) <= 1e-12) return {};
  return poly;
}

ConvexPolygon fov_ground_polygon(const UavPose& pose, const CameraIntrinsics& intr, const GroundBox* clip,
                                 Approx side) {
  return cone_ground_polygon(pose, intr, 0, 0, intr.n_cols, intr.n_rows, side, clip);
}

GroundRegion fov_ground_region(const UavPose& pose, const CameraIntrinsics& intr, const GroundBox* clip,
                               Approx side) {
  return GroundRegion::from_convex(fov_ground_polygon(pose, intr, clip, side),
                                   side == Approx::inner ? Tag::inner : Tag::outer);
}

ConvexPolygon pixel_ground_quad(const UavPose& pose, const CameraIntrinsics& intr, const PixelCoord& px, Approx side,
                                const GroundBox* clip) {
  return cone_ground_polygon(pose, intr, px.col - 1, px.row - 1, px.col, px.row, side, clip);
}

}  // namespace smsearch
