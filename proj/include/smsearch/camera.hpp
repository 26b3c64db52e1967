#pragma once

#include <array>

#include "smsearch/geometry.hpp"

namespace smsearch {

struct CameraIntrinsics {
  int n_rows = 360;
  int n_cols = 480;
  double f_c = 0;  // pixels
  double f_r = 0;  // pixels
  double theta = 0;  // mount pitch below the body x axis
  double d_max = 300;

  // Square pixels; `aperture` is the horizontal field of view.
  static CameraIntrinsics from_aperture(int n_rows, int n_cols, double aperture, double theta, double d_max);
  // From physical focal length and CCD size, as f*N/H.
  static CameraIntrinsics from_physical(int n_rows, int n_cols, double f, double h_r, double h_c, double theta,
                                        double d_max);
};

struct UavPose {
  Vec3 position = Vec3::Zero();  // centre of gravity in F
  double yaw = 0;
  Vec3 camera_offset = Vec3::Zero();  // optical centre in the body frame
};

struct PixelCoord {
  int row = 1;  // 1..N_r
  int col = 1;  // 1..N_c
};

// Body frame: x forward, y left, z up.
Mat3 world_to_body(double yaw);
Mat3 body_to_camera(double theta);
Mat3 world_to_camera_rotation(const UavPose& pose, const CameraIntrinsics& intr);

Vec3 optical_center(const UavPose& pose);
Vec3 world_to_camera(const UavPose& pose, const CameraIntrinsics& intr, const Vec3& p);
Vec3 camera_to_world(const UavPose& pose, const CameraIntrinsics& intr, const Vec3& q);

// Continuous image coordinates (x along columns, y along rows).
Point2 project(const UavPose& pose, const CameraIntrinsics& intr, const Vec3& p);
PixelCoord pixel_of(const Point2& xy);
bool in_image(const CameraIntrinsics& intr, const Point2& xy);

Vec3 pixel_ray(const CameraIntrinsics& intr, double x, double y);          // camera frame, unit
Vec3 pixel_ray_world(const UavPose& pose, const CameraIntrinsics& intr, double x, double y);
// Corner rays in F: v1=(n_c,n_r), v2=(n_c,n_r-1), v3=(n_c-1,n_r-1), v4=(n_c-1,n_r).
std::array<Vec3, 4> pixel_cone(const UavPose& pose, const CameraIntrinsics& intr, const PixelCoord& px);

enum class Approx { inner, outer };

// Ground part of the cone over the image rectangle [x0,x1]x[y0,y1], clipped
// to the d_max footprint (polygonised on the requested side) and to `clip`.
ConvexPolygon cone_ground_polygon(const UavPose& pose, const CameraIntrinsics& intr, double x0, double y0,
                                  double x1, double y1, Approx side, const GroundBox* clip = nullptr);

GroundRegion fov_ground_region(const UavPose& pose, const CameraIntrinsics& intr, const GroundBox* clip = nullptr,
                               Approx side = Approx::inner);
ConvexPolygon fov_ground_polygon(const UavPose& pose, const CameraIntrinsics& intr, const GroundBox* clip = nullptr,
                                 Approx side = Approx::inner);
ConvexPolygon pixel_ground_quad(const UavPose& pose, const CameraIntrinsics& intr, const PixelCoord& px,
                                Approx side = Approx::inner, const GroundBox* clip = nullptr);

inline constexpr int kFootprintVertices = 256;

}  // namespace smsearch
