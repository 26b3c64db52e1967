#pragma once

#include <array>
#include <map>
#include <stdexcept>
#include <string>

#include "smsearch/camera.hpp"
#include "smsearch/synthetic_cvs.hpp"

namespace smsearch {

// A broken estimator hypothesis (CVS contract, enclosure, emptiness).
struct HypothesisViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DepthInterval {
  double lo = 0;
  double hi = 0;
};
// [D/(1+w_hi), D/(1+w_lo)]
DepthInterval depth_interval(double D, double w_lo, double w_hi);

struct TruncatedPyramid {
  std::array<Vec3, 4> near;  // along the corner rays at the short range
  std::array<Vec3, 4> far;   // on the plane normal to the centre ray at the long range
  std::array<Point2, 8> ground() const;
};

TruncatedPyramid pixel_frustum(const UavPose& pose, const CameraIntrinsics& intr, const PixelCoord& px, double D,
                               double w_lo, double w_hi);

struct PerceptionParams {
  double w_lo = -0.01;
  double w_hi = 0.01;
  double r_t = 2.5;
  double r_s = 3.0;
  int dilation_vertices = 16;
  double margin_cell = 0.5;  // obstacle pixels are thinned to one per cell
};

struct FramePerception {
  GroundRegion free_ground;      // inner
  GroundRegion obstacle_margin;  // inner
  GroundRegion hidden;           // outer
  std::map<int, GroundRegion> target_sets;  // outer
};

GroundRegion target_measurement_set(const UavPose& pose, const CameraIntrinsics& intr, const Detection& det,
                                    const LabelMap& labels, const DepthMap& depth, const Mask& reliable,
                                    const PerceptionParams& p, const GroundBox& roi);
GroundRegion free_ground(const UavPose& pose, const CameraIntrinsics& intr, const LabelMap& labels,
                         const Mask& reliable, const GroundBox& roi);
GroundRegion obstacle_margin(const UavPose& pose, const CameraIntrinsics& intr, const LabelMap& labels,
                             const DepthMap& depth, const Mask& reliable, const PerceptionParams& p,
                             const GroundBox& roi);
GroundRegion hidden_ground(const UavPose& pose, const CameraIntrinsics& intr, const LabelMap& labels,
                           const Mask& reliable, const GroundBox& roi);

FramePerception perceive(const UavPose& pose, const CameraIntrinsics& intr, const CvsFrame& frame,
                         const Mask& reliable, const std::vector<Detection>& dets, const PerceptionParams& p,
                         const GroundBox& roi);

// Pixel mask split into rectangles [c0-1,c1] x [r0-1,r1] in image coordinates.
struct PixelRect {
  int r0, r1, c0, c1;
};
std::vector<PixelRect> mask_rectangles(const Mask& m);

}  // namespace smsearch
