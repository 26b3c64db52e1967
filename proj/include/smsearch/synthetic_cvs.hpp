#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "smsearch/camera.hpp"
#include "smsearch/world.hpp"

namespace smsearch {

enum class Label : std::uint8_t { Ground, Target, Obstacle, Unknown };
const char* label_name(Label l);

struct CvsParams {
  double noise_lo = -0.01;
  double noise_hi = 0.01;
  int min_pixels = 20;
  double d_ident = 150;
  int box_pad = 2;
  bool strict_labels = true;
  std::uint64_t seed = 0;
};

// Row-major N_r x N_c image; pixel (r,c), 1-based, lives at (r-1)*N_c + (c-1).
template <class T>
struct Image {
  int rows = 0;
  int cols = 0;
  std::vector<T> data;
  Image() = default;
  Image(int r, int c, T fill) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, fill) {}
  T& at(int r, int c) { return data[static_cast<std::size_t>(r - 1) * cols + (c - 1)]; }
  const T& at(int r, int c) const { return data[static_cast<std::size_t>(r - 1) * cols + (c - 1)]; }
};

using DepthMap = Image<double>;  // +inf where the centre ray hits nothing
using LabelMap = Image<Label>;
using Mask = Image<std::uint8_t>;

struct Detection {
  int target_id = -1;
  int r_lo = 0, r_hi = 0, c_lo = 0, c_hi = 0;  // inclusive pixel ranges
  bool contains(int r, int c) const { return r >= r_lo && r <= r_hi && c >= c_lo && c <= c_hi; }
};

struct CvsFrame {
  DepthMap depth;
  LabelMap labels;
  // Ground truth of each centre ray; never handed to the estimator.
  Image<RayHit> truth;
};

UavPose uav_pose(const UavTruth& u);

// Per-pixel multiplicative noise in [lo, hi], a pure function of its inputs.
double pixel_noise(std::uint64_t seed, std::uint64_t frame, int uav, int pixel, double lo, double hi);

CvsFrame render(const World& w, int uav, const CameraIntrinsics& intr, const CvsParams& p, std::uint64_t frame);

// D / (1 + w_lo) <= d_max
Mask reliable_mask(const DepthMap& d, const CameraIntrinsics& intr, double noise_lo);

std::vector<Detection> detect(const CvsFrame& f, const Mask& reliable, const CvsParams& p, int n_targets);

// The half-open segment from the optical centre to the target's ground point
// meets the target body. Vacuously true when the point is outside the FoV.
bool check_observation_assumption(const World& w, int uav, const CameraIntrinsics& intr, int j);

void write_pgm(const std::string& path, const DepthMap& d, double metres_per_level);
void write_pgm(const std::string& path, const LabelMap& l);

}  // namespace smsearch
