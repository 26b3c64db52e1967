#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "smsearch/geometry.hpp"

namespace smsearch {

// Vertical extrusion of a convex footprint between z0 and z1.
struct Prism {
  ConvexPolygon footprint;  // counter-clockwise
  double z0 = 0;
  double z1 = 0;
};

// Stack of prisms with nested footprints, level 0 on the ground.
struct Obstacle {
  std::vector<Prism> levels;
  double height() const { return levels.empty() ? 0.0 : levels.back().z1; }
  const ConvexPolygon& base() const { return levels.front().footprint; }
};

struct TargetTruth {
  Point2 p = Point2::Zero();
  double heading = 0;
  double speed = 0;      // constant
  double turn_rate = 0;  // last applied
  // road-following state
  int from_node = -1;
  int to_node = -1;
};

struct UavTruth {
  Point2 p = Point2::Zero();
  double altitude = 60;
  double yaw = 0;
  double speed = 5;
  Vec3 position() const { return {p.x(), p.y(), altitude}; }
};

enum class HitClass { None, Ground, Obstacle, Target, Uav };
const char* hit_class_name(HitClass c);

struct RayHit {
  double distance = 0;
  HitClass cls = HitClass::None;
  int id = -1;
};

struct RoadGraph {
  std::vector<Point2> nodes;
  std::vector<std::vector<int>> adj;
};

struct TargetParams {
  double v_max = 1.0;
  double r_t = 2.5;
  double h_t = 2.0;
  double r_s = 3.0;
  Vec3 body{4.6, 1.8, 1.5};  // length, width, height
  double max_turn_rate = 0.6;
  double capture_radius = 2.0;
};

struct World {
  GroundBox roi;
  std::vector<Obstacle> obstacles;
  std::vector<TargetTruth> targets;
  std::vector<UavTruth> uavs;
  RoadGraph roads;
  TargetParams tp;
  Vec3 uav_body{0.4, 0.4, 0.2};
  std::mt19937_64 road_rng{0};
};

// Uniform [0,1) from the raw 64-bit stream; identical on every standard library.
double uniform01(std::mt19937_64& g);
double uniform(std::mt19937_64& g, double lo, double hi);
double wrap_angle(double a);  // (-pi, pi]

TargetTruth step_target(const TargetTruth& t, double turn_rate, double T);
// Throws std::invalid_argument when the increment is not in U.
UavTruth step_uav(const UavTruth& u, double yaw_increment, double T, const std::vector<double>& U);

// Oriented box of a target (footprint + height).
Prism target_body(const TargetTruth& t, const TargetParams& tp);
Prism uav_body(const UavTruth& u, const Vec3& dims);

// Entry distance of the ray into the prism, or +inf. A ray starting inside
// reports its start (0) only when `allow_inside`.
double ray_prism(const Prism& p, const Vec3& origin, const Vec3& dir, bool allow_inside = false);

// Nearest hit; `exclude_uav` skips that UAV's own body.
RayHit ray_cast(const World& w, const Vec3& origin, const Vec3& dir, int exclude_uav = -1, double horizon = 1e4);

// Distance from a ground point to the union of obstacle footprints.
double obstacle_clearance(const World& w, const Point2& g);

std::vector<std::string> validate_world(const World& w);

// Road grid with lines at multiples of `spacing` strictly inside the RoI,
// ending `margin` from its border.
RoadGraph make_road_grid(const GroundBox& roi, double spacing, double margin);

struct CityParams {
  double road_spacing = 100;
  double road_margin = 10;
  double setback = 12;
  double border = 5;
  double cover_fraction = 0.05;
  double min_height = 10;
  double max_height = 49;
  std::uint64_t seed = 1;
};
std::vector<Obstacle> make_city(const GroundBox& roi, const CityParams& p);

// Places targets on random road edges, heading along the edge.
std::vector<TargetTruth> place_targets(const RoadGraph& g, int count, double v_max, std::mt19937_64& rng);

// Pure pursuit towards the next road node, then one unicycle step.
void drive_target(World& w, int j, double T);

}  // namespace smsearch
