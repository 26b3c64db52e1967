#include "smsearch/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace smsearch {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double distance_to_convex(const ConvexPolygon& c, const Point2& g) {
  if (contains(c, g)) return 0;
  double best = kInf;
  const std::size_t n = c.v.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2 a = c.v[j], b = c.v[i];
    const Point2 ab = b - a;
    const double t = std::clamp((g - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
    best = std::min(best, (a + t * ab - g).norm());
  }
  return best;
}

Prism oriented_box(const Point2& c, double yaw, double length, double width, double z0, double z1) {
  const Point2 ex(std::cos(yaw) * 0.5 * length, std::sin(yaw) * 0.5 * length);
  const Point2 ey(-std::sin(yaw) * 0.5 * width, std::cos(yaw) * 0.5 * width);
  Prism p;
  p.footprint.v = {c - ex - ey, c + ex - ey, c + ex + ey, c - ex + ey};
  p.z0 = z0;
  p.z1 = z1;
  return p;
}

}  // namespace

const char* hit_class_name(HitClass c) {
  switch (c) {
    case HitClass::None: return "none";
    case HitClass::Ground: return "ground";
    case HitClass::Obstacle: return "obstacle";
    case HitClass::Target: return "target";
    case HitClass::Uav: return "uav";
  }
  return "?";
}

double uniform01(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }
double uniform(std::mt19937_64& g, double lo, double hi) { return lo + (hi - lo) * uniform01(g); }

double wrap_angle(double a) {
  const double two_pi = 2 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  if (a > std::numbers::pi) a -= two_pi;
  return a;
}

TargetTruth step_target(const TargetTruth& t, double turn_rate, double T) {
  TargetTruth n = t;
  n.p = t.p + T * t.speed * Point2(std::cos(t.heading), std::sin(t.heading));
  n.heading = wrap_angle(t.heading + T * turn_rate);
  n.turn_rate = turn_rate;
  return n;
}

UavTruth step_uav(const UavTruth& u, double inc, double T, const std::vector<double>& U) {
  if (std::none_of(U.begin(), U.end(), [&](double c) { return std::abs(c - inc) <= 1e-12; }))
    throw std::invalid_argument("yaw increment not in the control set");
  UavTruth n = u;
  const double yaw = u.yaw + inc;
  n.p = u.p + T * u.speed * Point2(std::cos(yaw), std::sin(yaw));
  n.yaw = wrap_angle(yaw);
  return n;
}

Prism target_body(const TargetTruth& t, const TargetParams& tp) {
  return oriented_box(t.p, t.heading, tp.body.x(), tp.body.y(), 0, tp.body.z());
}

Prism uav_body(const UavTruth& u, const Vec3& d) {
  return oriented_box(u.p, u.yaw, d.x(), d.y(), u.altitude - 0.5 * d.z(), u.altitude + 0.5 * d.z());
}

double ray_prism(const Prism& p, const Vec3& o, const Vec3& d, bool allow_inside) {
  double t0 = -kInf, t1 = kInf;
  // z slab
  if (d.z() == 0) {
    if (o.z() < p.z0 || o.z() > p.z1) return kInf;
  } else {
    double a = (p.z0 - o.z()) / d.z(), b = (p.z1 - o.z()) / d.z();
    if (a > b) std::swap(a, b);
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
  }
  const auto& v = p.footprint.v;
  const std::size_t n = v.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    // inside: cross(e, x - a) >= 0 for a CCW polygon
    const Point2 e = v[i] - v[j];
    const double num = e.x() * (o.y() - v[j].y()) - e.y() * (o.x() - v[j].x());
    const double den = e.x() * d.y() - e.y() * d.x();
    if (den == 0) {
      if (num < 0) return kInf;
      continue;
    }
    const double t = -num / den;
    if (den > 0)
      t0 = std::max(t0, t);
    else
      t1 = std::min(t1, t);
    if (t0 > t1) return kInf;
  }
  if (t0 > t1 || t1 < 0) return kInf;
  if (t0 < 0) return allow_inside ? 0.0 : kInf;
  return t0;
}

RayHit ray_cast(const World& w, const Vec3& o, const Vec3& d, int exclude_uav, double horizon) {
  RayHit best{kInf, HitClass::None, -1};
  if (d.z() < 0) {
    const double t = -o.z() / d.z();
    if (t > 0) best = {t, HitClass::Ground, 0};
  }
  auto consider = [&](double t, HitClass c, int id) {
    if (t > 0 && t < best.distance) best = {t, c, id};
  };
  for (std::size_t i = 0; i < w.obstacles.size(); ++i)
    for (const auto& lv : w.obstacles[i].levels) consider(ray_prism(lv, o, d), HitClass::Obstacle, static_cast<int>(i));
  for (std::size_t j = 0; j < w.targets.size(); ++j)
    consider(ray_prism(target_body(w.targets[j], w.tp), o, d), HitClass::Target, static_cast<int>(j));
  for (std::size_t u = 0; u < w.uavs.size(); ++u) {
    if (static_cast<int>(u) == exclude_uav) continue;
    consider(ray_prism(uav_body(w.uavs[u], w.uav_body), o, d), HitClass::Uav, static_cast<int>(u));
  }
  if (!(best.distance <= horizon)) return {0, HitClass::None, -1};
  return best;
}

double obstacle_clearance(const World& w, const Point2& g) {
  double best = kInf;
  for (const auto& ob : w.obstacles) best = std::min(best, distance_to_convex(ob.base(), g));
  return best;
}

std::vector<std::string> validate_world(const World& w) {
  std::vector<std::string> out;
  auto fmt = [](const char* what, std::size_t i) { return std::string(what) + " " + std::to_string(i); };
  for (std::size_t i = 0; i < w.obstacles.size(); ++i) {
    const auto& ob = w.obstacles[i];
    if (ob.levels.empty()) {
      out.push_back(fmt("obstacle has no levels:", i));
      continue;
    }
    if (ob.levels[0].z0 != 0) out.push_back(fmt("obstacle does not stand on the ground:", i));
    for (std::size_t l = 0; l < ob.levels.size(); ++l) {
      const auto& lv = ob.levels[l];
      if (lv.footprint.v.size() < 3 || area(lv.footprint) <= 0) out.push_back(fmt("obstacle footprint not CCW convex:", i));
      if (!(lv.z1 > lv.z0)) out.push_back(fmt("obstacle level with no height:", i));
      if (l > 0) {
        const auto& below = ob.levels[l - 1];
        if (lv.z0 != below.z1) out.push_back(fmt("obstacle levels not stacked:", i));
        for (const auto& q : lv.footprint.v)
          if (!contains(below.footprint, q, 1e-9)) {
            out.push_back(fmt("obstacle footprints not nested (z-convexity):", i));
            break;
          }
      }
    }
  }
  for (std::size_t j = 0; j < w.targets.size(); ++j) {
    const auto& t = w.targets[j];
    if (!w.roi.contains(t.p)) out.push_back(fmt("target outside the RoI:", j));
    if (!(obstacle_clearance(w, t.p) > w.tp.r_s)) out.push_back(fmt("target within r_s of an obstacle:", j));
    if (t.speed < 0 || t.speed > w.tp.v_max) out.push_back(fmt("target speed outside [0, v_max]:", j));
  }
  const double half_diag = 0.5 * std::hypot(w.tp.body.x(), w.tp.body.y());
  if (half_diag > w.tp.r_t || w.tp.body.z() > w.tp.h_t) out.emplace_back("target body does not fit its cylinder");
  double top = 0;
  for (const auto& ob : w.obstacles) top = std::max(top, ob.height());
  for (std::size_t u = 0; u < w.uavs.size(); ++u) {
    if (!(w.uavs[u].altitude - 0.5 * w.uav_body.z() > top)) out.push_back(fmt("UAV not above all obstacles:", u));
    for (std::size_t v = 0; v < u; ++v)
      if (w.uavs[u].altitude == w.uavs[v].altitude) out.push_back(fmt("UAVs share an altitude:", u));
  }
  return out;
}

RoadGraph make_road_grid(const GroundBox& roi, double spacing, double margin) {
  auto lines = [&](double lo, double hi) {
    std::vector<double> v;
    for (double s = std::ceil((lo + margin) / spacing) * spacing; s <= hi - margin; s += spacing) v.push_back(s);
    return v;
  };
  const std::vector<double> xs = lines(roi.x0, roi.x1), ys = lines(roi.y0, roi.y1);
  RoadGraph g;
  if (xs.empty() && ys.empty()) return g;
  // coordinates along each axis: the crossings plus the two dead ends
  std::vector<double> ax{roi.x0 + margin}, ay{roi.y0 + margin};
  ax.insert(ax.end(), xs.begin(), xs.end());
  ay.insert(ay.end(), ys.begin(), ys.end());
  ax.push_back(roi.x1 - margin);
  ay.push_back(roi.y1 - margin);
  auto on_x = [&](double x) { return std::find(xs.begin(), xs.end(), x) != xs.end(); };
  auto on_y = [&](double y) { return std::find(ys.begin(), ys.end(), y) != ys.end(); };
  std::vector<std::vector<int>> id(ax.size(), std::vector<int>(ay.size(), -1));
  for (std::size_t i = 0; i < ax.size(); ++i)
    for (std::size_t k = 0; k < ay.size(); ++k)
      if (on_x(ax[i]) || on_y(ay[k])) {
        // nodes exist where a road passes; border points only as dead ends of a road
        const bool border_x = i == 0 || i + 1 == ax.size(), border_y = k == 0 || k + 1 == ay.size();
        if ((border_x && !on_y(ay[k])) || (border_y && !on_x(ax[i]))) continue;
        id[i][k] = static_cast<int>(g.nodes.size());
        g.nodes.emplace_back(ax[i], ay[k]);
      }
  g.adj.assign(g.nodes.size(), {});
  auto link = [&](int a, int b) {
    g.adj[a].push_back(b);
    g.adj[b].push_back(a);
  };
  for (std::size_t k = 0; k < ay.size(); ++k) {
    if (!on_y(ay[k])) continue;
    int prev = -1;
    for (std::size_t i = 0; i < ax.size(); ++i)
      if (id[i][k] >= 0) {
        if (prev >= 0) link(prev, id[i][k]);
        prev = id[i][k];
      }
  }
  for (std::size_t i = 0; i < ax.size(); ++i) {
    if (!on_x(ax[i])) continue;
    int prev = -1;
    for (std::size_t k = 0; k < ay.size(); ++k)
      if (id[i][k] >= 0) {
        if (prev >= 0) link(prev, id[i][k]);
        prev = id[i][k];
      }
  }
  return g;
}

std::vector<Obstacle> make_city(const GroundBox& roi, const CityParams& p) {
  std::mt19937_64 rng(p.seed);
  // blocks between consecutive road lines (and the RoI border)
  auto cuts = [&](double lo, double hi) {
    std::vector<double> v{lo};
    for (double s = std::ceil((lo + p.road_margin) / p.road_spacing) * p.road_spacing; s <= hi - p.road_margin;
         s += p.road_spacing)
      v.push_back(s);
    v.push_back(hi);
    return v;
  };
  const auto cx = cuts(roi.x0, roi.x1), cy = cuts(roi.y0, roi.y1);
  struct Block {
    double x0, y0, x1, y1;
  };
  std::vector<Block> blocks;
  for (std::size_t i = 0; i + 1 < cx.size(); ++i)
    for (std::size_t k = 0; k + 1 < cy.size(); ++k) {
      auto inset = [&](bool border) { return border ? p.border : p.setback; };
      Block b{cx[i] + inset(i == 0), cy[k] + inset(k == 0), cx[i + 1] - inset(i + 2 == cx.size()),
              cy[k + 1] - inset(k + 2 == cy.size())};
      if (b.x1 - b.x0 >= 8 && b.y1 - b.y0 >= 8) blocks.push_back(b);
    }
  // Fisher-Yates with our own draws for portability
  for (std::size_t i = blocks.size(); i > 1; --i) std::swap(blocks[i - 1], blocks[rng() % i]);

  std::vector<Obstacle> out;
  const double goal = p.cover_fraction * roi.area();
  double covered = 0;
  for (const auto& b : blocks) {
    if (covered >= goal) break;
    const double bw = b.x1 - b.x0, bh = b.y1 - b.y0;
    const double need = goal - covered;
    double w = uniform(rng, 0.5, 1.0) * bw, h = uniform(rng, 0.5, 1.0) * bh;
    if (w * h > need) {
      const double s = std::sqrt(need / (w * h));
      w = std::max(8.0, w * s);
      h = std::max(8.0, h * s);
    }
    const double x0 = uniform(rng, b.x0, b.x1 - w), y0 = uniform(rng, b.y0, b.y1 - h);
    const double total = uniform(rng, p.min_height, p.max_height);
    const int n_levels = 1 + static_cast<int>(rng() % 3);
    Obstacle ob;
    double lx0 = x0, ly0 = y0, lx1 = x0 + w, ly1 = y0 + h, z = 0;
    for (int l = 0; l < n_levels; ++l) {
      const double z1 = l + 1 == n_levels ? total : z + total / n_levels;
      Prism pr;
      pr.footprint.v = {{lx0, ly0}, {lx1, ly0}, {lx1, ly1}, {lx0, ly1}};
      pr.z0 = z;
      pr.z1 = z1;
      ob.levels.push_back(pr);
      z = z1;
      const double in = std::min({uniform(rng, 1.0, 4.0), 0.2 * (lx1 - lx0), 0.2 * (ly1 - ly0)});
      lx0 += in, ly0 += in, lx1 -= in, ly1 -= in;
    }
    covered += w * h;
    out.push_back(std::move(ob));
  }
  return out;
}

std::vector<TargetTruth> place_targets(const RoadGraph& g, int count, double v_max, std::mt19937_64& rng) {
  std::vector<std::pair<int, int>> edges;
  for (std::size_t a = 0; a < g.adj.size(); ++a)
    for (int b : g.adj[a])
      if (static_cast<int>(a) < b) edges.emplace_back(static_cast<int>(a), b);
  if (edges.empty() && count > 0) throw std::invalid_argument("road graph has no edges for targets");
  std::vector<TargetTruth> out;
  for (int j = 0; j < count; ++j) {
    auto [a, b] = edges[rng() % edges.size()];
    if (rng() & 1) std::swap(a, b);
    const double s = uniform(rng, 0.1, 0.9);
    TargetTruth t;
    t.p = g.nodes[a] + s * (g.nodes[b] - g.nodes[a]);
    const Point2 d = g.nodes[b] - g.nodes[a];
    t.heading = std::atan2(d.y(), d.x());
    t.speed = uniform(rng, 0.0, v_max);
    t.from_node = a;
    t.to_node = b;
    out.push_back(t);
  }
  return out;
}

void drive_target(World& w, int j, double T) {
  TargetTruth& t = w.targets[j];
  if (t.to_node >= 0 && (w.roads.nodes[t.to_node] - t.p).norm() < w.tp.capture_radius) {
    const auto& nb = w.roads.adj[t.to_node];
    std::vector<int> options;
    for (int n : nb)
      if (n != t.from_node) options.push_back(n);
    if (options.empty()) options = nb;  // dead end: U-turn
    const int next = options.empty() ? t.to_node : options[w.road_rng() % options.size()];
    t.from_node = t.to_node;
    t.to_node = next;
  }
  double turn = 0;
  if (t.to_node >= 0) {
    const Point2 d = w.roads.nodes[t.to_node] - t.p;
    const double err = wrap_angle(std::atan2(d.y(), d.x()) - t.heading);
    turn = std::clamp(err / T, -w.tp.max_turn_rate, w.tp.max_turn_rate);
  }
  t = step_target(t, turn, T);
}

}  // namespace smsearch
