#include "smsearch/scenario.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace smsearch {

std::uint64_t config_digest(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

nlohmann::json parse_config(const std::string& text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t purpose) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (purpose + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

namespace {

// Reads keys from one object and remembers which ones were used.
class Section {
 public:
  Section(const nlohmann::json& root, const std::string& name, std::vector<std::string>& errors)
      : name_(name), errors_(errors) {
    if (root.contains(name)) {
      if (!root.at(name).is_object()) errors_.push_back(name + ": expected an object");
      else j_ = root.at(name);
    }
  }
  Section(const nlohmann::json& obj, std::string name, std::vector<std::string>& errors, bool)
      : j_(obj), name_(std::move(name)), errors_(errors) {}

  bool has(const std::string& k) const { return j_.contains(k); }

  template <class T>
  T get(const std::string& k, T fallback) {
    used_.insert(k);
    if (!j_.contains(k)) return fallback;
    try {
      return j_.at(k).get<T>();
    } catch (const nlohmann::json::exception&) {
      errors_.push_back(name_ + "." + k + ": wrong type");
      return fallback;
    }
  }

  const nlohmann::json& raw(const std::string& k) {
    used_.insert(k);
    return j_.at(k);
  }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!used_.count(k)) errors_.push_back(name_ + "." + k + ": unknown key");
  }

 private:
  nlohmann::json j_ = nlohmann::json::object();
  std::string name_;
  std::vector<std::string>& errors_;
  std::set<std::string> used_;
};

Vec3 vec3(const std::vector<double>& v, const Vec3& fallback, const std::string& key, std::vector<std::string>& errors) {
  if (v.empty()) return fallback;
  if (v.size() != 3) {
    errors.push_back(key + ": expected 3 numbers");
    return fallback;
  }
  return {v[0], v[1], v[2]};
}

Obstacle explicit_obstacle(const nlohmann::json& b, std::size_t idx, std::vector<std::string>& errors) {
  Obstacle o;
  const std::string name = "obstacles.buildings[" + std::to_string(idx) + "]";
  Section s(b, name, errors, true);
  if (!b.contains("levels") || !b.at("levels").is_array()) {
    errors.push_back(name + ".levels: missing");
    return o;
  }
  for (const auto& l : s.raw("levels")) {
    Section ls(l, name + ".levels", errors, true);
    Prism p;
    p.z0 = ls.get<double>("z0_m", 0);
    p.z1 = ls.get<double>("z1_m", 0);
    std::vector<Point2> pts;
    for (const auto& xy : ls.get<std::vector<std::vector<double>>>("footprint_m", {}))
      if (xy.size() == 2) pts.emplace_back(xy[0], xy[1]);
    p.footprint = convex_hull(pts);
    if (p.footprint.empty() || p.z1 <= p.z0) errors.push_back(name + ": degenerate level");
    ls.finish();
    o.levels.push_back(p);
  }
  s.finish();
  return o;
}

}  // namespace

Scenario load_scenario(const nlohmann::json& cfg, std::uint64_t seed) {
  if (!cfg.is_object()) throw ConfigError("config must be a JSON object");
  std::vector<std::string> errors;
  static const std::set<std::string> sections{"roi", "roads", "obstacles", "targets", "uavs", "camera",
                                              "cvs", "mpc",   "sim",       "geometry"};
  for (const auto& [k, v] : cfg.items())
    if (!sections.count(k)) errors.push_back(k + ": unknown section");

  Scenario sc;
  World& w = sc.world;

  Section roi(cfg, "roi", errors);
  w.roi = GroundBox::centered(roi.get<double>("half_width_m", 250));
  roi.finish();

  Section roads(cfg, "roads", errors);
  const double spacing = roads.get<double>("spacing_m", 100), margin = roads.get<double>("margin_m", 10);
  roads.finish();
  w.roads = make_road_grid(w.roi, spacing, margin);

  Section obs(cfg, "obstacles", errors);
  const std::string gen = obs.get<std::string>("generator", "city");
  if (gen == "city") {
    CityParams cp;
    cp.road_spacing = spacing;
    cp.road_margin = margin;
    cp.setback = obs.get<double>("setback_m", cp.setback);
    cp.border = obs.get<double>("border_m", cp.border);
    cp.cover_fraction = obs.get<double>("cover_fraction", cp.cover_fraction);
    cp.min_height = obs.get<double>("min_height_m", cp.min_height);
    cp.max_height = obs.get<double>("max_height_m", cp.max_height);
    cp.seed = obs.has("seed") ? obs.get<std::uint64_t>("seed", 0) : derive_seed(seed, 1);
    w.obstacles = make_city(w.roi, cp);
  } else if (gen == "explicit") {
    if (obs.has("buildings")) {
      std::size_t i = 0;
      for (const auto& b : obs.raw("buildings")) w.obstacles.push_back(explicit_obstacle(b, i++, errors));
    }
  } else if (gen != "none") {
    errors.push_back("obstacles.generator: expected city, explicit or none");
  }
  obs.finish();

  Section tg(cfg, "targets", errors);
  const int n_targets = tg.get<int>("count", 8);
  w.tp.v_max = tg.get<double>("v_max_mps", w.tp.v_max);
  w.tp.r_t = tg.get<double>("r_t_m", w.tp.r_t);
  w.tp.h_t = tg.get<double>("h_t_m", w.tp.h_t);
  w.tp.r_s = tg.get<double>("r_s_m", w.tp.r_s);
  w.tp.body = vec3(tg.get<std::vector<double>>("body_m", {}), w.tp.body, "targets.body_m", errors);
  w.tp.max_turn_rate = tg.get<double>("max_turn_rate_radps", w.tp.max_turn_rate);
  w.tp.capture_radius = tg.get<double>("capture_radius_m", w.tp.capture_radius);
  tg.finish();
  if (n_targets < 0) errors.push_back("targets.count: negative");
  std::mt19937_64 place_rng(derive_seed(seed, 2));
  if (n_targets > 0 && w.roads.nodes.empty()) errors.push_back("targets: the road grid is empty");
  else w.targets = place_targets(w.roads, std::max(n_targets, 0), w.tp.v_max, place_rng);
  w.road_rng.seed(derive_seed(seed, 3));

  Section uv(cfg, "uavs", errors);
  const int n_uavs = uv.get<int>("count", 4);
  std::vector<double> alt = uv.get<std::vector<double>>("altitudes_m", {55, 60, 65, 70});
  const std::vector<double> launch = uv.get<std::vector<double>>("launch_xy_m", {-260, -260});
  const double yaw = uv.get<double>("launch_yaw_rad", std::numbers::pi / 4);
  const double speed = uv.get<double>("speed_mps", 5);
  w.uav_body = vec3(uv.get<std::vector<double>>("body_m", {}), w.uav_body, "uavs.body_m", errors);
  uv.finish();
  if (n_uavs < 1) errors.push_back("uavs.count: at least one UAV");
  if (static_cast<int>(alt.size()) != n_uavs) errors.push_back("uavs.altitudes_m: one altitude per UAV");
  if (launch.size() != 2) errors.push_back("uavs.launch_xy_m: expected 2 numbers");
  for (int i = 0; i < n_uavs && i < static_cast<int>(alt.size()) && launch.size() == 2; ++i) {
    UavTruth u;
    u.p = {launch[0], launch[1]};
    u.altitude = alt[i];
    u.yaw = yaw;
    u.speed = speed;
    w.uavs.push_back(u);
  }

  Section cam(cfg, "camera", errors);
  sc.intr = CameraIntrinsics::from_aperture(cam.get<int>("rows", 360), cam.get<int>("cols", 480),
                                            cam.get<double>("aperture_rad", std::numbers::pi / 4),
                                            cam.get<double>("theta_rad", std::numbers::pi / 6),
                                            cam.get<double>("d_max_m", 300));
  cam.finish();

  Section cv(cfg, "cvs", errors);
  sc.cvs.noise_lo = cv.get<double>("noise_lo", sc.cvs.noise_lo);
  sc.cvs.noise_hi = cv.get<double>("noise_hi", sc.cvs.noise_hi);
  sc.cvs.min_pixels = cv.get<int>("min_pixels", sc.cvs.min_pixels);
  sc.cvs.d_ident = cv.get<double>("identification_range_m", sc.cvs.d_ident);
  sc.cvs.box_pad = cv.get<int>("box_pad_px", sc.cvs.box_pad);
  sc.cvs.strict_labels = cv.get<bool>("strict_labels", sc.cvs.strict_labels);
  sc.cvs.seed = derive_seed(seed, 4);
  cv.finish();
  if (!(sc.cvs.noise_lo > -1 && sc.cvs.noise_lo <= sc.cvs.noise_hi)) errors.push_back("cvs: need -1 < noise_lo <= noise_hi");

  Section geo(cfg, "geometry", errors);
  sc.perception.w_lo = sc.cvs.noise_lo;
  sc.perception.w_hi = sc.cvs.noise_hi;
  sc.perception.r_t = w.tp.r_t;
  sc.perception.r_s = w.tp.r_s;
  sc.perception.dilation_vertices = geo.get<int>("dilation_vertices", sc.perception.dilation_vertices);
  sc.perception.margin_cell = geo.get<double>("margin_cell_m", sc.perception.margin_cell);
  geo.finish();
  if (sc.perception.dilation_vertices < 3) errors.push_back("geometry.dilation_vertices: at least 3");

  Section mpc(cfg, "mpc", errors);
  sc.mpc.h = mpc.get<int>("h", 12);
  sc.sim.T_mpc_s = mpc.get<double>("t_mpc_s", 3);
  sc.mpc.lambda = mpc.get<double>("lambda", 1);
  const double pi = std::numbers::pi;
  sc.mpc.U = mpc.get<std::vector<double>>("control_set_rad", {-pi / 18, -pi / 36, 0, pi / 36, pi / 18});
  sc.mpc.independent = mpc.get<bool>("independent_planning", false);
  mpc.finish();
  if (sc.mpc.h <= 0 || sc.mpc.h % 2) errors.push_back("mpc.h: positive and even");
  if (sc.mpc.U.empty()) errors.push_back("mpc.control_set_rad: empty");

  Section sim(cfg, "sim", errors);
  sc.sim.duration_s = sim.get<double>("duration_s", 300);
  sc.sim.T_s = sim.get<double>("t_s", 0.5);
  if (sim.has("comm_range_m") && !sim.raw("comm_range_m").is_null())
    sc.sim.comm_range_m = sim.get<double>("comm_range_m", 0);
  else if (sim.has("comm_range_m"))
    sim.raw("comm_range_m");  // null: unlimited
  sim.finish();
  sc.sim.seed = seed;
  if (sc.sim.T_s <= 0) errors.push_back("sim.t_s: positive");
  else {
    const double r = sc.sim.T_mpc_s / sc.sim.T_s;
    if (r < 1 || std::abs(r - std::round(r)) > 1e-9) errors.push_back("mpc.t_mpc_s: integer multiple of sim.t_s");
    else if (std::lround(r) > sc.mpc.h) errors.push_back("mpc.t_mpc_s: longer than the horizon");
  }

  if (errors.empty())
    for (const auto& e : validate_world(w)) errors.push_back("world: " + e);
  if (!errors.empty()) {
    std::string msg = "invalid config:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  return sc;
}

}  // namespace smsearch
