#include "smsearch/simkit.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>
#include <sstream>

#include "smsearch/region_json.hpp"

namespace smsearch {

std::string metrics_csv_header() {
  return "t_s,phi_t_mean_m2,e_t_mean_m,equiv_radius_m,phi_fov_frac,phi_g_frac,phi_cg_frac,card_L,"
         "card_detected_now,card_in_fov,phi_xbar_frac,phi_xbar_hidden_frac";
}

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string opt(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

}  // namespace

std::string metrics_csv_row(const MetricsRecord& m) {
  std::ostringstream o;
  o << num(m.t) << ',' << opt(m.phi_t_mean) << ',' << opt(m.e_t_mean) << ',' << opt(m.equiv_radius) << ','
    << num(m.phi_fov_frac) << ',' << num(m.phi_g_frac) << ',' << num(m.phi_cg_frac) << ',' << m.card_L << ','
    << m.card_detected_now << ',' << m.card_in_fov << ',' << num(m.phi_xbar_frac) << ','
    << num(m.phi_xbar_hidden_frac);
  return o.str();
}

bool CommGraph::complete() const {
  for (const auto& row : adj)
    for (bool b : row)
      if (!b) return false;
  return true;
}

std::vector<int> CommGraph::neighbors(int i) const {
  std::vector<int> out;
  for (std::size_t j = 0; j < adj[i].size(); ++j)
    if (adj[i][j]) out.push_back(static_cast<int>(j));
  return out;
}

CommGraph comm_graph(const std::vector<Vec3>& positions, double range_m) {
  const std::size_t n = positions.size();
  CommGraph g;
  g.adj.assign(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      g.adj[i][j] = i == j || std::isinf(range_m) || (positions[i] - positions[j]).norm() <= range_m;
  return g;
}

Simulation::Simulation(Scenario sc) : sc_(std::move(sc)) {
  const SimConfig& c = sc_.sim;
  if (c.T_s <= 0 || c.duration_s < 0) throw std::invalid_argument("bad simulation timing");
  const double ratio = c.T_mpc_s / c.T_s;
  plan_every_ = static_cast<int>(std::lround(ratio));
  if (plan_every_ < 1 || std::abs(ratio - plan_every_) > 1e-9)
    throw std::invalid_argument("T_mpc must be an integer multiple of T");
  if (plan_every_ > sc_.mpc.h) throw std::invalid_argument("T_mpc longer than the horizon");
  steps_ = std::lround(c.duration_s / c.T_s);
  sc_.mpc.T = c.T_s;
  sc_.mpc.v_max = sc_.world.tp.v_max;
  agents_.resize(sc_.world.uavs.size());
  for (auto& a : agents_) {
    a.est = EstimatorState::initial(sc_.world.roi);
    a.frame.hidden = GroundRegion(Tag::outer);
  }
  cumulated_ = GroundRegion(Tag::inner);
}

void Simulation::plan_round() {
  const World& w = sc_.world;
  std::vector<Vec3> pos;
  for (const auto& u : w.uavs) pos.push_back(u.position());
  const CommGraph g = comm_graph(pos, sc_.sim.comm_range_m);
  std::vector<GroundRegion> chosen(agents_.size(), GroundRegion(Tag::inner));
  std::vector<PlanContext> ctxs;
  ctxs.reserve(agents_.size());
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    const PlanContext* same = nullptr;
    for (std::size_t j = 0; j < i && !same; ++j)
      if (same_estimate(agents_[j].est, agents_[i].est)) same = &ctxs[j];
    ctxs.push_back(make_context(agents_[i].est, agents_[i].frame.hidden, w.roi, sc_.mpc, same));
    PlanContext& ctx = ctxs.back();
    if (!sc_.mpc.independent) {
      std::vector<GroundRegion> prev;
      for (std::size_t j = 0; j < i; ++j)
        if (g.adj[i][j]) prev.push_back(chosen[j]);
      ctx.extra_clearing = unite_all(prev, Tag::inner);
    }
    const PlanResult r = plan(ctx, w.uavs[i], sc_.intr, sc_.mpc);
    chosen[i] = r.clearing;
    agents_[i].latched = r.chosen;
    agents_[i].has_plan = true;
    if (on_plan) on_plan(k_, static_cast<int>(i), r);
  }
}

bool same_estimate(const EstimatorState& a, const EstimatorState& b) {
  return a.identified == b.identified && a.unknown == b.unknown && a.per_target == b.per_target &&
         a.obstacle_acc == b.obstacle_acc && a.hidden_acc == b.hidden_acc;
}

MetricsRecord Simulation::step() {
  World& w = sc_.world;
  const double T = sc_.sim.T_s;
  if (round_step_ == 0) plan_round();
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    const ControlSequence& s = agents_[i].latched;
    w.uavs[i] = step_uav(w.uavs[i], round_step_ < sc_.mpc.h / 2 ? s.u1 : s.u2, T, sc_.mpc.U);
  }
  round_step_ = (round_step_ + 1) % plan_every_;
  for (std::size_t j = 0; j < w.targets.size(); ++j) drive_target(w, static_cast<int>(j), T);
  ++k_;

  const int n_targets = static_cast<int>(w.targets.size());
  // after full fusion every UAV holds the same estimate: predict it once
  std::vector<EstimatorState> predicted;
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    std::size_t same = i;
    for (std::size_t j = 0; j < i && same == i; ++j)
      if (same_estimate(agents_[j].est, agents_[i].est)) same = j;
    predicted.push_back(same < i ? predicted[same]
                                 : predict(agents_[i].est, T, w.tp.v_max, w.roi, sc_.perception.dilation_vertices));
  }
  std::vector<Broadcast> msgs;
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    Agent& a = agents_[i];
    const CvsFrame f = render(w, static_cast<int>(i), sc_.intr, sc_.cvs, static_cast<std::uint64_t>(k_));
    const Mask rel = reliable_mask(f.depth, sc_.intr, sc_.cvs.noise_lo);
    a.dets = detect(f, rel, sc_.cvs, n_targets);
    a.frame = perceive(uav_pose(w.uavs[i]), sc_.intr, f, rel, a.dets, sc_.perception, w.roi);
    a.est = measurement_update(predicted[i], a.frame, a.dets);
    a.est = update_hidden(a.est, a.frame);
    msgs.push_back(make_broadcast(a.est, a.frame, static_cast<int>(i), k_));
    if (on_frame) on_frame(k_, static_cast<int>(i), f, a.frame, a.dets);
  }

  std::vector<Vec3> pos;
  for (const auto& u : w.uavs) pos.push_back(u.position());
  const CommGraph g = comm_graph(pos, sc_.sim.comm_range_m);
  if (share_identical_fusion && g.complete()) {
    const EstimatorState fused = fuse(agents_[0].est, msgs);
    for (auto& a : agents_) a.est = fused;
  } else {
    std::vector<EstimatorState> next;
    for (std::size_t i = 0; i < agents_.size(); ++i) {
      std::vector<Broadcast> mine;
      for (int j : g.neighbors(static_cast<int>(i))) mine.push_back(msgs[j]);
      next.push_back(fuse(agents_[i].est, std::move(mine)));
    }
    for (std::size_t i = 0; i < agents_.size(); ++i) agents_[i].est = std::move(next[i]);
  }

  std::vector<GroundRegion> seen{cumulated_};
  for (const auto& a : agents_) seen.push_back(a.frame.free_ground);
  cumulated_ = unite_all(seen, Tag::inner);

  check_soundness();
  return metrics(g);
}

void Simulation::check_soundness() const {
  const World& w = sc_.world;
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    const EstimatorState& s = agents_[i].est;
    for (std::size_t j = 0; j < w.targets.size(); ++j) {
      const Point2 p = w.targets[j].p;
      const bool known = s.knows(static_cast<int>(j));
      const bool ok = known ? s.per_target.at(static_cast<int>(j)).contains(p) : s.unknown.contains(p);
      if (!ok) {
        std::ostringstream m;
        m << "soundness violation at step " << k_ << ": UAV " << i << ", target " << j << " at (" << p.x() << ", "
          << p.y() << ") is outside its " << (known ? "set estimate" : "unknown-target region");
        throw SoundnessViolation(m.str());
      }
    }
  }
}

MetricsRecord Simulation::metrics(const CommGraph& g) const {
  const World& w = sc_.world;
  const double ag = w.roi.area();
  MetricsRecord m;
  m.t = k_ * sc_.sim.T_s;

  // per-UAV quantities: UAV 0 when everyone shares the same estimate, else the mean
  const std::size_t n_eval = g.complete() ? 1 : agents_.size();
  double phi_t = 0, e_t = 0, card = 0, xbar = 0, xbar_h = 0;
  int with_ids = 0;
  for (std::size_t i = 0; i < n_eval; ++i) {
    const EstimatorState& s = agents_[i].est;
    card += static_cast<double>(s.identified.size());
    xbar += area(s.unknown);
    xbar_h += area(intersect(s.unknown, s.hidden_acc));
    if (s.identified.empty()) continue;
    double a = 0, e = 0;
    for (int j : s.identified) {
      const GroundRegion& x = s.per_target.at(j);
      a += area(x);
      e += (w.targets[j].p - barycenter(x)).norm();
    }
    phi_t += a / static_cast<double>(s.identified.size());
    e_t += e / static_cast<double>(s.identified.size());
    ++with_ids;
  }
  const double ne = static_cast<double>(n_eval);
  m.card_L = static_cast<int>(std::lround(card / ne));
  m.phi_xbar_frac = xbar / ne / ag;
  m.phi_xbar_hidden_frac = xbar_h / ne / ag;
  if (with_ids > 0) {
    m.phi_t_mean = phi_t / with_ids;
    m.e_t_mean = e_t / with_ids;
    m.equiv_radius = std::sqrt(*m.phi_t_mean / std::numbers::pi);
  }

  std::vector<ConvexPolygon> fovs;
  std::vector<GroundRegion> free;
  std::set<int> now;
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    fovs.push_back(fov_ground_polygon(uav_pose(w.uavs[i]), sc_.intr, &w.roi));
    free.push_back(agents_[i].frame.free_ground);
    for (const auto& d : agents_[i].dets) now.insert(d.target_id);
  }
  m.phi_fov_frac = area(GroundRegion::from_convex(fovs, Tag::inner)) / ag;
  m.phi_g_frac = area(unite_all(free, Tag::inner)) / ag;
  m.phi_cg_frac = area(cumulated_) / ag;
  m.card_detected_now = static_cast<int>(now.size());
  for (const auto& t : w.targets) {
    for (const auto& f : fovs)
      if (!f.empty() && contains(f, t.p)) {
        ++m.card_in_fov;
        break;
      }
  }
  return m;
}

nlohmann::json Simulation::snapshot() const {
  const World& w = sc_.world;
  nlohmann::json j;
  j["step"] = k_;
  j["t_s"] = k_ * sc_.sim.T_s;
  j["targets"] = nlohmann::json::array();
  for (const auto& t : w.targets) j["targets"].push_back({{"x_m", t.p.x()}, {"y_m", t.p.y()}, {"heading_rad", t.heading}});
  j["uavs"] = nlohmann::json::array();
  for (const auto& u : w.uavs)
    j["uavs"].push_back({{"x_m", u.p.x()}, {"y_m", u.p.y()}, {"altitude_m", u.altitude}, {"yaw_rad", u.yaw}});
  j["estimates"] = nlohmann::json::array();
  for (const auto& a : agents_) {
    nlohmann::json t = nlohmann::json::object();
    for (const auto& [id, x] : a.est.per_target) t[std::to_string(id)] = to_json(x);
    j["estimates"].push_back({{"identified", a.est.identified},
                              {"unknown", to_json(a.est.unknown)},
                              {"per_target", t},
                              {"obstacle", to_json(a.est.obstacle_acc)},
                              {"hidden", to_json(a.est.hidden_acc)},
                              {"free_ground_frame", to_json(a.frame.free_ground)}});
  }
  return j;
}

double fusion_disagreement(const std::vector<Agent>& agents) {
  double worst = 0;
  for (std::size_t i = 1; i < agents.size(); ++i) {
    const EstimatorState &a = agents[0].est, &b = agents[i].est;
    if (a.identified != b.identified) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, symmetric_difference_area(a.unknown, b.unknown));
    worst = std::max(worst, symmetric_difference_area(a.obstacle_acc, b.obstacle_acc));
    worst = std::max(worst, symmetric_difference_area(a.hidden_acc, b.hidden_acc));
    for (int j : a.identified)
      worst = std::max(worst, symmetric_difference_area(a.per_target.at(j), b.per_target.at(j)));
  }
  return worst;
}

}  // namespace smsearch
