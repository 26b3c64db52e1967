// Acceptance checks. One PASS/FAIL line per criterion; exit status 0 only if
// every selected criterion passes.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "raster_oracle.hpp"
#include "smsearch/runner.hpp"
#include "smsearch/scenario.hpp"

using namespace smsearch;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;
using clk = std::chrono::steady_clock;

double since(clk::time_point t0) { return std::chrono::duration<double>(clk::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
  std::vector<std::string> failed;  // named sub-checks that failed
};

std::string fmt(const char* f, auto... a) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

Scenario scenario_from(const fs::path& cfg, std::uint64_t seed) {
  return load_scenario(parse_config(read_text(cfg.string())), seed);
}

// Membership of every true target in the estimate of every UAV, checked here
// rather than trusted to the simulation's own check.
int enclosure_misses(const Simulation& sim) {
  int miss = 0;
  for (const auto& a : sim.agents())
    for (std::size_t j = 0; j < sim.world().targets.size(); ++j) {
      const Point2 p = sim.world().targets[j].p;
      const int id = static_cast<int>(j);
      const bool ok = std::ranges::count(a.est.identified, id) ? a.est.per_target.at(id).contains(p) : a.est.unknown.contains(p);
      miss += !ok;
    }
  return miss;
}

Outcome soundness(const fs::path& configs) {
  const auto t0 = clk::now();
  int violations = 0;
  long steps = 0;
  std::string first;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Simulation sim(scenario_from(configs / "desk.json", seed));
    try {
      while (!sim.done()) {
        sim.step();
        ++steps;
        const int m = enclosure_misses(sim);
        if (m && first.empty()) first = fmt(" first at seed %llu step %ld", (unsigned long long)seed, sim.k());
        violations += m;
      }
    } catch (const SoundnessViolation& e) {
      ++violations;
      if (first.empty()) first = fmt(" seed %llu: %s", (unsigned long long)seed, e.what());
    }
  }
  const double dt = since(t0);
  return {violations == 0 && dt < 300,
          fmt("10 desk runs, %ld steps, %d violations, %.1f s (budget 300 s)", steps, violations, dt) + first};
}

// Facets of the hull of a small point set by brute force over triples.
struct Plane {
  Vec3 n;
  double b;
};
std::vector<Plane> hull_planes(const std::vector<Vec3>& p) {
  std::vector<Plane> out;
  double scale = 0;
  for (const auto& q : p) scale = std::max(scale, q.norm());
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j)
      for (std::size_t k = j + 1; k < p.size(); ++k) {
        Vec3 n = (p[j] - p[i]).cross(p[k] - p[i]);
        if (n.norm() < 1e-12 * scale * scale) continue;
        n.normalize();
        const double b = n.dot(p[i]);
        int above = 0, below = 0;
        for (const auto& q : p) {
          const double s = n.dot(q) - b;
          above += s > 1e-9 * scale;
          below += s < -1e-9 * scale;
        }
        if (above == 0) out.push_back({n, b});
        if (below == 0) out.push_back({-n, -b});
      }
  return out;
}

Outcome approximation_direction(const fs::path& configs) {
  std::mt19937_64 rng(2);
  const Scenario full = scenario_from(configs / "full.json", 1);
  const CameraIntrinsics& intr = full.intr;

  // pixel frusta
  long frustum_escapes = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const UavPose pose{{uniform(rng, -200, 200), uniform(rng, -200, 200), uniform(rng, 50, 70)},
                       uniform(rng, -kPi, kPi), Vec3::Zero()};
    const PixelCoord px{1 + static_cast<int>(rng() % intr.n_rows), 1 + static_cast<int>(rng() % intr.n_cols)};
    const double D = uniform(rng, 5, intr.d_max);
    const TruncatedPyramid tp = pixel_frustum(pose, intr, px, D, full.cvs.noise_lo, full.cvs.noise_hi);
    std::vector<Vec3> pts(tp.near.begin(), tp.near.end());
    pts.insert(pts.end(), tp.far.begin(), tp.far.end());
    const auto planes = hull_planes(pts);
    const DepthInterval di = depth_interval(D, full.cvs.noise_lo, full.cvs.noise_hi);
    const Vec3 c = optical_center(pose);
    for (int s = 0; s < 10000; ++s) {
      const Vec3 v = pixel_ray_world(pose, intr, px.col - uniform01(rng), px.row - uniform01(rng));
      const Vec3 x = c + uniform(rng, di.lo, di.hi) * v;
      for (const auto& pl : planes)
        if (pl.n.dot(x) > pl.b + 1e-9 * D) {
          ++frustum_escapes;
          break;
        }
    }
  }

  // obstacle margins seen along desk runs
  long margin_vertices = 0, margin_far = 0;
  double worst_margin = 0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    Simulation sim(scenario_from(configs / "desk.json", seed));
    const double r_s = sim.world().tp.r_s;
    for (int k = 0; k < 60 && !sim.done(); ++k) {
      sim.step();
      for (const auto& a : sim.agents())
        for (const auto& poly : a.frame.obstacle_margin.polygons())
          for (const auto& g : poly.outer) {
            const double d = obstacle_clearance(sim.world(), to_point(g));
            worst_margin = std::max(worst_margin, d);
            ++margin_vertices;
            margin_far += d > r_s + 1e-6;
          }
    }
  }

  // Minkowski sums: every edge offset along its normal and every vertex arc
  // belongs to the exact sum, and together they cover its boundary.
  long dilate_escapes = 0;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<std::vector<Point2>> rings;
    for (int r = 0; r < 3; ++r) {
      const double cx = uniform(rng, -8, 8), cy = uniform(rng, -8, 8);
      const int n = 5 + static_cast<int>(rng() % 8);
      std::vector<double> ang;
      for (int i = 0; i < n; ++i) ang.push_back(uniform(rng, 0, 2 * kPi));
      std::sort(ang.begin(), ang.end());
      std::vector<Point2> ring;
      for (double a : ang) {
        const double rr = uniform(rng, 1, 6);
        ring.emplace_back(cx + rr * std::cos(a), cy + rr * std::sin(a));
      }
      rings.push_back(ring);
    }
    const GroundRegion reg = GroundRegion::from_rings(rings, Tag::exact);
    const double rho = uniform(rng, 0.2, 4);
    const GroundRegion dil = dilate_outer(reg, rho, full.perception.dilation_vertices);
    std::vector<std::vector<Point2>> edges;
    for (const auto& p : reg.polygons()) {
      auto add = [&](const Ring& r) {
        std::vector<Point2> v;
        for (const auto& g : r) v.push_back(to_point(g));
        edges.push_back(v);
      };
      add(p.outer);
      for (const auto& h : p.holes) add(h);
    }
    for (int s = 0; s < 1000; ++s) {
      const auto& ring = edges[rng() % edges.size()];
      const std::size_t i = rng() % ring.size(), j = (i + 1) % ring.size();
      Point2 x;
      if (rng() % 2) {
        const Point2 d = ring[j] - ring[i];
        const Point2 n = Point2(d.y(), -d.x()).normalized() * (rng() % 2 ? rho : -rho);
        x = ring[i] + uniform01(rng) * d + n;
      } else {
        const double a = uniform(rng, 0, 2 * kPi);
        x = ring[i] + rho * Point2(std::cos(a), std::sin(a));
      }
      dilate_escapes += !dil.contains(x);
    }
  }
  const bool pass = frustum_escapes == 0 && margin_far == 0 && margin_vertices > 0 && dilate_escapes == 0;
  return {pass, fmt("frustum escapes %ld / 1e6; margin vertices %ld, beyond r_s %ld (worst %.6f m); "
                    "dilation escapes %ld / 1e4",
                    frustum_escapes, margin_vertices, margin_far, worst_margin, dilate_escapes)};
}

Outcome depth_example() {
  const DepthInterval d = depth_interval(201, -0.01, 0.01);
  auto sig4 = [](double v) {
    const double q = std::pow(10, std::floor(std::log10(std::abs(v))) - 3);
    return std::round(v / q) * q;
  };
  const bool pass = sig4(d.lo) == sig4(199.01) && sig4(d.hi) == sig4(203.03);
  return {pass, fmt("D=201 m, w in [-1%%, 1%%] -> [%.4f, %.4f] m", d.lo, d.hi)};
}

Outcome fusion(const fs::path& configs) {
  Simulation sim(scenario_from(configs / "desk.json", 1));
  sim.share_identical_fusion = false;
  double worst = 0;
  long steps = 0;
  try {
    while (!sim.done()) {
      sim.step();
      ++steps;
      worst = std::max(worst, fusion_disagreement(sim.agents()));
    }
  } catch (const std::exception& e) {
    return {false, std::string("run aborted: ") + e.what()};
  }
  return {worst < 1e-3, fmt("%ld steps, independent fusion, largest disagreement %.3g m^2", steps, worst)};
}

Outcome full_run(const fs::path& configs, const std::string& csv_out) {
  const auto t0 = clk::now();
  Simulation sim(scenario_from(configs / "full.json", 1));
  std::ofstream csv;
  if (!csv_out.empty()) csv.open(csv_out), csv << metrics_csv_header() << '\n';
  MetricsRecord m;
  std::optional<double> all_found;
  long bad_rows = 0, rows = 0;
  double worst_ratio = 0;
  try {
    while (!sim.done()) {
      m = sim.step();
      if (csv.is_open()) csv << metrics_csv_row(m) << '\n';
      if (!all_found && m.card_L == static_cast<int>(sim.world().targets.size())) all_found = m.t;
      if (m.e_t_mean) {
        ++rows;
        worst_ratio = std::max(worst_ratio, *m.e_t_mean / *m.equiv_radius);
        bad_rows += *m.e_t_mean > *m.equiv_radius;
      }
    }
  } catch (const std::exception& e) {
    return {false, fmt("aborted at t=%.1f s after %.0f s: ", m.t, since(t0)) + e.what()};
  }
  const double dt = since(t0);
  const bool found = all_found && *all_found <= 300;
  std::vector<std::string> failed;
  if (!found) failed.push_back("all_identified");
  if (m.phi_cg_frac < 0.85) failed.push_back("cumulated_ground");
  if (bad_rows) failed.push_back("e_t_radius");
  if (dt > 1800) failed.push_back("runtime");
  return {failed.empty(), fmt("all targets identified at %s; final cumulated ground %.3f (>= 0.85); e_t > equivalent radius "
                    "on %ld of %ld rows (worst ratio %.3f); %.0f s (budget 1800 s)",
                    all_found ? fmt("%.1f s", *all_found).c_str() : "never", m.phi_cg_frac, bad_rows, rows,
                    worst_ratio, dt),
          failed};
}

EstimatorState random_state(std::mt19937_64& rng, const GroundBox& roi) {
  EstimatorState s = EstimatorState::initial(roi);
  std::vector<GroundRegion> parts;
  const double h = 0.9 * (roi.x1 - roi.x0) / 2;
  const int n = 1 + static_cast<int>(rng() % 4);
  for (int i = 0; i < n; ++i)
    parts.push_back(GroundRegion::from_convex(
        regular_polygon({uniform(rng, -h, h), uniform(rng, -h, h)}, uniform(rng, 3, 40), 12), Tag::outer));
  s.unknown = unite_all(parts, Tag::outer);
  if (rng() % 2) {
    s.identified = {0};
    s.per_target[0] = GroundRegion::from_convex(regular_polygon({uniform(rng, -h, h), uniform(rng, -h, h)}, 4, 12),
                                                Tag::outer);
  }
  return s;
}

Outcome planner(const fs::path& configs) {
  const Scenario sc = scenario_from(configs / "full.json", 1);
  MpcParams p = sc.mpc;
  p.T = sc.sim.T_s;
  p.v_max = sc.world.tp.v_max;
  const GroundBox& roi = sc.world.roi;
  std::mt19937_64 rng(6);
  int exact = 0;
  const auto cands = enumerate_candidates(p.U, p.h);
  for (int trial = 0; trial < 100; ++trial) {
    const EstimatorState s = random_state(rng, roi);
    const GroundRegion hidden =
        rng() % 2 ? GroundRegion::from_convex(regular_polygon({uniform(rng, -200, 200), uniform(rng, -200, 200)}, 30, 12),
                                              Tag::outer)
                  : GroundRegion(Tag::outer);
    UavTruth u;
    u.p = {uniform(rng, -260, 260), uniform(rng, -260, 260)};
    u.yaw = uniform(rng, -kPi, kPi);
    u.altitude = uniform(rng, 50, 70);
    u.speed = sc.world.uavs[0].speed;
    const PlanContext ctx = make_context(s, hidden, roi, p);
    const PlanResult r = plan(ctx, u, sc.intr, p);
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& c : cands) lo = std::min(lo, score(ctx, u, sc.intr, c, p).j);
    exact += r.j == lo;
  }
  return {exact == 100, fmt("%d of 100 random states: chosen score equals the brute-force minimum over %zu candidates",
                            exact, cands.size())};
}

oracle::Shape shape_of(const std::vector<Point2>& ring) {
  oracle::RingD r;
  for (const auto& p : ring) r.push_back({p.x(), p.y()});
  return {r};
}

Outcome geometry_oracle() {
  std::mt19937_64 rng(7);
  int ok = 0, total = 0;
  double worst = 0;
  for (int t = 0; t < 50; ++t) {
    std::vector<std::vector<Point2>> rings(2);
    const double cx = uniform(rng, -1, 1), cy = uniform(rng, -1, 1);
    for (int k = 0; k < 2; ++k) {
      const double ox = k ? cx + uniform(rng, -0.5, 0.5) : cx, oy = k ? cy + uniform(rng, -0.5, 0.5) : cy;
      const int n = 5 + static_cast<int>(rng() % 12);
      std::vector<double> ang;
      for (int i = 0; i < n; ++i) ang.push_back(uniform(rng, 0, 2 * kPi));
      std::sort(ang.begin(), ang.end());
      for (double a : ang) {
        const double rr = uniform(rng, 0.4, 1.5);
        rings[k].emplace_back(ox + rr * std::cos(a), oy + rr * std::sin(a));
      }
    }
    const GroundRegion a = GroundRegion::from_rings({rings[0]}, Tag::exact);
    const GroundRegion b = GroundRegion::from_rings({rings[1]}, Tag::exact);
    const std::vector<oracle::Shape> shapes{shape_of(rings[0]), shape_of(rings[1])};
    const std::pair<double, std::function<bool(const std::vector<bool>&)>> ops[] = {
        {area(intersect(a, b)), [](const std::vector<bool>& m) { return m[0] && m[1]; }},
        {area(unite(a, b)), [](const std::vector<bool>& m) { return m[0] || m[1]; }},
        {area(subtract(a, b)), [](const std::vector<bool>& m) { return m[0] && !m[1]; }},
    };
    for (const auto& [exact, pred] : ops) {
      const double ras = oracle::rasterize(shapes, pred, 1e-3).area();
      const double rel = ras > 0 ? std::abs(exact - ras) / ras : (exact == 0 ? 0 : 1);
      worst = std::max(worst, rel);
      ok += rel <= 1e-3;
      ++total;
    }
  }
  return {ok == total, fmt("%d of %d boolean-op areas within 0.1%% of a 1 mm raster (worst %.2e)", ok, total, worst)};
}

Outcome determinism(const fs::path& configs) {
  const fs::path base = fs::temp_directory_path() / "smsearch_acceptance_determinism";
  fs::remove_all(base);
  std::ostringstream log;
  std::string text[2];
  for (int i = 0; i < 2; ++i) {
    RunOptions o;
    o.config_path = (configs / "desk.json").string();
    o.seed = 7;
    o.out_dir = (base / std::to_string(i)).string();
    o.quiet = true;
    if (run_one(o, log) != kOk) return {false, "run failed: " + log.str()};
    std::ifstream in(base / std::to_string(i) / "metrics.csv", std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    text[i] = s.str();
  }
  fs::remove_all(base);
  const bool same = !text[0].empty() && text[0] == text[1];
  return {same, fmt("two desk runs with seed 7: metrics.csv %s (%zu bytes)", same ? "identical" : "differs",
                    text[0].size())};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::string configs = "configs", full_csv;
  std::vector<int> only;
  app.add_option("--configs", configs, "directory holding desk.json and full.json")->check(CLI::ExistingDirectory);
  app.add_option("--only", only, "criteria to run (default all)")->delimiter(',')->check(CLI::Range(1, 8));
  app.add_option("--full-metrics", full_csv, "write the full-scale metrics here");
  std::string report;
  app.add_option("--report", report, "also write the criterion lines to this file");
  std::vector<std::string> tolerated;
  app.add_option("--tolerate", tolerated, "sub-checks reported but not counted in the exit status")->delimiter(',');
  CLI11_PARSE(app, argc, argv);
  if (only.empty()) only = {1, 2, 3, 4, 5, 6, 7, 8};

  const fs::path dir(configs);
  const std::map<int, std::pair<const char*, std::function<Outcome()>>> checks{
      {1, {"soundness", [&] { return soundness(dir); }}},
      {2, {"approximation direction", [&] { return approximation_direction(dir); }}},
      {3, {"depth interval", [] { return depth_example(); }}},
      {4, {"fusion consistency", [&] { return fusion(dir); }}},
      {5, {"full-scale run", [&] { return full_run(dir, full_csv); }}},
      {6, {"planner exhaustiveness", [&] { return planner(dir); }}},
      {7, {"geometry oracle", [] { return geometry_oracle(); }}},
      {8, {"determinism", [&] { return determinism(dir); }}},
  };
  std::ofstream rep;
  if (!report.empty()) rep.open(report);
  bool all = true;
  for (int c : only) {
    const auto& [name, fn] = checks.at(c);
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    bool excused = !o.pass && !o.failed.empty();
    for (const auto& f : o.failed) excused = excused && std::ranges::count(tolerated, f) > 0;
    all = all && (o.pass || excused);
    std::ostringstream line;
    line << "criterion " << c << " " << (o.pass ? "PASS" : "FAIL") << " [" << name << "] " << o.detail;
    if (!o.failed.empty()) {
      line << " | failed:";
      for (const auto& f : o.failed) line << " " << f;
      if (excused) line << " (tolerated)";
    }
    std::cout << line.str() << std::endl;
    if (rep.is_open()) rep << line.str() << std::endl;
  }
  return all ? 0 : 1;
}
