#include <cmath>
#include <limits>

#include "doctest.h"
#include "smsearch/scenario.hpp"

using namespace smsearch;

namespace {

nlohmann::json small_config() {
  return nlohmann::json::parse(R"({
    "roi": {"half_width_m": 30},
    "roads": {"spacing_m": 30, "margin_m": 4},
    "obstacles": {"generator": "explicit", "buildings": [
      {"levels": [{"footprint_m": [[8, 8], [18, 8], [18, 16], [8, 16]], "z0_m": 0, "z1_m": 12}]}
    ]},
    "targets": {"count": 2},
    "uavs": {"count": 2, "altitudes_m": [25, 28], "launch_xy_m": [-35, -35]},
    "camera": {"rows": 48, "cols": 64, "d_max_m": 120},
    "cvs": {"min_pixels": 4, "identification_range_m": 80},
    "sim": {"duration_s": 15}
  })");
}

double area_after_predict(const EstimatorState& s, const Scenario& sc) {
  return area(predict(s, sc.sim.T_s, sc.world.tp.v_max, sc.world.roi, sc.perception.dilation_vertices).unknown);
}

}  // namespace

TEST_CASE("comm graph") {
  const std::vector<Vec3> p{{0, 0, 50}, {30, 0, 55}, {100, 0, 60}};
  const CommGraph full = comm_graph(p, std::numeric_limits<double>::infinity());
  CHECK(full.complete());
  const CommGraph none = comm_graph(p, 0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(none.adj[i][j] == (i == j));
  const CommGraph mid = comm_graph(p, 40);
  CHECK(mid.adj[0][1]);
  CHECK(!mid.adj[0][2]);
  CHECK(!mid.complete());
  CHECK(mid.neighbors(0) == std::vector<int>{0, 1});
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(mid.adj[i][j] == mid.adj[j][i]);
}

TEST_CASE("timing must divide") {
  Scenario sc = load_scenario(small_config(), 1);
  sc.sim.T_mpc_s = 1.25;
  CHECK_THROWS_AS(Simulation{sc}, std::invalid_argument);
}

TEST_CASE("flat ground, no targets, one UAV") {
  nlohmann::json c = small_config();
  c["obstacles"] = {{"generator", "none"}};
  c["targets"]["count"] = 0;
  c["uavs"] = {{"count", 1}, {"altitudes_m", {25}}, {"launch_xy_m", {-35, -35}}};
  const Scenario sc = load_scenario(c, 3);
  Simulation sim(sc);
  double last_cg = 0;
  while (!sim.done()) {
    const EstimatorState before = sim.agents()[0].est;
    const MetricsRecord m = sim.step();
    // measurement phase never grows the unknown region
    CHECK(area(sim.agents()[0].est.unknown) <= area_after_predict(before, sc) + 1e-6);
    CHECK(sim.agents()[0].est.obstacle_acc.empty());
    CHECK(m.card_L == 0);
    CHECK(!m.phi_t_mean);
    CHECK(m.phi_cg_frac >= last_cg);
    last_cg = m.phi_cg_frac;
  }
  CHECK(last_cg > 0.3);
}

TEST_CASE("small town: soundness, metrics, fusion") {
  const Scenario sc = load_scenario(small_config(), 5);
  Simulation sim(sc);
  sim.share_identical_fusion = false;
  double last_cg = 0;
  bool seen_any = false;
  while (!sim.done()) {
    const MetricsRecord m = sim.step();  // throws on any soundness failure
    CHECK(fusion_disagreement(sim.agents()) < 1e-3);
    for (double f : {m.phi_fov_frac, m.phi_g_frac, m.phi_cg_frac, m.phi_xbar_frac, m.phi_xbar_hidden_frac}) {
      CHECK(f >= 0);
      CHECK(f <= 1 + 1e-9);
    }
    CHECK(m.phi_cg_frac >= last_cg);
    CHECK(m.phi_xbar_hidden_frac <= m.phi_xbar_frac + 1e-12);
    last_cg = m.phi_cg_frac;
    CHECK(bool(m.phi_t_mean) == (m.card_L > 0));
    const EstimatorState& s = sim.agents()[0].est;
    for (int j : s.identified) {
      seen_any = true;
      const GroundRegion& x = s.per_target.at(j);
      const Point2 c = barycenter(x);
      double reach = 0;
      for (const auto& poly : x.polygons())
        for (const auto& v : poly.outer) reach = std::max(reach, (to_point(v) - c).norm());
      CHECK((sim.world().targets[j].p - c).norm() <= reach + 1e-9);
    }
    if (m.phi_t_mean) CHECK(*m.equiv_radius == doctest::Approx(std::sqrt(*m.phi_t_mean / std::numbers::pi)));
  }
  CHECK(seen_any);
}

TEST_CASE("cumulated ground matches a raster count") {
  nlohmann::json c = small_config();
  c["sim"]["duration_s"] = 6;
  const Scenario sc = load_scenario(c, 2);
  Simulation sim(sc);
  const double cell = 0.25;
  const int n = static_cast<int>(std::lround(60 / cell));
  std::vector<char> hit(static_cast<std::size_t>(n) * n, 0);
  MetricsRecord m;
  while (!sim.done()) {
    m = sim.step();
    for (const auto& a : sim.agents()) {
      const GroundRegion& f = a.frame.free_ground;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          char& h = hit[static_cast<std::size_t>(i) * n + j];
          if (!h && f.contains({-30 + (i + 0.5) * cell, -30 + (j + 0.5) * cell})) h = 1;
        }
    }
  }
  double count = 0;
  for (char h : hit) count += h;
  const double raster = count / (static_cast<double>(n) * n);
  CHECK(m.phi_cg_frac == doctest::Approx(raster).epsilon(0.01));
}

TEST_CASE("target outside every estimate aborts") {
  Scenario sc = load_scenario(small_config(), 4);
  sc.world.targets[0].p = {100, 100};
  sc.world.targets[0].speed = 0;
  sc.world.targets[0].to_node = -1;
  Simulation sim(sc);
  CHECK_THROWS_AS(sim.step(), SoundnessViolation);
}

TEST_CASE("same seed, same metrics") {
  const Scenario sc = load_scenario(small_config(), 9);
  Simulation a(sc), b(sc);
  while (!a.done()) CHECK(metrics_csv_row(a.step()) == metrics_csv_row(b.step()));
}

TEST_CASE("csv formatting") {
  MetricsRecord m;
  m.t = 0.5;
  m.card_L = 2;
  const std::string row = metrics_csv_row(m);
  CHECK(row.substr(0, 7) == "0.5,,,,");
  int commas = 0;
  for (char ch : metrics_csv_header()) commas += ch == ',';
  int row_commas = 0;
  for (char ch : row) row_commas += ch == ',';
  CHECK(commas == row_commas);
}
