#include <filesystem>
#include <fstream>
#include <numbers>
#include <regex>
#include <sstream>

#include "doctest.h"
#include "smsearch/report.hpp"
#include "smsearch/runner.hpp"
#include "smsearch/scenario.hpp"

using namespace smsearch;
namespace fs = std::filesystem;

namespace {

const char* kTiny = R"({
  "roi": {"half_width_m": 25},
  "roads": {"spacing_m": 25, "margin_m": 4},
  "obstacles": {"generator": "none"},
  "targets": {"count": 1},
  "uavs": {"count": 1, "altitudes_m": [25], "launch_xy_m": [-30, -30]},
  "camera": {"rows": 24, "cols": 32, "d_max_m": 100},
  "cvs": {"min_pixels": 2},
  "sim": {"duration_s": 4}
})";

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("smsearch_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << text;
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path repo_root() { return fs::path(SMSEARCH_SOURCE_DIR); }

}  // namespace

TEST_CASE("config digest is FNV-1a 64") {
  CHECK(config_digest("") == 0xcbf29ce484222325ull);
  CHECK(config_digest("a") == 0xaf63dc4c8601ec8cull);
  CHECK(config_digest("foobar") == 0x85944171f73967e8ull);
  CHECK(hex64(0xaf63dc4c8601ec8cull) == "af63dc4c8601ec8c");
}

TEST_CASE("seed ranges") {
  CHECK(parse_seed_range("3..5") == std::vector<std::uint64_t>{3, 4, 5});
  CHECK(parse_seed_range("7") == std::vector<std::uint64_t>{7});
  CHECK_THROWS(parse_seed_range("5..3"));
  CHECK_THROWS(parse_seed_range("x"));
  CHECK_THROWS(parse_seed_range("1..2x"));
}

TEST_CASE("full scenario carries the reference parameters") {
  const Scenario sc = load_scenario(parse_config(read_text((repo_root() / "configs/full.json").string())), 1);
  const World& w = sc.world;
  CHECK(w.roi.x1 - w.roi.x0 == 500);
  CHECK(w.targets.size() == 8);
  CHECK(w.uavs.size() == 4);
  CHECK(w.tp.r_t == 2.5);
  CHECK(w.tp.h_t == 2);
  CHECK(w.tp.r_s == 3);
  CHECK(w.tp.v_max == 1);
  CHECK(w.tp.body.x() == 4.6);
  CHECK(w.tp.body.y() == 1.8);
  CHECK(w.tp.body.z() == 1.5);
  CHECK(sc.intr.n_rows == 360);
  CHECK(sc.intr.n_cols == 480);
  CHECK(sc.intr.theta == doctest::Approx(std::numbers::pi / 6));
  CHECK(sc.intr.d_max == 300);
  // horizontal aperture pi/4 across 480 columns
  CHECK(2 * std::atan(240 / sc.intr.f_c) == doctest::Approx(std::numbers::pi / 4));
  CHECK(sc.cvs.noise_lo == -0.01);
  CHECK(sc.cvs.noise_hi == 0.01);
  CHECK(sc.sim.T_s == 0.5);
  CHECK(sc.sim.T_mpc_s == 3);
  CHECK(sc.sim.duration_s == 300);
  CHECK(std::isinf(sc.sim.comm_range_m));
  CHECK(sc.mpc.h == 12);
  REQUIRE(sc.mpc.U.size() == 5);
  CHECK(sc.mpc.U[0] == doctest::Approx(-std::numbers::pi / 18));
  CHECK(sc.mpc.U[1] == doctest::Approx(-std::numbers::pi / 36));
  CHECK(sc.mpc.U[2] == 0);
  for (const auto& u : w.uavs) {
    CHECK(u.speed == 5);
    CHECK(!w.roi.contains(u.p));
    CHECK(u.p == w.uavs[0].p);
  }
  double cover = 0, top = 0;
  for (const auto& o : w.obstacles) {
    cover += area(o.levels[0].footprint);
    top = std::max(top, o.height());
  }
  CHECK(cover / w.roi.area() == doctest::Approx(0.05).epsilon(0.1));
  CHECK(top < 50);
  // the digest depends on the text only
  const std::string text = read_text((repo_root() / "configs/full.json").string());
  CHECK(config_digest(text) == config_digest(std::string(text)));
}

TEST_CASE("bad configs are rejected with the offending keys") {
  auto msg = [](const std::string& text) {
    try {
      load_scenario(parse_config(text), 1);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(msg(R"({"roi": {"half_width": 10}})").find("roi.half_width: unknown key") != std::string::npos);
  CHECK(msg(R"({"camra": {}})").find("camra: unknown section") != std::string::npos);
  CHECK(msg(R"({"mpc": {"h": "twelve"}})").find("mpc.h: wrong type") != std::string::npos);
  CHECK(msg(R"({"mpc": {"h": 7}})").find("mpc.h") != std::string::npos);
  CHECK(msg(R"({"uavs": {"count": 2, "altitudes_m": [60]}})").find("uavs.altitudes_m") != std::string::npos);
  CHECK(msg(R"({"uavs": {"altitudes_m": [20, 25, 30, 35]}})").find("UAV not above all obstacles") != std::string::npos);
  CHECK(msg("{ not json").find("not valid JSON") != std::string::npos);
  CHECK(msg("{}").empty());
}

TEST_CASE("run writes metrics and manifest, rejects bad configs cleanly") {
  const fs::path d = scratch("run");
  const std::string cfg = write_config(d, kTiny);
  std::ostringstream log;
  RunOptions o;
  o.config_path = cfg;
  o.seed = 3;
  o.out_dir = (d / "out").string();
  o.dump_mpc = true;
  o.snapshot_every = 4;
  o.quiet = true;
  REQUIRE(run_one(o, log) == kOk);
  const Table t = read_csv((d / "out/metrics.csv").string());
  CHECK(t.rows.size() == 8);
  CHECK(t.columns.size() == 12);
  const auto m = nlohmann::json::parse(slurp(d / "out/manifest.json"));
  CHECK(m["config_digest"] == hex64(config_digest(kTiny)));
  CHECK(m["runs"][0]["exit_status"] == 0);
  CHECK(fs::exists(d / "out/snapshots/step_00004.json"));
  CHECK(fs::exists(d / "out/snapshots/step_00008.json"));
  const Table mpc = read_csv((d / "out/mpc.csv").string());
  CHECK(mpc.rows.size() == 2 * 25);

  const std::string bad = write_config(d / "..", "{\"roi\": {\"half_width_m\": \"big\"}}");
  o.config_path = bad;
  o.out_dir = (d / "never").string();
  CHECK(run_one(o, log) == kConfigError);
  CHECK(!fs::exists(d / "never"));
}

TEST_CASE("batch aggregate and plots") {
  const fs::path d = scratch("batch");
  const std::string cfg = write_config(d, kTiny);
  std::ostringstream log;
  REQUIRE(run_batch(cfg, {1, 2, 3}, (d / "b").string(), log) == kOk);
  const Table agg = read_csv((d / "b/aggregate.csv").string());
  std::vector<Table> runs;
  for (int s : {1, 2, 3}) runs.push_back(read_csv((d / ("b/seed_" + std::to_string(s)) / "metrics.csv").string()));
  const int src = runs[0].column("phi_cg_frac"), mc = agg.column("phi_cg_frac_mean"), sc = agg.column("phi_cg_frac_std");
  REQUIRE(mc > 0);
  for (std::size_t i = 0; i < agg.rows.size(); ++i) {
    const double a = *runs[0].rows[i][src], b = *runs[1].rows[i][src], c = *runs[2].rows[i][src];
    const double mean = (a + b + c) / 3;
    CHECK(*agg.rows[i][mc] == doctest::Approx(mean).epsilon(1e-12));
    const double var = ((a - mean) * (a - mean) + (b - mean) * (b - mean) + (c - mean) * (c - mean)) / 3;
    CHECK(*agg.rows[i][sc] == doctest::Approx(std::sqrt(var)).epsilon(1e-9));
  }

  const auto files = render_plots((d / "b").string());
  CHECK(files.size() == 4);
  for (const auto& f : files) CHECK(fs::exists(d / "b" / f));

  // read the cumulated-ground polyline back into data coordinates
  const std::string svg = slurp(d / "b/coverage.svg");
  auto attr = [&](const std::string& name) {
    std::smatch m;
    REQUIRE(std::regex_search(svg, m, std::regex(name + "=\"([^\"]+)\"")));
    return std::stod(m[1]);
  };
  const double x0 = attr("data-x0"), x1 = attr("data-x1"), y0 = attr("data-y0"), y1 = attr("data-y1");
  const double L = attr("data-left"), T = attr("data-top"), W = attr("data-width"), H = attr("data-height");
  std::smatch pm;
  REQUIRE(std::regex_search(svg, pm, std::regex("data-series=\"phi_cg_frac\"[^>]*points=\"([^\"]+)\"")));
  std::istringstream pts(pm[1].str());
  std::string pair;
  std::size_t i = 0;
  const int tc = agg.column("t_s");
  while (pts >> pair) {
    const auto comma = pair.find(',');
    const double px = std::stod(pair.substr(0, comma)), py = std::stod(pair.substr(comma + 1));
    CHECK(x0 + (px - L) / W * (x1 - x0) == doctest::Approx(*agg.rows[i][tc]));
    CHECK(y0 + (T + H - py) / H * (y1 - y0) == doctest::Approx(*agg.rows[i][mc]));
    ++i;
  }
  CHECK(i == agg.rows.size());

  // one seed: zero spread
  REQUIRE(run_batch(cfg, {4}, (d / "one").string(), log) == kOk);
  const Table one = read_csv((d / "one/aggregate.csv").string());
  for (const auto& r : one.rows)
    for (std::size_t c = 0; c < one.columns.size(); ++c)
      if (one.columns[c].ends_with("_std") && r[c]) CHECK(*r[c] == 0);
}

TEST_CASE("plot errors") {
  Table empty;
  empty.columns = {"t_s", "x_mean"};
  CHECK_THROWS_WITH(svg_chart(empty, "t", "y", {{"x", "x", "#000"}}), "aggregate table is empty");
  Table t = parse_csv("t_s,x_mean,x_std\n1,2,0\n");
  CHECK_THROWS_WITH(svg_chart(t, "t", "y", {{"phi_cg_frac", "c", "#000"}}), "missing columns: phi_cg_frac_mean");
  CHECK_NOTHROW(svg_chart(t, "t", "y", {{"x", "x", "#000"}}));
}

TEST_CASE("csv round trip keeps absent cells") {
  const Table t = parse_csv("t_s,a,b\n0.5,,3\n1,2,\n");
  CHECK(!t.rows[0][1]);
  CHECK(*t.rows[0][2] == 3);
  CHECK(to_csv(t) == "t_s,a,b\n0.5,,3\n1,2,\n");
}
