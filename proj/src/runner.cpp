#include "smsearch/runner.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "smsearch/region_json.hpp"
#include "smsearch/report.hpp"
#include "smsearch/scenario.hpp"

namespace fs = std::filesystem;

namespace smsearch {

namespace {

std::string now_iso() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const fs::path& p, const std::string& s) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << s;
}

std::string step_name(long k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "step_%05ld", k);
  return buf;
}

}  // namespace

int run_one(const RunOptions& o, std::ostream& log) {
  const std::string start = now_iso();
  std::string text;
  Scenario sc;
  try {
    text = read_text(o.config_path);
    sc = load_scenario(parse_config(text), o.seed);
  } catch (const ConfigError& e) {
    log << e.what() << '\n';
    return kConfigError;
  }

  const fs::path out(o.out_dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) {
    log << "cannot create " << out << ": " << ec.message() << '\n';
    return kIoError;
  }

  Simulation sim(sc);
  std::ofstream mpc;
  if (o.dump_mpc) {
    mpc.open(out / "mpc.csv", std::ios::binary);
    mpc << "t_s,uav,u1,u2,j0,j1,j\n";
    sim.on_plan = [&](long k, int uav, const PlanResult& r) {
      char buf[256];
      for (const auto& [c, s] : r.table) {
        std::snprintf(buf, sizeof buf, "%.17g,%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", k * sc.sim.T_s, uav, c.u1, c.u2,
                      s.j0, s.j1, s.j);
        mpc << buf;
      }
    };
  }
  if (o.dump_perception) {
    fs::create_directories(out / "perception");
    sim.on_frame = [&](long k, int uav, const CvsFrame& f, const FramePerception& fp, const std::vector<Detection>& d) {
      const std::string stem = (out / "perception" / (step_name(k) + "_uav" + std::to_string(uav))).string();
      write_pgm(stem + "_depth.pgm", f.depth, 0.01);
      write_pgm(stem + "_labels.pgm", f.labels);
      nlohmann::json j;
      j["free_ground"] = to_json(fp.free_ground);
      j["obstacle_margin"] = to_json(fp.obstacle_margin);
      j["hidden"] = to_json(fp.hidden);
      j["target_sets"] = nlohmann::json::object();
      for (const auto& [id, x] : fp.target_sets) j["target_sets"][std::to_string(id)] = to_json(x);
      j["detections"] = nlohmann::json::array();
      for (const auto& x : d)
        j["detections"].push_back({{"target", x.target_id}, {"rows", {x.r_lo, x.r_hi}}, {"cols", {x.c_lo, x.c_hi}}});
      write_file(stem + ".json", j.dump());
    };
  }
  if (o.snapshot_every > 0) fs::create_directories(out / "snapshots");

  std::string csv = metrics_csv_header() + "\n";
  int code = kOk;
  std::string message;
  try {
    while (!sim.done()) {
      csv += metrics_csv_row(sim.step()) + "\n";
      if (o.snapshot_every > 0 && sim.k() % o.snapshot_every == 0)
        write_file(out / "snapshots" / (step_name(sim.k()) + ".json"), sim.snapshot().dump());
      if (!o.quiet && sim.k() % 60 == 0) log << "t = " << sim.k() * sc.sim.T_s << " s\n" << std::flush;
    }
  } catch (const SoundnessViolation& e) {
    code = kSoundnessViolation;
    message = e.what();
  } catch (const HypothesisViolation& e) {
    code = kHypothesisViolation;
    message = e.what();
  }
  if (code != kOk) {
    log << message << '\n';
    write_file(out / "violation.json", sim.snapshot().dump());
  }
  write_file(out / "metrics.csv", csv);

  nlohmann::json m;
  m["config_path"] = o.config_path;
  m["config_digest"] = hex64(config_digest(text));
  m["seeds"] = {o.seed};
  m["start"] = start;
  m["end"] = now_iso();
  m["steps"] = sim.k();
  m["runs"] = {{{"seed", o.seed}, {"exit_status", code}, {"message", message}, {"dir", out.string()}}};
  std::vector<std::string> outputs{"metrics.csv"};
  if (o.dump_mpc) outputs.push_back("mpc.csv");
  if (o.dump_perception) outputs.push_back("perception/");
  if (o.snapshot_every > 0) outputs.push_back("snapshots/");
  if (code != kOk) outputs.push_back("violation.json");
  m["outputs"] = outputs;
  write_file(out / "manifest.json", m.dump(2) + "\n");
  return code;
}

std::vector<std::uint64_t> parse_seed_range(const std::string& s) {
  const auto dots = s.find("..");
  try {
    std::size_t used = 0;
    if (dots == std::string::npos) {
      const auto v = std::stoull(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return {v};
    }
    const std::string a = s.substr(0, dots), b = s.substr(dots + 2);
    const auto lo = std::stoull(a, &used);
    if (used != a.size()) throw std::invalid_argument(s);
    const auto hi = std::stoull(b, &used);
    if (used != b.size() || hi < lo) throw std::invalid_argument(s);
    std::vector<std::uint64_t> out;
    for (auto v = lo; v <= hi; ++v) out.push_back(v);
    return out;
  } catch (const std::exception&) {
    throw std::invalid_argument("bad seed range '" + s + "', expected a..b");
  }
}

int run_batch(const std::string& config_path, const std::vector<std::uint64_t>& seeds, const std::string& out_dir,
              std::ostream& log) {
  if (seeds.empty()) {
    log << "no seeds\n";
    return kConfigError;
  }
  const std::string start = now_iso();
  // reject a bad config before creating anything
  std::string text;
  try {
    text = read_text(config_path);
    load_scenario(parse_config(text), seeds.front());
  } catch (const ConfigError& e) {
    log << e.what() << '\n';
    return kConfigError;
  }
  const fs::path out(out_dir);
  fs::create_directories(out);
  int worst = kOk;
  nlohmann::json runs = nlohmann::json::array();
  std::vector<Table> tables;
  for (auto seed : seeds) {
    RunOptions o;
    o.config_path = config_path;
    o.seed = seed;
    o.out_dir = (out / ("seed_" + std::to_string(seed))).string();
    o.quiet = true;
    log << "seed " << seed << '\n' << std::flush;
    const int code = run_one(o, log);
    runs.push_back({{"seed", seed}, {"exit_status", code}, {"dir", o.out_dir}});
    if (code != kOk) {
      if (worst == kOk) worst = code;
      continue;
    }
    tables.push_back(read_csv(o.out_dir + "/metrics.csv"));
  }
  if (!tables.empty()) write_file(out / "aggregate.csv", to_csv(aggregate(tables)));

  nlohmann::json m;
  m["config_path"] = config_path;
  m["config_digest"] = hex64(config_digest(text));
  m["seeds"] = seeds;
  m["start"] = start;
  m["end"] = now_iso();
  m["runs"] = runs;
  m["outputs"] = tables.empty() ? nlohmann::json::array() : nlohmann::json::array({"aggregate.csv"});
  m["exit_status"] = worst;
  write_file(out / "manifest.json", m.dump(2) + "\n");
  return worst;
}

}  // namespace smsearch
