#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "smsearch/planner.hpp"

namespace smsearch {

struct SimConfig {
  double duration_s = 300;
  double T_s = 0.5;
  double T_mpc_s = 3;
  double comm_range_m = std::numeric_limits<double>::infinity();
  std::uint64_t seed = 0;
};

struct Scenario {
  World world;
  CameraIntrinsics intr;
  CvsParams cvs;
  PerceptionParams perception;
  MpcParams mpc;
  SimConfig sim;
};

struct MetricsRecord {
  double t = 0;
  std::optional<double> phi_t_mean, e_t_mean, equiv_radius;  // absent before the first identification
  double phi_fov_frac = 0, phi_g_frac = 0, phi_cg_frac = 0;
  int card_L = 0, card_detected_now = 0, card_in_fov = 0;
  double phi_xbar_frac = 0, phi_xbar_hidden_frac = 0;
};

std::string metrics_csv_header();
std::string metrics_csv_row(const MetricsRecord& m);

struct CommGraph {
  std::vector<std::vector<bool>> adj;  // reflexive, symmetric
  bool complete() const;
  std::vector<int> neighbors(int i) const;
};

CommGraph comm_graph(const std::vector<Vec3>& positions, double range_m);

class SoundnessViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Agent {
  EstimatorState est;
  FramePerception frame;
  std::vector<Detection> dets;
  ControlSequence latched;
  bool has_plan = false;
};

class Simulation {
 public:
  explicit Simulation(Scenario sc);

  // One period T. Throws SoundnessViolation or HypothesisViolation.
  MetricsRecord step();
  bool done() const { return k_ >= steps_; }
  long k() const { return k_; }
  long total_steps() const { return steps_; }

  const Scenario& scenario() const { return sc_; }
  const World& world() const { return sc_.world; }
  const std::vector<Agent>& agents() const { return agents_; }
  const GroundRegion& cumulated_ground() const { return cumulated_; }

  nlohmann::json snapshot() const;

  // When the graph is complete every UAV fuses the same messages, so the
  // result is computed once and copied. Off: each UAV fuses on its own.
  bool share_identical_fusion = true;
  std::function<void(long, int, const CvsFrame&, const FramePerception&, const std::vector<Detection>&)> on_frame;
  std::function<void(long, int, const PlanResult&)> on_plan;

 private:
  void plan_round();
  void check_soundness() const;
  MetricsRecord metrics(const CommGraph& g) const;

  Scenario sc_;
  std::vector<Agent> agents_;
  GroundRegion cumulated_;
  long k_ = 0, steps_ = 0;
  int plan_every_ = 1;
  int round_step_ = 0;
};

bool same_estimate(const EstimatorState& a, const EstimatorState& b);

// Largest symmetric-difference area between any two UAVs' fused regions.
double fusion_disagreement(const std::vector<Agent>& agents);

}  // namespace smsearch
