#pragma once

#include <vector>

#include "smsearch/camera.hpp"
#include "smsearch/filter.hpp"
#include "smsearch/synthetic_cvs.hpp"
#include "smsearch/world.hpp"

namespace smsearch {

struct MpcParams {
  int h = 12;
  double T = 0.5;
  double v_max = 1.0;  // target speed bound known to the UAVs
  double lambda = 1.0;
  std::vector<double> U;
  bool independent = false;
};

struct ControlSequence {
  int i1 = 0, i2 = 0;  // indices into U
  double u1 = 0, u2 = 0;
};

std::vector<ControlSequence> enumerate_candidates(const std::vector<double>& U, int h);

// Applies u1 for h/2 steps then u2 for h/2 steps.
UavTruth roll_uav(const UavTruth& u, const ControlSequence& s, int steps, const MpcParams& p);

// Everything a planning round needs that does not depend on the candidate.
struct PlanContext {
  GroundBox roi;
  GroundRegion hidden;          // H^g_{i,k}, frozen over the horizon
  GroundRegion hidden_grown;    // hidden dilated by the second half-horizon drift
  GroundRegion reach;           // (unknown u targets) dilated by the full-horizon drift, in X_g
  GroundRegion extra_clearing;  // already-chosen clearings of other UAVs
  bool nothing_left = false;
};

// `same_state`: a context already built from an identical estimate, whose
// state-only parts are copied instead of recomputed.
PlanContext make_context(const EstimatorState& s, const GroundRegion& hidden_frame, const GroundBox& roi,
                         const MpcParams& p, const PlanContext* same_state = nullptr);

struct Score {
  double j0 = 0, j1 = 0, j = 0;
  GroundRegion clearing;
};

// Ground predicted to be cleared at k+h/2 (shrunk by the later drift) and at k+h.
GroundRegion candidate_clearing(const PlanContext& ctx, const UavTruth& u, const CameraIntrinsics& intr,
                                const ControlSequence& s, const MpcParams& p);
Score score(const PlanContext& ctx, const UavTruth& u, const CameraIntrinsics& intr, const ControlSequence& s,
            const MpcParams& p);

struct PredictedEstimate {
  GroundRegion unknown;
  std::map<int, GroundRegion> per_target;
};
// Per-set version of the same model, for inspection; `clear` toggles the FoV subtraction.
PredictedEstimate predict_estimate(const EstimatorState& s, const PlanContext& ctx, const UavTruth& u,
                                   const CameraIntrinsics& intr, const ControlSequence& seq, const MpcParams& p,
                                   bool clear = true);

struct PlanResult {
  ControlSequence chosen;
  double j0 = 0, j1 = 0, j = 0;
  UavTruth mid, end;  // predicted states at k+h/2 and k+h
  GroundRegion clearing;
  std::vector<std::pair<ControlSequence, Score>> table;
};

PlanResult plan(const PlanContext& ctx, const UavTruth& u, const CameraIntrinsics& intr, const MpcParams& p);

// Strict preference: lower j, then smaller |u1|, then smaller |u2|, then earlier.
bool better(const Score& a, const ControlSequence& sa, std::size_t ia, const Score& b, const ControlSequence& sb,
            std::size_t ib);

}  // namespace smsearch
