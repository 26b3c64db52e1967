#pragma once

#include <map>
#include <vector>

#include "json.hpp"
#include "smsearch/perception_sets.hpp"

namespace smsearch {

struct EstimatorState {
  std::vector<int> identified;             // sorted
  std::map<int, GroundRegion> per_target;  // outer
  GroundRegion unknown;                    // outer
  GroundRegion obstacle_acc;               // inner
  GroundRegion hidden_acc;                 // outer

  static EstimatorState initial(const GroundBox& roi);
  bool knows(int j) const;
};

struct Broadcast {
  int sender = 0;
  long frame = 0;
  std::vector<int> identified;
  GroundRegion obstacle_margin;
  std::map<int, GroundRegion> per_target;
  GroundRegion unknown;
  GroundRegion hidden;
  GroundRegion free_ground_frame;
};

// Region growth by one step of bounded speed, clipped to the RoI.
EstimatorState predict(const EstimatorState& s, double T, double v_max, const GroundBox& roi, int k = 16);

// Throws HypothesisViolation when a detected target ends with an empty set.
EstimatorState measurement_update(const EstimatorState& s, const FramePerception& fp, const std::vector<Detection>& dets);

// (X^h u H) \ P^g
EstimatorState update_hidden(const EstimatorState& s, const FramePerception& fp);

Broadcast make_broadcast(const EstimatorState& s, const FramePerception& fp, int sender, long frame);

// Messages must include the receiver's own broadcast. Order does not matter.
EstimatorState fuse(const EstimatorState& s, std::vector<Broadcast> msgs);

nlohmann::json to_json(const Broadcast& b);
Broadcast broadcast_from_json(const nlohmann::json& j);

}  // namespace smsearch
