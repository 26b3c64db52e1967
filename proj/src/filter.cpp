#include "smsearch/filter.hpp"

#include <algorithm>

#include "smsearch/region_json.hpp"

namespace smsearch {

EstimatorState EstimatorState::initial(const GroundBox& roi) {
  EstimatorState s;
  s.unknown = GroundRegion::box(roi, Tag::outer);
  s.obstacle_acc = GroundRegion(Tag::inner);
  s.hidden_acc = GroundRegion(Tag::outer);
  return s;
}

bool EstimatorState::knows(int j) const { return std::binary_search(identified.begin(), identified.end(), j); }

EstimatorState predict(const EstimatorState& s, double T, double v_max, const GroundBox& roi, int k) {
  const double r = T * v_max;
  if (r == 0) return s;
  const GroundRegion box = GroundRegion::box(roi);
  EstimatorState n = s;
  n.unknown = intersect(dilate_outer(s.unknown, r, k), box);
  for (auto& [j, x] : n.per_target) x = intersect(dilate_outer(x, r, k), box);
  return n;
}

EstimatorState measurement_update(const EstimatorState& s, const FramePerception& fp, const std::vector<Detection>& dets) {
  EstimatorState n = s;
  n.obstacle_acc = unite(s.obstacle_acc, fp.obstacle_margin);
  const GroundRegion cleared = unite(fp.free_ground, n.obstacle_acc);
  n.unknown = subtract(s.unknown, cleared);

  std::vector<int> seen;
  for (const auto& d : dets) seen.push_back(d.target_id);
  std::sort(seen.begin(), seen.end());
  seen.erase(std::unique(seen.begin(), seen.end()), seen.end());

  for (auto& [j, x] : n.per_target)
    if (!std::binary_search(seen.begin(), seen.end(), j)) x = subtract(x, cleared);
  for (int j : seen) {
    const GroundRegion& m = fp.target_sets.at(j);
    GroundRegion x = s.knows(j) ? intersect(s.per_target.at(j), m) : intersect(s.unknown, m);
    x = subtract(x, cleared);
    if (x.empty()) throw HypothesisViolation("inconsistency: empty set estimate for target " + std::to_string(j));
    n.per_target[j] = std::move(x);
  }
  std::vector<int> ids;
  std::set_union(s.identified.begin(), s.identified.end(), seen.begin(), seen.end(), std::back_inserter(ids));
  n.identified = std::move(ids);
  return n;
}

EstimatorState update_hidden(const EstimatorState& s, const FramePerception& fp) {
  EstimatorState n = s;
  n.hidden_acc = subtract(unite(s.hidden_acc, fp.hidden), fp.free_ground);
  return n;
}

Broadcast make_broadcast(const EstimatorState& s, const FramePerception& fp, int sender, long frame) {
  return {sender, frame, s.identified, s.obstacle_acc, s.per_target, s.unknown, s.hidden_acc, fp.free_ground};
}

EstimatorState fuse(const EstimatorState& s, std::vector<Broadcast> msgs) {
  if (msgs.empty()) return s;
  std::sort(msgs.begin(), msgs.end(), [](const Broadcast& a, const Broadcast& b) { return a.sender < b.sender; });
  EstimatorState n;
  std::vector<GroundRegion> obst, hid, free;
  n.unknown = msgs[0].unknown;
  for (const auto& m : msgs) {
    std::vector<int> ids;
    std::set_union(n.identified.begin(), n.identified.end(), m.identified.begin(), m.identified.end(),
                   std::back_inserter(ids));
    n.identified = std::move(ids);
    obst.push_back(m.obstacle_margin);
    hid.push_back(m.hidden);
    free.push_back(m.free_ground_frame);
  }
  for (std::size_t i = 1; i < msgs.size(); ++i) n.unknown = intersect(n.unknown, msgs[i].unknown);
  n.obstacle_acc = unite_all(obst, Tag::inner);
  n.hidden_acc = subtract(unite_all(hid, Tag::outer), unite_all(free, Tag::inner));
  for (int j : n.identified) {
    bool first = true;
    GroundRegion x;
    for (const auto& m : msgs) {
      auto it = m.per_target.find(j);
      const GroundRegion& part = it != m.per_target.end() ? it->second : m.unknown;
      x = first ? part : intersect(x, part);
      first = false;
    }
    n.per_target[j] = std::move(x);
  }
  return n;
}

nlohmann::json to_json(const Broadcast& b) {
  nlohmann::json t = nlohmann::json::object();
  for (const auto& [j, x] : b.per_target) t[std::to_string(j)] = to_json(x);
  return {{"sender", b.sender},
          {"frame", b.frame},
          {"identified", b.identified},
          {"obstacle_margin", to_json(b.obstacle_margin)},
          {"per_target", t},
          {"unknown", to_json(b.unknown)},
          {"hidden", to_json(b.hidden)},
          {"free_ground", to_json(b.free_ground_frame)}};
}

Broadcast broadcast_from_json(const nlohmann::json& j) {
  Broadcast b;
  b.sender = j.at("sender").get<int>();
  b.frame = j.at("frame").get<long>();
  b.identified = j.at("identified").get<std::vector<int>>();
  b.obstacle_margin = region_from_json(j.at("obstacle_margin"));
  for (const auto& [k, v] : j.at("per_target").items()) b.per_target[std::stoi(k)] = region_from_json(v);
  b.unknown = region_from_json(j.at("unknown"));
  b.hidden = region_from_json(j.at("hidden"));
  b.free_ground_frame = region_from_json(j.at("free_ground"));
  return b;
}

}  // namespace smsearch
