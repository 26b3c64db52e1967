#include "smsearch/planner.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace smsearch {

std::vector<ControlSequence> enumerate_candidates(const std::vector<double>& U, int h) {
  if (U.empty()) throw std::invalid_argument("empty control set");
  if (h <= 0 || h % 2) throw std::invalid_argument("horizon must be positive and even");
  std::vector<ControlSequence> out;
  for (std::size_t a = 0; a < U.size(); ++a)
    for (std::size_t b = 0; b < U.size(); ++b)
      out.push_back({static_cast<int>(a), static_cast<int>(b), U[a], U[b]});
  return out;
}

UavTruth roll_uav(const UavTruth& u, const ControlSequence& s, int steps, const MpcParams& p) {
  UavTruth x = u;
  for (int k = 0; k < steps; ++k) x = step_uav(x, k < p.h / 2 ? s.u1 : s.u2, p.T, p.U);
  return x;
}

PlanContext make_context(const EstimatorState& s, const GroundRegion& hidden_frame, const GroundBox& roi,
                         const MpcParams& p, const PlanContext* same_state) {
  PlanContext c;
  c.roi = roi;
  c.hidden = hidden_frame;
  const double half = 0.5 * p.h * p.T * p.v_max;
  c.hidden_grown = dilate_outer(hidden_frame, half);
  c.extra_clearing = GroundRegion(Tag::inner);
  if (same_state) {
    c.reach = same_state->reach;
    c.nothing_left = same_state->nothing_left;
    return c;
  }
  std::vector<GroundRegion> parts{s.unknown};
  for (const auto& [j, x] : s.per_target) parts.push_back(x);
  const GroundRegion all = unite_all(parts, Tag::outer);
  c.nothing_left = all.empty();
  // per-step rounding slack, so the single dilation still covers h chained ones
  c.reach = intersect(dilate_outer(all, 2 * half + p.h * 1e-5), GroundRegion::box(roi));
  c.extra_clearing = GroundRegion(Tag::inner);
  return c;
}

GroundRegion candidate_clearing(const PlanContext& ctx, const UavTruth& u, const CameraIntrinsics& intr,
                                const ControlSequence& s, const MpcParams& p) {
  const double half = 0.5 * p.h * p.T * p.v_max;
  const UavTruth mid = roll_uav(u, s, p.h / 2, p), end = roll_uav(u, s, p.h, p);
  // the dilation polygon reaches out to its circumradius, so erode by that
  const double reach = half / std::cos(std::numbers::pi / 16);
  const ConvexPolygon f1 = erode_convex(fov_ground_polygon(uav_pose(mid), intr, &ctx.roi), reach);
  const ConvexPolygon f2 = fov_ground_polygon(uav_pose(end), intr, &ctx.roi);
  const GroundRegion c1 = subtract(GroundRegion::from_convex(f1, Tag::inner), ctx.hidden_grown);
  const GroundRegion c2 = subtract(GroundRegion::from_convex(f2, Tag::inner), ctx.hidden);
  return unite(c1, c2);
}

Score score(const PlanContext& ctx, const UavTruth& u, const CameraIntrinsics& intr, const ControlSequence& s,
            const MpcParams& p) {
  Score sc;
  sc.clearing = candidate_clearing(ctx, u, intr, s, p);
  const GroundRegion cleared = unite(sc.clearing, ctx.extra_clearing);
  const GroundRegion left = subtract(ctx.reach, cleared);
  sc.j0 = area(left);
  if (ctx.nothing_left) {
    sc.j1 = 0;
  } else {
    const UavTruth end = roll_uav(u, s, p.h, p);
    const ConvexPolygon full = fov_ground_polygon(uav_pose(end), intr);
    const ConvexPolygon in_box = clip_box(full, ctx.roi);
    const Point2 c = !in_box.empty() ? barycenter(in_box)
                     : !full.empty() ? barycenter(full)
                                     : Point2(end.p.x(), end.p.y());
    const GroundRegion goal = subtract(left, ctx.hidden);
    sc.j1 = goal.empty() ? 0.0 : distance_point_region(c, goal);
  }
  sc.j = sc.j0 + p.lambda * sc.j1;
  return sc;
}

PredictedEstimate predict_estimate(const EstimatorState& s, const PlanContext& ctx, const UavTruth& u,
                                   const CameraIntrinsics& intr, const ControlSequence& seq, const MpcParams& p,
                                   bool clear) {
  const double drift = p.h * p.T * p.v_max + p.h * 1e-5;
  const GroundRegion box = GroundRegion::box(ctx.roi);
  GroundRegion cleared(Tag::inner);
  if (clear) cleared = unite(candidate_clearing(ctx, u, intr, seq, p), ctx.extra_clearing);
  PredictedEstimate out;
  out.unknown = subtract(intersect(dilate_outer(s.unknown, drift), box), cleared);
  for (const auto& [j, x] : s.per_target) out.per_target[j] = subtract(intersect(dilate_outer(x, drift), box), cleared);
  return out;
}

bool better(const Score& a, const ControlSequence& sa, std::size_t ia, const Score& b, const ControlSequence& sb,
            std::size_t ib) {
  if (a.j != b.j) return a.j < b.j;
  if (std::abs(sa.u1) != std::abs(sb.u1)) return std::abs(sa.u1) < std::abs(sb.u1);
  if (std::abs(sa.u2) != std::abs(sb.u2)) return std::abs(sa.u2) < std::abs(sb.u2);
  return ia < ib;
}

PlanResult plan(const PlanContext& ctx, const UavTruth& u, const CameraIntrinsics& intr, const MpcParams& p) {
  PlanResult r;
  const auto cands = enumerate_candidates(p.U, p.h);
  std::size_t best = 0;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    r.table.emplace_back(cands[i], score(ctx, u, intr, cands[i], p));
    if (i > 0 && better(r.table[i].second, cands[i], i, r.table[best].second, cands[best], best)) best = i;
  }
  r.chosen = cands[best];
  const Score& s = r.table[best].second;
  r.j0 = s.j0;
  r.j1 = s.j1;
  r.j = s.j;
  r.clearing = s.clearing;
  r.mid = roll_uav(u, r.chosen, p.h / 2, p);
  r.end = roll_uav(u, r.chosen, p.h, p);
  return r;
}

}  // namespace smsearch
