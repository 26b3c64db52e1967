#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "smsearch/planner.hpp"

using namespace smsearch;

namespace {

constexpr double kPi = std::numbers::pi;
const GroundBox kRoi = GroundBox::centered(250);

MpcParams params() {
  MpcParams p;
  p.U = {-kPi / 18, -kPi / 36, 0, kPi / 36, kPi / 18};
  return p;
}

CameraIntrinsics cam() { return CameraIntrinsics::from_aperture(90, 120, kPi / 4, kPi / 6, 300); }

GroundRegion blob(const Point2& c, double r) {
  return GroundRegion::from_convex(regular_polygon(c, r, 12), Tag::outer);
}

EstimatorState random_state(std::mt19937_64& rng) {
  EstimatorState s = EstimatorState::initial(kRoi);
  std::vector<GroundRegion> parts;
  const int n = 1 + static_cast<int>(rng() % 4);
  for (int i = 0; i < n; ++i)
    parts.push_back(blob({uniform(rng, -230, 230), uniform(rng, -230, 230)}, uniform(rng, 3, 40)));
  s.unknown = unite_all(parts, Tag::outer);
  if (rng() % 2) {
    s.identified = {0};
    s.per_target[0] = blob({uniform(rng, -200, 200), uniform(rng, -200, 200)}, 4);
  }
  return s;
}

UavTruth random_uav(std::mt19937_64& rng) {
  UavTruth u;
  u.p = {uniform(rng, -260, 260), uniform(rng, -260, 260)};
  u.yaw = uniform(rng, -kPi, kPi);
  u.altitude = uniform(rng, 50, 70);
  return u;
}

}  // namespace

TEST_CASE("candidates") {
  const MpcParams p = params();
  const auto c = enumerate_candidates(p.U, p.h);
  REQUIRE(c.size() == 25);
  CHECK(c[0].u1 == p.U[0]);
  CHECK(c[0].u2 == p.U[0]);
  CHECK(c[1].u2 == p.U[1]);
  CHECK(c[5].u1 == p.U[1]);
  CHECK(c[24].i1 == 4);
  CHECK(c[24].i2 == 4);
  CHECK_THROWS(enumerate_candidates({}, 12));
  CHECK_THROWS(enumerate_candidates(p.U, 7));
}

TEST_CASE("roll") {
  const MpcParams p = params();
  UavTruth u;
  u.yaw = 0.3;
  const ControlSequence s{4, 0, p.U[4], p.U[0]};
  UavTruth x = u;
  for (int k = 0; k < 6; ++k) x = step_uav(x, p.U[4], p.T, p.U);
  const UavTruth mid = roll_uav(u, s, 6, p);
  CHECK(mid.p.x() == x.p.x());
  CHECK(mid.yaw == x.yaw);
  for (int k = 0; k < 6; ++k) x = step_uav(x, p.U[0], p.T, p.U);
  CHECK(roll_uav(u, s, 12, p).yaw == doctest::Approx(0.3));
  CHECK(roll_uav(u, s, 12, p).p.y() == x.p.y());
}

TEST_CASE("exhaustive minimum") {
  const MpcParams p = params();
  const CameraIntrinsics intr = cam();
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    const EstimatorState s = random_state(rng);
    const GroundRegion hidden = rng() % 2 ? blob({uniform(rng, -200, 200), uniform(rng, -200, 200)}, 30)
                                          : GroundRegion(Tag::outer);
    const PlanContext ctx = make_context(s, hidden, kRoi, p);
    const UavTruth u = random_uav(rng);
    const PlanResult r = plan(ctx, u, intr, p);
    double lo = 1e300;
    for (const auto& c : enumerate_candidates(p.U, p.h)) lo = std::min(lo, score(ctx, u, intr, c, p).j);
    CHECK(r.j == lo);
    CHECK(r.j == r.j0 + p.lambda * r.j1);
    for (const auto& [c, sc] : r.table) CHECK(sc.j >= r.j);
  }
}

TEST_CASE("nothing to look for: fly straight") {
  const MpcParams p = params();
  EstimatorState s = EstimatorState::initial(kRoi);
  s.unknown = GroundRegion(Tag::outer);
  const PlanContext ctx = make_context(s, GroundRegion(Tag::outer), kRoi, p);
  const PlanResult r = plan(ctx, UavTruth{}, cam(), p);
  CHECK(r.j == 0);
  CHECK(r.chosen.u1 == 0);
  CHECK(r.chosen.u2 == 0);
}

TEST_CASE("turns toward what is left") {
  const MpcParams p = params();
  UavTruth u;
  u.p = {-150, 0};
  u.yaw = 0;
  for (double side : {1.0, -1.0}) {
    EstimatorState s = EstimatorState::initial(kRoi);
    s.unknown = blob({-150, side * 200}, 20);
    const PlanResult r = plan(make_context(s, GroundRegion(Tag::outer), kRoi, p), u, cam(), p);
    CHECK(r.chosen.u1 * side > 0);
  }
}

TEST_CASE("lambda weights only the distance term") {
  MpcParams p = params();
  std::mt19937_64 rng(5);
  const EstimatorState s = random_state(rng);
  const UavTruth u = random_uav(rng);
  const auto c = enumerate_candidates(p.U, p.h)[7];
  const Score a = score(make_context(s, GroundRegion(Tag::outer), kRoi, p), u, cam(), c, p);
  p.lambda = 10;
  const Score b = score(make_context(s, GroundRegion(Tag::outer), kRoi, p), u, cam(), c, p);
  CHECK(a.j0 == b.j0);
  CHECK(a.j1 == b.j1);
  CHECK(b.j == doctest::Approx(b.j0 + 10 * b.j1));
  p.lambda = 0;
  const PlanResult r = plan(make_context(s, GroundRegion(Tag::outer), kRoi, p), u, cam(), p);
  CHECK(r.j == r.j0);
}

TEST_CASE("model bounds the step-by-step prediction") {
  const MpcParams p = params();
  const CameraIntrinsics intr = cam();
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 8; ++trial) {
    const EstimatorState s = random_state(rng);
    const GroundRegion hidden = blob({uniform(rng, -100, 100), uniform(rng, -100, 100)}, 40);
    const PlanContext ctx = make_context(s, hidden, kRoi, p);
    UavTruth u = random_uav(rng);
    u.p *= 0.5;
    const auto c = enumerate_candidates(p.U, p.h)[rng() % 25];
    // one step at a time, clearing at the two evaluation states only
    EstimatorState x = s;
    for (int k = 1; k <= p.h; ++k) {
      x = predict(x, p.T, p.v_max, kRoi);
      if (k == p.h / 2 || k == p.h) {
        const ConvexPolygon f = fov_ground_polygon(uav_pose(roll_uav(u, c, k, p)), intr, &kRoi);
        const GroundRegion seen = subtract(GroundRegion::from_convex(f, Tag::inner), hidden);
        x.unknown = subtract(x.unknown, seen);
        for (auto& [j, r] : x.per_target) r = subtract(r, seen);
      }
    }
    const PredictedEstimate m = predict_estimate(s, ctx, u, intr, c, p);
    const PredictedEstimate raw = predict_estimate(s, ctx, u, intr, c, p, false);
    CHECK(area(subtract(x.unknown, m.unknown)) < 1e-6);
    CHECK(area(subtract(m.unknown, raw.unknown)) < 1e-6);
    for (const auto& [j, r] : x.per_target) {
      CHECK(area(subtract(r, m.per_target.at(j))) < 1e-6);
      CHECK(area(subtract(m.per_target.at(j), raw.per_target.at(j))) < 1e-6);
    }
    // the union model used for J0 agrees with the per-set model
    std::vector<GroundRegion> parts{m.unknown};
    for (const auto& [j, r] : m.per_target) parts.push_back(r);
    const Score sc = score(ctx, u, intr, c, p);
    CHECK(sc.j0 == doctest::Approx(area(unite_all(parts, Tag::outer))).epsilon(1e-6));
  }
}

TEST_CASE("other UAVs' clearing lowers the cost") {
  const MpcParams p = params();
  EstimatorState s = EstimatorState::initial(kRoi);
  PlanContext ctx = make_context(s, GroundRegion(Tag::outer), kRoi, p);
  UavTruth u;
  u.p = {-100, -100};
  const PlanResult alone = plan(ctx, u, cam(), p);
  ctx.extra_clearing = GroundRegion::box({0, 0, 200, 200}, Tag::inner);
  const PlanResult joint = plan(ctx, u, cam(), p);
  CHECK(joint.j0 < alone.j0);
  CHECK(joint.j0 >= alone.j0 - 200 * 200 - 1e-6);
}

TEST_CASE("plan is deterministic") {
  const MpcParams p = params();
  std::mt19937_64 rng(11);
  const EstimatorState s = random_state(rng);
  const UavTruth u = random_uav(rng);
  const PlanContext ctx = make_context(s, GroundRegion(Tag::outer), kRoi, p);
  const PlanResult a = plan(ctx, u, cam(), p), b = plan(ctx, u, cam(), p);
  CHECK(a.chosen.i1 == b.chosen.i1);
  CHECK(a.chosen.i2 == b.chosen.i2);
  CHECK(a.j == b.j);
  CHECK(a.clearing == b.clearing);
}
