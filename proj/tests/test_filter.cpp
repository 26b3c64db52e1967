#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "smsearch/filter.hpp"

using namespace smsearch;

namespace {

const GroundBox kRoi = GroundBox::centered(100);

GroundRegion sq(double x0, double y0, double x1, double y1, Tag t) { return GroundRegion::box({x0, y0, x1, y1}, t); }

bool same(const GroundRegion& a, const GroundRegion& b) { return symmetric_difference_area(a, b) < 1e-6; }

// subset up to grid rounding
bool within(const GroundRegion& a, const GroundRegion& b) { return area(subtract(a, b)) < 1e-6; }

}  // namespace

TEST_CASE("initial state") {
  const EstimatorState s = EstimatorState::initial(kRoi);
  CHECK(s.identified.empty());
  CHECK(s.per_target.empty());
  CHECK(area(s.unknown) == doctest::Approx(kRoi.area()));
  CHECK(s.unknown.tag() == Tag::outer);
  CHECK(s.obstacle_acc.empty());
  CHECK(s.hidden_acc.empty());
}

TEST_CASE("predict") {
  EstimatorState s = EstimatorState::initial(kRoi);
  s.unknown = sq(-10, -10, 10, 10, Tag::outer);
  s.identified = {2};
  s.per_target[2] = sq(30, 30, 33, 31, Tag::outer);
  const EstimatorState same_s = predict(s, 0.5, 0, kRoi);
  CHECK(same_s.unknown == s.unknown);

  const EstimatorState n = predict(s, 0.5, 1, kRoi);
  // a 20 m square grown by 0.5: between the rounded and the square-cornered offsets
  CHECK(area(n.unknown) >= 21 * 21 - (4 - std::numbers::pi) * 0.25);
  CHECK(area(n.unknown) <= 21 * 21 + 1e-3);
  CHECK(n.unknown.tag() == Tag::outer);

  // Monte-Carlo forward reachability
  std::mt19937_64 rng(8);
  for (int i = 0; i < 5000; ++i) {
    TargetTruth t;
    t.p = {uniform(rng, 30, 33), uniform(rng, 30, 31)};
    t.heading = uniform(rng, -4, 4);
    t.speed = uniform(rng, 0, 1);
    if (i % 10 == 0) t.speed = 1;
    const TargetTruth m = step_target(t, uniform(rng, -1, 1), 0.5);
    CHECK(n.per_target.at(2).contains(m.p));
  }
  // clipped to the RoI
  s.unknown = GroundRegion::box(kRoi, Tag::outer);
  CHECK(area(predict(s, 0.5, 1, kRoi).unknown) == doctest::Approx(kRoi.area()));
}

TEST_CASE("measurement update") {
  EstimatorState s = EstimatorState::initial(kRoi);
  FramePerception fp;
  fp.free_ground = sq(-50, -50, 0, 0, Tag::inner);
  fp.obstacle_margin = sq(60, 60, 70, 70, Tag::inner);
  fp.hidden = sq(0, 0, 40, 40, Tag::outer);
  fp.target_sets[3] = sq(10, 10, 20, 20, Tag::outer);
  const EstimatorState n = measurement_update(s, fp, {{3, 1, 2, 1, 2}});
  CHECK(n.identified == std::vector<int>{3});
  CHECK(within(n.per_target.at(3), fp.target_sets.at(3)));
  CHECK(area(n.unknown) == doctest::Approx(kRoi.area() - 2500 - 100));
  CHECK(!n.unknown.contains({-20, -20}));
  CHECK(within(fp.obstacle_margin, n.obstacle_acc));

  // nothing seen: nothing changes
  FramePerception empty;
  const EstimatorState z = measurement_update(n, empty, {});
  CHECK(same(z.unknown, n.unknown));
  CHECK(same(z.per_target.at(3), n.per_target.at(3)));

  // known target not detected: cleared ground is removed from its set
  FramePerception part;
  part.free_ground = sq(10, 10, 15, 20, Tag::inner);
  const EstimatorState q = measurement_update(n, part, {});
  CHECK(area(q.per_target.at(3)) == doctest::Approx(50).epsilon(1e-6));

  // detected again: intersection with the new measurement
  FramePerception again;
  again.target_sets[3] = sq(12, 12, 30, 30, Tag::outer);
  const EstimatorState r = measurement_update(n, again, {{3, 1, 1, 1, 1}});
  CHECK(area(r.per_target.at(3)) == doctest::Approx(64).epsilon(1e-6));

  // a measurement disjoint from the prior set is an inconsistency
  FramePerception bad;
  bad.target_sets[3] = sq(-90, -90, -80, -80, Tag::outer);
  CHECK_THROWS_AS(measurement_update(n, bad, {{3, 1, 1, 1, 1}}), HypothesisViolation);
}

TEST_CASE("update_hidden") {
  EstimatorState s = EstimatorState::initial(kRoi);
  FramePerception fp;
  fp.hidden = sq(0, 0, 10, 10, Tag::outer);
  fp.free_ground = sq(5, 0, 20, 10, Tag::inner);
  const EstimatorState n = update_hidden(s, fp);
  CHECK(area(n.hidden_acc) == doctest::Approx(50));
  FramePerception seen;
  seen.free_ground = sq(0, 0, 3, 10, Tag::inner);
  CHECK(area(update_hidden(n, seen).hidden_acc) == doctest::Approx(20));
}

TEST_CASE("broadcast and fusion") {
  EstimatorState a = EstimatorState::initial(kRoi), b = EstimatorState::initial(kRoi);
  a.unknown = subtract(a.unknown, sq(-100, -100, 0, 100, Tag::inner));
  b.unknown = subtract(b.unknown, sq(-100, -100, 100, 0, Tag::inner));
  a.identified = {1};
  a.per_target[1] = sq(10, 10, 30, 30, Tag::outer);
  b.identified = {1, 4};
  b.per_target[1] = sq(20, 0, 40, 25, Tag::outer);
  b.per_target[4] = sq(-50, 50, -40, 60, Tag::outer);
  a.obstacle_acc = sq(0, 0, 1, 1, Tag::inner);
  b.obstacle_acc = sq(5, 5, 6, 6, Tag::inner);
  FramePerception fa, fb;
  fa.free_ground = sq(50, 50, 60, 60, Tag::inner);
  a.hidden_acc = sq(50, 40, 70, 55, Tag::outer);
  b.hidden_acc = sq(-10, -10, 0, 0, Tag::outer);

  const Broadcast ma = make_broadcast(a, fa, 0, 7), mb = make_broadcast(b, fb, 1, 7);
  CHECK(ma.unknown == a.unknown);

  const EstimatorState self = fuse(a, {ma});
  CHECK(self.identified == a.identified);
  CHECK(same(self.unknown, a.unknown));
  CHECK(same(self.per_target.at(1), a.per_target.at(1)));

  const EstimatorState f1 = fuse(a, {ma, mb}), f2 = fuse(b, {mb, ma});
  CHECK(f1.identified == std::vector<int>{1, 4});
  CHECK(f1.unknown == f2.unknown);
  CHECK(f1.per_target.at(1) == f2.per_target.at(1));
  CHECK(area(f1.unknown) == doctest::Approx(100 * 100));
  CHECK(within(f1.per_target.at(1), a.per_target.at(1)));
  CHECK(within(f1.per_target.at(1), b.per_target.at(1)));
  CHECK(area(f1.per_target.at(1)) == doctest::Approx(10 * 15));
  // target 4 is unknown to a: its fused set is cut by a's unknown region
  CHECK(within(f1.per_target.at(4), a.unknown));
  CHECK(area(f1.per_target.at(4)) == doctest::Approx(0.0));
  CHECK(area(f1.obstacle_acc) == doctest::Approx(2));
  // (hidden_a u hidden_b) \ free_a
  CHECK(area(f1.hidden_acc) == doctest::Approx(20 * 15 - 10 * 5 + 100));

  // wire format
  const Broadcast back = broadcast_from_json(nlohmann::json::parse(to_json(mb).dump()));
  CHECK(back.sender == 1);
  CHECK(back.frame == 7);
  CHECK(back.identified == mb.identified);
  CHECK(back.unknown == mb.unknown);
  CHECK(back.per_target.at(4) == mb.per_target.at(4));
  CHECK(back.hidden == mb.hidden);
  CHECK(back.obstacle_margin == mb.obstacle_margin);
}
