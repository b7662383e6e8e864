#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pisa/errors.hpp"
#include "pisa/rewards.hpp"
#include "pisa/rng.hpp"

using namespace pisa;

namespace {

FieldSequence random_field(int n, int h, int w, int c, std::uint64_t seed, double lo,
                           double hi) {
  auto f = FieldSequence::create(n, h, w, c);
  Rng rng(seed);
  for (auto& v : f.data) v = rng.uniform(lo, hi);
  return f;
}

MaskSequence random_mask(int n, int h, int w, std::uint64_t seed, double density) {
  auto m = MaskSequence::create(n, h, w);
  Rng rng(seed);
  for (auto& px : m.data) px = rng.uniform01() < density ? 1 : 0;
  return m;
}

// Relative agreement between an analytic gradient entry and a central
// difference of the scalar reward.
void check_gradient(const FieldSequence& grad,
                    const std::function<double(const FieldSequence&)>& value,
                    const FieldSequence& at, double h) {
  FieldSequence probe = at;
  for (std::size_t i = 0; i < at.data.size(); ++i) {
    double fd = oracle::central_diff(
        [&](double x) {
          probe.data[i] = x;
          double v = value(probe);
          probe.data[i] = at.data[i];
          return v;
        },
        at.data[i], h);
    double g = grad.data[i];
    CHECK(std::fabs(g - fd) <= 1e-6 * std::max(1.0, std::max(std::fabs(g), std::fabs(fd))));
  }
}

}  // namespace

TEST_CASE("seg reward is near 1 for confident correct logits") {
  auto gt = random_mask(2, 6, 6, 3, 0.4);
  auto logits = FieldSequence::create(2, 6, 6, 1);
  for (std::size_t i = 0; i < gt.data.size(); ++i)
    logits.data[i] = gt.data[i] ? 50.0 : -50.0;
  auto r = seg_reward(logits, gt);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-9));
  // Saturated logits sit on the clamped sigmoid tail: zero gradient.
  for (double g : r.gradient.data) CHECK(g == 0.0);
}

TEST_CASE("seg reward is near 0 for confident wrong logits") {
  auto gt = random_mask(1, 6, 6, 4, 0.4);
  auto logits = FieldSequence::create(1, 6, 6, 1);
  for (std::size_t i = 0; i < gt.data.size(); ++i)
    logits.data[i] = gt.data[i] ? -50.0 : 50.0;
  CHECK(seg_reward(logits, gt).value == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("empty ground-truth frames count as solved when the union is empty") {
  auto gt = MaskSequence::create(2, 4, 4);  // all background
  auto logits = FieldSequence::create(2, 4, 4, 1);
  // Deep enough for sigmoid to underflow to exactly 0, so U == 0 exactly.
  for (auto& v : logits.data) v = -800.0;
  auto r = seg_reward(logits, gt);
  CHECK(r.value == 1.0);
  for (double g : r.gradient.data) CHECK(g == 0.0);

  // Milder confidence leaves a nonzero union; the soft IoU is then 0 because
  // the intersection is exactly 0.
  for (auto& v : logits.data) v = -40.0;
  CHECK(seg_reward(logits, gt).value == 0.0);
}

TEST_CASE("seg gradient matches finite differences") {
  auto gt = random_mask(2, 5, 5, 7, 0.35);
  auto logits = random_field(2, 5, 5, 1, 8, -2.0, 2.0);
  auto r = seg_reward(logits, gt);
  check_gradient(r.gradient, [&](const FieldSequence& f) { return seg_reward(f, gt).value; },
                 logits, 1e-4);
}

TEST_CASE("flow reward is the negative mean absolute difference") {
  auto gt = random_field(2, 4, 4, 2, 9, -1.0, 1.0);
  auto gen = gt;
  CHECK(flow_reward(gen, gt).value == 0.0);
  for (auto& v : gen.data) v += 0.25;
  CHECK(flow_reward(gen, gt).value == doctest::Approx(-0.25).epsilon(1e-12));
}

TEST_CASE("flow gradient is -sign/count away from ties") {
  auto gt = random_field(1, 3, 3, 2, 10, -1.0, 1.0);
  auto gen = random_field(1, 3, 3, 2, 11, -1.0, 1.0);
  auto r = flow_reward(gen, gt);
  const double n = static_cast<double>(gen.data.size());
  for (std::size_t i = 0; i < gen.data.size(); ++i) {
    double diff = gen.data[i] - gt.data[i];
    double want = diff > 0 ? -1.0 / n : diff < 0 ? 1.0 / n : 0.0;
    CHECK(r.gradient.data[i] == want);
  }
  // Exact tie: zero subgradient.
  gen.data[0] = gt.data[0];
  CHECK(flow_reward(gen, gt).gradient.data[0] == 0.0);
}

TEST_CASE("flow gradient matches finite differences") {
  auto gt = random_field(2, 4, 4, 2, 12, -1.0, 1.0);
  auto gen = random_field(2, 4, 4, 2, 13, -1.0, 1.0);
  auto r = flow_reward(gen, gt);
  check_gradient(r.gradient, [&](const FieldSequence& f) { return flow_reward(f, gt).value; },
                 gen, 1e-6);
}

TEST_CASE("depth reward mirrors flow on one channel") {
  auto gt = random_field(3, 4, 4, 1, 14, 0.5, 5.0);
  auto gen = random_field(3, 4, 4, 1, 15, 0.5, 5.0);
  auto r = depth_reward(gen, gt);
  double manual = 0.0;
  for (std::size_t i = 0; i < gt.data.size(); ++i)
    manual += std::fabs(gen.data[i] - gt.data[i]);
  CHECK(r.value == doctest::Approx(-manual / gt.data.size()).epsilon(1e-12));
}

TEST_CASE("reward inputs are shape-checked") {
  auto gt_mask = random_mask(2, 4, 4, 1, 0.5);
  auto wrong_frames = FieldSequence::create(3, 4, 4, 1);
  CHECK_THROWS_AS(seg_reward(wrong_frames, gt_mask), ValidationError);
  auto two_channel = FieldSequence::create(2, 4, 4, 2);
  CHECK_THROWS_AS(seg_reward(two_channel, gt_mask), ValidationError);

  auto flow_a = FieldSequence::create(2, 4, 4, 2);
  auto flow_bad = FieldSequence::create(2, 4, 4, 1);
  CHECK_THROWS_AS(flow_reward(flow_a, flow_bad), ValidationError);
  CHECK_THROWS_AS(flow_reward(flow_bad, flow_bad), ValidationError);
  auto depth_bad = FieldSequence::create(2, 4, 4, 2);
  CHECK_THROWS_AS(depth_reward(depth_bad, depth_bad), ValidationError);
}
