#include "pisa/rewards.hpp"

#include <cmath>

#include "pisa/errors.hpp"
#include "pisa/text.hpp"

namespace pisa {

namespace {

// Overflow-safe logistic.
double sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  double e = std::exp(x);
  return e / (1.0 + e);
}

double sigmoid_grad(double x) {
  if (std::fabs(x) > 30.0) return 0.0;  // below double noise anyway
  double s = sigmoid(x);
  return s * (1.0 - s);
}

RewardResult abs_diff_reward(const FieldSequence& gen, const FieldSequence& gt,
                             const char* what) {
  if (!gen.same_shape(gt)) {
    throw ValidationError(std::string(what) + ": generated and ground-truth shapes differ");
  }
  RewardResult res;
  res.gradient = FieldSequence::create(gen.n_frames, gen.height, gen.width, gen.channels);
  const double count = static_cast<double>(gen.data.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < gen.data.size(); ++i) {
    double diff = gen.data[i] - gt.data[i];
    sum += std::fabs(diff);
    double sign = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
    res.gradient.data[i] = -sign / count;
  }
  res.value = -sum / count;
  return res;
}

}  // namespace

RewardResult seg_reward(const FieldSequence& gen_logits, const MaskSequence& gt_mask) {
  if (gen_logits.channels != 1) {
    throw ValidationError("seg_reward: logits must be single-channel, got " +
                          format_int(gen_logits.channels));
  }
  if (gen_logits.n_frames != gt_mask.n_frames || gen_logits.height != gt_mask.height ||
      gen_logits.width != gt_mask.width) {
    throw ValidationError("seg_reward: logits and mask shapes differ");
  }
  const int n = gen_logits.n_frames;
  const std::size_t px = static_cast<std::size_t>(gen_logits.height) * gen_logits.width;
  RewardResult res;
  res.gradient = FieldSequence::create(n, gen_logits.height, gen_logits.width, 1);
  std::vector<double> s(px);
  double total = 0.0;
  for (int f = 0; f < n; ++f) {
    const double* logits = gen_logits.data.data() + px * f;
    const std::uint8_t* mask = gt_mask.frame(f);
    double inter = 0.0, uni = 0.0;
    for (std::size_t i = 0; i < px; ++i) {
      s[i] = sigmoid(logits[i]);
      double m = mask[i] ? 1.0 : 0.0;
      inter += s[i] * m;
      uni += s[i] + m - s[i] * m;
    }
    double* grad = res.gradient.data.data() + px * f;
    if (uni == 0.0) {
      // Both sides agree the object is absent; flat reward, zero gradient.
      total += 1.0;
      continue;
    }
    total += inter / uni;
    for (std::size_t i = 0; i < px; ++i) {
      double m = mask[i] ? 1.0 : 0.0;
      grad[i] = sigmoid_grad(logits[i]) * (m * uni - (1.0 - m) * inter) / (uni * uni) /
                static_cast<double>(n);
    }
  }
  res.value = total / static_cast<double>(n);
  return res;
}

RewardResult flow_reward(const FieldSequence& gen_flow, const FieldSequence& gt_flow) {
  if (gen_flow.channels != 2) {
    throw ValidationError("flow_reward: flow fields carry 2 channels, got " +
                          format_int(gen_flow.channels));
  }
  return abs_diff_reward(gen_flow, gt_flow, "flow_reward");
}

RewardResult depth_reward(const FieldSequence& gen_depth, const FieldSequence& gt_depth) {
  if (gen_depth.channels != 1) {
    throw ValidationError("depth_reward: depth fields are single-channel, got " +
                          format_int(gen_depth.channels));
  }
  return abs_diff_reward(gen_depth, gt_depth, "depth_reward");
}

}  // namespace pisa
