#pragma once

#include "pisa/mask.hpp"

namespace pisa {

// Dense rewards with analytic gradients, for reward-style fine-tuning of the
// modules that produce segmentations, optical flow, and depth. Values and
// gradients are computed in double; gradients have the shape of the generated
// input.

struct RewardResult {
  double value = 0.0;
  FieldSequence gradient;
};

// Soft IoU of sigmoid(logits) against a binary mask, averaged over frames.
// Per frame: I = sum(s * m), U = sum(s + m - s * m), reward I / U (1.0 when
// U == 0). d/dlogit = sigmoid'(l) * (m * U - (1 - m) * I) / U^2 / n_frames,
// with sigmoid' clamped to 0 for |logit| > 30 to dodge exp underflow noise.
RewardResult seg_reward(const FieldSequence& gen_logits, const MaskSequence& gt_mask);

// R = -mean |gen - gt| over every element; gradient -sign(gen - gt) / count
// with sign(0) = 0. Flow fields carry 2 channels.
RewardResult flow_reward(const FieldSequence& gen_flow, const FieldSequence& gt_flow);

// Same as flow_reward for single-channel depth.
RewardResult depth_reward(const FieldSequence& gen_depth, const FieldSequence& gt_depth);

}  // namespace pisa
