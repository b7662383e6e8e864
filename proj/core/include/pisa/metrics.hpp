#pragma once

#include <optional>
#include <vector>

#include "pisa/mask.hpp"

namespace pisa {

// Mask-based physical-accuracy metrics. Pixel coordinates are taken at pixel
// centers and normalized by the image width, so positions live in [0, 1] and
// shifting a mask by k pixels moves its centroid by exactly k / width.

// Frame mapping from a generated clip onto ground truth: j[i] is the gt frame
// whose timestamp is closest to i / gen_fps, i.e. round(i * gt_fps / gen_fps)
// rounded half up and clamped to [0, gt_n - 1]. Throws MetricError when the
// generated clip runs longer than the ground truth plus half a gt frame.
std::vector<int> align_fps(double gen_fps, double gt_fps, int gen_n, int gt_n);

struct AlignedPair {
  MaskSequence gen;
  MaskSequence gt;           // gathered: gt.frame(i) corresponds to gen.frame(i)
  std::vector<int> mapping;  // original gt indices, non-decreasing
};

// Validates matching resolutions and builds the gathered pair.
AlignedPair align(const MaskSequence& gen, double gen_fps, const MaskSequence& gt,
                  double gt_fps);

// Mean distance between foreground centroids. Frames where either mask is
// empty contribute sqrt(2); MetricError if every frame of either side is empty.
double trajectory_l2(const AlignedPair& pair);
std::vector<double> trajectory_l2_per_frame(const AlignedPair& pair);

// Symmetric mean-of-min Chamfer distance between foreground pixel sets,
// computed with an exact Euclidean distance transform. Empty frames
// contribute 2 * sqrt(2).
double chamfer(const AlignedPair& pair);
std::vector<double> chamfer_per_frame(const AlignedPair& pair);

// Mean intersection-over-union; frames with an empty union count as 1.0.
double iou(const AlignedPair& pair);
std::vector<double> iou_per_frame(const AlignedPair& pair);

// Impact detection on a mask clip's centroid rows. The impact frame is the
// first frame whose centroid moves up by more than tau = 0.25 px after prior
// downward motion (a bounce), or, failing that, the first frame followed by
// two consecutive sub-tau row deltas (the object has settled). Returns nullopt
// for static clips or when no impact is found.
struct ImpactDetection {
  std::optional<int> frame;
  bool any_motion = false;
};
ImpactDetection detect_impact(const MaskSequence& masks);

struct TimeErrorResult {
  double seconds = 0.0;
  // Impact frame when found, -1 otherwise.
  int impact_frame = -1;
  enum class Status { ok, static_clip, no_impact } status = Status::ok;
};

// |detected impact time - true dropping time|, zero whenever the true time
// falls inside the detected frame interval [(F-1)/fps, F/fps]. Static clips
// (and clips without a detectable impact) score the full clip duration.
TimeErrorResult time_error(const MaskSequence& gen, double fps, double y0, double gravity);

struct MetricReport {
  double l2 = 0.0;
  double chamfer = 0.0;
  double iou = 0.0;
  TimeErrorResult time;
  std::vector<double> per_frame_l2, per_frame_chamfer, per_frame_iou;
};

// Convenience bundle used by the evaluation harness. y0/gravity feed the
// dropping-time metric and refer to the ground-truth scene.
MetricReport evaluate_pair(const MaskSequence& gen, double gen_fps,
                           const MaskSequence& gt, double gt_fps, double y0,
                           double gravity);

// Exact squared Euclidean distance transform (Felzenszwalb-Huttenlocher) to
// the nearest foreground pixel. Entries for a frame without foreground are
// +infinity. Exposed for tests and benchmarks.
std::vector<double> squared_distance_transform(const std::uint8_t* mask, int height,
                                               int width);

}  // namespace pisa
