#include "pisa/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pisa/errors.hpp"
#include "pisa/text.hpp"

namespace pisa {

namespace {

constexpr double kRowDeltaTau = 0.25;  // pixels of centroid motion treated as noise

// Large-but-finite stand-in for infinity inside the distance transform. Keeps
// the lower-envelope arithmetic NaN-free; real squared distances in any frame
// are bounded by 2 * (dim - 1)^2 and stay exact integers in double.
constexpr double kFar = 1e20;

struct Centroid {
  bool present = false;
  double row = 0.0;  // pixel-center units
  double col = 0.0;
};

Centroid centroid_of(const MaskSequence& m, int f) {
  const std::uint8_t* px = m.frame(f);
  std::size_t count = 0;
  double sum_r = 0.0, sum_c = 0.0;
  std::size_t i = 0;
  for (int r = 0; r < m.height; ++r) {
    for (int c = 0; c < m.width; ++c, ++i) {
      if (px[i]) {
        ++count;
        sum_r += r;
        sum_c += c;
      }
    }
  }
  if (count == 0) return {};
  return {true, sum_r / static_cast<double>(count) + 0.5,
          sum_c / static_cast<double>(count) + 0.5};
}

void check_not_all_empty(const AlignedPair& pair, const char* metric) {
  bool gen_any = false, gt_any = false;
  for (int i = 0; i < pair.gen.n_frames; ++i) {
    gen_any = gen_any || !pair.gen.frame_empty(i);
    gt_any = gt_any || !pair.gt.frame_empty(i);
  }
  if (!gen_any || !gt_any) {
    throw MetricError(std::string(metric) + ": every frame of the " +
                      (!gen_any ? "generated" : "ground-truth") + " sequence is empty");
  }
}

// One pass of the exact 1D squared distance transform.
void dt_1d(const double* f, int n, double* d, int* v, double* z) {
  int k = 0;
  v[0] = 0;
  z[0] = -kFar;
  z[1] = kFar;
  for (int q = 1; q < n; ++q) {
    double s;
    while (true) {
      double qq = static_cast<double>(q), vv = static_cast<double>(v[k]);
      s = ((f[q] + qq * qq) - (f[v[k]] + vv * vv)) / (2.0 * qq - 2.0 * vv);
      if (s <= z[k]) {
        --k;
      } else {
        break;
      }
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kFar;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    double diff = static_cast<double>(q - v[k]);
    d[q] = diff * diff + f[v[k]];
  }
}

}  // namespace

std::vector<double> squared_distance_transform(const std::uint8_t* mask, int height,
                                               int width) {
  std::vector<double> grid(static_cast<std::size_t>(height) * width);
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = mask[i] ? 0.0 : kFar;

  int dim = std::max(height, width);
  std::vector<double> f(dim), d(dim), z(dim + 1);
  std::vector<int> v(dim);

  // Columns first, then rows.
  for (int c = 0; c < width; ++c) {
    for (int r = 0; r < height; ++r) f[r] = grid[static_cast<std::size_t>(r) * width + c];
    dt_1d(f.data(), height, d.data(), v.data(), z.data());
    for (int r = 0; r < height; ++r) grid[static_cast<std::size_t>(r) * width + c] = d[r];
  }
  for (int r = 0; r < height; ++r) {
    double* row = grid.data() + static_cast<std::size_t>(r) * width;
    std::copy(row, row + width, f.data());
    dt_1d(f.data(), width, d.data(), v.data(), z.data());
    std::copy(d.data(), d.data() + width, row);
  }
  return grid;
}

std::vector<int> align_fps(double gen_fps, double gt_fps, int gen_n, int gt_n) {
  if (!(gen_fps > 0.0) || !(gt_fps > 0.0)) {
    throw ValidationError("align_fps: fps values must be > 0");
  }
  if (gen_n < 1 || gt_n < 1) {
    throw ValidationError("align_fps: frame counts must be >= 1");
  }
  double gen_duration = gen_n / gen_fps;
  double gt_limit = gt_n / gt_fps + 0.5 / gt_fps;
  if (gen_duration > gt_limit) {
    throw MetricError("align_fps: generated clip (" + format_double(gen_duration) +
                      " s) outruns ground truth (" + format_double(gt_n / gt_fps) +
                      " s) by more than half a frame");
  }
  std::vector<int> mapping(gen_n);
  for (int i = 0; i < gen_n; ++i) {
    double j = std::floor(i * gt_fps / gen_fps + 0.5);  // round half up
    mapping[i] = std::clamp(static_cast<int>(j), 0, gt_n - 1);
  }
  return mapping;
}

AlignedPair align(const MaskSequence& gen, double gen_fps, const MaskSequence& gt,
                  double gt_fps) {
  if (gen.height != gt.height || gen.width != gt.width) {
    throw ValidationError("align: mask resolutions differ (" + format_int(gen.width) +
                          "x" + format_int(gen.height) + " vs " + format_int(gt.width) +
                          "x" + format_int(gt.height) +
                          "); export predictions at the ground-truth resolution");
  }
  AlignedPair pair;
  pair.mapping = align_fps(gen_fps, gt_fps, gen.n_frames, gt.n_frames);
  pair.gen = gen;
  pair.gt = MaskSequence::create(gen.n_frames, gt.height, gt.width, gt.object_id);
  for (int i = 0; i < gen.n_frames; ++i) {
    const std::uint8_t* src = gt.frame(pair.mapping[i]);
    std::copy(src, src + gt.frame_size(), pair.gt.frame(i));
  }
  return pair;
}

std::vector<double> trajectory_l2_per_frame(const AlignedPair& pair) {
  check_not_all_empty(pair, "trajectory_l2");
  const double w = pair.gen.width;
  std::vector<double> out(pair.gen.n_frames);
  for (int i = 0; i < pair.gen.n_frames; ++i) {
    Centroid a = centroid_of(pair.gen, i);
    Centroid b = centroid_of(pair.gt, i);
    if (!a.present || !b.present) {
      out[i] = std::sqrt(2.0);
      continue;
    }
    double dr = (a.row - b.row) / w;
    double dc = (a.col - b.col) / w;
    out[i] = std::sqrt(dr * dr + dc * dc);
  }
  return out;
}

double trajectory_l2(const AlignedPair& pair) {
  std::vector<double> per = trajectory_l2_per_frame(pair);
  double sum = 0.0;
  for (double v : per) sum += v;
  return sum / static_cast<double>(per.size());
}

std::vector<double> chamfer_per_frame(const AlignedPair& pair) {
  check_not_all_empty(pair, "chamfer");
  const int h = pair.gen.height, w = pair.gen.width;
  std::vector<double> out(pair.gen.n_frames);
  for (int i = 0; i < pair.gen.n_frames; ++i) {
    const std::uint8_t* gen_px = pair.gen.frame(i);
    const std::uint8_t* gt_px = pair.gt.frame(i);
    std::size_t n_gen = pair.gen.foreground_count(i);
    std::size_t n_gt = pair.gt.foreground_count(i);
    if (n_gen == 0 || n_gt == 0) {
      out[i] = 2.0 * std::sqrt(2.0);
      continue;
    }
    std::vector<double> to_gt = squared_distance_transform(gt_px, h, w);
    std::vector<double> to_gen = squared_distance_transform(gen_px, h, w);
    double sum_gen = 0.0, sum_gt = 0.0;
    std::size_t count = static_cast<std::size_t>(h) * w;
    for (std::size_t p = 0; p < count; ++p) {
      if (gen_px[p]) sum_gen += std::sqrt(to_gt[p]) / w;
      if (gt_px[p]) sum_gt += std::sqrt(to_gen[p]) / w;
    }
    out[i] = sum_gen / static_cast<double>(n_gen) + sum_gt / static_cast<double>(n_gt);
  }
  return out;
}

double chamfer(const AlignedPair& pair) {
  std::vector<double> per = chamfer_per_frame(pair);
  double sum = 0.0;
  for (double v : per) sum += v;
  return sum / static_cast<double>(per.size());
}

std::vector<double> iou_per_frame(const AlignedPair& pair) {
  std::vector<double> out(pair.gen.n_frames);
  std::size_t count = pair.gen.frame_size();
  for (int i = 0; i < pair.gen.n_frames; ++i) {
    const std::uint8_t* a = pair.gen.frame(i);
    const std::uint8_t* b = pair.gt.frame(i);
    std::size_t inter = 0, uni = 0;
    for (std::size_t p = 0; p < count; ++p) {
      inter += a[p] & b[p];
      uni += a[p] | b[p];
    }
    out[i] = uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
  }
  return out;
}

double iou(const AlignedPair& pair) {
  std::vector<double> per = iou_per_frame(pair);
  double sum = 0.0;
  for (double v : per) sum += v;
  return sum / static_cast<double>(per.size());
}

ImpactDetection detect_impact(const MaskSequence& masks) {
  const int n = masks.n_frames;
  std::vector<Centroid> cents(n);
  int nonempty = 0;
  for (int i = 0; i < n; ++i) {
    cents[i] = centroid_of(masks, i);
    nonempty += cents[i].present ? 1 : 0;
  }
  if (nonempty < 3) {
    throw MetricError("detect_impact: need at least 3 nonempty frames, have " +
                      format_int(nonempty));
  }
  // Row deltas between consecutive frames, defined only where both have
  // foreground. Positive means the centroid moved down.
  std::vector<double> delta(n, std::numeric_limits<double>::quiet_NaN());
  for (int i = 1; i < n; ++i) {
    if (cents[i].present && cents[i - 1].present) {
      delta[i] = cents[i].row - cents[i - 1].row;
    }
  }
  ImpactDetection det;
  int onset = -1;
  for (int i = 1; i < n; ++i) {
    if (!std::isnan(delta[i]) && std::fabs(delta[i]) > kRowDeltaTau) {
      det.any_motion = true;
      if (delta[i] > kRowDeltaTau) {
        onset = i;
        break;
      }
    }
  }
  if (onset < 0) return det;  // static, or never moves down
  det.any_motion = true;
  for (int i = onset; i < n; ++i) {
    if (std::isnan(delta[i])) continue;
    if (delta[i] < -kRowDeltaTau) {  // bounce: downward motion reversed
      det.frame = i;
      return det;
    }
    if (i + 2 < n && !std::isnan(delta[i + 1]) && !std::isnan(delta[i + 2]) &&
        std::fabs(delta[i + 1]) <= kRowDeltaTau &&
        std::fabs(delta[i + 2]) <= kRowDeltaTau) {  // settled for two frames
      det.frame = i;
      return det;
    }
  }
  return det;
}

TimeErrorResult time_error(const MaskSequence& gen, double fps, double y0,
                           double gravity) {
  if (!(fps > 0.0)) throw ValidationError("time_error: fps must be > 0");
  if (!(y0 > 0.0)) throw ValidationError("time_error: y0 must be > 0");
  if (!(gravity > 0.0)) throw ValidationError("time_error: gravity must be > 0");
  TimeErrorResult res;
  ImpactDetection det = detect_impact(gen);
  if (!det.frame) {
    res.seconds = gen.n_frames / fps;  // sentinel: full clip duration
    res.impact_frame = -1;
    res.status = det.any_motion ? TimeErrorResult::Status::no_impact
                                : TimeErrorResult::Status::static_clip;
    return res;
  }
  int f = *det.frame;
  double t_drop = std::sqrt(2.0 * y0 / gravity);
  double lo = (f - 1) / fps, hi = f / fps;
  res.impact_frame = f;
  res.status = TimeErrorResult::Status::ok;
  res.seconds = (lo <= t_drop && t_drop <= hi)
                    ? 0.0
                    : std::min(std::fabs(lo - t_drop), std::fabs(hi - t_drop));
  return res;
}

MetricReport evaluate_pair(const MaskSequence& gen, double gen_fps,
                           const MaskSequence& gt, double gt_fps, double y0,
                           double gravity) {
  AlignedPair pair = align(gen, gen_fps, gt, gt_fps);
  MetricReport rep;
  rep.per_frame_l2 = trajectory_l2_per_frame(pair);
  rep.per_frame_chamfer = chamfer_per_frame(pair);
  rep.per_frame_iou = iou_per_frame(pair);
  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  rep.l2 = mean(rep.per_frame_l2);
  rep.chamfer = mean(rep.per_frame_chamfer);
  rep.iou = mean(rep.per_frame_iou);
  rep.time = time_error(gen, gen_fps, y0, gravity);
  return rep;
}

}  // namespace pisa
