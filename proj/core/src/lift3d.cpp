#include "pisa/lift3d.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pisa/errors.hpp"
#include "pisa/metrics.hpp"
#include "pisa/text.hpp"

namespace pisa {

double mask_bottom_row(const MaskSequence& masks, int frame) {
  if (frame < 0 || frame >= masks.n_frames) {
    throw ValidationError("mask_bottom_row: frame index out of range");
  }
  const std::uint8_t* px = masks.frame(frame);
  const int h = masks.height, w = masks.width;
  int last = -1;
  for (int r = h - 1; r >= 0 && last < 0; --r) {
    const std::uint8_t* row = px + static_cast<std::size_t>(r) * w;
    for (int c = 0; c < w; ++c) {
      if (row[c]) {
        last = r;
        break;
      }
    }
  }
  if (last < 0) {
    throw MetricError("mask_bottom_row: frame " + format_int(frame) + " is empty");
  }
  auto count_row = [&](int r) {
    const std::uint8_t* row = px + static_cast<std::size_t>(r) * w;
    int n = 0;
    for (int c = 0; c < w; ++c) n += row[c];
    return n;
  };
  double c_last = count_row(last);
  double c_prev = last > 0 ? count_row(last - 1) : 0.0;
  // Extrapolate the count profile across the last two rows to its zero
  // crossing; a full-width final row pins the boundary to the row's bottom.
  double frac = 1.0;
  if (c_prev > c_last) frac = std::min(1.0, c_last / (c_prev - c_last));
  return last + frac;
}

double estimate_t_drop(const MaskSequence& gen, double fps) {
  if (!(fps > 0.0)) throw ValidationError("estimate_t_drop: fps must be > 0");
  ImpactDetection det = detect_impact(gen);
  if (!det.frame) {
    throw MetricError(det.any_motion
                          ? "estimate_t_drop: no impact detectable in the clip"
                          : "estimate_t_drop: static clip, nothing ever drops");
  }
  return *det.frame / fps;
}

double implied_depth(const CameraModel& cam, double bottom_sensor_y_mm, double t_drop_s,
                     double gravity) {
  if (!(t_drop_s > 0.0)) throw std::domain_error("implied_depth: t_drop must be > 0");
  if (!(gravity > 0.0)) throw std::domain_error("implied_depth: gravity must be > 0");
  double b = beta(cam, bottom_sensor_y_mm);
  if (!(b > 0.0)) {
    throw std::domain_error(
        "implied_depth: object bottom must project above the horizon (beta > 0), got " +
        format_double(b));
  }
  double numerator = gravity * t_drop_s * t_drop_s / 2.0 - cam.camera_height_m;
  if (!(numerator > 0.0)) {
    throw std::domain_error("implied_depth: no consistent depth, drop height " +
                            format_double(gravity * t_drop_s * t_drop_s / 2.0) +
                            " does not clear the camera height");
  }
  return numerator / b;
}

LiftedTrajectory lift(const CameraModel& cam, const MaskSequence& gen, double fps,
                      double gravity, std::optional<double> known_t_drop_s) {
  cam.validate();
  if (gen.height != cam.image_height || gen.width != cam.image_width) {
    throw ValidationError("lift: mask resolution does not match the camera");
  }
  LiftedTrajectory out;
  out.t_drop_s = known_t_drop_s ? *known_t_drop_s : estimate_t_drop(gen, fps);
  if (!(out.t_drop_s > 0.0)) throw ValidationError("lift: t_drop must be > 0");

  double y0_mm = row_to_sensor(cam, mask_bottom_row(gen, 0));
  out.implied_depth_m = implied_depth(cam, y0_mm, out.t_drop_s, gravity);

  int last_frame = static_cast<int>(std::floor(out.t_drop_s * fps + 1e-9));
  last_frame = std::min(last_frame, gen.n_frames - 1);
  for (int i = 0; i <= last_frame; ++i) {
    double y_mm = row_to_sensor(cam, mask_bottom_row(gen, i));
    out.times_s.push_back(i / fps);
    out.sensor_y_mm.push_back(y_mm);
    out.height_m.push_back(cam.camera_height_m + beta(cam, y_mm) * out.implied_depth_m);
  }
  return out;
}

}  // namespace pisa
