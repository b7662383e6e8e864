#pragma once

#include <optional>
#include <vector>

#include "pisa/geometry.hpp"
#include "pisa/mask.hpp"

namespace pisa {

// Single-hypothesis 3D lifting of a dropping clip: the detected dropping time
// pins the depth that makes the observed image motion consistent with
// freefall, and each frame's object-bottom ray is then pushed to that depth.

// Continuous bottom boundary (row units, downward) of a mask frame: the last
// foreground row plus a sub-pixel offset from linearly extrapolating the
// foreground-count profile of the last two rows to zero. Throws MetricError
// on an empty frame.
double mask_bottom_row(const MaskSequence& masks, int frame);

// Impact frame / fps from the shared impact detector. Throws MetricError for
// static clips and clips without a detectable impact.
double estimate_t_drop(const MaskSequence& gen, double fps);

// Depth implied by a dropping time for the ray through the object's bottom at
// t = 0: Z = (g t^2 / 2 - camera_height) / beta. Throws std::domain_error when
// beta <= 0 or the numerator is not positive (no consistent depth).
double implied_depth(const CameraModel& cam, double bottom_sensor_y_mm, double t_drop_s,
                     double gravity);

struct LiftedTrajectory {
  std::vector<double> times_s;
  std::vector<double> sensor_y_mm;  // object-bottom image coordinate per frame
  std::vector<double> height_m;     // lifted world height of the object bottom
  double implied_depth_m = 0.0;
  double t_drop_s = 0.0;
};

// Lifts frames 0 .. floor(t_drop * fps). When known_t_drop_s is absent the
// dropping time comes from estimate_t_drop. At t = 0 the lifted height equals
// g * t_drop^2 / 2 by construction.
LiftedTrajectory lift(const CameraModel& cam, const MaskSequence& gen, double fps,
                      double gravity, std::optional<double> known_t_drop_s = {});

}  // namespace pisa
