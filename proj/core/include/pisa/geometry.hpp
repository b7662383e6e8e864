#pragma once

namespace pisa {

// Pinhole camera with a square sensor and a horizontal optical axis at a fixed
// height above the ground plane. Only the vertical axis and depth matter for
// dropped objects, so world points carry (height, depth); the lateral axis
// shows up only in rasterization.
//
// Conventions, used everywhere downstream:
//   - sensor-plane y is in millimeters and grows upward,
//   - pixel rows grow downward, pixel centers sit at row + 0.5,
//   - depth Z is measured forward along the optical axis and must be > 0.
struct CameraModel {
  double focal_length_mm = 35.0;
  double sensor_width_mm = 32.0;
  int image_width = 256;
  int image_height = 256;
  double camera_height_m = 0.5;

  // Throws ValidationError. Sensor is square: width == height in pixels.
  void validate() const;

  bool operator==(const CameraModel&) const = default;

  double mm_per_pixel() const {
    return sensor_width_mm / static_cast<double>(image_height);
  }
};

struct WorldPoint {
  double height_m = 0.0;  // Y, up-positive, relative to the ground plane
  double depth_m = 0.0;   // Z, forward along the optical axis
};

// Sensor-plane y in mm: f * (Y - camera_height) / Z. Throws std::domain_error
// for non-positive depth.
double project(const CameraModel& cam, const WorldPoint& p);

// Ray slope dY/dZ for the ray through sensor y.
double beta(const CameraModel& cam, double sensor_y_mm);

// Point at depth `depth_m` on the ray through sensor y:
// Y = camera_height + beta * Z. Throws std::domain_error for Z <= 0.
WorldPoint back_project(const CameraModel& cam, double sensor_y_mm, double depth_m);

// Sensor y of the center of pixel `row`. Throws std::domain_error unless
// 0 <= row < image_height.
double pixel_to_sensor(const CameraModel& cam, int row);

// Continuous row coordinate of sensor y (0 at the top edge, image_height at
// the bottom edge). Pixel k covers [k, k+1).
double sensor_to_row(const CameraModel& cam, double sensor_y_mm);

// sensor_to_row rounded half away from zero and clamped to [0, image_height-1].
int sensor_to_row_index(const CameraModel& cam, double sensor_y_mm);

// Inverse of sensor_to_row for continuous (boundary) row coordinates.
double row_to_sensor(const CameraModel& cam, double row);

bool in_frame(const CameraModel& cam, double sensor_y_mm);

}  // namespace pisa
