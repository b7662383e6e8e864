#include "pisa/geometry.hpp"

#include <cmath>
#include <stdexcept>

#include "pisa/errors.hpp"
#include "pisa/text.hpp"

namespace pisa {

void CameraModel::validate() const {
  if (!(focal_length_mm > 0.0)) {
    throw ValidationError("camera focal length must be > 0, got " +
                          format_double(focal_length_mm));
  }
  if (!(sensor_width_mm > 0.0)) {
    throw ValidationError("camera sensor width must be > 0, got " +
                          format_double(sensor_width_mm));
  }
  if (image_width < 1 || image_height < 1) {
    throw ValidationError("camera image dimensions must be >= 1");
  }
  if (image_width != image_height) {
    throw ValidationError("camera sensor is square: image_width must equal image_height");
  }
  if (!(camera_height_m > 0.0)) {
    throw ValidationError("camera height must be > 0, got " +
                          format_double(camera_height_m));
  }
}

double project(const CameraModel& cam, const WorldPoint& p) {
  if (!(p.depth_m > 0.0)) {
    throw std::domain_error("project: depth must be > 0, got " + format_double(p.depth_m));
  }
  return cam.focal_length_mm * (p.height_m - cam.camera_height_m) / p.depth_m;
}

double beta(const CameraModel& cam, double sensor_y_mm) {
  return sensor_y_mm / cam.focal_length_mm;
}

WorldPoint back_project(const CameraModel& cam, double sensor_y_mm, double depth_m) {
  if (!(depth_m > 0.0)) {
    throw std::domain_error("back_project: depth must be > 0, got " + format_double(depth_m));
  }
  return WorldPoint{cam.camera_height_m + beta(cam, sensor_y_mm) * depth_m, depth_m};
}

double pixel_to_sensor(const CameraModel& cam, int row) {
  if (row < 0 || row >= cam.image_height) {
    throw std::domain_error("pixel_to_sensor: row " + format_int(row) +
                            " outside [0, " + format_int(cam.image_height) + ")");
  }
  double h = static_cast<double>(cam.image_height);
  return (h / 2.0 - (row + 0.5)) * cam.sensor_width_mm / h;
}

double sensor_to_row(const CameraModel& cam, double sensor_y_mm) {
  double h = static_cast<double>(cam.image_height);
  return h / 2.0 - sensor_y_mm * h / cam.sensor_width_mm;
}

int sensor_to_row_index(const CameraModel& cam, double sensor_y_mm) {
  // std::round rounds half away from zero, which is the contract here.
  double r = std::round(sensor_to_row(cam, sensor_y_mm));
  if (r < 0.0) return 0;
  if (r > cam.image_height - 1) return cam.image_height - 1;
  return static_cast<int>(r);
}

double row_to_sensor(const CameraModel& cam, double row) {
  double h = static_cast<double>(cam.image_height);
  return (h / 2.0 - row) * cam.sensor_width_mm / h;
}

bool in_frame(const CameraModel& cam, double sensor_y_mm) {
  return std::fabs(sensor_y_mm) <= cam.sensor_width_mm / 2.0;
}

}  // namespace pisa
