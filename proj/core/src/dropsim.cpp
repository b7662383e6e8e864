#include "pisa/dropsim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pisa/errors.hpp"
#include "pisa/rng.hpp"
#include "pisa/text.hpp"

namespace pisa {

namespace {

constexpr int kMaxSampleAttempts = 1000;

const char* kColors[] = {"crimson", "teal",     "ochre",  "slate",
                         "ivory",   "charcoal", "copper", "moss"};
const char* kMaterials[] = {"rubber", "wooden", "ceramic", "steel", "felt", "plastic"};

}  // namespace

void ObjectSolid::validate() const {
  for (double e : half_extents) {
    if (!(e > 0.0)) {
      throw ValidationError("object extents must be > 0, got " + format_double(e));
    }
  }
}

void SceneSpec::validate() const {
  dropper.validate();
  camera.validate();
  if (!(y0_m > 0.0)) {
    throw ValidationError("initial bottom height must be > 0, got " + format_double(y0_m));
  }
  double near_extent =
      dropper.shape == SolidShape::sphere ? dropper.radius() : dropper.half_extents[1];
  if (!(depth_m - near_extent > 0.0)) {
    throw ValidationError("object must sit fully in front of the camera (depth " +
                          format_double(depth_m) + ", near extent " +
                          format_double(near_extent) + ")");
  }
  if (!(fps > 0.0)) {
    throw ValidationError("fps must be > 0, got " + format_double(fps));
  }
  if (n_frames < 2) {
    throw ValidationError("n_frames must be >= 2, got " + format_int(n_frames));
  }
  if (!(restitution >= 0.0 && restitution < 1.0)) {
    throw ValidationError("restitution must be in [0, 1), got " +
                          format_double(restitution));
  }
  if (!(gravity > 0.0)) {
    throw ValidationError("gravity must be > 0, got " + format_double(gravity));
  }
}

double freefall_height(double y0, double restitution, double gravity, double t) {
  if (t < 0.0) throw std::domain_error("freefall_height: negative time");
  double tc = std::sqrt(2.0 * y0 / gravity);
  // Exact ballistic form up to first contact; the boundary sample stays >= 0.
  double y = y0 - 0.5 * gravity * t * t;
  if (t <= tc && y >= 0.0) return y;
  if (restitution <= 0.0) return 0.0;
  double v = restitution * gravity * tc;  // upward speed leaving the first bounce
  double start = tc;
  while (v > 1e-12) {
    double flight = 2.0 * v / gravity;
    if (t <= start + flight) {
      double tau = t - start;
      double h = (v - 0.5 * gravity * tau) * tau;
      return h > 0.0 ? h : 0.0;
    }
    start += flight;
    v *= restitution;
  }
  return 0.0;
}

TrajectorySample simulate(const SceneSpec& spec) {
  spec.validate();
  TrajectorySample traj;
  traj.times_s.resize(spec.n_frames);
  traj.bottom_y_m.resize(spec.n_frames);
  traj.contact_time_s = std::sqrt(2.0 * spec.y0_m / spec.gravity);
  for (int i = 0; i < spec.n_frames; ++i) {
    double t = static_cast<double>(i) / spec.fps;
    traj.times_s[i] = t;
    traj.bottom_y_m[i] = freefall_height(spec.y0_m, spec.restitution, spec.gravity, t);
  }
  return traj;
}

bool frustum_contains(const SceneSpec& spec) {
  const CameraModel& cam = spec.camera;
  double half_sensor = cam.sensor_width_mm / 2.0;
  double hw, hd, hh;
  if (spec.dropper.shape == SolidShape::sphere) {
    hw = hd = hh = spec.dropper.radius();
  } else {
    hw = spec.dropper.half_extents[0];
    hd = spec.dropper.half_extents[1];
    hh = spec.dropper.half_extents[2];
  }
  for (int ix = 0; ix < 2; ++ix) {
    for (int iy = 0; iy < 2; ++iy) {
      for (int iz = 0; iz < 2; ++iz) {
        double x = ix ? hw : -hw;
        double y = spec.y0_m + (iy ? 2.0 * hh : 0.0);
        double z = spec.depth_m + (iz ? hd : -hd);
        if (!(z > 0.0)) return false;
        double sx = cam.focal_length_mm * x / z;
        double sy = cam.focal_length_mm * (y - cam.camera_height_m) / z;
        if (std::fabs(sx) > half_sensor || std::fabs(sy) > half_sensor) return false;
      }
    }
  }
  return true;
}

SampledScene sample_scene(SampleMode mode, std::uint64_t rng_seed) {
  Rng rng(rng_seed);
  for (int attempt = 0; attempt < kMaxSampleAttempts; ++attempt) {
    SceneSpec spec;
    std::string label;
    switch (mode) {
      case SampleMode::psft:
      case SampleMode::ambiguous:
        spec.depth_m = rng.uniform(1.0, 3.0);
        spec.y0_m = rng.uniform(0.5, 1.5);
        spec.camera.camera_height_m = rng.uniform(0.4, 0.6);
        break;
      case SampleMode::ood_grid:
        spec.depth_m = rng.uniform(1.0, 5.0);
        spec.y0_m = rng.uniform(0.5, 2.5);
        spec.camera.camera_height_m = 0.5;
        label = (spec.depth_m <= 3.0 && spec.y0_m <= 1.5) ? "ID" : "OOD";
        break;
    }
    spec.dropper.shape = rng.below(2) == 0 ? SolidShape::sphere : SolidShape::box;
    if (spec.dropper.shape == SolidShape::sphere) {
      double r = rng.uniform(0.03, 0.12);
      spec.dropper.half_extents = {r, r, r};
    } else {
      spec.dropper.half_extents = {rng.uniform(0.03, 0.12), rng.uniform(0.03, 0.12),
                                   rng.uniform(0.03, 0.12)};
    }
    std::string color = kColors[rng.below(std::size(kColors))];
    std::string material = kMaterials[rng.below(std::size(kMaterials))];
    spec.dropper.albedo_tag = color + " " + material;
    spec.rng_seed = rng_seed;
    if (frustum_contains(spec)) return {spec, label};
  }
  throw SamplerError("sample_scene: no in-frustum scene after " +
                     format_int(kMaxSampleAttempts) + " attempts");
}

namespace {

struct HullPoint {
  double u, v;
};

double cross(const HullPoint& o, const HullPoint& a, const HullPoint& b) {
  return (a.u - o.u) * (b.v - o.v) - (a.v - o.v) * (b.u - o.u);
}

// Monotone chain; returns a counter-clockwise hull without collinear points.
std::vector<HullPoint> convex_hull(std::vector<HullPoint> pts) {
  std::sort(pts.begin(), pts.end(), [](const HullPoint& a, const HullPoint& b) {
    return a.u < b.u || (a.u == b.u && a.v < b.v);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const HullPoint& a, const HullPoint& b) {
                          return a.u == b.u && a.v == b.v;
                        }),
            pts.end());
  std::size_t n = pts.size();
  if (n < 3) return pts;
  std::vector<HullPoint> hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = n - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

void raster_sphere(const CameraModel& cam, double bottom_y, double radius, double depth,
                   std::uint8_t* out) {
  const int w = cam.image_width, h = cam.image_height;
  const double s = cam.sensor_width_mm, f = cam.focal_length_mm;
  const double mm_per_px = s / static_cast<double>(w);
  const double cy = (bottom_y + radius) - cam.camera_height_m;
  const double cz = depth;
  const double qa = cy * cy + cz * cz - radius * radius;
  if (qa <= 0.0) {
    // Camera inside the sphere: every forward ray is inside the silhouette.
    for (int r = 0; r < h; ++r) {
      double y = (h / 2.0 - (r + 0.5)) * s / h;
      if (cy * y + cz * f > 0.0) {
        std::fill(out + static_cast<std::size_t>(r) * w,
                  out + static_cast<std::size_t>(r + 1) * w, std::uint8_t{1});
      }
    }
    return;
  }
  for (int r = 0; r < h; ++r) {
    double y = (h / 2.0 - (r + 0.5)) * s / h;
    double b = cy * y + cz * f;
    if (b <= 0.0) continue;
    double rhs = b * b - qa * (y * y + f * f);
    if (rhs < 0.0) continue;
    // Conservative column span, then the exact conic test per pixel center.
    double half_width_px = std::sqrt(rhs / qa) / mm_per_px;
    double mid = w / 2.0 - 0.5;
    int lo = std::max(0, static_cast<int>(std::floor(mid - half_width_px)) - 1);
    int hi = std::min(w - 1, static_cast<int>(std::ceil(mid + half_width_px)) + 1);
    std::uint8_t* row = out + static_cast<std::size_t>(r) * w;
    for (int c = lo; c <= hi; ++c) {
      double x = ((c + 0.5) - w / 2.0) * mm_per_px;
      if (qa * x * x <= rhs) row[c] = 1;
    }
  }
}

void raster_box(const CameraModel& cam, double bottom_y, const std::array<double, 3>& he,
                double depth, std::uint8_t* out) {
  const int w = cam.image_width, h = cam.image_height;
  const double s = cam.sensor_width_mm, f = cam.focal_length_mm;
  std::vector<HullPoint> pts;
  pts.reserve(8);
  for (int ix = 0; ix < 2; ++ix) {
    for (int iy = 0; iy < 2; ++iy) {
      for (int iz = 0; iz < 2; ++iz) {
        double x = ix ? he[0] : -he[0];
        double y = bottom_y + (iy ? 2.0 * he[2] : 0.0) - cam.camera_height_m;
        double z = depth + (iz ? he[1] : -he[1]);
        double sx = f * x / z;
        double sy = f * y / z;
        // Continuous pixel-boundary coordinates, rows growing downward.
        pts.push_back({w / 2.0 + sx * w / s, h / 2.0 - sy * h / s});
      }
    }
  }
  std::vector<HullPoint> hull = convex_hull(std::move(pts));
  if (hull.size() < 3) return;
  double vmin = hull[0].v, vmax = hull[0].v;
  for (const HullPoint& p : hull) {
    vmin = std::min(vmin, p.v);
    vmax = std::max(vmax, p.v);
  }
  int r_lo = std::max(0, static_cast<int>(std::ceil(vmin - 0.5)));
  int r_hi = std::min(h - 1, static_cast<int>(std::floor(vmax - 0.5)));
  for (int r = r_lo; r <= r_hi; ++r) {
    double vscan = r + 0.5;
    double umin = 0.0, umax = 0.0;
    bool found = false;
    for (std::size_t i = 0; i < hull.size(); ++i) {
      const HullPoint& p = hull[i];
      const HullPoint& q = hull[(i + 1) % hull.size()];
      if (p.v == q.v) {
        if (p.v == vscan) {
          double lo = std::min(p.u, q.u), hi = std::max(p.u, q.u);
          umin = found ? std::min(umin, lo) : lo;
          umax = found ? std::max(umax, hi) : hi;
          found = true;
        }
        continue;
      }
      if (vscan < std::min(p.v, q.v) || vscan > std::max(p.v, q.v)) continue;
      double u = p.u + (q.u - p.u) * (vscan - p.v) / (q.v - p.v);
      umin = found ? std::min(umin, u) : u;
      umax = found ? std::max(umax, u) : u;
      found = true;
    }
    if (!found) continue;
    int c_lo = std::max(0, static_cast<int>(std::ceil(umin - 0.5)));
    int c_hi = std::min(w - 1, static_cast<int>(std::floor(umax - 0.5)));
    std::uint8_t* row = out + static_cast<std::size_t>(r) * w;
    for (int c = c_lo; c <= c_hi; ++c) row[c] = 1;
  }
}

}  // namespace

RasterizedClip rasterize_masks(const SceneSpec& spec, const TrajectorySample& traj) {
  spec.validate();
  if (static_cast<int>(traj.bottom_y_m.size()) != spec.n_frames ||
      static_cast<int>(traj.times_s.size()) != spec.n_frames) {
    throw ValidationError("trajectory length does not match n_frames");
  }
  RasterizedClip clip;
  clip.masks = MaskSequence::create(spec.n_frames, spec.camera.image_height,
                                    spec.camera.image_width, "dropper");
  clip.frame_empty.assign(spec.n_frames, 0);
  for (int i = 0; i < spec.n_frames; ++i) {
    std::uint8_t* frame = clip.masks.frame(i);
    if (spec.dropper.shape == SolidShape::sphere) {
      raster_sphere(spec.camera, traj.bottom_y_m[i], spec.dropper.radius(), spec.depth_m,
                    frame);
    } else {
      raster_box(spec.camera, traj.bottom_y_m[i], spec.dropper.half_extents, spec.depth_m,
                 frame);
    }
    clip.frame_empty[i] = clip.masks.frame_empty(i) ? 1 : 0;
  }
  return clip;
}

std::vector<SceneSpec> ambiguate(const SceneSpec& spec, int n_variants, double z_min,
                                 double z_max, std::uint64_t rng_seed) {
  spec.validate();
  if (n_variants < 1) throw ValidationError("ambiguate: n_variants must be >= 1");
  if (!(z_min > 0.0 && z_max > z_min)) {
    throw ValidationError("ambiguate: need 0 < z_min < z_max");
  }
  const double cam_h = spec.camera.camera_height_m;
  Rng rng(rng_seed);
  std::vector<SceneSpec> variants;
  variants.reserve(n_variants);
  for (int k = 0; k < n_variants; ++k) {
    bool placed = false;
    for (int attempt = 0; attempt < kMaxSampleAttempts; ++attempt) {
      double z_new = rng.uniform(z_min, z_max);
      double scale = z_new / spec.depth_m;
      // Rescaling about the camera center keeps every frame-0 ray identical.
      double y0_new = cam_h + (spec.y0_m - cam_h) * scale;
      if (!(y0_new > 0.0)) continue;  // would start inside the ground
      SceneSpec v = spec;
      v.depth_m = z_new;
      v.y0_m = y0_new;
      for (double& e : v.dropper.half_extents) e *= scale;
      v.rng_seed = Rng::derive(rng_seed, static_cast<std::uint64_t>(k));
      variants.push_back(std::move(v));
      placed = true;
      break;
    }
    if (!placed) {
      throw SamplerError("ambiguate: variant " + format_int(k) +
                         " found no ground-clearing depth after " +
                         format_int(kMaxSampleAttempts) + " attempts");
    }
  }
  return variants;
}

}  // namespace pisa
