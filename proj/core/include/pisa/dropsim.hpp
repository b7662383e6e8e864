#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "pisa/geometry.hpp"
#include "pisa/mask.hpp"

namespace pisa {

enum class SolidShape { sphere, box };

// Tabletop-scale rigid solid. For spheres only half_extents[0] (the radius)
// matters; boxes use half extents along width (x), depth (z), height (y).
// albedo_tag is an opaque label used for captions and reports.
struct ObjectSolid {
  SolidShape shape = SolidShape::sphere;
  std::array<double, 3> half_extents = {0.08, 0.08, 0.08};
  std::string albedo_tag;

  double radius() const { return half_extents[0]; }
  double half_height() const {
    return shape == SolidShape::sphere ? half_extents[0] : half_extents[2];
  }
  // Throws ValidationError: every extent must be > 0. No upper bound here;
  // the sampler stays tabletop-scale but depth-ambiguous variants may scale
  // objects arbitrarily large.
  void validate() const;

  bool operator==(const ObjectSolid&) const = default;
};

// Full description of one dropping clip. y0_m is the initial height of the
// object's *bottom*; depth_m is the depth of the object's center. The object
// is laterally centered on the optical axis.
struct SceneSpec {
  ObjectSolid dropper;
  double y0_m = 1.0;
  double depth_m = 2.0;
  double fps = 16.0;
  int n_frames = 32;
  double restitution = 0.0;  // in [0, 1)
  double gravity = 9.81;
  CameraModel camera;
  std::uint64_t rng_seed = 0;

  void validate() const;

  bool operator==(const SceneSpec&) const = default;
};

struct TrajectorySample {
  std::vector<double> times_s;     // i / fps
  std::vector<double> bottom_y_m;  // height of the object's bottom, >= 0
  double contact_time_s = 0.0;     // sqrt(2 * y0 / g)
};

enum class SampleMode { psft, ood_grid, ambiguous };

// label is "ID"/"OOD" for ood_grid and empty otherwise.
struct SampledScene {
  SceneSpec spec;
  std::string label;
};

// Closed-form piecewise-ballistic height of the object's bottom at time t.
// Exact freefall before contact; after each bounce the upward speed is
// restitution * impact speed, so the k-th peak is e^(2k) * y0.
double freefall_height(double y0, double restitution, double gravity, double t);

// Draws a scene. psft: Z ~ U[1,3], Y0 ~ U[0.5,1.5], camera height ~ U[0.4,0.6].
// ood_grid: (Z, Y0) uniform over [1,5] x [0.5,2.5] at camera height 0.5,
// labeled ID iff Z in [1,3] and Y0 in [0.5,1.5]. ambiguous: psft-style base
// scene for ambiguate(). All modes: 32 frames at 16 fps, object fully inside
// the frustum at t = 0 (rejection sampling; SamplerError after 1000 attempts).
SampledScene sample_scene(SampleMode mode, std::uint64_t rng_seed);

// Samples freefall_height at frame times. Throws ValidationError on a bad spec.
TrajectorySample simulate(const SceneSpec& spec);

struct RasterizedClip {
  MaskSequence masks;
  std::vector<std::uint8_t> frame_empty;  // 1 where the mask has no foreground
};

// Exact silhouettes: spheres by a per-pixel conic test, boxes by scanline
// filling the convex hull of the eight projected corners. A pixel is set iff
// its center is inside. Out-of-frame geometry clips to empty rows/frames.
RasterizedClip rasterize_masks(const SceneSpec& spec, const TrajectorySample& traj);

// Depth-ambiguous variants: Z' ~ U[z_min, z_max], the object is rescaled by
// Z'/Z about the camera center so frame 0 renders pixel-identically. Variants
// whose scaled object would start intersecting the ground are resampled
// (SamplerError after 1000 attempts per variant).
std::vector<SceneSpec> ambiguate(const SceneSpec& spec, int n_variants,
                                 double z_min, double z_max, std::uint64_t rng_seed);

// True iff the whole object (bounding box, all eight corners) projects inside
// the sensor at t = 0.
bool frustum_contains(const SceneSpec& spec);

}  // namespace pisa
