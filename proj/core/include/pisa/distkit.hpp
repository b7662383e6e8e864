#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pisa/geometry.hpp"

namespace pisa {

// Analytic distribution over dropping times for a depth-ambiguous ray. The
// object's bottom sits on the ray Y(Z) = h_offset + beta * Z with depth
// uniform on [z_min, z_max]; the dropping time of a scene at depth Z is
// t(Z) = sqrt(2 * (h_offset + beta * Z) / g), which pushes the uniform depth
// forward onto [t_min, t_max] with density p(t) = g * t / ((z_max - z_min) * beta).
struct DropTimeDistribution {
  double beta = 0.1;
  double h_offset = 0.5;  // camera height term of the ray
  double z_min = 2.0;
  double z_max = 18.0;
  double gravity = 9.81;

  // Throws ValidationError: requires beta > 0 (rays pointing at or below the
  // horizon never yield a proper distribution), 0 < z_min < z_max, g > 0, and
  // a positive support endpoint h_offset + beta * z_min.
  void validate() const;

  double t_min() const;
  double t_max() const;
  double pdf(double t) const;
  double cdf(double t) const;  // clamped to [0, 1] outside the support

  // Pushforward sampling: Z ~ U[z_min, z_max] mapped through t(Z).
  std::vector<double> sample(int n, std::uint64_t rng_seed) const;
};

// Distribution for the ray through a scene's object-bottom pixel.
DropTimeDistribution distribution_for_ray(const CameraModel& cam, double sensor_y_mm,
                                          double z_min, double z_max, double gravity);

// Frame quantization: bin = floor(t * fps), clamped to [0, n_frames - 1].
// Negative times are a domain error.
std::vector<int> quantize_times(std::span<const double> times_s, double fps, int n_frames);

struct KsResult {
  double d = 0.0;
  double p = 1.0;
};

// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value
// Q(lambda) = 2 * sum_k (-1)^(k-1) exp(-2 k^2 lambda^2). Both samples need at
// least 8 points. Ties are handled by stepping both ECDFs across equal values.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

// The temporal-misalignment check: quantize `observed` and n_mc fresh draws
// from `d` onto the clip's frame grid, then KS-test the two bin samples.
// Deliberately conservative for coarse grids.
KsResult misalignment_experiment(const DropTimeDistribution& d,
                                 std::span<const double> observed_times_s, double fps,
                                 int n_frames, int n_mc, std::uint64_t rng_seed);

}  // namespace pisa
