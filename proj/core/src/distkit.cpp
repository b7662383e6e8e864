#include "pisa/distkit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pisa/errors.hpp"
#include "pisa/rng.hpp"
#include "pisa/text.hpp"

namespace pisa {

void DropTimeDistribution::validate() const {
  if (!(beta > 0.0)) {
    throw ValidationError("drop-time distribution: ray slope beta must be > 0, got " +
                          format_double(beta));
  }
  if (!(z_min > 0.0 && z_max > z_min)) {
    throw ValidationError("drop-time distribution: need 0 < z_min < z_max");
  }
  if (!(gravity > 0.0)) {
    throw ValidationError("drop-time distribution: gravity must be > 0");
  }
  if (!(h_offset + beta * z_min > 0.0)) {
    throw ValidationError("drop-time distribution: support endpoint is not positive");
  }
}

double DropTimeDistribution::t_min() const {
  return std::sqrt(2.0 * (h_offset + beta * z_min) / gravity);
}

double DropTimeDistribution::t_max() const {
  return std::sqrt(2.0 * (h_offset + beta * z_max) / gravity);
}

double DropTimeDistribution::pdf(double t) const {
  validate();
  if (t < t_min() || t > t_max()) return 0.0;
  return gravity * t / ((z_max - z_min) * beta);
}

double DropTimeDistribution::cdf(double t) const {
  validate();
  double z_of_t = (gravity * t * t / 2.0 - h_offset) / beta;
  double c = (z_of_t - z_min) / (z_max - z_min);
  if (t < 0.0) return 0.0;  // the negative sqrt branch never occurs
  return std::clamp(c, 0.0, 1.0);
}

std::vector<double> DropTimeDistribution::sample(int n, std::uint64_t rng_seed) const {
  validate();
  if (n < 1) throw ValidationError("drop-time distribution: sample size must be >= 1");
  Rng rng(rng_seed);
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    double z = rng.uniform(z_min, z_max);
    out[i] = std::sqrt(2.0 * (h_offset + beta * z) / gravity);
  }
  return out;
}

DropTimeDistribution distribution_for_ray(const CameraModel& cam, double sensor_y_mm,
                                          double z_min, double z_max, double gravity) {
  DropTimeDistribution d;
  d.beta = beta(cam, sensor_y_mm);
  d.h_offset = cam.camera_height_m;
  d.z_min = z_min;
  d.z_max = z_max;
  d.gravity = gravity;
  d.validate();
  return d;
}

std::vector<int> quantize_times(std::span<const double> times_s, double fps, int n_frames) {
  if (!(fps > 0.0)) throw ValidationError("quantize_times: fps must be > 0");
  if (n_frames < 1) throw ValidationError("quantize_times: n_frames must be >= 1");
  std::vector<int> bins;
  bins.reserve(times_s.size());
  for (double t : times_s) {
    if (t < 0.0) {
      throw std::domain_error("quantize_times: negative time " + format_double(t));
    }
    int b = static_cast<int>(std::floor(t * fps));
    bins.push_back(std::min(b, n_frames - 1));
  }
  return bins;
}

namespace {

// Asymptotic Kolmogorov survival function.
double ks_pvalue(double lambda) {
  if (lambda <= 0.0) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100000; ++k) {
    double term = std::exp(-2.0 * lambda * lambda * k * k);
    if (term < 1e-12) break;
    sum += sign * term;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 8 || b.size() < 8) {
    throw ValidationError("ks_two_sample: both samples need at least 8 points (got " +
                          format_int(a.size()) + " and " + format_int(b.size()) + ")");
  }
  std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const double na = static_cast<double>(sa.size()), nb = static_cast<double>(sb.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < sa.size() && j < sb.size()) {
    double v = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] == v) ++i;
    while (j < sb.size() && sb[j] == v) ++j;
    d = std::max(d, std::fabs(i / na - j / nb));
  }
  // Once one sample is exhausted the gap only shrinks toward |1 - F| at the
  // remaining points, and F(last) = 1 was already visited. d is final.
  double ne = na * nb / (na + nb);
  double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  return {d, d == 0.0 ? 1.0 : ks_pvalue(lambda)};
}

KsResult misalignment_experiment(const DropTimeDistribution& d,
                                 std::span<const double> observed_times_s, double fps,
                                 int n_frames, int n_mc, std::uint64_t rng_seed) {
  d.validate();
  if (n_mc < 8) throw ValidationError("misalignment_experiment: n_mc must be >= 8");
  std::vector<double> truth = d.sample(n_mc, rng_seed);
  std::vector<int> truth_bins = quantize_times(truth, fps, n_frames);
  std::vector<int> observed_bins = quantize_times(observed_times_s, fps, n_frames);
  std::vector<double> ta(truth_bins.begin(), truth_bins.end());
  std::vector<double> ob(observed_bins.begin(), observed_bins.end());
  return ks_two_sample(ob, ta);
}

}  // namespace pisa
