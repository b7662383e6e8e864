#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pisa/distkit.hpp"
#include "pisa/dropsim.hpp"
#include "pisa/lift3d.hpp"
#include "pisa/maskio.hpp"
#include "pisa/metrics.hpp"

namespace pisa {

// Dataset generation and evaluation orchestration behind the pisa CLI.
// Everything is deterministic: all randomness derives from the master seed
// per clip index, reductions run in sorted clip-id order, and numeric output
// goes through shortest round-trip formatting, so a (seed, inputs) pair always
// produces byte-identical trees and reports regardless of thread count.

// Runs fn(0) .. fn(n-1) on up to `jobs` threads (0 = hardware concurrency).
// The first exception, by index, is rethrown after all workers finish.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

struct GenOptions {
  SampleMode mode = SampleMode::psft;
  int count = 5000;   // psft / ood_grid clip count
  int scenes = 1000;  // ambiguous: base scenes ...
  int variants = 5;   // ... times depth variants per scene
  std::filesystem::path out_dir;
  std::uint64_t seed = 0;
  bool force = false;  // allow writing into a non-empty directory
  int jobs = 0;
  int resolution = 256;
  double gravity = 9.81;
  double restitution = 0.0;
  double z_min = 2.0, z_max = 18.0;  // ambiguous depth range
};

struct GenResult {
  int n_clips = 0;
  std::filesystem::path index_path;
};

// Writes <id>.manifest, <id>.masks, <id>.traj.csv per clip plus index.csv
// listing clip_id,mode,label,seed,base_scene.
GenResult cmd_gen(const GenOptions& opt);

struct EvalOptions {
  std::filesystem::path gt_dir;
  std::filesystem::path pred_dir;  // ignored when baseline is set
  std::string baseline;            // "", "identity", or "static"
  std::string split = "sim_seen";
  std::filesystem::path per_clip_csv;
  std::filesystem::path summary_path;
  bool skip_errors = false;
  int jobs = 0;
  std::uint64_t seed = 0;
};

struct LabelAggregate {
  std::string label;
  int n_clips = 0;
  double mean_l2 = 0.0, mean_chamfer = 0.0, mean_iou = 0.0, mean_time_error_s = 0.0;
};

struct EvalSummary {
  std::string split;
  int n_clips = 0;
  int n_failed = 0;
  double mean_l2 = 0.0, mean_chamfer = 0.0, mean_iou = 0.0, mean_time_error_s = 0.0;
  std::vector<LabelAggregate> labels;  // present when the dataset index has labels
};

// Pairs predictions (or a built-in baseline) with ground truth by clip id,
// scores every pair, and writes the per-clip CSV and flat key-value summary.
EvalSummary cmd_eval(const EvalOptions& opt);

struct DistOptions {
  std::filesystem::path manifest_path;
  std::filesystem::path observed_path;  // one dropping time (seconds) per line
  std::filesystem::path curve_csv;
  std::optional<std::filesystem::path> summary_path;
  double z_min = 2.0, z_max = 18.0;
  int n_mc = 1000;
  std::uint64_t seed = 0;
  std::optional<double> sensor_y_mm;  // overrides the ray from the scene echo
  std::optional<double> gravity;      // overrides the manifest gravity
};

struct DistResult {
  DropTimeDistribution dist;
  KsResult ks;
  int n_observed = 0;
};

DistResult cmd_dist(const DistOptions& opt);

struct RewardOptions {
  std::string kind;  // "seg", "flow", or "depth"
  std::filesystem::path gen_path;
  std::filesystem::path gt_path;  // mask file for seg, field file otherwise
  std::optional<std::filesystem::path> gradient_out;
};

double cmd_reward(const RewardOptions& opt);

struct LiftOptions {
  std::filesystem::path manifest_path;
  std::filesystem::path masks_path;
  std::filesystem::path out_csv;
  std::optional<std::filesystem::path> fan_csv;  // reference parabola fan
  int fan_count = 9;
  double z_min = 2.0, z_max = 18.0;
  std::optional<double> t_drop_s;  // bypass the impact detector
  std::optional<double> gravity;
};

LiftedTrajectory cmd_lift(const LiftOptions& opt);

struct ReportOptions {
  std::vector<std::filesystem::path> per_clip_csvs;
  std::filesystem::path out_path;
  std::string split = "report";
};

// Re-aggregates per-clip CSVs (e.g. merged across runs) into a summary.
EvalSummary cmd_report(const ReportOptions& opt);

}  // namespace pisa
