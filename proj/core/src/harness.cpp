#include "pisa/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "pisa/errors.hpp"
#include "pisa/rewards.hpp"
#include "pisa/rng.hpp"
#include "pisa/text.hpp"

namespace pisa {
namespace {

namespace fs = std::filesystem;

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open " + path.string() + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw ValidationError("failed writing " + path.string());
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw ValidationError("failed reading " + path.string());
  return std::move(buf).str();
}

std::vector<std::string> read_data_lines(const fs::path& path) {
  std::vector<std::string> lines;
  for (auto& raw : split(read_text_file(path), '\n')) {
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    lines.emplace_back(line);
  }
  return lines;
}

// CSV cells never contain separators by construction; error text might.
std::string sanitize_cell(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

std::string clip_id_for(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "clip_%05zu", index);
  return buf;
}

std::string mode_name(SampleMode mode) {
  switch (mode) {
    case SampleMode::psft: return "psft";
    case SampleMode::ood_grid: return "ood_grid";
    case SampleMode::ambiguous: return "ambiguous";
  }
  throw ValidationError("unknown sample mode");
}

// One scored clip, in the exact shape of a per-clip CSV row.
struct ClipRow {
  std::string clip_id;
  std::string label;
  bool ok = false;
  double l2 = 0.0, chamfer = 0.0, iou = 0.0;
  bool has_time = false;  // false for clips without a scene echo
  double time_s = 0.0;
  int impact_frame = -1;
  std::string time_status;  // "ok", "static", "no_impact", or ""
  std::string error;
};

constexpr const char* kPerClipHeader =
    "clip_id,label,l2,chamfer,iou,time_error_s,impact_frame,time_status,error";

std::string encode_per_clip_csv(const std::vector<ClipRow>& rows) {
  std::string out = kPerClipHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += r.clip_id;
    out += ',';
    out += sanitize_cell(r.label);
    out += ',';
    if (r.ok) {
      out += format_double(r.l2);
      out += ',';
      out += format_double(r.chamfer);
      out += ',';
      out += format_double(r.iou);
      out += ',';
      if (r.has_time) {
        out += format_double(r.time_s);
        out += ',';
        out += format_int(r.impact_frame);
        out += ',';
        out += r.time_status;
      } else {
        out += ",,";
      }
    } else {
      out += ",,,,,";
    }
    out += ',';
    out += sanitize_cell(r.error);
    out += '\n';
  }
  return out;
}

std::vector<ClipRow> decode_per_clip_csv(const fs::path& path) {
  auto text = read_text_file(path);
  auto lines = split(text, '\n');
  if (lines.empty() || trim(lines[0]) != kPerClipHeader)
    throw FormatError(path.string() + ": not a per-clip metrics CSV");
  std::vector<ClipRow> rows;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    std::string_view line = trim(lines[li]);
    if (line.empty()) continue;
    auto cells = split(line, ',');
    if (cells.size() != 9)
      throw FormatError(path.string() + " line " + format_int(static_cast<long long>(li + 1)) +
                        ": expected 9 cells, got " + format_int(static_cast<long long>(cells.size())));
    ClipRow r;
    r.clip_id = cells[0];
    r.label = cells[1];
    r.ok = !cells[2].empty();
    if (r.ok) {
      r.l2 = parse_double(cells[2], "l2");
      r.chamfer = parse_double(cells[3], "chamfer");
      r.iou = parse_double(cells[4], "iou");
      r.has_time = !cells[5].empty();
      if (r.has_time) {
        r.time_s = parse_double(cells[5], "time_error_s");
        r.impact_frame = static_cast<int>(parse_int(cells[6], "impact_frame"));
        r.time_status = cells[7];
      }
    }
    r.error = cells[8];
    rows.push_back(std::move(r));
  }
  return rows;
}

EvalSummary aggregate_rows(const std::string& split, const std::vector<ClipRow>& rows) {
  EvalSummary s;
  s.split = split;
  struct Acc {
    int n = 0, n_time = 0;
    double l2 = 0, cd = 0, iou = 0, time = 0;
    void add(const ClipRow& r) {
      ++n;
      l2 += r.l2;
      cd += r.chamfer;
      iou += r.iou;
      if (r.has_time) {
        ++n_time;
        time += r.time_s;
      }
    }
  };
  Acc total;
  std::map<std::string, Acc> by_label;
  for (const auto& r : rows) {
    if (!r.ok) {
      ++s.n_failed;
      continue;
    }
    total.add(r);
    if (!r.label.empty()) by_label[r.label].add(r);
  }
  s.n_clips = total.n;
  if (total.n > 0) {
    s.mean_l2 = total.l2 / total.n;
    s.mean_chamfer = total.cd / total.n;
    s.mean_iou = total.iou / total.n;
  }
  if (total.n_time > 0) s.mean_time_error_s = total.time / total.n_time;
  for (const auto& [label, acc] : by_label) {
    LabelAggregate a;
    a.label = label;
    a.n_clips = acc.n;
    a.mean_l2 = acc.l2 / acc.n;
    a.mean_chamfer = acc.cd / acc.n;
    a.mean_iou = acc.iou / acc.n;
    if (acc.n_time > 0) a.mean_time_error_s = acc.time / acc.n_time;
    s.labels.push_back(std::move(a));
  }
  return s;
}

std::string encode_summary(const EvalSummary& s, const std::string& baseline) {
  std::string out = "# pisa evaluation summary\n";
  auto kv = [&out](std::string_view key, const std::string& value) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  };
  kv("split", s.split);
  if (!baseline.empty()) kv("baseline", baseline);
  kv("n_clips", format_int(s.n_clips));
  kv("n_failed", format_int(s.n_failed));
  kv("mean_l2", format_double(s.mean_l2));
  kv("mean_chamfer", format_double(s.mean_chamfer));
  kv("mean_iou", format_double(s.mean_iou));
  kv("mean_time_error_s", format_double(s.mean_time_error_s));
  for (const auto& a : s.labels) {
    std::string p = "label." + a.label + ".";
    kv(p + "n_clips", format_int(a.n_clips));
    kv(p + "mean_l2", format_double(a.mean_l2));
    kv(p + "mean_chamfer", format_double(a.mean_chamfer));
    kv(p + "mean_iou", format_double(a.mean_iou));
    kv(p + "mean_time_error_s", format_double(a.mean_time_error_s));
  }
  return out;
}

// Empirical CDF helper over a sorted sample.
double ecdf(const std::vector<double>& sorted, double t) {
  auto it = std::upper_bound(sorted.begin(), sorted.end(), t);
  return static_cast<double>(it - sorted.begin()) / static_cast<double>(sorted.size());
}

template <typename Fn>
auto with_clip_context(const std::string& clip_id, Fn&& fn) {
  try {
    return fn();
  } catch (const SamplerError& e) {
    throw SamplerError(clip_id + ": " + e.what());
  } catch (const FormatError& e) {
    throw FormatError(clip_id + ": " + e.what());
  } catch (const MetricError& e) {
    throw MetricError(clip_id + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(clip_id + ": " + e.what());
  } catch (const std::domain_error& e) {
    throw std::domain_error(clip_id + ": " + e.what());
  }
}

}  // namespace

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  std::size_t threads;
  if (jobs > 0) {
    threads = static_cast<std::size_t>(jobs);
  } else {
    unsigned hw = std::thread::hardware_concurrency();
    threads = hw ? hw : 1;
  }
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::size_t err_index = std::numeric_limits<std::size_t>::max();
  std::exception_ptr err;
  auto work = [&] {
    while (true) {
      std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lk(err_mu);
        if (i < err_index) {
          err_index = i;
          err = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

GenResult cmd_gen(const GenOptions& opt) {
  if (opt.out_dir.empty()) throw ValidationError("gen: output directory is required");
  if (opt.resolution < 8 || opt.resolution > 4096)
    throw ValidationError("gen: resolution must be in [8, 4096]");
  if (opt.gravity <= 0.0) throw ValidationError("gen: gravity must be positive");
  if (opt.restitution < 0.0 || opt.restitution >= 1.0)
    throw ValidationError("gen: restitution must be in [0, 1)");
  std::size_t n_clips;
  if (opt.mode == SampleMode::ambiguous) {
    if (opt.scenes < 1 || opt.variants < 1)
      throw ValidationError("gen: scenes and variants must be at least 1");
    if (!(opt.z_min > 0.0) || !(opt.z_max > opt.z_min))
      throw ValidationError("gen: need 0 < z-min < z-max");
    n_clips = static_cast<std::size_t>(opt.scenes) * static_cast<std::size_t>(opt.variants);
  } else {
    if (opt.count < 1) throw ValidationError("gen: count must be at least 1");
    n_clips = static_cast<std::size_t>(opt.count);
  }

  if (fs::exists(opt.out_dir)) {
    if (!fs::is_directory(opt.out_dir))
      throw ValidationError("gen: " + opt.out_dir.string() + " exists and is not a directory");
    if (!fs::is_empty(opt.out_dir) && !opt.force)
      throw ValidationError("gen: " + opt.out_dir.string() +
                            " is not empty (pass --force to write into it anyway)");
  }
  fs::create_directories(opt.out_dir);

  struct IndexRow {
    std::string clip_id, label;
    std::uint64_t seed = 0;
    long long base_scene = -1;  // -1 for non-ambiguous modes
  };
  std::vector<IndexRow> rows(n_clips);
  const std::string mode = mode_name(opt.mode);

  auto write_clip = [&](std::size_t index, const SceneSpec& sampled, const std::string& label,
                        long long base_scene) {
    SceneSpec spec = sampled;
    spec.camera.image_width = opt.resolution;
    spec.camera.image_height = opt.resolution;
    spec.gravity = opt.gravity;
    spec.restitution = opt.restitution;
    spec.validate();

    const std::string id = clip_id_for(index);
    auto traj = simulate(spec);
    auto clip = rasterize_masks(spec, traj);

    ClipManifest man;
    man.fps = spec.fps;
    man.n_frames = spec.n_frames;
    man.camera = spec.camera;
    man.gravity = spec.gravity;
    man.caption = "a " + spec.dropper.albedo_tag +
                  (spec.dropper.shape == SolidShape::sphere ? " ball" : " box") +
                  " drops onto the ground";
    man.object_ids = {clip.masks.object_id};
    man.scene = spec;
    std::string empties;
    for (std::size_t f = 0; f < clip.frame_empty.size(); ++f) {
      if (!clip.frame_empty[f]) continue;
      if (!empties.empty()) empties += ',';
      empties += format_int(static_cast<long long>(f));
    }
    if (!empties.empty()) man.extra.emplace_back("empty_frames", empties);

    write_manifest(opt.out_dir / (id + ".manifest"), man);
    write_mask_sequence(opt.out_dir / (id + ".masks"), clip.masks);

    std::string traj_csv = "t_s,bottom_y_m\n";
    for (std::size_t i = 0; i < traj.times_s.size(); ++i) {
      traj_csv += format_double(traj.times_s[i]);
      traj_csv += ',';
      traj_csv += format_double(traj.bottom_y_m[i]);
      traj_csv += '\n';
    }
    write_text_file(opt.out_dir / (id + ".traj.csv"), traj_csv);

    rows[index] = IndexRow{id, label, spec.rng_seed, base_scene};
  };

  if (opt.mode == SampleMode::ambiguous) {
    const auto n_scenes = static_cast<std::size_t>(opt.scenes);
    parallel_for(n_scenes, opt.jobs, [&](std::size_t s) {
      with_clip_context("scene " + format_int(static_cast<long long>(s)), [&] {
        const std::uint64_t base_seed = Rng::derive(opt.seed, s);
        SampledScene base = sample_scene(SampleMode::ambiguous, base_seed);
        auto variants = ambiguate(base.spec, opt.variants, opt.z_min, opt.z_max,
                                  Rng::derive(base_seed, 1));
        for (std::size_t v = 0; v < variants.size(); ++v)
          write_clip(s * static_cast<std::size_t>(opt.variants) + v, variants[v], base.label,
                     static_cast<long long>(s));
      });
    });
  } else {
    parallel_for(n_clips, opt.jobs, [&](std::size_t i) {
      with_clip_context(clip_id_for(i), [&] {
        SampledScene sampled = sample_scene(opt.mode, Rng::derive(opt.seed, i));
        write_clip(i, sampled.spec, sampled.label, -1);
      });
    });
  }

  std::string index_csv = "clip_id,mode,label,seed,base_scene\n";
  for (const auto& r : rows) {
    index_csv += r.clip_id;
    index_csv += ',';
    index_csv += mode;
    index_csv += ',';
    index_csv += r.label;
    index_csv += ',';
    index_csv += format_uint(r.seed);
    index_csv += ',';
    index_csv += r.base_scene < 0 ? std::string("-") : format_int(r.base_scene);
    index_csv += '\n';
  }
  GenResult result;
  result.n_clips = static_cast<int>(n_clips);
  result.index_path = opt.out_dir / "index.csv";
  write_text_file(result.index_path, index_csv);
  return result;
}

namespace {

std::vector<std::string> list_clip_ids(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ValidationError(dir.string() + " is not a directory");
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto& p = entry.path();
    if (p.extension() == ".manifest") ids.push_back(p.stem().string());
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::map<std::string, std::string> load_label_map(const fs::path& index_csv) {
  std::map<std::string, std::string> labels;
  if (!fs::exists(index_csv)) return labels;
  auto lines = read_data_lines(index_csv);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto cells = split(lines[i], ',');
    if (i == 0 && !cells.empty() && cells[0] == "clip_id") continue;
    if (cells.size() < 3)
      throw FormatError(index_csv.string() + ": malformed index row '" + lines[i] + "'");
    labels[cells[0]] = cells[2];
  }
  return labels;
}

MaskSequence static_baseline(const MaskSequence& gt) {
  MaskSequence pred = MaskSequence::create(gt.n_frames, gt.height, gt.width, gt.object_id);
  const std::size_t frame = static_cast<std::size_t>(gt.height) * gt.width;
  for (int f = 0; f < gt.n_frames; ++f)
    std::copy_n(gt.data.data(), frame, pred.data.data() + static_cast<std::size_t>(f) * frame);
  return pred;
}

}  // namespace

EvalSummary cmd_eval(const EvalOptions& opt) {
  static const std::set<std::string> kSplits = {"real",   "sim_seen", "sim_unseen",
                                                "ood_id", "ood_ood",  "ambiguous"};
  if (!kSplits.count(opt.split)) {
    std::string all;
    for (const auto& s : kSplits) {
      if (!all.empty()) all += ", ";
      all += s;
    }
    throw ValidationError("eval: unknown split '" + opt.split + "' (expected one of " + all + ")");
  }
  if (!opt.baseline.empty() && opt.baseline != "identity" && opt.baseline != "static")
    throw ValidationError("eval: unknown baseline '" + opt.baseline +
                          "' (expected identity or static)");
  if (opt.baseline.empty() && opt.pred_dir.empty())
    throw ValidationError("eval: need a prediction directory or a baseline");

  const auto ids = list_clip_ids(opt.gt_dir);
  if (ids.empty())
    throw ValidationError("eval: no clips (*.manifest) found in " + opt.gt_dir.string());
  const auto labels = load_label_map(opt.gt_dir / "index.csv");

  std::vector<ClipRow> rows(ids.size());
  parallel_for(ids.size(), opt.jobs, [&](std::size_t i) {
    const std::string& id = ids[i];
    ClipRow& row = rows[i];
    row.clip_id = id;
    if (auto it = labels.find(id); it != labels.end()) row.label = it->second;
    try {
      with_clip_context(id, [&] {
        ClipManifest gt_man = read_manifest(opt.gt_dir / (id + ".manifest"));
        MaskSequence gt = read_mask_sequence(opt.gt_dir / (id + ".masks"));
        MaskSequence pred;
        double pred_fps = gt_man.fps;
        if (opt.baseline == "identity") {
          pred = gt;
        } else if (opt.baseline == "static") {
          pred = static_baseline(gt);
        } else {
          const fs::path pred_masks = opt.pred_dir / (id + ".masks");
          if (!fs::exists(pred_masks))
            throw ValidationError("missing prediction " + pred_masks.string());
          pred = read_mask_sequence(pred_masks);
          const fs::path pred_manifest = opt.pred_dir / (id + ".manifest");
          if (fs::exists(pred_manifest)) pred_fps = read_manifest(pred_manifest).fps;
        }
        if (gt_man.scene) {
          MetricReport rep = evaluate_pair(pred, pred_fps, gt, gt_man.fps,
                                           gt_man.scene->y0_m, gt_man.scene->gravity);
          row.l2 = rep.l2;
          row.chamfer = rep.chamfer;
          row.iou = rep.iou;
          row.has_time = true;
          row.time_s = rep.time.seconds;
          row.impact_frame = rep.time.impact_frame;
          switch (rep.time.status) {
            case TimeErrorResult::Status::ok: row.time_status = "ok"; break;
            case TimeErrorResult::Status::static_clip: row.time_status = "static"; break;
            case TimeErrorResult::Status::no_impact: row.time_status = "no_impact"; break;
          }
        } else {
          AlignedPair pair = align(pred, pred_fps, gt, gt_man.fps);
          row.l2 = trajectory_l2(pair);
          row.chamfer = chamfer(pair);
          row.iou = iou(pair);
        }
        row.ok = true;
      });
    } catch (const std::exception& e) {
      if (!opt.skip_errors) throw;
      row.ok = false;
      row.error = e.what();
    }
  });

  if (!opt.per_clip_csv.empty()) write_text_file(opt.per_clip_csv, encode_per_clip_csv(rows));
  EvalSummary summary = aggregate_rows(opt.split, rows);
  if (!opt.summary_path.empty())
    write_text_file(opt.summary_path, encode_summary(summary, opt.baseline));
  if (summary.n_clips == 0)
    throw MetricError("eval: every clip failed to score; see " +
                      (opt.per_clip_csv.empty() ? std::string("--skip-errors output")
                                                : opt.per_clip_csv.string()));
  return summary;
}

DistResult cmd_dist(const DistOptions& opt) {
  ClipManifest man = read_manifest(opt.manifest_path);
  const double gravity = opt.gravity.value_or(man.gravity);
  double sensor_y;
  if (opt.sensor_y_mm) {
    sensor_y = *opt.sensor_y_mm;
  } else if (man.scene) {
    sensor_y = project(man.camera, WorldPoint{man.scene->y0_m, man.scene->depth_m});
  } else {
    throw ValidationError(
        "dist: manifest has no scene block; pass the object-bottom image coordinate explicitly");
  }

  std::vector<double> observed;
  for (const auto& line : read_data_lines(opt.observed_path))
    observed.push_back(parse_double(line, "observed dropping time"));

  DistResult result;
  result.dist = distribution_for_ray(man.camera, sensor_y, opt.z_min, opt.z_max, gravity);
  result.n_observed = static_cast<int>(observed.size());
  result.ks = misalignment_experiment(result.dist, observed, man.fps, man.n_frames, opt.n_mc,
                                      opt.seed);

  // Curve table: analytic CDF, the frame-quantized model CDF (empirical over
  // the same Monte Carlo sample the test used), and the observed ECDF.
  std::vector<double> mc = result.dist.sample(opt.n_mc, opt.seed);
  auto mc_bins = quantize_times(mc, man.fps, man.n_frames);
  std::vector<double> mc_q(mc_bins.size());
  for (std::size_t i = 0; i < mc_bins.size(); ++i) mc_q[i] = mc_bins[i] / man.fps;
  std::sort(mc_q.begin(), mc_q.end());
  std::vector<double> obs_sorted = observed;
  std::sort(obs_sorted.begin(), obs_sorted.end());

  const double t_lo = std::max(0.0, result.dist.t_min() * 0.95);
  const double t_hi = result.dist.t_max() * 1.05;
  const int kPoints = 201;
  std::string csv = "t_s,cdf_model,cdf_model_quantized,cdf_observed\n";
  for (int i = 0; i < kPoints; ++i) {
    const double t = t_lo + (t_hi - t_lo) * i / (kPoints - 1);
    csv += format_double(t);
    csv += ',';
    csv += format_double(result.dist.cdf(t));
    csv += ',';
    csv += format_double(ecdf(mc_q, t));
    csv += ',';
    csv += format_double(ecdf(obs_sorted, t));
    csv += '\n';
  }
  if (!opt.curve_csv.empty()) write_text_file(opt.curve_csv, csv);

  if (opt.summary_path) {
    std::string out = "# pisa dropping-time distribution report\n";
    auto kv = [&out](std::string_view key, const std::string& value) {
      out += key;
      out += " = ";
      out += value;
      out += '\n';
    };
    kv("beta", format_double(result.dist.beta));
    kv("h_offset", format_double(result.dist.h_offset));
    kv("z_min", format_double(result.dist.z_min));
    kv("z_max", format_double(result.dist.z_max));
    kv("gravity", format_double(result.dist.gravity));
    kv("t_min_s", format_double(result.dist.t_min()));
    kv("t_max_s", format_double(result.dist.t_max()));
    kv("n_observed", format_int(result.n_observed));
    kv("n_mc", format_int(opt.n_mc));
    kv("ks_d", format_double(result.ks.d));
    kv("ks_p", format_double(result.ks.p));
    write_text_file(*opt.summary_path, out);
  }
  return result;
}

double cmd_reward(const RewardOptions& opt) {
  RewardResult r;
  if (opt.kind == "seg") {
    r = seg_reward(read_field_sequence(opt.gen_path), read_mask_sequence(opt.gt_path));
  } else if (opt.kind == "flow") {
    r = flow_reward(read_field_sequence(opt.gen_path), read_field_sequence(opt.gt_path));
  } else if (opt.kind == "depth") {
    r = depth_reward(read_field_sequence(opt.gen_path), read_field_sequence(opt.gt_path));
  } else {
    throw ValidationError("reward: unknown kind '" + opt.kind +
                          "' (expected seg, flow, or depth)");
  }
  if (opt.gradient_out) write_field_sequence(*opt.gradient_out, r.gradient);
  return r.value;
}

LiftedTrajectory cmd_lift(const LiftOptions& opt) {
  ClipManifest man = read_manifest(opt.manifest_path);
  MaskSequence masks = read_mask_sequence(opt.masks_path);
  const double gravity = opt.gravity.value_or(man.gravity);
  LiftedTrajectory traj = lift(man.camera, masks, man.fps, gravity, opt.t_drop_s);

  std::string csv = "t_s,sensor_y_mm,height_m\n";
  for (std::size_t i = 0; i < traj.times_s.size(); ++i) {
    csv += format_double(traj.times_s[i]);
    csv += ',';
    csv += format_double(traj.sensor_y_mm[i]);
    csv += ',';
    csv += format_double(traj.height_m[i]);
    csv += '\n';
  }
  if (!opt.out_csv.empty()) write_text_file(opt.out_csv, csv);

  if (opt.fan_csv) {
    if (opt.fan_count < 1) throw ValidationError("lift: fan count must be at least 1");
    if (!(opt.z_min > 0.0) || !(opt.z_max > opt.z_min))
      throw ValidationError("lift: need 0 < z-min < z-max");
    // Each depth hypothesis Z gives the parabola the same frame-0 pixel
    // implies: bottom starts at camera_height + beta * Z and falls freely.
    const double b0 = beta(man.camera, traj.sensor_y_mm.at(0));
    std::string fan = "depth_m,t_s,height_m\n";
    for (int k = 0; k < opt.fan_count; ++k) {
      const double z = opt.fan_count == 1
                           ? opt.z_min
                           : opt.z_min + (opt.z_max - opt.z_min) * k / (opt.fan_count - 1);
      const double y0 = man.camera.camera_height_m + b0 * z;
      for (double t : traj.times_s) {
        fan += format_double(z);
        fan += ',';
        fan += format_double(t);
        fan += ',';
        fan += format_double(y0 - 0.5 * gravity * t * t);
        fan += '\n';
      }
    }
    write_text_file(*opt.fan_csv, fan);
  }
  return traj;
}

EvalSummary cmd_report(const ReportOptions& opt) {
  if (opt.per_clip_csvs.empty()) throw ValidationError("report: no input CSVs given");
  std::vector<ClipRow> rows;
  for (const auto& path : opt.per_clip_csvs) {
    auto part = decode_per_clip_csv(path);
    rows.insert(rows.end(), std::make_move_iterator(part.begin()),
                std::make_move_iterator(part.end()));
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const ClipRow& a, const ClipRow& b) { return a.clip_id < b.clip_id; });
  EvalSummary summary = aggregate_rows(opt.split, rows);
  if (!opt.out_path.empty()) write_text_file(opt.out_path, encode_summary(summary, ""));
  return summary;
}

}  // namespace pisa
