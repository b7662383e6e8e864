// pisa: command-line front end for the freefall world-model evaluation kit.
//
// Exit codes: 0 success, 1 internal error, 2 invalid input or usage,
// 3 malformed file, 4 metric undefined on the given inputs.

#include <cstdio>
#include <exception>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "pisa/errors.hpp"
#include "pisa/harness.hpp"
#include "pisa/text.hpp"

namespace {

void print_summary(const pisa::EvalSummary& s) {
  std::cout << "split = " << s.split << '\n'
            << "n_clips = " << s.n_clips << '\n'
            << "n_failed = " << s.n_failed << '\n'
            << "mean_l2 = " << pisa::format_double(s.mean_l2) << '\n'
            << "mean_chamfer = " << pisa::format_double(s.mean_chamfer) << '\n'
            << "mean_iou = " << pisa::format_double(s.mean_iou) << '\n'
            << "mean_time_error_s = " << pisa::format_double(s.mean_time_error_s) << '\n';
  for (const auto& a : s.labels)
    std::cout << "label." << a.label << ".n_clips = " << a.n_clips << '\n'
              << "label." << a.label << ".mean_l2 = " << pisa::format_double(a.mean_l2) << '\n'
              << "label." << a.label << ".mean_iou = " << pisa::format_double(a.mean_iou) << '\n'
              << "label." << a.label
              << ".mean_time_error_s = " << pisa::format_double(a.mean_time_error_s) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pisa: synthetic dropping scenes, mask metrics, dropping-time statistics"};
  app.require_subcommand(1);

  // gen ----------------------------------------------------------------
  pisa::GenOptions gen;
  std::string gen_mode = "psft";
  auto* cgen = app.add_subcommand("gen", "Generate a synthetic dropping-scene dataset");
  cgen->add_option("--mode", gen_mode, "Sampler: psft, ood_grid, or ambiguous")
      ->check(CLI::IsMember({"psft", "ood_grid", "ambiguous"}))
      ->capture_default_str();
  cgen->add_option("--out", gen.out_dir, "Output directory")->required();
  cgen->add_option("--count", gen.count, "Clip count (psft / ood_grid)")->capture_default_str();
  cgen->add_option("--scenes", gen.scenes, "Base scene count (ambiguous)")
      ->capture_default_str();
  cgen->add_option("--variants", gen.variants, "Depth variants per scene (ambiguous)")
      ->capture_default_str();
  cgen->add_option("--seed", gen.seed, "Master seed")->envname("PISA_SEED")
      ->capture_default_str();
  cgen->add_option("--jobs", gen.jobs, "Worker threads, 0 = all cores")->envname("PISA_JOBS")
      ->capture_default_str();
  cgen->add_option("--res", gen.resolution, "Square image resolution in pixels")
      ->envname("PISA_RES")
      ->capture_default_str();
  cgen->add_option("--gravity", gen.gravity, "Gravity in m/s^2")->envname("PISA_GRAVITY")
      ->capture_default_str();
  cgen->add_option("--restitution", gen.restitution, "Bounce restitution in [0, 1)")
      ->capture_default_str();
  cgen->add_option("--z-min", gen.z_min, "Ambiguous-depth range lower bound (m)")
      ->capture_default_str();
  cgen->add_option("--z-max", gen.z_max, "Ambiguous-depth range upper bound (m)")
      ->capture_default_str();
  cgen->add_flag("--force", gen.force, "Write into a non-empty directory");

  // eval ---------------------------------------------------------------
  pisa::EvalOptions ev;
  auto* ceval = app.add_subcommand("eval", "Score predicted mask clips against ground truth");
  ceval->add_option("--gt", ev.gt_dir, "Ground-truth dataset directory")->required();
  ceval->add_option("--pred", ev.pred_dir, "Prediction directory (<clip_id>.masks files)");
  ceval->add_option("--baseline", ev.baseline, "Built-in prediction: identity or static")
      ->check(CLI::IsMember({"identity", "static"}));
  ceval->add_option("--split", ev.split,
                    "real, sim_seen, sim_unseen, ood_id, ood_ood, or ambiguous")
      ->capture_default_str();
  ceval->add_option("--per-clip", ev.per_clip_csv, "Per-clip metrics CSV to write");
  ceval->add_option("--summary", ev.summary_path, "Summary key-value file to write");
  ceval->add_option("--jobs", ev.jobs, "Worker threads, 0 = all cores")->envname("PISA_JOBS")
      ->capture_default_str();
  ceval->add_flag("--skip-errors", ev.skip_errors,
                  "Record failing clips in the CSV instead of aborting");

  // dist ---------------------------------------------------------------
  pisa::DistOptions dist;
  std::filesystem::path dist_summary;
  double dist_sensor_y = 0.0, dist_gravity = 0.0;
  auto* cdist = app.add_subcommand(
      "dist", "Analytic dropping-time distribution and misalignment test");
  cdist->add_option("--manifest", dist.manifest_path, "Clip manifest providing camera and ray")
      ->required();
  cdist->add_option("--observed", dist.observed_path,
                    "Observed dropping times, one value in seconds per line")
      ->required();
  cdist->add_option("--curves", dist.curve_csv, "CDF curve CSV to write");
  auto* dist_summary_opt = cdist->add_option("--summary", dist_summary,
                                             "Distribution report key-value file to write");
  cdist->add_option("--z-min", dist.z_min, "Depth range lower bound (m)")->capture_default_str();
  cdist->add_option("--z-max", dist.z_max, "Depth range upper bound (m)")->capture_default_str();
  cdist->add_option("--n-mc", dist.n_mc, "Monte Carlo sample size for the test")
      ->capture_default_str();
  cdist->add_option("--seed", dist.seed, "Sampling seed")->envname("PISA_SEED")
      ->capture_default_str();
  auto* dist_y_opt = cdist->add_option(
      "--sensor-y", dist_sensor_y,
      "Object-bottom image coordinate (mm); overrides the manifest scene");
  auto* dist_g_opt = cdist->add_option("--gravity", dist_gravity,
                                       "Gravity override in m/s^2")->envname("PISA_GRAVITY");

  // lift ---------------------------------------------------------------
  pisa::LiftOptions lift;
  std::filesystem::path lift_fan;
  double lift_t_drop = 0.0, lift_gravity = 0.0;
  auto* clift = app.add_subcommand("lift", "Lift a mask clip to a 3D bottom trajectory");
  clift->add_option("--manifest", lift.manifest_path, "Clip manifest")->required();
  clift->add_option("--masks", lift.masks_path, "Mask clip file")->required();
  clift->add_option("--out", lift.out_csv, "Lifted trajectory CSV to write");
  auto* fan_opt = clift->add_option("--fan", lift_fan,
                                    "Reference parabola fan CSV to write");
  clift->add_option("--fan-count", lift.fan_count, "Depth hypotheses in the fan")
      ->capture_default_str();
  clift->add_option("--z-min", lift.z_min, "Fan depth lower bound (m)")->capture_default_str();
  clift->add_option("--z-max", lift.z_max, "Fan depth upper bound (m)")->capture_default_str();
  auto* tdrop_opt = clift->add_option("--t-drop", lift_t_drop,
                                      "Known dropping time (s); bypasses the impact detector");
  auto* lift_g_opt = clift->add_option("--gravity", lift_gravity,
                                       "Gravity override in m/s^2")->envname("PISA_GRAVITY");

  // reward -------------------------------------------------------------
  pisa::RewardOptions rew;
  std::filesystem::path rew_grad;
  auto* crew = app.add_subcommand("reward", "Dense reward with analytic gradient");
  crew->add_option("--kind", rew.kind, "seg, flow, or depth")
      ->check(CLI::IsMember({"seg", "flow", "depth"}))
      ->required();
  crew->add_option("--gen", rew.gen_path, "Generated field clip (logits for seg)")->required();
  crew->add_option("--gt", rew.gt_path, "Ground truth (mask clip for seg, field otherwise)")
      ->required();
  auto* grad_opt = crew->add_option("--grad-out", rew_grad, "Gradient field clip to write");

  // report -------------------------------------------------------------
  pisa::ReportOptions rep;
  auto* crep = app.add_subcommand("report", "Aggregate per-clip metric CSVs into a summary");
  crep->add_option("--in", rep.per_clip_csvs, "Per-clip CSVs to merge")->required()
      ->expected(-1);
  crep->add_option("--out", rep.out_path, "Summary key-value file to write");
  crep->add_option("--split", rep.split, "Split name recorded in the summary")
      ->capture_default_str();

  try {
    app.parse(argc, argv);

    if (cgen->parsed()) {
      if (gen_mode == "psft") gen.mode = pisa::SampleMode::psft;
      else if (gen_mode == "ood_grid") gen.mode = pisa::SampleMode::ood_grid;
      else gen.mode = pisa::SampleMode::ambiguous;
      auto result = pisa::cmd_gen(gen);
      std::cout << "wrote " << result.n_clips << " clips to " << gen.out_dir.string() << '\n'
                << "index = " << result.index_path.string() << '\n';
    } else if (ceval->parsed()) {
      print_summary(pisa::cmd_eval(ev));
    } else if (cdist->parsed()) {
      if (*dist_summary_opt) dist.summary_path = dist_summary;
      if (*dist_y_opt) dist.sensor_y_mm = dist_sensor_y;
      if (*dist_g_opt) dist.gravity = dist_gravity;
      auto result = pisa::cmd_dist(dist);
      std::cout << "t_min_s = " << pisa::format_double(result.dist.t_min()) << '\n'
                << "t_max_s = " << pisa::format_double(result.dist.t_max()) << '\n'
                << "n_observed = " << result.n_observed << '\n'
                << "ks_d = " << pisa::format_double(result.ks.d) << '\n'
                << "ks_p = " << pisa::format_double(result.ks.p) << '\n';
    } else if (clift->parsed()) {
      if (*fan_opt) lift.fan_csv = lift_fan;
      if (*tdrop_opt) lift.t_drop_s = lift_t_drop;
      if (*lift_g_opt) lift.gravity = lift_gravity;
      auto traj = pisa::cmd_lift(lift);
      std::cout << "t_drop_s = " << pisa::format_double(traj.t_drop_s) << '\n'
                << "implied_depth_m = " << pisa::format_double(traj.implied_depth_m) << '\n'
                << "n_lifted_frames = " << traj.times_s.size() << '\n';
    } else if (crew->parsed()) {
      if (*grad_opt) rew.gradient_out = rew_grad;
      std::cout << "reward = " << pisa::format_double(pisa::cmd_reward(rew)) << '\n';
    } else if (crep->parsed()) {
      print_summary(pisa::cmd_report(rep));
    }
    return 0;
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // bad usage counts as invalid input
  } catch (const pisa::FormatError& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return 3;
  } catch (const pisa::MetricError& e) {
    std::cerr << "metric error: " << e.what() << '\n';
    return 4;
  } catch (const pisa::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
}
