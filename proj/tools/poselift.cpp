// poselift command line: lift 2D joint detections to 3D skeletons and run the
// controlled experiments. Exit codes: 0 success, 1 solver failure, 2 usage
// error, 3 I/O or parse error.
#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>

#include "poselift/poselift.hpp"

namespace pl = poselift;

namespace {

struct CommonArgs {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  double theta = -1;  // <0: take from config
};

pl::Config resolve_config(const CommonArgs& args) {
  pl::Config cfg;
  if (!args.config_path.empty()) cfg = pl::load_config(args.config_path);
  if (args.seed_set) cfg.seed = args.seed;
  if (args.theta >= 0) cfg.theta = args.theta;
  cfg.validate();
  return cfg;
}

void emit_error(const std::string& type, const std::string& message) {
  pl::json err;
  err["error"] = message;
  err["type"] = type;
  std::cerr << err.dump() << std::endl;
}

std::vector<double> parse_angle_range(const std::string& text) {
  // "start:step:stop" or comma-separated list
  std::vector<double> angles;
  if (text.find(':') != std::string::npos) {
    double start, step, stop;
    if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &start, &step, &stop) != 3 ||
        step <= 0)
      throw pl::ParseError("bad angle range: " + text);
    for (double a = start; a <= stop + 1e-9; a += step) angles.push_back(a);
  } else {
    std::istringstream in(text);
    std::string field;
    while (std::getline(in, field, ','))
      angles.push_back(pl::io_detail::parse_double(field, "angles"));
  }
  if (angles.empty()) throw pl::ParseError("empty angle list");
  return angles;
}

std::vector<pl::VariantConfig> parse_variants(const std::string& text) {
  std::vector<pl::VariantConfig> variants;
  if (text == "all") {
    const auto grid = pl::VariantConfig::grid();
    variants.assign(grid.begin(), grid.end());
    return variants;
  }
  std::istringstream in(text);
  std::string field;
  while (std::getline(in, field, ','))
    variants.push_back(pl::VariantConfig::parse(field));
  if (variants.empty()) throw pl::ParseError("empty variant list");
  return variants;
}

struct Timer {
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start)
        .count();
  }
};

int run(int argc, char** argv) {
  CLI::App app{"poselift: 3D human pose lifting with sparse bases, "
               "anthropometric constraints and an L1 reprojection error"};
  app.require_subcommand(1);
  argv = app.ensure_utf8(argv);

  CommonArgs common;

  // ---- gen-synthetic
  auto* gen = app.add_subcommand(
      "gen-synthetic", "Generate a synthetic pose corpus (CSV or JSON)");
  int gen_count = 200;
  std::string gen_out;
  std::uint64_t gen_seed = 1;
  int gen_classes = 1;
  gen->add_option("--count", gen_count, "Number of poses")->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_seed, "Generator seed");
  gen->add_option("--classes", gen_classes,
                  "Emit a label column cycling over this many classes");
  gen->add_option("--out", gen_out, "Output CSV path")->required();

  // ---- learn-bases
  auto* learn = app.add_subcommand("learn-bases",
                                   "Learn a pose basis from a 3D pose corpus");
  std::string learn_poses, learn_out, learn_method = "sparse";
  int learn_k = 200, learn_epochs = 30;
  double learn_theta = 0.1;
  std::uint64_t learn_seed = 0;
  learn->add_option("--poses", learn_poses, "Training pose CSV/JSON")->required();
  learn->add_option("--method", learn_method,
                    "pca | classwise-pca | sparse");
  learn->add_option("--k", learn_k,
                    "Basis count (per class for classwise-pca)");
  learn->add_option("--theta-learn", learn_theta,
                    "Sparse coding weight during learning");
  learn->add_option("--epochs", learn_epochs, "Dictionary learning epochs");
  learn->add_option("--seed", learn_seed, "Dictionary initialization seed");
  learn->add_option("--out", learn_out, "Output dictionary JSON")->required();

  // ---- estimate-camera
  auto* estc = app.add_subcommand(
      "estimate-camera", "Estimate a weak-perspective camera from 2D/3D poses");
  std::string estc_2d, estc_3d, estc_out;
  estc->add_option("--pose2d", estc_2d, "2D pose file")->required();
  estc->add_option("--pose3d", estc_3d, "3D pose file")->required();
  estc->add_option("--out", estc_out, "Output camera JSON")->required();

  // ---- lift
  auto* lift_cmd = app.add_subcommand(
      "lift", "Lift a 2D pose to 3D with a learned basis");
  std::string lift_2d, lift_basis, lift_camera, lift_out, lift_variant = "l1waws";
  std::string lift_init = "mean", lift_clusters;
  int lift_outer_max = 20;
  lift_cmd->add_option("--pose2d", lift_2d, "2D pose file")->required();
  lift_cmd->add_option("--basis", lift_basis, "Dictionary JSON")->required();
  lift_cmd->add_option("--camera", lift_camera,
                       "Fixed camera JSON (skips camera estimation)");
  lift_cmd->add_option("--variant", lift_variant, "Variant name, e.g. l1waws");
  lift_cmd->add_option("--theta", common.theta, "Sparsity weight");
  lift_cmd->add_option("--init", lift_init, "mean | clusters");
  lift_cmd->add_option("--clusters", lift_clusters,
                       "Pose CSV with initialization poses (for --init clusters)");
  lift_cmd->add_option("--outer-max", lift_outer_max,
                       "Alternation iteration cap");
  lift_cmd->add_option("--config", common.config_path, "Config JSON");
  lift_cmd->add_option("--out", lift_out, "Output result JSON")->required();

  // ---- eval-noise
  auto* evn = app.add_subcommand(
      "eval-noise", "Noise ladder experiment: error vs Gaussian noise level");
  std::string evn_basis, evn_out, evn_variants = "l1waws", evn_svg;
  int evn_instances = 100;
  std::string evn_levels = "1,2,3,4,5,6,7,8,9,10";
  std::uint64_t evn_seed = 0;
  evn->add_option("--basis", evn_basis, "Dictionary JSON")->required();
  evn->add_option("--instances", evn_instances, "Instances per level");
  evn->add_option("--levels", evn_levels, "Comma-separated levels in 1..10");
  evn->add_option("--variants", evn_variants, "Comma list or 'all'");
  evn->add_option("--seed", evn_seed, "Experiment seed");
  std::string evn_camera = "estimated";
  evn->add_option("--camera", evn_camera,
                  "estimated (alternation) | gt (hold at ground truth)");
  evn->add_option("--config", common.config_path, "Config JSON");
  evn->add_option("--out", evn_out, "Report CSV")->required();
  evn->add_option("--svg", evn_svg, "Optional SVG plot rendered from the CSV");

  // ---- eval-viewpoint
  auto* evv = app.add_subcommand(
      "eval-viewpoint", "Viewpoint sweep: error vs human-camera angle");
  std::string evv_basis, evv_out, evv_angles = "0:15:180", evv_svg;
  int evv_instances = 20;
  std::uint64_t evv_seed = 0;
  std::string evv_variant = "l1waws";
  evv->add_option("--basis", evv_basis, "Dictionary JSON")->required();
  evv->add_option("--instances", evv_instances, "Pose count");
  evv->add_option("--angles", evv_angles, "start:step:stop or comma list");
  evv->add_option("--variant", evv_variant, "Variant name");
  evv->add_option("--seed", evv_seed, "Experiment seed");
  evv->add_option("--config", common.config_path, "Config JSON");
  evv->add_option("--out", evv_out, "Report CSV")->required();
  evv->add_option("--svg", evv_svg, "Optional SVG plot rendered from the CSV");

  // ---- eval-grid
  auto* evg = app.add_subcommand(
      "eval-grid", "Baseline grid: all eight variants on clean instances");
  std::string evg_basis, evg_out, evg_variants = "all", evg_svg;
  int evg_instances = 200;
  std::uint64_t evg_seed = 0;
  evg->add_option("--basis", evg_basis, "Dictionary JSON")->required();
  evg->add_option("--instances", evg_instances, "Instance count");
  evg->add_option("--variants", evg_variants, "Comma list or 'all'");
  evg->add_option("--seed", evg_seed, "Experiment seed");
  std::string evg_camera = "estimated";
  evg->add_option("--camera", evg_camera,
                  "estimated (alternation) | gt (hold at ground truth)");
  evg->add_option("--config", common.config_path, "Config JSON");
  evg->add_option("--out", evg_out, "Report CSV")->required();
  evg->add_option("--svg", evg_svg, "Optional SVG plot (error CDF per variant)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : 2;  // usage errors exit 2, --help exits 0
  }

  Timer timer;

  if (gen->parsed()) {
    auto poses = pl::make_synthetic_poses(gen_count, gen_seed);
    std::vector<int> labels;
    if (gen_classes > 1)
      for (int i = 0; i < gen_count; ++i) labels.push_back(i % gen_classes);
    pl::save_poses_csv(gen_out, poses, labels);
    std::cout << "wrote " << gen_count << " poses to " << gen_out << std::endl;
    return 0;
  }

  if (learn->parsed()) {
    const pl::PoseFileContent content = pl::parse_pose_file(learn_poses);
    if (content.poses3d.empty())
      throw pl::ParseError(learn_poses + ": need 3D poses to learn bases");
    pl::Basis basis;
    if (learn_method == "pca") {
      basis = pl::learn_pca(content.poses3d, learn_k);
    } else if (learn_method == "classwise-pca") {
      if (content.labels.empty())
        throw pl::ParseError(learn_poses +
                             ": classwise-pca needs a label column");
      basis = pl::learn_classwise_pca(content.poses3d, content.labels, learn_k);
    } else if (learn_method == "sparse") {
      basis = pl::learn_sparse_dictionary(content.poses3d, learn_k,
                                          learn_theta, learn_epochs,
                                          learn_seed);
    } else {
      throw pl::ParseError("unknown method: " + learn_method);
    }
    pl::save_basis(learn_out, basis);
    std::cout << "learned " << basis.count() << " bases ("
              << pl::basis_method_name(basis.method) << ") -> " << learn_out
              << std::endl;
    return 0;
  }

  if (estc->parsed()) {
    const pl::Pose2D x2d = pl::load_pose2d(estc_2d);
    const pl::Pose3D y3d = pl::load_pose3d(estc_3d);
    Eigen::Matrix2Xd image = pl::pose_as_columns(x2d);
    image.colwise() -= image.rowwise().mean().eval();
    Eigen::Matrix3Xd world = pl::pose_as_columns(y3d);
    world.colwise() -= world.rowwise().mean().eval();
    pl::CameraDiagnostics diag;
    const pl::Camera cam = pl::estimate_camera(image, world, {}, &diag);
    pl::save_camera(estc_out, cam);
    std::cout << "camera estimated in " << diag.iterations
              << " iterations, L1 residual " << diag.residual_l1 << " -> "
              << estc_out << std::endl;
    return 0;
  }

  if (lift_cmd->parsed()) {
    const pl::Config cfg = resolve_config(common);
    const pl::Pose2D x2d = pl::load_pose2d(lift_2d);
    const pl::Basis basis = pl::load_basis(lift_basis);
    pl::AlternationOptions options = cfg.alternation_options();
    options.variant = pl::VariantConfig::parse(lift_variant);
    options.max_outer = lift_outer_max;

    pl::RunManifest manifest;
    manifest.command = "lift";
    manifest.config = cfg;
    manifest.input_digests.emplace_back(lift_2d, pl::io_detail::digest(lift_2d));
    manifest.input_digests.emplace_back(lift_basis,
                                        pl::io_detail::digest(lift_basis));

    if (!lift_camera.empty()) {
      // fixed camera: single solve, no alternation
      const pl::Camera cam = pl::load_camera(lift_camera);
      manifest.input_digests.emplace_back(lift_camera,
                                          pl::io_detail::digest(lift_camera));
      const Eigen::Vector2d center = pl::pose_centroid(x2d);
      pl::Pose2D centered;
      for (int j = 0; j < pl::kJointCount; ++j)
        centered.segment<2>(2 * j) = x2d.segment<2>(2 * j) - center;
      pl::LiftProblem problem;
      problem.x = centered;
      problem.basis = &basis;
      problem.camera = cam;
      problem.limbs = options.limbs;
      problem.theta = cfg.theta;
      problem.variant = options.variant;
      const pl::LiftResult result = pl::lift(problem, options.lift);
      pl::save_lift_result(lift_out, result, cam, center);
      manifest.total_runtime_ms = timer.ms();
      pl::save_manifest(lift_out, manifest);
      std::cout << (result.converged ? "converged" : "iteration cap") << ", L1 residual "
                << result.residual_l1 << " -> " << lift_out << std::endl;
      return result.converged ? 0 : 1;
    }

    pl::AlternationResult result;
    if (lift_init == "clusters") {
      if (lift_clusters.empty())
        throw pl::ParseError("--init clusters needs --clusters FILE");
      const pl::PoseFileContent content = pl::parse_pose_file(lift_clusters);
      if (content.poses3d.empty())
        throw pl::ParseError(lift_clusters + ": need 3D poses");
      manifest.input_digests.emplace_back(
          lift_clusters, pl::io_detail::digest(lift_clusters));
      result = pl::multi_start(x2d, basis, content.poses3d, options);
    } else if (lift_init == "mean") {
      result = pl::alternate(x2d, basis, basis.mean, options);
    } else {
      throw pl::ParseError("unknown --init mode: " + lift_init);
    }
    pl::save_lift_result(lift_out, result.lift, result.camera,
                         result.image_center);
    manifest.total_runtime_ms = timer.ms();
    pl::save_manifest(lift_out, manifest);
    std::cout << "alternation finished after " << result.iterations
              << " rounds, L1 residual " << result.lift.residual_l1 << " -> "
              << lift_out << std::endl;
    return 0;
  }

  // shared eval set-up
  const pl::Config cfg = resolve_config(common);

  if (evn->parsed()) {
    const pl::Basis basis = pl::load_basis(evn_basis);
    const auto instances = pl::make_eval_instances(evn_instances, evn_seed + 1);
    std::vector<int> levels;
    {
      std::istringstream in(evn_levels);
      std::string field;
      while (std::getline(in, field, ','))
        levels.push_back(static_cast<int>(
            pl::io_detail::parse_double(field, "levels")));
    }
    pl::EvalRunOptions run_options;
    run_options.alternation = cfg.alternation_options();
    if (evn_camera == "gt")
      run_options.camera_mode = pl::CameraMode::kGroundTruth;
    else if (evn_camera != "estimated")
      throw pl::ParseError("unknown --camera mode: " + evn_camera);
    const auto records = pl::run_noise_sweep(
        instances, levels, parse_variants(evn_variants), basis, evn_seed,
        run_options);
    pl::save_report_csv(evn_out, records);
    pl::RunManifest manifest;
    manifest.command = "eval-noise";
    manifest.config = cfg;
    manifest.config.seed = evn_seed;
    manifest.input_digests.emplace_back(evn_basis,
                                        pl::io_detail::digest(evn_basis));
    manifest.total_runtime_ms = timer.ms();
    pl::save_manifest(evn_out, manifest);
    if (!evn_svg.empty()) {
      const auto loaded = pl::load_report_csv(evn_out);
      std::map<std::string, std::map<int, std::vector<double>>> by_variant;
      for (const auto& r : loaded)
        if (r.solver_ok) by_variant[r.variant][r.noise_level].push_back(r.err3d);
      std::vector<pl::PlotSeries> series;
      for (auto& [name, by_level] : by_variant) {
        pl::PlotSeries s;
        s.label = name;
        for (auto& [level, errs] : by_level) {
          std::sort(errs.begin(), errs.end());
          s.x.push_back(level);
          s.y.push_back(errs[errs.size() / 2]);
        }
        series.push_back(std::move(s));
      }
      pl::io_detail::write_file(
          evn_svg, pl::render_line_chart(series, "3D error vs noise level",
                                         "noise level", "median 3D error"));
    }
    std::cout << "wrote " << records.size() << " records -> " << evn_out
              << std::endl;
    return 0;
  }

  if (evv->parsed()) {
    const pl::Basis basis = pl::load_basis(evv_basis);
    const auto poses = pl::make_synthetic_poses(evv_instances, evv_seed + 17);
    const auto angles = parse_angle_range(evv_angles);
    pl::EvalRunOptions run_options;
    run_options.alternation = cfg.alternation_options();
    run_options.alternation.variant = pl::VariantConfig::parse(evv_variant);
    pl::SeededRng cam_rng(evv_seed + 29);
    std::vector<pl::EvalRecord> records;
    for (int i = 0; i < evv_instances; ++i) {
      const pl::Camera cam = pl::random_camera(cam_rng);
      const auto sweep =
          pl::viewpoint_sweep(poses[i], angles, cam, basis, run_options, i);
      records.insert(records.end(), sweep.begin(), sweep.end());
    }
    pl::save_report_csv(evv_out, records);
    pl::RunManifest manifest;
    manifest.command = "eval-viewpoint";
    manifest.config = cfg;
    manifest.config.seed = evv_seed;
    manifest.input_digests.emplace_back(evv_basis,
                                        pl::io_detail::digest(evv_basis));
    manifest.total_runtime_ms = timer.ms();
    pl::save_manifest(evv_out, manifest);
    if (!evv_svg.empty()) {
      const auto loaded = pl::load_report_csv(evv_out);
      std::map<double, std::vector<double>> by_angle;
      for (const auto& r : loaded)
        if (r.solver_ok) by_angle[r.angle_deg].push_back(r.err3d);
      pl::PlotSeries s;
      s.label = run_options.alternation.variant.name();
      for (auto& [angle, errs] : by_angle) {
        std::sort(errs.begin(), errs.end());
        s.x.push_back(angle);
        s.y.push_back(errs[errs.size() / 2]);
      }
      pl::io_detail::write_file(
          evv_svg,
          pl::render_line_chart({s}, "3D error vs human-camera angle",
                                "angle (degrees)", "median 3D error"));
    }
    std::cout << "wrote " << records.size() << " records -> " << evv_out
              << std::endl;
    return 0;
  }

  if (evg->parsed()) {
    const pl::Basis basis = pl::load_basis(evg_basis);
    const auto instances = pl::make_eval_instances(evg_instances, evg_seed + 3);
    pl::EvalRunOptions run_options;
    run_options.alternation = cfg.alternation_options();
    if (evg_camera == "gt")
      run_options.camera_mode = pl::CameraMode::kGroundTruth;
    else if (evg_camera != "estimated")
      throw pl::ParseError("unknown --camera mode: " + evg_camera);
    const auto records = pl::run_variant_grid(
        instances, parse_variants(evg_variants), basis, run_options);
    pl::save_report_csv(evg_out, records);
    pl::RunManifest manifest;
    manifest.command = "eval-grid";
    manifest.config = cfg;
    manifest.config.seed = evg_seed;
    manifest.input_digests.emplace_back(evg_basis,
                                        pl::io_detail::digest(evg_basis));
    manifest.total_runtime_ms = timer.ms();
    pl::save_manifest(evg_out, manifest);
    if (!evg_svg.empty()) {
      const auto loaded = pl::load_report_csv(evg_out);
      std::map<std::string, std::vector<double>> by_variant;
      for (const auto& r : loaded)
        if (r.solver_ok) by_variant[r.variant].push_back(r.err3d);
      std::vector<pl::PlotSeries> series;
      for (auto& [name, errs] : by_variant) {
        std::sort(errs.begin(), errs.end());
        pl::PlotSeries s;
        s.label = name;
        for (size_t i = 0; i < errs.size(); ++i) {
          s.x.push_back(errs[i]);
          s.y.push_back(static_cast<double>(i + 1) / errs.size());
        }
        series.push_back(std::move(s));
      }
      pl::io_detail::write_file(
          evg_svg, pl::render_line_chart(series,
                                         "Cumulative distribution of 3D error",
                                         "3D error", "fraction of cases"));
    }
    std::cout << "wrote " << records.size() << " records -> " << evg_out
              << std::endl;
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const pl::ParseError& err) {
    emit_error("parse", err.what());
    return 3;
  } catch (const pl::ConvergenceError& err) {
    emit_error("convergence", err.what());
    return 1;
  } catch (const pl::Error& err) {
    emit_error("solver", err.what());
    return 1;
  } catch (const std::exception& err) {
    emit_error("internal", err.what());
    return 1;
  }
}
