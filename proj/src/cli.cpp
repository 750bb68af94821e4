#include "vesselfuse/cli.hpp"

#include <filesystem>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "vesselfuse/centerline.hpp"
#include "vesselfuse/io.hpp"
#include "vesselfuse/parallel.hpp"
#include "vesselfuse/pipeline.hpp"

namespace vesselfuse {

namespace fs = std::filesystem;

namespace {

struct CommonOptions {
  double step = 0.5;
  double range = 90.0;
  int sample_size = 500;
  int interpolation_steps = 28;
  std::vector<double> image_center{4.5, 4.5};
  double radius = 0.5;
  int n_points = 20;
  bool bruteforce = false;
  bool no_obj = false;

  PipelineConfig config() const {
    PipelineConfig cfg;
    cfg.pair.search.step_rotation_deg = step;
    cfg.pair.search.range_rotation_deg = range;
    cfg.pair.search.sample_size = sample_size;
    cfg.pair.search.bruteforce = bruteforce;
    cfg.pair.search.catheter = {{image_center.at(0), image_center.at(1)}, radius, n_points};
    cfg.pair.interpolation_steps = interpolation_steps;
    cfg.write_obj = !no_obj;
    return cfg;
  }
};

void add_search_flags(CLI::App* cmd, CommonOptions& o, bool with_interpolation) {
  cmd->add_option("--step", o.step, "Final rotation step in degrees")->capture_default_str();
  cmd->add_option("--range", o.range, "Rotation half-range in degrees")->capture_default_str();
  cmd->add_option("--sample-size", o.sample_size, "Contour points kept for the rotation search")->capture_default_str();
  cmd->add_option("--image-center", o.image_center, "Catheter image center x,y in mm")
      ->delimiter(',')
      ->expected(2)
      ->capture_default_str();
  cmd->add_option("--radius", o.radius, "Catheter radius in mm")->capture_default_str();
  cmd->add_option("--n-points", o.n_points, "Catheter points per frame (0 disables)")->capture_default_str();
  cmd->add_flag("--bruteforce", o.bruteforce, "Sweep the full range at the final step");
  cmd->add_flag("--no-obj", o.no_obj, "Skip OBJ mesh export");
  if (with_interpolation) {
    cmd->add_option("--interpolation-steps", o.interpolation_steps, "Interpolated meshes between phases")
        ->capture_default_str();
  }
}

Vec3 to_vec3(const std::vector<double>& v) { return {v.at(0), v.at(1), v.at(2)}; }

Geometry load_single_phase(const fs::path& dir, const std::string& phase) {
  if (!fs::is_directory(dir)) throw InputError("input directory not found: " + dir.string());
  return load_phase(dir, phase == "dia");
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Registration and fusion of intravascular contour stacks", "vesselfuse"};
  app.require_subcommand(1);

  CommonOptions common;
  fs::path input;
  fs::path rest_input;
  fs::path stress_input;
  fs::path output = "output";

  auto* full = app.add_subcommand("full", "Rest/stress pulsatile pairs plus diastolic/systolic stress pairs");
  auto* doublepair = app.add_subcommand("doublepair", "Rest and stress dia/sys pairs");
  for (auto* cmd : {full, doublepair}) {
    cmd->add_option("--rest-input", rest_input, "Rest input directory")->required();
    cmd->add_option("--stress-input", stress_input, "Stress input directory")->required();
    cmd->add_option("--output", output, "Output root directory")->capture_default_str();
    add_search_flags(cmd, common, true);
  }

  auto* singlepair = app.add_subcommand("singlepair", "Register diastole and systole of one pullback");
  singlepair->add_option("--input", input, "Input directory")->required();
  singlepair->add_option("--output", output, "Output directory")->capture_default_str();
  add_search_flags(singlepair, common, true);

  std::string phase = "dia";
  bool sort = false;
  ReorderConfig reorder_cfg;
  auto* single = app.add_subcommand("single", "Align frames within one pullback");
  single->add_option("--input", input, "Input directory")->required();
  single->add_option("--output", output, "Output directory")->capture_default_str();
  single->add_option("--phase", phase, "Phase to process")->check(CLI::IsMember({"dia", "sys"}))->capture_default_str();
  single->add_flag("--sort", sort, "Reorder frames by Hausdorff cost before alignment");
  single->add_option("--delta", reorder_cfg.delta, "Jump penalty weight for reordering")->capture_default_str();
  single->add_option("--max-rounds", reorder_cfg.max_rounds, "Maximum 2-opt rounds")->capture_default_str();
  add_search_flags(single, common, false);

  fs::path centerline_path;
  std::string cl_mode = "three_pt";
  std::vector<double> aortic_ref;
  std::vector<double> upper_ref;
  std::vector<double> lower_ref;
  std::vector<double> start_point;
  double angle_step = 1.0;
  double rotation_angle = 0.0;
  auto* centerline = app.add_subcommand("centerline", "Register a pullback pair and place it on a centerline");
  centerline->add_option("--input", input, "Input directory")->required();
  centerline->add_option("--centerline", centerline_path, "Centerline CSV (x,y,z rows)")->required();
  centerline->add_option("--output", output, "Output directory")->capture_default_str();
  centerline->add_option("--mode", cl_mode, "Placement mode")
      ->check(CLI::IsMember({"three_pt", "manual"}))
      ->capture_default_str();
  centerline->add_option("--aortic-ref", aortic_ref, "Aortic reference x,y,z")->delimiter(',')->expected(3);
  centerline->add_option("--upper-ref", upper_ref, "Upper reference x,y,z")->delimiter(',')->expected(3);
  centerline->add_option("--lower-ref", lower_ref, "Lower reference x,y,z")->delimiter(',')->expected(3);
  centerline->add_option("--angle-step", angle_step, "Roll sweep step in degrees")->capture_default_str();
  centerline->add_option("--rotation-angle", rotation_angle, "Manual roll in degrees")->capture_default_str();
  centerline->add_option("--start-point", start_point, "Manual ostium x,y,z")->delimiter(',')->expected(3);
  add_search_flags(centerline, common, true);

  auto* reorder = app.add_subcommand("reorder", "Recover frame order from Hausdorff costs");
  reorder->add_option("--input", input, "Input directory")->required();
  reorder->add_option("--output", output, "Output directory")->capture_default_str();
  reorder->add_option("--phase", phase, "Phase to process")
      ->check(CLI::IsMember({"dia", "sys"}))
      ->capture_default_str();
  reorder->add_option("--delta", reorder_cfg.delta, "Jump penalty weight")->capture_default_str();
  reorder->add_option("--max-rounds", reorder_cfg.max_rounds, "Maximum 2-opt rounds")->capture_default_str();

  auto* summary = app.add_subcommand("summary", "Print lumen summaries of a pullback directory");
  summary->add_option("--input", input, "Input directory")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  const WorkerLimit limit(worker_limit_from_env());
  try {
    if (common.image_center.size() != 2) throw InputError("--image-center expects x,y");
    const PipelineConfig cfg = common.config();

    if (*full || *doublepair) {
      if (!fs::is_directory(rest_input)) throw InputError("input directory not found: " + rest_input.string());
      if (!fs::is_directory(stress_input)) throw InputError("input directory not found: " + stress_input.string());
      const PhaseInputs rest = load_phase_directory(rest_input);
      const PhaseInputs stress = load_phase_directory(stress_input);
      OutputPaths paths{output / "rest", output / "stress", output / "diastole", output / "systole", {}};
      const ModeResult r = *full ? run_full(rest.dia, rest.sys, stress.dia, stress.sys, cfg, paths)
                                 : run_doublepair(rest.dia, rest.sys, stress.dia, stress.sys, cfg, paths);
      out << fmt::format("{}: {} pairs written to {}\n", to_string(r.mode), r.pairs.size(), output.string());
    } else if (*singlepair) {
      const PhaseInputs in = load_phase_directory(input);
      const ModeResult r = run_singlepair(in.dia, in.sys, cfg, output);
      out << fmt::format("singlepair: pair rotation {:.2f} deg, written to {}\n", r.pair_rotations_deg.front(),
                         output.string());
    } else if (*single) {
      const Geometry g = load_single_phase(input, phase);
      SingleOptions opts;
      opts.diastole = phase == "dia";
      opts.sort = sort;
      opts.reorder = reorder_cfg;
      const ModeResult r = run_single(g, cfg, opts, output);
      out << fmt::format("single: {} frames aligned, written to {}\n", r.geometry->frame_count(), output.string());
    } else if (*centerline) {
      const PhaseInputs in = load_phase_directory(input);
      const Centerline cl = read_centerline_csv(centerline_path);
      const ModeResult r = run_singlepair(in.dia, in.sys, cfg, {});
      CenterlineAlignment placed;
      if (cl_mode == "three_pt") {
        if (aortic_ref.size() != 3 || upper_ref.size() != 3 || lower_ref.size() != 3) {
          throw InputError("three_pt mode requires --aortic-ref, --upper-ref and --lower-ref");
        }
        placed = align_three_point(cl, r.pairs.front(), to_vec3(aortic_ref), to_vec3(upper_ref), to_vec3(lower_ref),
                                   angle_step);
      } else {
        if (start_point.size() != 3) throw InputError("manual mode requires --start-point");
        placed = align_manual(cl, r.pairs.front(), rotation_angle, to_vec3(start_point));
      }
      for (const auto& w : placed.warnings) err << "warning: " << w << "\n";
      export_pair(placed.pair, r.logs[0], r.logs[1], cfg, output);
      write_centerline_obj(placed.centerline, output / "centerline.obj");
      out << fmt::format("centerline: roll {:.2f} deg, written to {}\n", placed.roll_deg, output.string());
    } else if (*reorder) {
      const Geometry g = load_single_phase(input, phase);
      const Geometry reordered = reorder_geometry(g, reorder_cfg);
      write_contours_csv(output / (phase == "dia" ? files::kDiastolicContours : files::kSystolicContours),
                         flatten(reordered.contours));
      std::string order;
      for (const auto& c : reordered.contours) order += fmt::format("{}{}", order.empty() ? "" : " ", c.id());
      out << "order: " << order << "\n";
    } else if (*summary) {
      if (!fs::is_directory(input)) throw InputError("input directory not found: " + input.string());
      const bool has_dia = fs::exists(input / files::kDiastolicContours);
      const bool has_sys = fs::exists(input / files::kSystolicContours);
      if (!has_dia && !has_sys) throw InputError("no contour files in " + input.string());
      std::optional<Geometry> dia;
      std::optional<Geometry> sys;
      if (has_dia) dia = load_phase(input, true);
      if (has_sys) sys = load_phase(input, false);
      if (dia) out << format_summary("Diastole", get_summary(*dia));
      if (dia && sys) out << "\n";
      if (sys) out << format_summary("Systole", get_summary(*sys));
      if (dia && sys && dia->frame_count() == sys->frame_count()) {
        out << "\n" << format_summary_table(get_pair_summary({*dia, *sys}).rows);
      }
    }
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "processing error: " << e.what() << "\n";
    return kExitProcessingError;
  }
  return kExitOk;
}

}  // namespace vesselfuse
