#include "vesselfuse/pipeline.hpp"

#include <utility>

#include "vesselfuse/io.hpp"
#include "vesselfuse/parallel.hpp"

namespace vesselfuse {

namespace fs = std::filesystem;

namespace {

template <class Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const InputError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e);
  }
}

std::vector<Record> records_for(const std::vector<Record>& records, Phase phase) {
  std::vector<Record> out;
  for (const auto& r : records) {
    if (r.phase == phase) out.push_back(r);
  }
  return out;
}

}  // namespace

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::Full: return "full";
    case Mode::DoublePair: return "doublepair";
    case Mode::SinglePair: return "singlepair";
    case Mode::Single: return "single";
  }
  return "unknown";
}

StageError::StageError(std::string stage, const std::exception& cause)
    : std::runtime_error(stage + ": " + cause.what()), stage_(std::move(stage)) {}

Geometry prepare_geometry(const Geometry& geometry, const SearchConfig& cfg) {
  Geometry out = geometry;
  if (cfg.catheter.n_points > 0) out = create_catheter_geometry(out, cfg.catheter);
  if (out.walls.empty() && !out.empty()) out = create_default_walls(out);
  return out;
}

void export_pair(const GeometryPair& pair, const std::vector<AlignLog>& dia_logs,
                 const std::vector<AlignLog>& sys_logs, const PipelineConfig& cfg, const fs::path& dir) {
  if (dir.empty()) return;
  if (cfg.write_obj) write_pair_objs(pair, cfg.pair.interpolation_steps, dir);
  write_logs_csv(dir / "dia_logs.csv", dia_logs);
  write_logs_csv(dir / "sys_logs.csv", sys_logs);
  write_summary_csv(dir / "summary.csv", get_pair_summary(pair));
}

ModeResult run_singlepair(const Geometry& dia, const Geometry& sys, const PipelineConfig& cfg, const fs::path& out) {
  cfg.pair.validate();
  Geometry pd;
  Geometry ps;
  stage("prepare", [&] {
    pd = prepare_geometry(dia, cfg.search());
    ps = prepare_geometry(sys, cfg.search());
  });
  PairResult pr = stage("pair alignment", [&] { return build_pair(pd, ps, cfg.pair); });
  stage("export", [&] { export_pair(pr.pair, pr.dia_logs, pr.sys_logs, cfg, out); });

  ModeResult result;
  result.mode = Mode::SinglePair;
  result.pairs.push_back(std::move(pr.pair));
  result.logs.push_back(std::move(pr.dia_logs));
  result.logs.push_back(std::move(pr.sys_logs));
  result.pair_rotations_deg.push_back(pr.pair_rotation_deg);
  return result;
}

ModeResult run_doublepair(const Geometry& rest_dia, const Geometry& rest_sys, const Geometry& stress_dia,
                          const Geometry& stress_sys, const PipelineConfig& cfg, const OutputPaths& out) {
  cfg.pair.validate();
  ModeResult rest;
  ModeResult stress;
  parallel_invoke([&] { rest = run_singlepair(rest_dia, rest_sys, cfg, out.rest); },
                  [&] { stress = run_singlepair(stress_dia, stress_sys, cfg, out.stress); });

  ModeResult result;
  result.mode = Mode::DoublePair;
  result.pairs = {std::move(rest.pairs[0]), std::move(stress.pairs[0])};
  result.logs = {std::move(rest.logs[0]), std::move(rest.logs[1]), std::move(stress.logs[0]),
                 std::move(stress.logs[1])};
  result.pair_rotations_deg = {rest.pair_rotations_deg[0], stress.pair_rotations_deg[0]};
  return result;
}

ModeResult run_full(const Geometry& rest_dia, const Geometry& rest_sys, const Geometry& stress_dia,
                    const Geometry& stress_sys, const PipelineConfig& cfg, const OutputPaths& out) {
  cfg.pair.validate();
  const SearchConfig& search = cfg.search();

  std::array<const Geometry*, 4> inputs{&rest_dia, &rest_sys, &stress_dia, &stress_sys};
  std::array<IntraAlignResult, 4> aligned;
  stage("intra alignment", [&] {
    parallel_for(inputs.size(), [&](std::size_t i) {
      aligned[i] = align_frames_intra(prepare_geometry(*inputs[i], search), search);
    });
  });

  // Rest and stress pairs use dia as fixed; cross pairs keep rest fixed and move stress.
  const std::array<std::pair<std::size_t, std::size_t>, 4> combos{{{0, 1}, {2, 3}, {0, 2}, {1, 3}}};
  std::array<PairResult, 4> pairs;
  stage("pair alignment", [&] {
    parallel_for(combos.size(), [&](std::size_t i) {
      pairs[i] = register_pair(aligned[combos[i].first].geometry, aligned[combos[i].second].geometry, search);
    });
  });

  const std::array<fs::path, 4> dirs{out.rest, out.stress, out.diastole, out.systole};
  stage("export", [&] {
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      export_pair(pairs[i].pair, aligned[combos[i].first].logs, aligned[combos[i].second].logs, cfg, dirs[i]);
    }
  });

  ModeResult result;
  result.mode = Mode::Full;
  for (auto& p : pairs) {
    result.pairs.push_back(std::move(p.pair));
    result.pair_rotations_deg.push_back(p.pair_rotation_deg);
  }
  for (auto& a : aligned) result.logs.push_back(std::move(a.logs));
  return result;
}

ModeResult run_single(const Geometry& geometry, const PipelineConfig& cfg, const SingleOptions& options,
                      const fs::path& out) {
  cfg.search().validate();
  Geometry g = stage("prepare", [&] { return prepare_geometry(geometry, cfg.search()); });
  if (options.records) {
    g = stage("record ordering", [&] {
      auto [dia, sys] = order_by_records(g, *options.records);
      return options.diastole ? dia : sys;
    });
  }
  if (options.sort && g.frame_count() >= 2) {
    g = stage("reorder", [&] { return reorder_geometry(g, options.reorder); });
  }
  IntraAlignResult aligned = stage("intra alignment", [&] { return align_frames_intra(g, cfg.search()); });
  aligned.geometry = stage("smoothing", [&] { return smooth_contours(aligned.geometry, options.smoothing_window); });

  stage("export", [&] {
    if (out.empty()) return;
    if (cfg.write_obj) write_geometry_obj(aligned.geometry, out);
    write_logs_csv(out / "logs.csv", aligned.logs);
    write_contours_csv(out / "aligned_contours.csv", flatten(aligned.geometry.contours));
  });

  ModeResult result;
  result.mode = Mode::Single;
  result.geometry = std::move(aligned.geometry);
  result.logs.push_back(std::move(aligned.logs));
  return result;
}

Geometry geometry_from_points(std::span<const ContourPoint> contours, std::optional<ContourPoint> reference,
                              std::string label) {
  Geometry g;
  g.contours = group_by_frame(contours);
  g.reference_point = reference;
  g.label = std::move(label);
  return g;
}

Geometry load_phase(const fs::path& dir, bool diastole) {
  const fs::path contours = dir / (diastole ? files::kDiastolicContours : files::kSystolicContours);
  const fs::path reference = dir / (diastole ? files::kDiastolicReference : files::kSystolicReference);
  std::optional<ContourPoint> ref;
  if (fs::exists(reference)) ref = read_reference_csv(reference);
  Geometry g = geometry_from_points(read_contours_csv(contours), ref, diastole ? "Diastole" : "Systole");

  const fs::path records_path = dir / files::kRecords;
  if (fs::exists(records_path)) {
    const auto records = records_for(read_records_csv(records_path), diastole ? Phase::Diastole : Phase::Systole);
    if (!records.empty()) {
      try {
        auto [dia, sys] = order_by_records(g, records);
        g = diastole ? std::move(dia) : std::move(sys);
      } catch (const std::invalid_argument& e) {
        throw InputError(records_path.string() + ": " + e.what());
      }
    }
  }
  return g;
}

PhaseInputs load_phase_directory(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw InputError("input directory not found: " + dir.string());
  return {load_phase(dir, true), load_phase(dir, false)};
}

}  // namespace vesselfuse
