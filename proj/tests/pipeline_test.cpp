#include <gtest/gtest.h>

#include <random>

#include "support/oracles.hpp"
#include "support/synthetic.hpp"
#include "vesselfuse/io.hpp"
#include "vesselfuse/parallel.hpp"
#include "vesselfuse/pipeline.hpp"

namespace {

using namespace vesselfuse;
namespace fs = std::filesystem;

PipelineConfig small_config() {
  PipelineConfig cfg;
  cfg.pair.search.range_rotation_deg = 15.0;
  cfg.pair.search.step_rotation_deg = 0.5;
  cfg.pair.search.sample_size = 60;
  cfg.pair.search.catheter.n_points = 12;
  cfg.pair.interpolation_steps = 2;
  return cfg;
}

struct Inputs {
  GeometryPair rest = vftest::pullback_pair(8, 60, 4.0);
  GeometryPair stress = vftest::pullback_pair(8, 60, -3.0);
};

TEST(Pipeline, ModeShapes) {
  const Inputs in;
  const auto cfg = small_config();

  const auto sp = run_singlepair(in.rest.dia_geom, in.rest.sys_geom, cfg);
  EXPECT_EQ(sp.mode, Mode::SinglePair);
  EXPECT_EQ(sp.pairs.size(), 1u);
  EXPECT_EQ(sp.logs.size(), 2u);
  EXPECT_EQ(sp.pair_rotations_deg.size(), 1u);
  EXPECT_FALSE(sp.geometry);

  const auto dp = run_doublepair(in.rest.dia_geom, in.rest.sys_geom, in.stress.dia_geom, in.stress.sys_geom, cfg);
  EXPECT_EQ(dp.pairs.size(), 2u);
  EXPECT_EQ(dp.logs.size(), 4u);
  EXPECT_EQ(dp.pair_rotations_deg.size(), 2u);

  const auto full = run_full(in.rest.dia_geom, in.rest.sys_geom, in.stress.dia_geom, in.stress.sys_geom, cfg);
  EXPECT_EQ(full.mode, Mode::Full);
  EXPECT_EQ(full.pairs.size(), 4u);
  EXPECT_EQ(full.logs.size(), 4u);
  for (const auto& logs : full.logs) EXPECT_EQ(logs.size(), 8u);

  const auto single = run_single(in.rest.dia_geom, cfg);
  EXPECT_EQ(single.mode, Mode::Single);
  ASSERT_TRUE(single.geometry);
  EXPECT_EQ(single.geometry->frame_count(), 8u);
  EXPECT_EQ(single.geometry->catheters.size(), 8u);
  EXPECT_EQ(single.geometry->walls.size(), 8u);
  EXPECT_TRUE(single.pairs.empty());
}

TEST(Pipeline, PairModesAgree) {
  const Inputs in;
  const auto cfg = small_config();
  const auto rest = run_singlepair(in.rest.dia_geom, in.rest.sys_geom, cfg);
  const auto stress = run_singlepair(in.stress.dia_geom, in.stress.sys_geom, cfg);
  const auto dp = run_doublepair(in.rest.dia_geom, in.rest.sys_geom, in.stress.dia_geom, in.stress.sys_geom, cfg);
  const auto full = run_full(in.rest.dia_geom, in.rest.sys_geom, in.stress.dia_geom, in.stress.sys_geom, cfg);

  EXPECT_EQ(dp.pairs[0], rest.pairs[0]);
  EXPECT_EQ(dp.pairs[1], stress.pairs[0]);
  EXPECT_EQ(full.pairs[0], rest.pairs[0]);
  EXPECT_EQ(full.pairs[1], stress.pairs[0]);
  EXPECT_EQ(full.pair_rotations_deg[0], rest.pair_rotations_deg[0]);
  // Cross pairs keep the rest geometry fixed.
  EXPECT_EQ(full.pairs[2].dia_geom.contours.size(), 8u);
  EXPECT_EQ(full.pairs[2].dia_geom.contours[0], full.pairs[0].dia_geom.contours[0]);
}

TEST(Pipeline, SinglePairExportLayout) {
  const Inputs in;
  auto cfg = small_config();
  const auto dir = vftest::scratch_dir("pipe_sp");
  run_singlepair(in.rest.dia_geom, in.rest.sys_geom, cfg, dir);
  const auto files = vftest::oracle::tree(dir);
  for (const char* name : {"mesh_000_dia.obj", "mesh_001.obj", "mesh_002.obj", "mesh_003_sys.obj", "mesh.mtl",
                           "deformation.csv", "dia_logs.csv", "sys_logs.csv", "summary.csv"}) {
    EXPECT_TRUE(files.count(name)) << name;
  }
  EXPECT_EQ(files.size(), 9u);

  cfg.write_obj = false;
  const auto csv_only = vftest::scratch_dir("pipe_sp_csv");
  run_singlepair(in.rest.dia_geom, in.rest.sys_geom, cfg, csv_only);
  EXPECT_EQ(vftest::oracle::tree(csv_only).size(), 3u);
}

TEST(Pipeline, FullExportIsDeterministic) {
  const Inputs in;
  const auto cfg = small_config();
  auto run = [&](const std::string& name, std::size_t workers) {
    const WorkerLimit limit(workers);
    const auto dir = vftest::scratch_dir(name);
    run_full(in.rest.dia_geom, in.rest.sys_geom, in.stress.dia_geom, in.stress.sys_geom, cfg,
             {dir / "rest", dir / "stress", dir / "diastole", dir / "systole", {}});
    return vftest::oracle::tree(dir);
  };
  const auto a = run("pipe_det_a", 0);
  const auto b = run("pipe_det_b", 0);
  const auto c = run("pipe_det_c", 1);
  EXPECT_EQ(a.size(), 4u * 9u);
  EXPECT_TRUE(a == b);
  EXPECT_TRUE(a == c);
}

TEST(Pipeline, SingleSortRecoversOrder) {
  std::vector<Contour> cs;
  for (int k = 0; k < 7; ++k) cs.push_back(vftest::ellipse(k, 1.0 + 0.2 * k, 0.8 + 0.15 * k, {4.5, 4.5}, 0.5 * k, 80));
  const std::vector<int> perm{0, 4, 2, 6, 1, 5, 3};
  Geometry shuffled;
  for (std::size_t k = 0; k < perm.size(); ++k) {
    shuffled.contours.push_back(with_z(cs[static_cast<std::size_t>(perm[k])], 0.5 * static_cast<double>(k)));
  }
  auto cfg = small_config();
  cfg.pair.search.catheter.n_points = 0;
  SingleOptions opt;
  opt.sort = true;
  const auto out = run_single(shuffled, cfg, opt);
  for (std::size_t k = 0; k < 7; ++k) EXPECT_EQ(out.geometry->contours[k].id(), static_cast<int>(k));
  EXPECT_TRUE(out.geometry->catheters.empty());

  opt.sort = false;
  const auto kept = run_single(shuffled, cfg, opt);
  for (std::size_t k = 0; k < 7; ++k) EXPECT_EQ(kept.geometry->contours[k].id(), perm[k]);
}

TEST(Pipeline, SingleRecordsSelectPhase) {
  std::vector<Contour> cs;
  for (int id : {94, 18, 212, 37, 47}) cs.push_back(with_z(vftest::circle(id, 1.0 + id * 0.001, {4, 4}, 0, 40), 0.0));
  const Geometry g = vftest::stack(cs);
  SingleOptions opt;
  opt.records = std::vector<Record>{{18, std::nullopt, Phase::Diastole, std::nullopt, std::nullopt},
                                    {37, std::nullopt, Phase::Diastole, std::nullopt, std::nullopt},
                                    {47, std::nullopt, Phase::Systole, std::nullopt, std::nullopt},
                                    {212, std::nullopt, Phase::Diastole, std::nullopt, std::nullopt}};
  const auto cfg = small_config();
  const auto dia = run_single(g, cfg, opt);
  std::vector<int> ids;
  for (const auto& c : dia.geometry->contours) ids.push_back(c.id());
  EXPECT_EQ(ids, (std::vector<int>{18, 37, 212}));
  opt.diastole = false;
  EXPECT_EQ(run_single(g, cfg, opt).geometry->frame_count(), 1u);
}

TEST(Pipeline, SingleExport) {
  const auto dir = vftest::scratch_dir("pipe_single");
  run_single(vftest::pullback_pair(5, 40).dia_geom, small_config(), {}, dir);
  const auto files = vftest::oracle::tree(dir);
  for (const char* name : {"contours.obj", "contours.mtl", "catheter.obj", "catheter.mtl", "walls.obj", "walls.mtl",
                           "logs.csv", "aligned_contours.csv"}) {
    EXPECT_TRUE(files.count(name)) << name;
  }
  std::istringstream csv(files.at("aligned_contours.csv"));
  EXPECT_EQ(parse_contours_csv(csv).size(), 5u * 40u);
}

TEST(Pipeline, StageErrorsNameTheStage) {
  const Geometry one = vftest::stack({vftest::circle(0, 1.0, {}, 0, 30)});
  try {
    run_singlepair(one, one, small_config());
    FAIL() << "expected a stage error";
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "pair alignment");
  }
  auto bad = small_config();
  bad.pair.search.step_rotation_deg = 0.0;
  EXPECT_THROW(run_singlepair(one, one, bad), std::invalid_argument);
  EXPECT_THROW(run_single(one, bad), std::invalid_argument);
}

TEST(Directory, LoadsBothPhases) {
  const auto dir = vftest::scratch_dir("pipe_dir");
  const GeometryPair pair = vftest::pullback_pair(6, 30);
  vftest::write_phase_dir(dir, pair);
  const PhaseInputs in = load_phase_directory(dir);
  ASSERT_EQ(in.dia.frame_count(), 6u);
  ASSERT_EQ(in.sys.frame_count(), 6u);
  EXPECT_EQ(in.dia.label, "Diastole");
  ASSERT_TRUE(in.dia.reference_point);
  EXPECT_TRUE(in.dia.reference_point->aortic);
  EXPECT_NEAR(in.dia.reference_point->x, pair.dia_geom.reference_point->x, 5e-5);
  for (std::size_t k = 0; k < 6; ++k) {
    EXPECT_EQ(in.dia.contours[k].id(), pair.dia_geom.contours[k].id());
    EXPECT_NEAR(get_area(in.sys.contours[k]), get_area(pair.sys_geom.contours[k]), 1e-3);
  }
}

TEST(Directory, RecordFileOrdersFrames) {
  const auto dir = vftest::scratch_dir("pipe_dir_rec");
  vftest::write_phase_dir(dir, vftest::pullback_pair(4, 20));
  write_records_csv(dir / files::kRecords, {{3, std::nullopt, Phase::Diastole, std::nullopt, std::nullopt},
                                            {1, std::nullopt, Phase::Diastole, std::nullopt, std::nullopt},
                                            {2, std::nullopt, Phase::Systole, std::nullopt, std::nullopt}});
  const PhaseInputs in = load_phase_directory(dir);
  ASSERT_EQ(in.dia.frame_count(), 2u);
  EXPECT_EQ(in.dia.contours[0].id(), 3);
  EXPECT_EQ(in.dia.contours[1].id(), 1);
  ASSERT_EQ(in.sys.frame_count(), 1u);
  EXPECT_EQ(in.sys.contours[0].id(), 2);
}

TEST(Directory, MissingInputs) {
  EXPECT_THROW(load_phase_directory("/nonexistent/vesselfuse"), InputError);
  const auto dir = vftest::scratch_dir("pipe_dir_missing");
  write_contours_csv(dir / files::kDiastolicContours, flatten(vftest::pullback_pair(2, 10).dia_geom.contours));
  EXPECT_THROW(load_phase_directory(dir), InputError);
  EXPECT_EQ(load_phase(dir, true).frame_count(), 2u);
  EXPECT_FALSE(load_phase(dir, true).reference_point);
}

}  // namespace
