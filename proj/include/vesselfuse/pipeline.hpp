#pragma once

// Processing modes: reorder -> intra-align -> pair-align -> export.

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vesselfuse/frame_align.hpp"
#include "vesselfuse/geometry.hpp"
#include "vesselfuse/pair_align.hpp"
#include "vesselfuse/reorder.hpp"

namespace vesselfuse {

enum class Mode { Full, DoublePair, SinglePair, Single };

std::string to_string(Mode mode);

/// Wraps a failure with the name of the pipeline stage that raised it.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::exception& cause);
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct PipelineConfig {
  PairConfig pair;
  bool write_obj = true;

  const SearchConfig& search() const { return pair.search; }
};

struct ModeResult {
  Mode mode = Mode::Single;
  std::vector<GeometryPair> pairs;               // full: rest, stress, diastole, systole
  std::vector<std::vector<AlignLog>> logs;       // rest dia, rest sys, stress dia, stress sys
  std::vector<double> pair_rotations_deg;        // one per pair
  std::optional<Geometry> geometry;              // single mode
};

/// Output directories per mode; empty paths skip export.
struct OutputPaths {
  std::filesystem::path rest;
  std::filesystem::path stress;
  std::filesystem::path diastole;
  std::filesystem::path systole;
  std::filesystem::path single;
};

/// Catheter synthesis (when n_points > 0) and default walls (when absent).
Geometry prepare_geometry(const Geometry& geometry, const SearchConfig& cfg);

ModeResult run_full(const Geometry& rest_dia, const Geometry& rest_sys, const Geometry& stress_dia,
                    const Geometry& stress_sys, const PipelineConfig& cfg, const OutputPaths& out = {});

ModeResult run_doublepair(const Geometry& rest_dia, const Geometry& rest_sys, const Geometry& stress_dia,
                          const Geometry& stress_sys, const PipelineConfig& cfg, const OutputPaths& out = {});

ModeResult run_singlepair(const Geometry& dia, const Geometry& sys, const PipelineConfig& cfg,
                          const std::filesystem::path& out = {});

struct SingleOptions {
  std::optional<std::vector<Record>> records;
  bool diastole = true;   // which phase to keep when records are given
  bool sort = false;      // run the Hausdorff reordering
  ReorderConfig reorder;
  int smoothing_window = 3;
};

ModeResult run_single(const Geometry& geometry, const PipelineConfig& cfg, const SingleOptions& options = {},
                      const std::filesystem::path& out = {});

/// Writes pair meshes (when enabled), the two log tables and the summary table.
void export_pair(const GeometryPair& pair, const std::vector<AlignLog>& dia_logs,
                 const std::vector<AlignLog>& sys_logs, const PipelineConfig& cfg, const std::filesystem::path& dir);

// Directory-mode ingestion.

struct PhaseInputs {
  Geometry dia;
  Geometry sys;
};

/// Reads the diastolic/systolic contour and reference files of `dir`; when a
/// record file is present, frames are put in record order per phase.
PhaseInputs load_phase_directory(const std::filesystem::path& dir);

/// Reads one phase from `dir`; the other may be absent.
Geometry load_phase(const std::filesystem::path& dir, bool diastole);

/// Geometry from a flat point list grouped by frame.
Geometry geometry_from_points(std::span<const ContourPoint> contours, std::optional<ContourPoint> reference,
                              std::string label = {});

}  // namespace vesselfuse
