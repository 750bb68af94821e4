#pragma once

// Inter-pullback registration of two intra-aligned geometries and linear
// phase interpolation between them.

#include <vector>

#include "vesselfuse/frame_align.hpp"
#include "vesselfuse/geometry.hpp"

namespace vesselfuse {

struct PairConfig {
  SearchConfig search;
  int interpolation_steps = 28;

  void validate() const;
};

struct PairResult {
  GeometryPair pair;
  std::vector<AlignLog> dia_logs;
  std::vector<AlignLog> sys_logs;
  double pair_rotation_deg = 0.0;  // applied to the moving (sys) geometry
};

/// Translates `b` so its anchor centroid meets `a`'s and reassigns both z
/// stacks to a common mean slice spacing starting at 0 on the anchor frame.
/// The anchor is the frame with minimal z. Frame counts are truncated to the
/// shorter stack by dropping trailing (distal) frames.
std::pair<Geometry, Geometry> harmonize_pair(const Geometry& a, const Geometry& b);

/// Single rotation of every frame of `b` about the anchor centroid of `a`
/// minimising the ellipticity-weighted mean directed distance b -> a.
RotationSearchResult find_pair_rotation(const Geometry& a, const Geometry& b, const SearchConfig& cfg);

/// Harmonize two intra-aligned geometries and rotate `b` onto `a`.
PairResult register_pair(const Geometry& a, const Geometry& b, const SearchConfig& cfg);

/// Intra-align both inputs concurrently, then `register_pair`.
PairResult build_pair(const Geometry& dia, const Geometry& sys, const PairConfig& cfg);

/// `steps` intermediate geometries with alpha = t / (steps + 1), t = 1..steps.
std::vector<Geometry> interpolate_pair(const GeometryPair& pair, int steps);

/// Rotates every layer and the reference point of `g` about a fixed pivot.
Geometry rotate_geometry_about(const Geometry& g, double angle_deg, Point2 pivot);

/// Mean absolute z step between consecutive contours.
double mean_slice_spacing(const Geometry& g);

}  // namespace vesselfuse
