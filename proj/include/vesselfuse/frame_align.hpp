#pragma once

// Intra-pullback alignment: every frame is translated onto the proximal
// centroid and rotated by a coarse-to-fine search minimising a Hausdorff
// objective against its already-aligned predecessor.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "vesselfuse/geometry.hpp"

namespace vesselfuse {

struct SearchConfig {
  double step_rotation_deg = 0.5;   // final angular accuracy
  double range_rotation_deg = 90.0; // search half-range
  int sample_size = 500;            // contour points kept for the search
  bool bruteforce = false;
  CatheterSpec catheter;

  void validate() const;
};

struct AlignLog {
  int id = 0;
  int matched_to = 0;
  double rel_rot_deg = 0.0;
  double total_rot_deg = 0.0;
  double tx = 0.0;
  double ty = 0.0;
  double centroid_x = 0.0;
  double centroid_y = 0.0;

  friend bool operator==(const AlignLog&, const AlignLog&) = default;
};

struct RotationSearchResult {
  double angle_deg = 0.0;
  double objective = 0.0;
  std::size_t evaluations = 0;  // objective calls, including repeats across levels
  int levels = 0;               // refinement levels after the coarse sweep
};

struct IntraAlignResult {
  Geometry geometry;
  std::vector<AlignLog> logs;
};

/// max over a of min over b of the Euclidean distance.
double directed_hausdorff(std::span<const Point2> a, std::span<const Point2> b);

double symmetric_hausdorff(std::span<const Point2> a, std::span<const Point2> b);

/// Mean over a of the nearest-neighbour distance to b.
double mean_directed_distance(std::span<const Point2> a, std::span<const Point2> b);

/// Keeps indices floor(j * m / target); contours with m <= target are returned as-is.
Contour downsample(const Contour& contour, int target);

/// Minimises `objective` over angles in [-range, range]. Bruteforce sweeps the
/// grid k * step; multiscale starts at max(1 deg, step) and refines a
/// +-5 * previous-step window by a factor of 10 until it reaches `step`.
/// Ties prefer smaller |angle|, then the smaller angle.
RotationSearchResult minimize_over_angles(const std::function<double(double)>& objective, double range_deg,
                                          double step_deg, bool bruteforce);

/// Angle rotating `moving` about `pivot` onto `fixed` under the symmetric
/// Hausdorff objective. The pivot defaults to the centroid of `fixed`.
RotationSearchResult find_best_rotation(std::span<const Point2> moving, std::span<const Point2> fixed,
                                        const SearchConfig& cfg);
RotationSearchResult find_best_rotation(std::span<const Point2> moving, std::span<const Point2> fixed,
                                        const SearchConfig& cfg, Point2 pivot);

/// Frames must be ordered proximal-first.
IntraAlignResult align_frames_intra(const Geometry& geometry, const SearchConfig& cfg);

/// Upper bound on objective evaluations for one multiscale search.
std::size_t multiscale_evaluation_bound(double range_deg, double step_deg);

}  // namespace vesselfuse
