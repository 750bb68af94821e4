#pragma once

// Core value types for contour stacks and the per-contour quantification
// operations built on them. Every transformation returns a new value.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace vesselfuse {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Vec3&, const Vec3&) = default;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

/// One 3D sample of a frame. Coordinates are in mm.
struct ContourPoint {
  int frame_index = 0;
  int point_index = 0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  bool aortic = false;

  Vec3 position() const { return {x, y, z}; }
  double distance(const ContourPoint& other) const;

  friend bool operator==(const ContourPoint&, const ContourPoint&) = default;
};

/// Closed ring of points for one frame (implicit edge last -> first).
/// The centroid is computed once at construction; an empty contour has no
/// centroid and `centroid()` throws.
class Contour {
 public:
  Contour() = default;
  Contour(int id, std::vector<ContourPoint> points);

  int id() const { return id_; }
  const std::vector<ContourPoint>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  Vec3 centroid() const;

  friend bool operator==(const Contour&, const Contour&) = default;

 private:
  int id_ = 0;
  std::vector<ContourPoint> points_;
  std::optional<Vec3> centroid_;
};

/// One pullback phase. Catheter and wall layers, when non-empty, are
/// index-parallel to `contours`.
struct Geometry {
  std::vector<Contour> contours;
  std::vector<Contour> catheters;
  std::vector<Contour> walls;
  std::optional<ContourPoint> reference_point;
  std::string label;

  bool empty() const { return contours.empty(); }
  std::size_t frame_count() const { return contours.size(); }

  friend bool operator==(const Geometry&, const Geometry&) = default;
};

struct GeometryPair {
  Geometry dia_geom;
  Geometry sys_geom;

  friend bool operator==(const GeometryPair&, const GeometryPair&) = default;
};

struct LumenSummary {
  double mla = 0.0;           // mm^2
  double max_stenosis = 0.0;  // fraction in [0, 1)
  double stenosis_length = 0.0;  // mm
};

struct SummaryRow {
  int contour_id = 0;
  double area_dia = 0.0;
  double ellip_dia = 0.0;
  double area_sys = 0.0;
  double ellip_sys = 0.0;
  double z = 0.0;
};

struct PairSummary {
  LumenSummary dia;
  LumenSummary sys;
  std::vector<SummaryRow> rows;
};

using PointPair = std::pair<ContourPoint, ContourPoint>;

struct PointPairDistance {
  PointPair points;
  double distance = 0.0;
};

// Contour construction / quantification.

Vec3 compute_centroid(std::span<const ContourPoint> points);
inline Vec3 compute_centroid(const Contour& contour) {
  return compute_centroid(contour.points());
}

/// Absolute shoelace area over (x, y).
double get_area(const Contour& contour);

/// Pair maximising Euclidean distance; ties go to the lexicographically
/// smallest (point_index, point_index).
PointPairDistance find_farthest_points(const Contour& contour);

/// Minimal-distance pair among index-opposite points (i, i + m/2) of the
/// sorted contour. Odd counts drop the last sorted point.
PointPairDistance find_closest_opposite(const Contour& contour);

double get_elliptic_ratio(const Contour& contour);

/// Highest-y point becomes index 0 (ties: smaller x, then smaller original
/// point_index); the rest follow counterclockwise about the centroid.
Contour sort_contour_points(const Contour& contour);

Contour rotate_contour(const Contour& contour, double angle_deg);
Contour rotate_contour_about(const Contour& contour, double angle_deg, Point2 pivot);
Contour translate_contour(const Contour& contour, Vec3 offset);

/// Reassign the z-coordinate of every point.
Contour with_z(const Contour& contour, double z);

std::vector<Point2> project_xy(std::span<const ContourPoint> points);

// Geometry-level operations.

Geometry rotate_geometry(const Geometry& geometry, double angle_deg);
Geometry translate_geometry(const Geometry& geometry, Vec3 offset);

/// Circular moving average of each contour point over `window` neighbours.
Geometry smooth_contours(const Geometry& geometry, int window = 3);

LumenSummary get_summary(const Geometry& geometry);
PairSummary get_pair_summary(const GeometryPair& pair);

struct CatheterSpec {
  Point2 image_center{4.5, 4.5};
  double radius = 0.5;
  int n_points = 20;
};

Geometry create_catheter_geometry(const Geometry& geometry, const CatheterSpec& spec = {});

/// Wall contours at a fixed radial offset outward from each contour centroid.
Geometry create_default_walls(const Geometry& geometry, double offset_mm = 1.0);

/// Group points into contours by frame_index in order of first appearance.
/// point_index is reassigned by order within each frame.
std::vector<Contour> group_by_frame(std::span<const ContourPoint> points);

/// Index of the contour whose id equals `frame_index`, if any.
std::optional<std::size_t> find_frame(const std::vector<Contour>& contours, int frame_index);

}  // namespace vesselfuse
