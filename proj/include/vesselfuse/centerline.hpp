#pragma once

// CCTA centerline representation and placement of an aligned contour stack
// onto it (three-point anatomical registration or manual roll).

#include <span>
#include <string>
#include <vector>

#include "vesselfuse/geometry.hpp"

namespace vesselfuse {

struct CenterlinePoint {
  ContourPoint contour_point;
  Vec3 normal;  // unit tangent towards the next point

  friend bool operator==(const CenterlinePoint&, const CenterlinePoint&) = default;
};

struct Centerline {
  std::vector<CenterlinePoint> points;

  std::size_t size() const { return points.size(); }
  Vec3 position(std::size_t k) const { return points[k].contour_point.position(); }

  friend bool operator==(const Centerline&, const Centerline&) = default;
};

struct CenterlineAlignment {
  GeometryPair pair;
  Centerline centerline;  // trimmed at the ostium and resampled
  double roll_deg = 0.0;
  std::vector<std::string> warnings;
};

/// Normals are forward differences; the last point copies its predecessor.
Centerline centerline_from_points(std::span<const Vec3> points);

double centerline_length(const Centerline& cl);

/// Points at arc-length multiples of `spacing` from the first point.
Centerline resample_centerline(const Centerline& cl, double spacing);

/// Index of the centerline point nearest to `target`.
std::size_t nearest_point_index(const Centerline& cl, Vec3 target);

/// Minimal rotation taking (0, 0, 1) onto `tangent`, applied to `v`.
Vec3 tilt_to_tangent(Vec3 v, Vec3 tangent);

CenterlineAlignment align_three_point(const Centerline& cl, const GeometryPair& pair, Vec3 aortic_ref, Vec3 upper_ref,
                                      Vec3 lower_ref, double angle_step_deg = 1.0);

CenterlineAlignment align_manual(const Centerline& cl, const GeometryPair& pair, double rotation_angle_deg,
                                 Vec3 start_point);

}  // namespace vesselfuse
