#include "vesselfuse/centerline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "vesselfuse/pair_align.hpp"
#include "vesselfuse/parallel.hpp"

namespace vesselfuse {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kParallelEps = 1e-12;
constexpr double kStationEps = 1e-9;
constexpr double kEllipticLandmarkRatio = 1.3;

Vec3 sub(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
Vec3 add(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
Vec3 scale(Vec3 a, double s) { return {a.x * s, a.y * s, a.z * s}; }
double norm(Vec3 a) { return std::hypot(a.x, a.y, a.z); }
double dist_sq(Vec3 a, Vec3 b) {
  const Vec3 d = sub(a, b);
  return d.x * d.x + d.y * d.y + d.z * d.z;
}

Vec3 roll_xy(Vec3 v, double c, double s) { return {c * v.x - s * v.y, s * v.x + c * v.y, v.z}; }

// Rigid placement of one frame: centroid -> station, plane normal -> tangent,
// after an in-plane roll.
struct FramePose {
  Vec3 centroid;
  Vec3 station;
  Vec3 tangent;
  double cos_roll;
  double sin_roll;

  Vec3 apply(Vec3 p) const {
    return add(station, tilt_to_tangent(roll_xy(sub(p, centroid), cos_roll, sin_roll), tangent));
  }
};

ContourPoint place_point(ContourPoint p, const FramePose& pose) {
  const Vec3 q = pose.apply(p.position());
  p.x = q.x;
  p.y = q.y;
  p.z = q.z;
  return p;
}

Contour place_contour(const Contour& c, const FramePose& pose) {
  std::vector<ContourPoint> pts;
  pts.reserve(c.size());
  for (const auto& p : c.points()) pts.push_back(place_point(p, pose));
  return Contour(c.id(), std::move(pts));
}

FramePose pose_for(const Geometry& g, std::size_t k, const Centerline& cl, double roll_deg) {
  const double rad = roll_deg * kDegToRad;
  return {g.contours[k].centroid(), cl.position(k), cl.points[k].normal, std::cos(rad), std::sin(rad)};
}

Geometry place_geometry(const Geometry& g, const Centerline& cl, double roll_deg) {
  Geometry out = g;
  std::vector<FramePose> poses(g.frame_count());
  parallel_for(g.frame_count(), [&](std::size_t k) {
    poses[k] = pose_for(g, k, cl, roll_deg);
    out.contours[k] = place_contour(g.contours[k], poses[k]);
    if (!g.catheters.empty()) out.catheters[k] = place_contour(g.catheters[k], poses[k]);
    if (!g.walls.empty()) out.walls[k] = place_contour(g.walls[k], poses[k]);
  });
  if (g.reference_point && !poses.empty()) {
    const auto idx = find_frame(g.contours, g.reference_point->frame_index).value_or(0);
    out.reference_point = place_point(*g.reference_point, poses[idx]);
  }
  return out;
}

// Trim everything before the ostium and resample to the stack's slice spacing.
Centerline prepare_centerline(const Centerline& cl, const GeometryPair& pair, std::size_t ostium) {
  if (pair.dia_geom.empty()) throw std::invalid_argument("empty geometry");
  const std::vector<CenterlinePoint> rest(cl.points.begin() + static_cast<std::ptrdiff_t>(ostium), cl.points.end());
  if (rest.size() < 2) throw std::invalid_argument("centerline too short");
  std::vector<Vec3> pts;
  pts.reserve(rest.size());
  for (const auto& p : rest) pts.push_back(p.contour_point.position());

  const Centerline resampled = resample_centerline(centerline_from_points(pts), mean_slice_spacing(pair.dia_geom));
  const std::size_t frames = std::max(pair.dia_geom.frame_count(), pair.sys_geom.frame_count());
  if (resampled.size() < frames) throw std::invalid_argument("centerline too short");
  return resampled;
}

CenterlineAlignment place_pair(const Centerline& resampled, const GeometryPair& pair, double roll_deg) {
  CenterlineAlignment out;
  out.roll_deg = roll_deg;
  out.centerline = resampled;
  parallel_invoke([&] { out.pair.dia_geom = place_geometry(pair.dia_geom, resampled, roll_deg); },
                  [&] { out.pair.sys_geom = place_geometry(pair.sys_geom, resampled, roll_deg); });
  return out;
}

}  // namespace

Centerline centerline_from_points(std::span<const Vec3> points) {
  if (points.size() < 2) throw std::invalid_argument("centerline requires at least 2 points");
  Centerline cl;
  cl.points.reserve(points.size());
  for (std::size_t k = 0; k < points.size(); ++k) {
    CenterlinePoint cp;
    cp.contour_point = {static_cast<int>(k), 0, points[k].x, points[k].y, points[k].z, false};
    if (k + 1 < points.size()) {
      const Vec3 d = sub(points[k + 1], points[k]);
      const double len = norm(d);
      if (!(len > 0.0)) throw std::invalid_argument("duplicate consecutive centerline points");
      cp.normal = scale(d, 1.0 / len);
    } else {
      cp.normal = cl.points.back().normal;
    }
    cl.points.push_back(cp);
  }
  return cl;
}

double centerline_length(const Centerline& cl) {
  double total = 0.0;
  for (std::size_t k = 1; k < cl.size(); ++k) total += norm(sub(cl.position(k), cl.position(k - 1)));
  return total;
}

Centerline resample_centerline(const Centerline& cl, double spacing) {
  if (!(spacing > 0.0)) throw std::invalid_argument("spacing must be positive");
  if (cl.size() < 2) throw std::invalid_argument("centerline requires at least 2 points");

  std::vector<double> cumulative(cl.size(), 0.0);
  for (std::size_t k = 1; k < cl.size(); ++k) {
    cumulative[k] = cumulative[k - 1] + norm(sub(cl.position(k), cl.position(k - 1)));
  }
  const double length = cumulative.back();
  const auto stations = static_cast<std::size_t>(std::floor(length / spacing + kStationEps));

  std::vector<Vec3> pts;
  pts.reserve(stations + 2);
  std::size_t seg = 0;
  for (std::size_t k = 0; k <= stations; ++k) {
    const double s = std::min(static_cast<double>(k) * spacing, length);
    while (seg + 2 < cl.size() && cumulative[seg + 1] < s) ++seg;
    const double seg_len = cumulative[seg + 1] - cumulative[seg];
    const double t = seg_len > 0.0 ? std::clamp((s - cumulative[seg]) / seg_len, 0.0, 1.0) : 0.0;
    const Vec3 a = cl.position(seg);
    const Vec3 b = cl.position(seg + 1);
    pts.push_back(add(a, scale(sub(b, a), t)));
  }
  if (pts.size() < 2) pts.push_back(cl.position(cl.size() - 1));
  return centerline_from_points(pts);
}

std::size_t nearest_point_index(const Centerline& cl, Vec3 target) {
  if (cl.points.empty()) throw std::invalid_argument("empty centerline");
  std::size_t best = 0;
  double best_d = dist_sq(cl.position(0), target);
  for (std::size_t k = 1; k < cl.size(); ++k) {
    const double d = dist_sq(cl.position(k), target);
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return best;
}

Vec3 tilt_to_tangent(Vec3 v, Vec3 tangent) {
  // axis = (0,0,1) x t, rotated by acos(t.z) via Rodrigues.
  const Vec3 axis{-tangent.y, tangent.x, 0.0};
  const double s = norm(axis);
  const double c = tangent.z;
  if (s < kParallelEps) {
    if (c > 0.0) return v;
    return {v.x, -v.y, -v.z};  // half turn about x
  }
  const double k = (1.0 - c) / (s * s);
  // v + axis x v + k * axis x (axis x v)
  const Vec3 cross1{axis.y * v.z - axis.z * v.y, axis.z * v.x - axis.x * v.z, axis.x * v.y - axis.y * v.x};
  const Vec3 cross2{axis.y * cross1.z - axis.z * cross1.y, axis.z * cross1.x - axis.x * cross1.z,
                    axis.x * cross1.y - axis.y * cross1.x};
  return add(v, add(cross1, scale(cross2, k)));
}

CenterlineAlignment align_three_point(const Centerline& cl, const GeometryPair& pair, Vec3 aortic_ref, Vec3 upper_ref,
                                      Vec3 lower_ref, double angle_step_deg) {
  if (!(angle_step_deg > 0.0)) throw std::invalid_argument("angle step must be positive");
  const Geometry& dia = pair.dia_geom;
  if (!dia.reference_point) throw std::invalid_argument("three-point alignment requires a reference point");

  const Centerline resampled = prepare_centerline(cl, pair, nearest_point_index(cl, aortic_ref));

  const std::size_t ref_frame = find_frame(dia.contours, dia.reference_point->frame_index).value_or(0);
  const Contour& ref_contour = dia.contours[ref_frame];
  const PointPairDistance axis = find_farthest_points(ref_contour);
  const Vec3 ref_point = dia.reference_point->position();

  std::vector<double> rolls;
  for (long k = 0;; ++k) {
    const double roll = static_cast<double>(k) * angle_step_deg;
    if (roll >= 360.0) break;
    rolls.push_back(roll);
  }
  std::vector<double> costs(rolls.size());
  parallel_for(rolls.size(), [&](std::size_t i) {
    const FramePose pose = pose_for(dia, ref_frame, resampled, rolls[i]);
    const Vec3 e1 = pose.apply(axis.points.first.position());
    const Vec3 e2 = pose.apply(axis.points.second.position());
    const double assign_a = dist_sq(e1, upper_ref) + dist_sq(e2, lower_ref);
    const double assign_b = dist_sq(e1, lower_ref) + dist_sq(e2, upper_ref);
    costs[i] = dist_sq(pose.apply(ref_point), aortic_ref) + std::min(assign_a, assign_b);
  });
  const auto best = static_cast<std::size_t>(std::min_element(costs.begin(), costs.end()) - costs.begin());

  CenterlineAlignment out = place_pair(resampled, pair, rolls[best]);
  if (get_elliptic_ratio(ref_contour) < kEllipticLandmarkRatio) {
    out.warnings.push_back("reference contour is nearly round; three-point roll may be ambiguous");
  }
  return out;
}

CenterlineAlignment align_manual(const Centerline& cl, const GeometryPair& pair, double rotation_angle_deg,
                                 Vec3 start_point) {
  const Centerline resampled = prepare_centerline(cl, pair, nearest_point_index(cl, start_point));
  return place_pair(resampled, pair, rotation_angle_deg);
}

}  // namespace vesselfuse
