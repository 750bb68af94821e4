#include "vesselfuse/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace vesselfuse {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

// Lumen stenosis thresholds relative to the biggest area.
constexpr double kEllipticRatioLimit = 1.3;
constexpr double kRoundThreshold = 0.70;
constexpr double kDefaultThreshold = 0.50;

double dist(const ContourPoint& a, const ContourPoint& b) {
  return std::hypot(a.x - b.x, a.y - b.y, a.z - b.z);
}

ContourPoint rotated(ContourPoint p, double c, double s, Point2 pivot) {
  if (c == 1.0 && s == 0.0) return p;
  const double dx = p.x - pivot.x;
  const double dy = p.y - pivot.y;
  p.x = pivot.x + c * dx - s * dy;
  p.y = pivot.y + s * dx + c * dy;
  return p;
}

Contour rotate_about(const Contour& contour, double c, double s, Point2 pivot) {
  if (c == 1.0 && s == 0.0) return contour;
  std::vector<ContourPoint> pts;
  pts.reserve(contour.size());
  for (const auto& p : contour.points()) pts.push_back(rotated(p, c, s, pivot));
  return Contour(contour.id(), std::move(pts));
}

// Frames are planar; the first point carries the frame z exactly.
double frame_z(const Contour& c) { return c.points().front().z; }

void require_parallel_layer(const std::vector<Contour>& layer, const Geometry& g) {
  if (!layer.empty() && layer.size() != g.contours.size()) {
    throw std::invalid_argument("layer is not index-parallel to contours");
  }
}

}  // namespace

double ContourPoint::distance(const ContourPoint& other) const { return dist(*this, other); }

Contour::Contour(int id, std::vector<ContourPoint> points) : id_(id), points_(std::move(points)) {
  if (!points_.empty()) centroid_ = compute_centroid(points_);
}

Vec3 Contour::centroid() const {
  if (!centroid_) throw std::invalid_argument("empty contour");
  return *centroid_;
}

Vec3 compute_centroid(std::span<const ContourPoint> points) {
  if (points.empty()) throw std::invalid_argument("empty contour");
  Vec3 sum;
  for (const auto& p : points) {
    sum.x += p.x;
    sum.y += p.y;
    sum.z += p.z;
  }
  const double n = static_cast<double>(points.size());
  return {sum.x / n, sum.y / n, sum.z / n};
}

double get_area(const Contour& contour) {
  const auto& pts = contour.points();
  if (pts.size() < 3) throw std::invalid_argument("area requires at least 3 points");
  double twice = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& a = pts[i];
    const auto& b = pts[(i + 1) % pts.size()];
    twice += a.x * b.y - b.x * a.y;
  }
  return std::abs(twice) * 0.5;
}

PointPairDistance find_farthest_points(const Contour& contour) {
  const auto& pts = contour.points();
  if (pts.size() < 2) throw std::invalid_argument("farthest points require at least 2 points");

  auto key = [&](std::size_t i, std::size_t j) {
    int a = pts[i].point_index;
    int b = pts[j].point_index;
    return std::minmax(a, b);
  };

  std::size_t bi = 0;
  std::size_t bj = 1;
  double best = dist(pts[0], pts[1]);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double d = dist(pts[i], pts[j]);
      if (d > best || (d == best && key(i, j) < key(bi, bj))) {
        best = d;
        bi = i;
        bj = j;
      }
    }
  }
  if (pts[bi].point_index > pts[bj].point_index) std::swap(bi, bj);
  return {{pts[bi], pts[bj]}, best};
}

PointPairDistance find_closest_opposite(const Contour& contour) {
  if (contour.size() < 4) throw std::invalid_argument("closest opposite requires at least 4 points");
  const Contour sorted = sort_contour_points(contour);
  const auto& pts = sorted.points();
  const std::size_t m = pts.size() - pts.size() % 2;
  const std::size_t half = m / 2;

  std::size_t best_i = 0;
  double best = dist(pts[0], pts[half]);
  for (std::size_t i = 1; i < m; ++i) {
    const double d = dist(pts[i], pts[(i + half) % m]);
    if (d < best) {
      best = d;
      best_i = i;
    }
  }
  return {{pts[best_i], pts[(best_i + half) % m]}, best};
}

double get_elliptic_ratio(const Contour& contour) {
  const double farthest = find_farthest_points(contour).distance;
  const double opposite = find_closest_opposite(contour).distance;
  if (!(opposite > 0.0)) throw std::invalid_argument("degenerate contour");
  return farthest / opposite;
}

Contour sort_contour_points(const Contour& contour) {
  const auto& pts = contour.points();
  if (pts.size() < 3) throw std::invalid_argument("sorting requires at least 3 points");

  const Vec3 c = contour.centroid();
  const auto top = std::min_element(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    if (a.y != b.y) return a.y > b.y;
    if (a.x != b.x) return a.x < b.x;
    return a.point_index < b.point_index;
  });
  const std::size_t top_idx = static_cast<std::size_t>(top - pts.begin());
  const double start = std::atan2(top->y - c.y, top->x - c.x);

  struct Key {
    double angle;
    double radius;
    std::size_t idx;
  };
  std::vector<Key> keys;
  keys.reserve(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i == top_idx) continue;
    double a = std::atan2(pts[i].y - c.y, pts[i].x - c.x) - start;
    while (a < 0.0) a += 2.0 * std::numbers::pi;
    while (a >= 2.0 * std::numbers::pi) a -= 2.0 * std::numbers::pi;
    keys.push_back({a, std::hypot(pts[i].x - c.x, pts[i].y - c.y), i});
  }
  std::sort(keys.begin(), keys.end(), [&](const Key& a, const Key& b) {
    if (a.angle != b.angle) return a.angle < b.angle;
    if (a.radius != b.radius) return a.radius < b.radius;
    return pts[a.idx].point_index < pts[b.idx].point_index;
  });

  std::vector<ContourPoint> out;
  out.reserve(pts.size());
  out.push_back(pts[top_idx]);
  for (const auto& k : keys) out.push_back(pts[k.idx]);
  for (std::size_t i = 0; i < out.size(); ++i) out[i].point_index = static_cast<int>(i);
  return Contour(contour.id(), std::move(out));
}

Contour rotate_contour(const Contour& contour, double angle_deg) {
  if (contour.empty()) return contour;
  const Vec3 c = contour.centroid();
  return rotate_contour_about(contour, angle_deg, {c.x, c.y});
}

Contour rotate_contour_about(const Contour& contour, double angle_deg, Point2 pivot) {
  const double rad = angle_deg * kDegToRad;
  return rotate_about(contour, std::cos(rad), std::sin(rad), pivot);
}

Contour translate_contour(const Contour& contour, Vec3 offset) {
  std::vector<ContourPoint> pts = contour.points();
  for (auto& p : pts) {
    p.x += offset.x;
    p.y += offset.y;
    p.z += offset.z;
  }
  return Contour(contour.id(), std::move(pts));
}

Contour with_z(const Contour& contour, double z) {
  std::vector<ContourPoint> pts = contour.points();
  for (auto& p : pts) p.z = z;
  return Contour(contour.id(), std::move(pts));
}

std::vector<Point2> project_xy(std::span<const ContourPoint> points) {
  std::vector<Point2> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back({p.x, p.y});
  return out;
}

Geometry rotate_geometry(const Geometry& geometry, double angle_deg) {
  if (geometry.empty()) throw std::invalid_argument("empty geometry");
  require_parallel_layer(geometry.catheters, geometry);
  require_parallel_layer(geometry.walls, geometry);

  const double rad = angle_deg * kDegToRad;
  const double c = std::cos(rad);
  const double s = std::sin(rad);

  Geometry out = geometry;
  for (std::size_t i = 0; i < geometry.contours.size(); ++i) {
    const Vec3 cen = geometry.contours[i].centroid();
    const Point2 pivot{cen.x, cen.y};
    out.contours[i] = rotate_about(geometry.contours[i], c, s, pivot);
    if (!out.catheters.empty()) out.catheters[i] = rotate_about(geometry.catheters[i], c, s, pivot);
    if (!out.walls.empty()) out.walls[i] = rotate_about(geometry.walls[i], c, s, pivot);
  }
  if (geometry.reference_point) {
    if (auto idx = find_frame(geometry.contours, geometry.reference_point->frame_index)) {
      const Vec3 cen = geometry.contours[*idx].centroid();
      out.reference_point = rotated(*geometry.reference_point, c, s, {cen.x, cen.y});
    }
  }
  return out;
}

Geometry translate_geometry(const Geometry& geometry, Vec3 offset) {
  Geometry out = geometry;
  for (auto* layer : {&out.contours, &out.catheters, &out.walls}) {
    for (auto& contour : *layer) contour = translate_contour(contour, offset);
  }
  if (out.reference_point) {
    out.reference_point->x += offset.x;
    out.reference_point->y += offset.y;
    out.reference_point->z += offset.z;
  }
  return out;
}

Geometry smooth_contours(const Geometry& geometry, int window) {
  if (window < 1 || window % 2 == 0) throw std::invalid_argument("smoothing window must be odd and >= 1");
  const int half = window / 2;

  Geometry out = geometry;
  for (auto& contour : out.contours) {
    const auto& pts = contour.points();
    const int m = static_cast<int>(pts.size());
    if (m == 0) continue;
    std::vector<ContourPoint> smoothed = pts;
    for (int j = 0; j < m; ++j) {
      double sx = 0.0;
      double sy = 0.0;
      double sz = 0.0;
      for (int k = -half; k <= half; ++k) {
        const auto& q = pts[static_cast<std::size_t>(((j + k) % m + m) % m)];
        sx += q.x;
        sy += q.y;
        sz += q.z;
      }
      smoothed[j].x = sx / window;
      smoothed[j].y = sy / window;
      smoothed[j].z = sz / window;
    }
    contour = Contour(contour.id(), std::move(smoothed));
  }
  return out;
}

LumenSummary get_summary(const Geometry& geometry) {
  if (geometry.empty()) throw std::invalid_argument("empty geometry");

  const auto& contours = geometry.contours;
  std::vector<double> areas;
  areas.reserve(contours.size());
  bool all_round = true;
  for (const auto& c : contours) {
    areas.push_back(get_area(c));
    if (!(get_elliptic_ratio(c) < kEllipticRatioLimit)) all_round = false;
  }

  const double mla = *std::min_element(areas.begin(), areas.end());
  const double biggest = *std::max_element(areas.begin(), areas.end());
  const double threshold = (all_round ? kRoundThreshold : kDefaultThreshold) * biggest;

  double longest = 0.0;
  std::size_t i = 0;
  while (i < areas.size()) {
    if (!(areas[i] < threshold)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    double zmin = frame_z(contours[i]);
    double zmax = zmin;
    while (j < areas.size() && areas[j] < threshold) {
      const double z = frame_z(contours[j]);
      zmin = std::min(zmin, z);
      zmax = std::max(zmax, z);
      ++j;
    }
    longest = std::max(longest, zmax - zmin);
    i = j;
  }

  return {mla, 1.0 - mla / biggest, longest};
}

PairSummary get_pair_summary(const GeometryPair& pair) {
  const auto& dia = pair.dia_geom.contours;
  const auto& sys = pair.sys_geom.contours;
  if (dia.empty() || sys.empty()) throw std::invalid_argument("empty geometry in pair");
  if (dia.size() != sys.size()) throw std::invalid_argument("pair frame counts differ");

  PairSummary out;
  out.dia = get_summary(pair.dia_geom);
  out.sys = get_summary(pair.sys_geom);
  out.rows.reserve(dia.size());
  for (std::size_t i = 0; i < dia.size(); ++i) {
    out.rows.push_back({dia[i].id(), get_area(dia[i]), get_elliptic_ratio(dia[i]), get_area(sys[i]),
                        get_elliptic_ratio(sys[i]), frame_z(dia[i])});
  }
  return out;
}

Geometry create_catheter_geometry(const Geometry& geometry, const CatheterSpec& spec) {
  if (!(spec.radius > 0.0)) throw std::invalid_argument("catheter radius must be positive");
  if (spec.n_points < 0) throw std::invalid_argument("catheter point count must be non-negative");

  Geometry out = geometry;
  out.catheters.clear();
  if (spec.n_points == 0) return out;

  out.catheters.reserve(geometry.contours.size());
  for (const auto& contour : geometry.contours) {
    const double z = contour.centroid().z;
    std::vector<ContourPoint> pts;
    pts.reserve(static_cast<std::size_t>(spec.n_points));
    for (int k = 0; k < spec.n_points; ++k) {
      const double a = 2.0 * std::numbers::pi * k / spec.n_points;
      pts.push_back({contour.id(), k, spec.image_center.x + spec.radius * std::cos(a),
                     spec.image_center.y + spec.radius * std::sin(a), z, false});
    }
    out.catheters.emplace_back(contour.id(), std::move(pts));
  }
  return out;
}

Geometry create_default_walls(const Geometry& geometry, double offset_mm) {
  if (geometry.empty()) throw std::invalid_argument("empty geometry");
  Geometry out = geometry;
  out.walls.clear();
  out.walls.reserve(geometry.contours.size());
  for (const auto& contour : geometry.contours) {
    const Vec3 c = contour.centroid();
    std::vector<ContourPoint> pts = contour.points();
    for (auto& p : pts) {
      const double dx = p.x - c.x;
      const double dy = p.y - c.y;
      const double r = std::hypot(dx, dy);
      if (!(r > 0.0)) throw std::invalid_argument("contour point coincides with centroid");
      p.x += offset_mm * dx / r;
      p.y += offset_mm * dy / r;
    }
    out.walls.emplace_back(contour.id(), std::move(pts));
  }
  return out;
}

std::vector<Contour> group_by_frame(std::span<const ContourPoint> points) {
  std::vector<int> order;
  std::unordered_map<int, std::vector<ContourPoint>> groups;
  for (const auto& p : points) {
    auto [it, inserted] = groups.try_emplace(p.frame_index);
    if (inserted) order.push_back(p.frame_index);
    ContourPoint q = p;
    q.point_index = static_cast<int>(it->second.size());
    it->second.push_back(q);
  }
  std::vector<Contour> out;
  out.reserve(order.size());
  for (int id : order) out.emplace_back(id, std::move(groups[id]));
  return out;
}

std::optional<std::size_t> find_frame(const std::vector<Contour>& contours, int frame_index) {
  for (std::size_t i = 0; i < contours.size(); ++i) {
    if (contours[i].id() == frame_index) return i;
  }
  return std::nullopt;
}

}  // namespace vesselfuse
