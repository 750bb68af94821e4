#include "vesselfuse/pair_align.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "vesselfuse/parallel.hpp"

namespace vesselfuse {

namespace {

Geometry truncate(const Geometry& g, std::size_t n) {
  Geometry out = g;
  out.contours.resize(std::min(n, out.contours.size()));
  if (!out.catheters.empty()) out.catheters.resize(n);
  if (!out.walls.empty()) out.walls.resize(n);
  return out;
}

std::size_t anchor_index(const Geometry& g) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < g.contours.size(); ++k) {
    if (g.contours[k].centroid().z < g.contours[best].centroid().z) best = k;
  }
  return best;
}

Geometry restack(const Geometry& g, std::size_t anchor, double spacing) {
  Geometry out = g;
  auto station = [&](std::size_t k) {
    const auto d = static_cast<double>(k > anchor ? k - anchor : anchor - k);
    return d * spacing;
  };
  for (std::size_t k = 0; k < out.contours.size(); ++k) {
    const double z = station(k);
    out.contours[k] = with_z(out.contours[k], z);
    if (!out.catheters.empty()) out.catheters[k] = with_z(out.catheters[k], z);
    if (!out.walls.empty()) out.walls[k] = with_z(out.walls[k], z);
  }
  if (out.reference_point) {
    if (auto idx = find_frame(out.contours, out.reference_point->frame_index)) {
      out.reference_point->z = station(*idx);
    }
  }
  return out;
}

ContourPoint lerp(const ContourPoint& a, const ContourPoint& b, double alpha) {
  ContourPoint p = a;
  p.x = (1.0 - alpha) * a.x + alpha * b.x;
  p.y = (1.0 - alpha) * a.y + alpha * b.y;
  p.z = (1.0 - alpha) * a.z + alpha * b.z;
  return p;
}

std::vector<Contour> lerp_layer(const std::vector<Contour>& a, const std::vector<Contour>& b, double alpha) {
  std::vector<Contour> out;
  out.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::vector<ContourPoint> pts;
    pts.reserve(a[i].size());
    for (std::size_t j = 0; j < a[i].size(); ++j) pts.push_back(lerp(a[i].points()[j], b[i].points()[j], alpha));
    out.emplace_back(a[i].id(), std::move(pts));
  }
  return out;
}

void require_matching_layer(const std::vector<Contour>& a, const std::vector<Contour>& b, const char* name) {
  if (a.size() != b.size()) throw std::invalid_argument(std::string("frame counts differ in layer ") + name);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != b[i].size()) {
      throw std::invalid_argument(std::string("point counts differ in layer ") + name);
    }
  }
}

}  // namespace

void PairConfig::validate() const {
  search.validate();
  if (interpolation_steps < 0) throw std::invalid_argument("interpolation_steps must be non-negative");
}

double mean_slice_spacing(const Geometry& g) {
  if (g.contours.size() < 2) throw std::invalid_argument("slice spacing undefined for fewer than 2 frames");
  double sum = 0.0;
  for (std::size_t k = 1; k < g.contours.size(); ++k) {
    sum += std::abs(g.contours[k].centroid().z - g.contours[k - 1].centroid().z);
  }
  return sum / static_cast<double>(g.contours.size() - 1);
}

std::pair<Geometry, Geometry> harmonize_pair(const Geometry& a, const Geometry& b) {
  const std::size_t n = std::min(a.frame_count(), b.frame_count());
  if (n < 2) throw std::invalid_argument("slice spacing undefined for fewer than 2 frames");

  const Geometry ta = truncate(a, n);
  const Geometry tb = truncate(b, n);
  const double spacing = 0.5 * (mean_slice_spacing(ta) + mean_slice_spacing(tb));

  const std::size_t anchor_a = anchor_index(ta);
  const std::size_t anchor_b = anchor_index(tb);
  const Vec3 ca = ta.contours[anchor_a].centroid();
  const Vec3 cb = tb.contours[anchor_b].centroid();
  const Geometry moved = translate_geometry(tb, {ca.x - cb.x, ca.y - cb.y, 0.0});

  return {restack(ta, anchor_a, spacing), restack(moved, anchor_b, spacing)};
}

RotationSearchResult find_pair_rotation(const Geometry& a, const Geometry& b, const SearchConfig& cfg) {
  cfg.validate();
  if (a.empty() || b.empty()) throw std::invalid_argument("empty geometry");
  if (a.frame_count() != b.frame_count()) throw std::invalid_argument("pair frame counts differ");

  const std::size_t n = a.frame_count();
  const Vec3 anchor = a.contours[anchor_index(a)].centroid();
  const Point2 pivot{anchor.x, anchor.y};

  std::vector<std::vector<Point2>> fixed(n);
  std::vector<Contour> moving(n);
  std::vector<double> weights(n);
  double weight_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    fixed[i] = project_xy(downsample(a.contours[i], cfg.sample_size).points());
    moving[i] = downsample(b.contours[i], cfg.sample_size);
    weights[i] = get_elliptic_ratio(a.contours[i]);
    weight_sum += weights[i];
  }

  auto objective = [&](double angle) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto rotated = project_xy(rotate_contour_about(moving[i], angle, pivot).points());
      total += weights[i] * mean_directed_distance(rotated, fixed[i]);
    }
    return total / weight_sum;
  };
  return minimize_over_angles(objective, cfg.range_rotation_deg, cfg.step_rotation_deg, cfg.bruteforce);
}

Geometry rotate_geometry_about(const Geometry& g, double angle_deg, Point2 pivot) {
  Geometry out = g;
  for (auto* layer : {&out.contours, &out.catheters, &out.walls}) {
    for (auto& c : *layer) c = rotate_contour_about(c, angle_deg, pivot);
  }
  if (out.reference_point) {
    const Contour ref = rotate_contour_about(Contour(0, {*out.reference_point}), angle_deg, pivot);
    out.reference_point = ref.points().front();
  }
  return out;
}

PairResult register_pair(const Geometry& a, const Geometry& b, const SearchConfig& cfg) {
  auto [ha, hb] = harmonize_pair(a, b);
  const RotationSearchResult rot = find_pair_rotation(ha, hb, cfg);
  const Vec3 anchor = ha.contours[anchor_index(ha)].centroid();

  PairResult out;
  out.pair_rotation_deg = rot.angle_deg;
  out.pair.sys_geom = rotate_geometry_about(hb, rot.angle_deg, {anchor.x, anchor.y});
  out.pair.dia_geom = std::move(ha);
  return out;
}

PairResult build_pair(const Geometry& dia, const Geometry& sys, const PairConfig& cfg) {
  cfg.validate();
  IntraAlignResult dia_aligned;
  IntraAlignResult sys_aligned;
  parallel_invoke([&] { dia_aligned = align_frames_intra(dia, cfg.search); },
                  [&] { sys_aligned = align_frames_intra(sys, cfg.search); });

  PairResult out = register_pair(dia_aligned.geometry, sys_aligned.geometry, cfg.search);
  out.dia_logs = std::move(dia_aligned.logs);
  out.sys_logs = std::move(sys_aligned.logs);
  return out;
}

std::vector<Geometry> interpolate_pair(const GeometryPair& pair, int steps) {
  if (steps < 0) throw std::invalid_argument("interpolation steps must be non-negative");
  const Geometry& d = pair.dia_geom;
  const Geometry& s = pair.sys_geom;
  require_matching_layer(d.contours, s.contours, "contours");
  require_matching_layer(d.catheters, s.catheters, "catheters");
  require_matching_layer(d.walls, s.walls, "walls");

  std::vector<Geometry> out;
  out.reserve(static_cast<std::size_t>(steps));
  for (int t = 1; t <= steps; ++t) {
    const double alpha = static_cast<double>(t) / (steps + 1);
    Geometry g;
    g.contours = lerp_layer(d.contours, s.contours, alpha);
    g.catheters = lerp_layer(d.catheters, s.catheters, alpha);
    g.walls = lerp_layer(d.walls, s.walls, alpha);
    if (d.reference_point && s.reference_point) g.reference_point = lerp(*d.reference_point, *s.reference_point, alpha);
    g.label = d.label;
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace vesselfuse
