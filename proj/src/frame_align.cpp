#include "vesselfuse/frame_align.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "vesselfuse/parallel.hpp"

namespace vesselfuse {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kCoarseStepDeg = 1.0;
constexpr double kWindowFactor = 5.0;
constexpr double kRefineFactor = 10.0;
constexpr double kGridEps = 1e-9;

// Structure-of-arrays copy of a 2D point set for the nearest-neighbour kernel.
struct PointCloud {
  std::vector<double> x;
  std::vector<double> y;

  explicit PointCloud(std::span<const Point2> pts) {
    x.reserve(pts.size());
    y.reserve(pts.size());
    for (const auto& p : pts) {
      x.push_back(p.x);
      y.push_back(p.y);
    }
  }

  std::size_t size() const { return x.size(); }
};

double nearest_sq(double px, double py, const PointCloud& b) {
  const double* bx = b.x.data();
  const double* by = b.y.data();
  const std::size_t n = b.size();
  double best = std::numeric_limits<double>::infinity();
#pragma omp simd reduction(min : best)
  for (std::size_t j = 0; j < n; ++j) {
    const double dx = px - bx[j];
    const double dy = py - by[j];
    const double d = dx * dx + dy * dy;
    best = d < best ? d : best;
  }
  return best;
}

double directed_sq(const PointCloud& a, const PointCloud& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, nearest_sq(a.x[i], a.y[i], b));
  return worst;
}

void require_nonempty(std::span<const Point2> a, std::span<const Point2> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("point set is empty");
}

struct Candidate {
  double angle;
  double objective;
};

bool better(const Candidate& a, const Candidate& b) {
  if (a.objective != b.objective) return a.objective < b.objective;
  if (std::abs(a.angle) != std::abs(b.angle)) return std::abs(a.angle) < std::abs(b.angle);
  return a.angle < b.angle;
}

// Angles center + k * step for |k| <= half_steps, clipped to [-range, range].
std::vector<double> angle_grid(double center, long half_steps, double step, double range) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(2 * half_steps + 1));
  const double limit = range * (1.0 + kGridEps);
  for (long k = -half_steps; k <= half_steps; ++k) {
    const double a = center + static_cast<double>(k) * step;
    if (std::abs(a) <= limit) out.push_back(a);
  }
  return out;
}

Candidate evaluate_grid(const std::vector<double>& angles, const std::function<double(double)>& objective) {
  std::vector<double> values(angles.size());
  parallel_for(angles.size(), [&](std::size_t i) { values[i] = objective(angles[i]); });
  Candidate best{angles.front(), values.front()};
  for (std::size_t i = 1; i < angles.size(); ++i) {
    const Candidate c{angles[i], values[i]};
    if (better(c, best)) best = c;
  }
  return best;
}

std::vector<Point2> rotate_points(std::span<const Point2> pts, double angle_deg, Point2 pivot) {
  const double rad = angle_deg * kDegToRad;
  const double c = std::cos(rad);
  const double s = std::sin(rad);
  std::vector<Point2> out;
  out.reserve(pts.size());
  for (const auto& p : pts) {
    const double dx = p.x - pivot.x;
    const double dy = p.y - pivot.y;
    out.push_back({pivot.x + c * dx - s * dy, pivot.y + s * dx + c * dy});
  }
  return out;
}

// Contour (downsampled) plus catheter points, projected to the frame plane.
std::vector<Point2> search_set(const Contour& contour, const Contour* catheter, int sample_size) {
  std::vector<Point2> pts = project_xy(downsample(contour, sample_size).points());
  if (catheter != nullptr) {
    for (const auto& p : catheter->points()) pts.push_back({p.x, p.y});
  }
  return pts;
}

}  // namespace

void SearchConfig::validate() const {
  if (!(step_rotation_deg > 0.0)) throw std::invalid_argument("step_rotation_deg must be positive");
  if (!(range_rotation_deg > 0.0)) throw std::invalid_argument("range_rotation_deg must be positive");
  if (sample_size < 3) throw std::invalid_argument("sample_size must be at least 3");
}

double directed_hausdorff(std::span<const Point2> a, std::span<const Point2> b) {
  require_nonempty(a, b);
  return std::sqrt(directed_sq(PointCloud(a), PointCloud(b)));
}

double symmetric_hausdorff(std::span<const Point2> a, std::span<const Point2> b) {
  require_nonempty(a, b);
  const PointCloud pa(a);
  const PointCloud pb(b);
  return std::sqrt(std::max(directed_sq(pa, pb), directed_sq(pb, pa)));
}

double mean_directed_distance(std::span<const Point2> a, std::span<const Point2> b) {
  require_nonempty(a, b);
  const PointCloud pb(b);
  double sum = 0.0;
  for (const auto& p : a) sum += std::sqrt(nearest_sq(p.x, p.y, pb));
  return sum / static_cast<double>(a.size());
}

Contour downsample(const Contour& contour, int target) {
  if (target < 3) throw std::invalid_argument("downsample target must be at least 3");
  const std::size_t m = contour.size();
  const auto t = static_cast<std::size_t>(target);
  if (m <= t) return contour;
  std::vector<ContourPoint> pts;
  pts.reserve(t);
  for (std::size_t j = 0; j < t; ++j) pts.push_back(contour.points()[j * m / t]);
  return Contour(contour.id(), std::move(pts));
}

RotationSearchResult minimize_over_angles(const std::function<double(double)>& objective, double range_deg,
                                          double step_deg, bool bruteforce) {
  if (!(step_deg > 0.0) || !(range_deg > 0.0)) throw std::invalid_argument("invalid angular search parameters");

  RotationSearchResult result;
  double step = bruteforce ? step_deg : std::max(kCoarseStepDeg, step_deg);
  auto grid = angle_grid(0.0, static_cast<long>(std::floor(range_deg / step + kGridEps)), step, range_deg);
  Candidate best = evaluate_grid(grid, objective);
  result.evaluations = grid.size();

  if (!bruteforce) {
    while (step > step_deg * (1.0 + kGridEps)) {
      const double next = std::max(step / kRefineFactor, step_deg);
      const long half = std::lround(kWindowFactor * step / next);
      grid = angle_grid(best.angle, half, next, range_deg);
      const Candidate level_best = evaluate_grid(grid, objective);
      if (better(level_best, best)) best = level_best;
      result.evaluations += grid.size();
      ++result.levels;
      step = next;
    }
  }

  result.angle_deg = best.angle;
  result.objective = best.objective;
  return result;
}

RotationSearchResult find_best_rotation(std::span<const Point2> moving, std::span<const Point2> fixed,
                                        const SearchConfig& cfg) {
  require_nonempty(moving, fixed);
  Point2 pivot;
  for (const auto& p : fixed) {
    pivot.x += p.x;
    pivot.y += p.y;
  }
  pivot.x /= static_cast<double>(fixed.size());
  pivot.y /= static_cast<double>(fixed.size());
  return find_best_rotation(moving, fixed, cfg, pivot);
}

RotationSearchResult find_best_rotation(std::span<const Point2> moving, std::span<const Point2> fixed,
                                        const SearchConfig& cfg, Point2 pivot) {
  cfg.validate();
  require_nonempty(moving, fixed);
  const PointCloud target(fixed);
  auto objective = [&](double angle) {
    const auto rotated = rotate_points(moving, angle, pivot);
    const PointCloud source(rotated);
    return std::sqrt(std::max(directed_sq(source, target), directed_sq(target, source)));
  };
  return minimize_over_angles(objective, cfg.range_rotation_deg, cfg.step_rotation_deg, cfg.bruteforce);
}

IntraAlignResult align_frames_intra(const Geometry& geometry, const SearchConfig& cfg) {
  cfg.validate();
  if (geometry.empty()) throw std::invalid_argument("empty geometry");
  const std::size_t n = geometry.frame_count();
  const bool has_catheter = !geometry.catheters.empty();
  const bool has_walls = !geometry.walls.empty();
  if ((has_catheter && geometry.catheters.size() != n) || (has_walls && geometry.walls.size() != n)) {
    throw std::invalid_argument("layer is not index-parallel to contours");
  }

  const Vec3 c0 = geometry.contours.front().centroid();
  const Point2 pivot{c0.x, c0.y};

  std::vector<Vec3> shifts(n);
  std::vector<Vec3> centroids(n);
  Geometry translated = geometry;
  for (std::size_t k = 0; k < n; ++k) {
    centroids[k] = geometry.contours[k].centroid();
    shifts[k] = {c0.x - centroids[k].x, c0.y - centroids[k].y, 0.0};
    translated.contours[k] = translate_contour(geometry.contours[k], shifts[k]);
    if (has_catheter) translated.catheters[k] = translate_contour(geometry.catheters[k], shifts[k]);
    if (has_walls) translated.walls[k] = translate_contour(geometry.walls[k], shifts[k]);
  }

  IntraAlignResult out;
  out.geometry = translated;
  out.logs.reserve(n);
  out.logs.push_back({geometry.contours[0].id(), geometry.contours[0].id(), 0.0, 0.0, 0.0, 0.0, c0.x, c0.y});

  std::vector<double> totals(n, 0.0);
  auto place = [&](std::size_t k, double angle) {
    out.geometry.contours[k] = rotate_contour_about(translated.contours[k], angle, pivot);
    if (has_catheter) out.geometry.catheters[k] = rotate_contour_about(translated.catheters[k], angle, pivot);
    if (has_walls) out.geometry.walls[k] = rotate_contour_about(translated.walls[k], angle, pivot);
  };

  for (std::size_t k = 1; k < n; ++k) {
    const double seed = totals[k - 1];
    const auto fixed = search_set(out.geometry.contours[k - 1],
                                  has_catheter ? &out.geometry.catheters[k - 1] : nullptr, cfg.sample_size);
    const Contour pre_contour = rotate_contour_about(translated.contours[k], seed, pivot);
    std::optional<Contour> pre_catheter;
    if (has_catheter) pre_catheter = rotate_contour_about(translated.catheters[k], seed, pivot);
    const auto moving = search_set(pre_contour, pre_catheter ? &*pre_catheter : nullptr, cfg.sample_size);

    const double rel = find_best_rotation(moving, fixed, cfg, pivot).angle_deg;
    totals[k] = seed + rel;
    place(k, totals[k]);
    out.logs.push_back({geometry.contours[k].id(), geometry.contours[k - 1].id(), rel, totals[k], shifts[k].x,
                        shifts[k].y, centroids[k].x, centroids[k].y});
  }

  if (geometry.reference_point) {
    const auto idx = find_frame(geometry.contours, geometry.reference_point->frame_index).value_or(0);
    ContourPoint ref = *geometry.reference_point;
    ref.x += shifts[idx].x;
    ref.y += shifts[idx].y;
    const Point2 placed = rotate_points(std::vector<Point2>{{ref.x, ref.y}}, totals[idx], pivot).front();
    ref.x = placed.x;
    ref.y = placed.y;
    out.geometry.reference_point = ref;
  }
  return out;
}

std::size_t multiscale_evaluation_bound(double range_deg, double step_deg) {
  const double coarse = std::max(kCoarseStepDeg, step_deg);
  const auto first = static_cast<std::size_t>(2.0 * std::floor(range_deg / coarse + kGridEps) + 1.0);
  const double ratio = kCoarseStepDeg / step_deg;
  const auto levels = ratio > 1.0 ? static_cast<std::size_t>(std::ceil(std::log10(ratio) - kGridEps)) : 0;
  return first + levels * 101;
}

}  // namespace vesselfuse
