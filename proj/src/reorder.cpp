#include "vesselfuse/reorder.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "vesselfuse/frame_align.hpp"
#include "vesselfuse/parallel.hpp"

namespace vesselfuse {

namespace {

constexpr double kImprovementEps = 1e-12;

std::vector<Point2> centred_xy(const Contour& c) {
  const Vec3 cen = c.centroid();
  std::vector<Point2> out;
  out.reserve(c.size());
  for (const auto& p : c.points()) out.push_back({p.x - cen.x, p.y - cen.y});
  return out;
}

// Frames are planar; the first point carries the exact station.
double station(const Contour& c) {
  if (c.empty()) throw std::invalid_argument("empty contour");
  return c.points().front().z;
}

double edge(const CostMatrix& cost, const std::vector<int>& ids, std::size_t a, std::size_t b, double delta) {
  return cost(a, b) + delta * std::abs(ids[b] - ids[a]);
}

Geometry permute(const Geometry& geometry, const std::vector<std::size_t>& order, const std::vector<double>& stations) {
  Geometry out;
  out.label = geometry.label;
  out.reference_point = geometry.reference_point;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::size_t src = order[k];
    out.contours.push_back(with_z(geometry.contours[src], stations[k]));
    if (!geometry.catheters.empty()) out.catheters.push_back(with_z(geometry.catheters[src], stations[k]));
    if (!geometry.walls.empty()) out.walls.push_back(with_z(geometry.walls[src], stations[k]));
  }
  if (out.reference_point) {
    if (auto idx = find_frame(out.contours, out.reference_point->frame_index)) {
      out.reference_point->z = stations[*idx];
    }
  }
  return out;
}

}  // namespace

void ReorderConfig::validate() const {
  if (!(delta >= 0.0)) throw std::invalid_argument("delta must be non-negative");
  if (max_rounds < 1) throw std::invalid_argument("max_rounds must be at least 1");
}

CostMatrix cost_matrix(const Geometry& geometry) {
  const std::size_t n = geometry.frame_count();
  if (n < 2) throw std::invalid_argument("cost matrix requires at least 2 contours");

  std::vector<std::vector<Point2>> centred(n);
  for (std::size_t i = 0; i < n; ++i) centred[i] = centred_xy(geometry.contours[i]);

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  std::vector<double> values(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t k) {
    values[k] = symmetric_hausdorff(centred[pairs[k].first], centred[pairs[k].second]);
  });

  CostMatrix cost(n);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    cost(pairs[k].first, pairs[k].second) = values[k];
    cost(pairs[k].second, pairs[k].first) = values[k];
  }
  return cost;
}

double path_objective(const CostMatrix& cost, const std::vector<int>& ids, const std::vector<std::size_t>& order,
                      double delta) {
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < order.size(); ++k) total += edge(cost, ids, order[k], order[k + 1], delta);
  return total;
}

FrameOrder solve_frame_order(const CostMatrix& cost, const std::vector<int>& ids, const ReorderConfig& cfg) {
  cfg.validate();
  const std::size_t n = cost.size();
  if (ids.size() != n) throw std::invalid_argument("id count does not match cost matrix");

  FrameOrder out;
  if (n == 0) return out;

  // Nearest-neighbour construction from the pinned first frame.
  std::vector<bool> used(n, false);
  out.permutation.push_back(0);
  used[0] = true;
  for (std::size_t step = 1; step < n; ++step) {
    const std::size_t cur = out.permutation.back();
    std::size_t best = n;
    double best_cost = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (used[j]) continue;
      const double c = edge(cost, ids, cur, j, cfg.delta);
      if (best == n || c < best_cost) {
        best = j;
        best_cost = c;
      }
    }
    used[best] = true;
    out.permutation.push_back(best);
  }
  auto& order = out.permutation;
  out.objective_history.push_back(path_objective(cost, ids, order, cfg.delta));

  // 2-opt on an open path: reverse order[i..j], 1 <= i < j <= n-1.
  for (int round = 0; round < cfg.max_rounds; ++round) {
    bool improved = false;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        double before = edge(cost, ids, order[i - 1], order[i], cfg.delta);
        double after = edge(cost, ids, order[i - 1], order[j], cfg.delta);
        if (j + 1 < n) {
          before += edge(cost, ids, order[j], order[j + 1], cfg.delta);
          after += edge(cost, ids, order[i], order[j + 1], cfg.delta);
        }
        if (after < before - kImprovementEps) {
          const auto first = order.begin() + static_cast<std::ptrdiff_t>(i);
          std::reverse(first, order.begin() + static_cast<std::ptrdiff_t>(j) + 1);
          improved = true;
        }
      }
    }
    out.objective_history.push_back(path_objective(cost, ids, order, cfg.delta));
    if (!improved) break;
  }
  return out;
}

Geometry reorder_geometry(const Geometry& geometry, const ReorderConfig& cfg) {
  const CostMatrix cost = cost_matrix(geometry);
  std::vector<int> ids;
  std::vector<double> stations;
  for (const auto& c : geometry.contours) {
    ids.push_back(c.id());
    stations.push_back(station(c));
  }
  const FrameOrder order = solve_frame_order(cost, ids, cfg);
  return permute(geometry, order.permutation, stations);
}

Geometry select_frames(const Geometry& geometry, const std::vector<std::size_t>& order) {
  std::vector<double> stations;
  stations.reserve(order.size());
  for (std::size_t idx : order) {
    if (idx >= geometry.frame_count()) throw std::out_of_range("frame index out of range");
    stations.push_back(station(geometry.contours[idx]));
  }
  std::sort(stations.begin(), stations.end());
  return permute(geometry, order, stations);
}

std::pair<Geometry, Geometry> order_by_records(const Geometry& geometry, const std::vector<Record>& records) {
  if (records.empty()) throw std::invalid_argument("no records");
  std::vector<std::size_t> dia;
  std::vector<std::size_t> sys;
  for (const auto& r : records) {
    const auto idx = find_frame(geometry.contours, r.frame);
    if (!idx) throw std::invalid_argument("record references unknown frame " + std::to_string(r.frame));
    (r.phase == Phase::Diastole ? dia : sys).push_back(*idx);
  }
  return {select_frames(geometry, dia), select_frames(geometry, sys)};
}

}  // namespace vesselfuse
