#pragma once

// Frame-order recovery for pullbacks disturbed by catheter bulk motion.

#include <optional>
#include <vector>

#include "vesselfuse/geometry.hpp"

namespace vesselfuse {

enum class Phase { Diastole, Systole };

struct Record {
  int frame = 0;
  std::optional<double> position;
  Phase phase = Phase::Diastole;
  std::optional<double> measurement_1;
  std::optional<double> measurement_2;

  friend bool operator==(const Record&, const Record&) = default;
};

struct ReorderConfig {
  double delta = 0.0;  // weight of |id jump| between consecutive frames
  int max_rounds = 5;

  void validate() const;
};

/// Dense row-major square matrix.
class CostMatrix {
 public:
  explicit CostMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}
  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }

 private:
  std::size_t n_;
  std::vector<double> data_;
};

struct FrameOrder {
  std::vector<std::size_t> permutation;   // new position -> original index
  std::vector<double> objective_history;  // after construction, then after each 2-opt round
};

/// Symmetric Hausdorff distance between every pair of centred contours.
CostMatrix cost_matrix(const Geometry& geometry);

/// Path cost of `order` under `cost` plus delta * |id jump|.
double path_objective(const CostMatrix& cost, const std::vector<int>& ids, const std::vector<std::size_t>& order,
                      double delta);

/// Nearest-neighbour path from index 0, refined by 2-opt segment reversals.
/// The first frame stays pinned.
FrameOrder solve_frame_order(const CostMatrix& cost, const std::vector<int>& ids, const ReorderConfig& cfg);

/// Reordered copy; frames keep their ids, z stations keep the original sequence.
Geometry reorder_geometry(const Geometry& geometry, const ReorderConfig& cfg = {});

/// Frames in record order, split by phase into (diastole, systole).
std::pair<Geometry, Geometry> order_by_records(const Geometry& geometry, const std::vector<Record>& records);

/// Geometry restricted to `order` (original indices), with the original z
/// sequence of the selected frames reassigned in ascending order.
Geometry select_frames(const Geometry& geometry, const std::vector<std::size_t>& order);

}  // namespace vesselfuse
