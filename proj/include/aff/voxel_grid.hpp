#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "aff/manhattan.hpp"
#include "aff/point_cloud.hpp"

namespace aff {

enum class CellState : uint8_t { Unknown = 0, Free = 1, Occupied = 2 };

/// Gravity-aligned occupancy grid. Cell (i,j,k) covers
/// origin + [i,i+1)x[j,j+1)x[k,k+1) * voxel_size in frame coordinates;
/// the k axis is up.
class VoxelGrid {
 public:
  VoxelGrid() = default;
  VoxelGrid(const Eigen::Vector3i& dims, double voxel_size,
            const Eigen::Vector3d& origin, const ManhattanFrame& frame)
      : dims_(dims), voxel_size_(voxel_size), origin_(origin), frame_(frame),
        cells_(static_cast<size_t>(dims.x()) * dims.y() * dims.z(),
               static_cast<uint8_t>(CellState::Unknown)) {}

  const Eigen::Vector3i& dims() const { return dims_; }
  double voxel_size() const { return voxel_size_; }
  const Eigen::Vector3d& origin() const { return origin_; }
  const ManhattanFrame& frame() const { return frame_; }
  int up_axis() const { return 2; }

  size_t cell_count() const { return cells_.size(); }
  size_t index(int i, int j, int k) const {
    return (static_cast<size_t>(k) * dims_.y() + j) * dims_.x() + i;
  }
  bool in_bounds(const Eigen::Vector3i& c) const {
    return c.x() >= 0 && c.y() >= 0 && c.z() >= 0 && c.x() < dims_.x() &&
           c.y() < dims_.y() && c.z() < dims_.z();
  }

  CellState at(int i, int j, int k) const {
    return static_cast<CellState>(cells_[index(i, j, k)]);
  }
  CellState at(const Eigen::Vector3i& c) const {
    return at(c.x(), c.y(), c.z());
  }
  void set(int i, int j, int k, CellState s) {
    cells_[index(i, j, k)] = static_cast<uint8_t>(s);
  }
  void set(const Eigen::Vector3i& c, CellState s) {
    set(c.x(), c.y(), c.z(), s);
  }

  /// Grid cell containing a camera-frame point.
  Eigen::Vector3i cell_of(const Eigen::Vector3d& p_cam) const {
    const Eigen::Vector3d g = (frame_.to_frame(p_cam) - origin_) / voxel_size_;
    return {static_cast<int>(std::floor(g.x())),
            static_cast<int>(std::floor(g.y())),
            static_cast<int>(std::floor(g.z()))};
  }

  struct Counts {
    size_t occupied = 0, free = 0, unknown = 0;
  };
  Counts counts() const {
    Counts c;
    for (uint8_t v : cells_) {
      switch (static_cast<CellState>(v)) {
        case CellState::Occupied: ++c.occupied; break;
        case CellState::Free: ++c.free; break;
        case CellState::Unknown: ++c.unknown; break;
      }
    }
    return c;
  }

  const std::vector<uint8_t>& raw() const { return cells_; }
  std::vector<uint8_t>& raw() { return cells_; }

  bool operator==(const VoxelGrid& o) const {
    return dims_ == o.dims_ && voxel_size_ == o.voxel_size_ &&
           origin_ == o.origin_ && cells_ == o.cells_;
  }

 private:
  Eigen::Vector3i dims_ = Eigen::Vector3i::Zero();
  double voxel_size_ = 0.10;
  Eigen::Vector3d origin_ = Eigen::Vector3d::Zero();
  ManhattanFrame frame_;
  std::vector<uint8_t> cells_;
};

struct VoxelizeParams {
  double voxel_size = 0.10;
  double margin = 0.5;  // metres of padding around the cloud bounding box
};

/// Build the one-voxel-thick shell: cells holding points become Occupied,
/// cells crossed by a camera ray in front of an observed surface become
/// Free, everything else stays Unknown. Throws EmptyCloud.
VoxelGrid voxelize(const PointCloud& cloud, const ManhattanFrame& frame,
                   const VoxelizeParams& params = {});

struct FillParams {
  // A surface supports fill when its mean normal is at least this many
  // degrees away from straight down (inclusive).
  double min_angle_from_down_deg = 45.0;
};

/// Complete the shell: under every Occupied cell whose originating points
/// have a qualifying mean normal, convert the Unknown cells below to
/// Occupied, stopping at the grid floor, an Occupied cell, or a Free cell
/// (Free is never overwritten; such columns are counted as flagged).
/// Throws FrameMismatch when `frame` differs from the grid's frame.
VoxelGrid fill_below(const VoxelGrid& grid, const PointCloud& cloud,
                     const ManhattanFrame& frame,
                     const FillParams& params = {},
                     int* flagged_columns = nullptr);

/// Binary grid file round-trip (header + one byte per cell, x fastest).
void save_voxel_grid(const VoxelGrid& grid, const std::string& path);
VoxelGrid load_voxel_grid(const std::string& path);

}  // namespace aff
