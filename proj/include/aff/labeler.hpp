#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "aff/camera.hpp"
#include "aff/image.hpp"
#include "aff/pose_filter.hpp"
#include "aff/voxel_grid.hpp"

namespace aff {

enum class TriState : uint8_t { Not = 0, Unknown = 1, Supports = 2 };

/// Per-pixel tri-state labels for one affordance.
struct AffordanceMap {
  Image<TriState> labels;
  std::string affordance;
  std::string source;  // "generated" or "predicted"
};

/// Per-voxel filter response. response is the best fraction of criteria
/// cells satisfied over the four yaw rotations; unknown_fraction is the
/// fraction of criteria cells that were Unknown for that best rotation.
struct ResponseGrid {
  Eigen::Vector3i dims = Eigen::Vector3i::Zero();
  std::vector<double> response;
  std::vector<double> unknown_fraction;

  size_t index(int i, int j, int k) const {
    return (static_cast<size_t>(k) * dims.y() + j) * dims.x() + i;
  }
};

/// Evaluate the filter at every voxel. Cells outside the grid count as
/// Unknown. Throws FilterLargerThanGrid when the filter cannot fit.
ResponseGrid convolve_filter(const VoxelGrid& grid, const PoseFilter& filter);

struct LabelThresholds {
  double t_lo = 0.2;
  double t_hi = 0.95;
  double u_max = 0.1;
};

/// Supports above t_hi; Not below t_lo when little was unknown; Unknown
/// otherwise. Total over all voxels.
std::vector<TriState> label_voxels(const ResponseGrid& response,
                                   const LabelThresholds& thresholds = {});

/// Transfer voxel labels to pixels: each valid pixel takes the label of
/// the voxel containing its backprojected point (the contact-surface
/// voxel); missing-depth pixels stay Unknown.
AffordanceMap backproject_labels(const std::vector<TriState>& voxel_labels,
                                 const VoxelGrid& grid,
                                 const PointCloud& cloud,
                                 const DepthMap& depth,
                                 Affordance affordance);

/// Optional post-filter: on floor pixels, demote Not back to Unknown for
/// the standing map when the mask contradicts the filter.
void apply_floor_filter(AffordanceMap& standing_map,
                        const ImageU8& floor_mask);

// ---------------------------------------------------------------------------
// Whole label-generation pipeline: depth -> cloud -> frame -> grid ->
// filter responses -> per-pixel maps.

struct LabelGenParams {
  VoxelizeParams voxel;
  FillParams fill;
  LabelThresholds thresholds;
  HumanDims human;
  FrameEstimationParams frame;
};

struct LabelGenResult {
  std::vector<AffordanceMap> maps;  // one per affordance, bank order
  ManhattanFrame frame;
  VoxelGrid grid;  // after fill
  int flagged_columns = 0;
};

LabelGenResult generate_labels(
    const DepthMap& depth, const LabelGenParams& params = {},
    const std::optional<ImageU8>& floor_mask = std::nullopt);

}  // namespace aff
