#include "aff/labeler.hpp"

#include "aff/errors.hpp"

namespace aff {

ResponseGrid convolve_filter(const VoxelGrid& grid, const PoseFilter& filter) {
  const Eigen::Vector3i dims = grid.dims();
  Eigen::Vector3i flo, fhi;
  filter.bounds(flo, fhi);
  for (int a = 0; a < 3; ++a)
    if (fhi[a] - flo[a] + 1 > dims[a])
      throw FilterLargerThanGrid(filter.name + " does not fit the grid");

  ResponseGrid out;
  out.dims = dims;
  out.response.assign(grid.cell_count(), 0.0);
  out.unknown_fraction.assign(grid.cell_count(), 0.0);

  const double total = static_cast<double>(filter.criteria_count());
  const int n_rot = filter.orientation_sensitive ? 4 : 1;

#pragma omp parallel for collapse(2) schedule(static)
  for (int k = 0; k < dims.z(); ++k) {
    for (int j = 0; j < dims.y(); ++j) {
      for (int i = 0; i < dims.x(); ++i) {
        const Eigen::Vector3i anchor(i, j, k);
        const bool interior =
            i + flo.x() >= 0 && i + fhi.x() < dims.x() && j + flo.y() >= 0 &&
            j + fhi.y() < dims.y() && k + flo.z() >= 0 &&
            k + fhi.z() < dims.z();

        double best = -1.0, best_unknown = 0.0;
        for (int r = 0; r < n_rot; ++r) {
          int sat = 0, unk = 0;
          if (interior) {
            for (const auto& off : filter.freespace_rot[r]) {
              const CellState s =
                  grid.at(i + off.x(), j + off.y(), k + off.z());
              if (s == CellState::Free) ++sat;
              else if (s == CellState::Unknown) ++unk;
            }
            for (const auto& off : filter.support_rot[r]) {
              const CellState s =
                  grid.at(i + off.x(), j + off.y(), k + off.z());
              if (s == CellState::Occupied) ++sat;
              else if (s == CellState::Unknown) ++unk;
            }
          } else {
            auto state_at = [&](const Eigen::Vector3i& off) {
              const Eigen::Vector3i c = anchor + off;
              return grid.in_bounds(c) ? grid.at(c) : CellState::Unknown;
            };
            for (const auto& off : filter.freespace_rot[r]) {
              const CellState s = state_at(off);
              if (s == CellState::Free) ++sat;
              else if (s == CellState::Unknown) ++unk;
            }
            for (const auto& off : filter.support_rot[r]) {
              const CellState s = state_at(off);
              if (s == CellState::Occupied) ++sat;
              else if (s == CellState::Unknown) ++unk;
            }
          }
          const double resp = sat / total;
          if (resp > best) {
            best = resp;
            best_unknown = unk / total;
          }
        }
        const size_t idx = out.index(i, j, k);
        out.response[idx] = best;
        out.unknown_fraction[idx] = best_unknown;
      }
    }
  }
  return out;
}

std::vector<TriState> label_voxels(const ResponseGrid& response,
                                   const LabelThresholds& th) {
  std::vector<TriState> out(response.response.size(), TriState::Unknown);
  for (size_t i = 0; i < out.size(); ++i) {
    if (response.response[i] >= th.t_hi) {
      out[i] = TriState::Supports;
    } else if (response.response[i] <= th.t_lo &&
               response.unknown_fraction[i] <= th.u_max) {
      out[i] = TriState::Not;
    }
  }
  return out;
}

AffordanceMap backproject_labels(const std::vector<TriState>& voxel_labels,
                                 const VoxelGrid& grid,
                                 const PointCloud& cloud,
                                 const DepthMap& depth,
                                 Affordance affordance) {
  AffordanceMap map;
  map.affordance = to_string(affordance);
  map.source = "generated";
  map.labels =
      Image<TriState>(depth.width(), depth.height(), TriState::Unknown);
  for (size_t i = 0; i < cloud.size(); ++i) {
    const Eigen::Vector3i c = grid.cell_of(cloud.points[i]);
    if (!grid.in_bounds(c)) continue;
    const int px = cloud.pixel_index[i] % cloud.image_width;
    const int py = cloud.pixel_index[i] / cloud.image_width;
    map.labels.at(px, py) = voxel_labels[grid.index(c.x(), c.y(), c.z())];
  }
  return map;
}

void apply_floor_filter(AffordanceMap& standing_map,
                        const ImageU8& floor_mask) {
  for (int y = 0; y < standing_map.labels.height(); ++y)
    for (int x = 0; x < standing_map.labels.width(); ++x)
      if (floor_mask.in_bounds(x, y) && floor_mask.at(x, y) &&
          standing_map.labels.at(x, y) == TriState::Not)
        standing_map.labels.at(x, y) = TriState::Unknown;
}

LabelGenResult generate_labels(const DepthMap& depth,
                               const LabelGenParams& params,
                               const std::optional<ImageU8>& floor_mask) {
  LabelGenResult result;
  const PointCloud cloud = backproject(depth);
  result.frame = estimate_frame(cloud, floor_mask, params.frame);
  const VoxelGrid shell = voxelize(cloud, result.frame, params.voxel);
  result.grid = fill_below(shell, cloud, result.frame, params.fill,
                           &result.flagged_columns);

  const auto bank =
      build_filter_bank(params.human, params.voxel.voxel_size);
  for (const auto& filter : bank) {
    const ResponseGrid resp = convolve_filter(result.grid, filter);
    const std::vector<TriState> voxel_labels =
        label_voxels(resp, params.thresholds);
    AffordanceMap map = backproject_labels(voxel_labels, result.grid, cloud,
                                           depth, filter.affordance);
    if (floor_mask && filter.affordance == Affordance::Standing)
      apply_floor_filter(map, *floor_mask);
    result.maps.push_back(std::move(map));
  }
  return result;
}

}  // namespace aff
