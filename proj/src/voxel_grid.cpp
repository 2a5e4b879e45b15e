#include "aff/voxel_grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "aff/errors.hpp"

namespace aff {

namespace {

// March cells from `from` toward `to` (frame coordinates already divided
// by voxel_size), marking Unknown cells Free. Stops before the cell that
// contains `to`. Amanatides-Woo traversal.
void carve_ray(VoxelGrid& grid, const Eigen::Vector3d& from,
               const Eigen::Vector3d& to) {
  Eigen::Vector3d dir = to - from;
  const double len = dir.norm();
  if (len < 1e-12) return;
  dir /= len;

  // Clip the segment to the grid box so rays starting outside still work.
  double t0 = 0.0, t1 = len;
  for (int a = 0; a < 3; ++a) {
    const double lo = 0.0, hi = static_cast<double>(grid.dims()[a]);
    if (std::abs(dir[a]) < 1e-15) {
      if (from[a] < lo || from[a] >= hi) return;
      continue;
    }
    double ta = (lo - from[a]) / dir[a];
    double tb = (hi - from[a]) / dir[a];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
  }
  if (t0 >= t1) return;

  const Eigen::Vector3d entry = from + (t0 + 1e-9) * dir;
  Eigen::Vector3i cell(static_cast<int>(std::floor(entry.x())),
                       static_cast<int>(std::floor(entry.y())),
                       static_cast<int>(std::floor(entry.z())));
  const Eigen::Vector3i end_cell(static_cast<int>(std::floor(to.x())),
                                 static_cast<int>(std::floor(to.y())),
                                 static_cast<int>(std::floor(to.z())));

  Eigen::Vector3i step;
  Eigen::Vector3d t_max, t_delta;
  for (int a = 0; a < 3; ++a) {
    if (dir[a] > 0) {
      step[a] = 1;
      t_delta[a] = 1.0 / dir[a];
      t_max[a] = t0 + (cell[a] + 1.0 - from[a]) / dir[a];
    } else if (dir[a] < 0) {
      step[a] = -1;
      t_delta[a] = -1.0 / dir[a];
      t_max[a] = t0 + (cell[a] - from[a]) / dir[a];
    } else {
      step[a] = 0;
      t_delta[a] = std::numeric_limits<double>::infinity();
      t_max[a] = std::numeric_limits<double>::infinity();
    }
  }

  double t = t0;
  while (t < t1 && grid.in_bounds(cell)) {
    if (cell == end_cell) break;
    if (grid.at(cell) == CellState::Unknown) grid.set(cell, CellState::Free);
    const int axis = (t_max.x() < t_max.y())
                         ? (t_max.x() < t_max.z() ? 0 : 2)
                         : (t_max.y() < t_max.z() ? 1 : 2);
    t = t_max[axis];
    t_max[axis] += t_delta[axis];
    cell[axis] += step[axis];
  }
}

}  // namespace

VoxelGrid voxelize(const PointCloud& cloud, const ManhattanFrame& frame,
                   const VoxelizeParams& params) {
  if (cloud.points.empty()) throw EmptyCloud("cannot voxelize an empty cloud");

  Eigen::Vector3d lo = Eigen::Vector3d::Constant(
      std::numeric_limits<double>::infinity());
  Eigen::Vector3d hi = -lo;
  for (const auto& p : cloud.points) {
    const Eigen::Vector3d q = frame.to_frame(p);
    lo = lo.cwiseMin(q);
    hi = hi.cwiseMax(q);
  }
  // Keep the camera inside the grid so ray carving starts in-bounds.
  const Eigen::Vector3d cam = frame.to_frame(Eigen::Vector3d::Zero());
  lo = lo.cwiseMin(cam);
  hi = hi.cwiseMax(cam);

  const double v = params.voxel_size;
  const Eigen::Vector3d origin = lo - Eigen::Vector3d::Constant(params.margin);
  Eigen::Vector3i dims;
  for (int a = 0; a < 3; ++a)
    dims[a] = static_cast<int>(
                  std::ceil((hi[a] + params.margin - origin[a]) / v)) +
              1;

  VoxelGrid grid(dims, v, origin, frame);

  for (const auto& p : cloud.points) {
    const Eigen::Vector3i c = grid.cell_of(p);
    if (grid.in_bounds(c)) grid.set(c, CellState::Occupied);
  }

  const Eigen::Vector3d cam_g = (cam - origin) / v;
  for (const auto& p : cloud.points) {
    const Eigen::Vector3d pg = (frame.to_frame(p) - origin) / v;
    carve_ray(grid, cam_g, pg);
  }
  return grid;
}

VoxelGrid fill_below(const VoxelGrid& grid, const PointCloud& cloud,
                     const ManhattanFrame& frame, const FillParams& params,
                     int* flagged_columns) {
  if ((frame.rotation - grid.frame().rotation).cwiseAbs().maxCoeff() > 1e-12)
    throw FrameMismatch("grid was built under a different frame");

  // Mean normal per occupied cell, accumulated from the cloud.
  const Eigen::Vector3i dims = grid.dims();
  std::vector<Eigen::Vector3f> normal_sum(grid.cell_count(),
                                          Eigen::Vector3f::Zero());
  for (size_t i = 0; i < cloud.size(); ++i) {
    const Eigen::Vector3i c = grid.cell_of(cloud.points[i]);
    if (!grid.in_bounds(c)) throw FrameMismatch("point outside grid extent");
    // Normals live in the camera frame; compare against up in frame coords.
    const Eigen::Vector3d n = frame.to_frame(cloud.normals[i]);
    normal_sum[grid.index(c.x(), c.y(), c.z())] += n.cast<float>();
  }

  // angle(normal, down) >= threshold  <=>  dot(normal, up) >= -cos(threshold)
  const double min_up_dot =
      -std::cos(params.min_angle_from_down_deg * M_PI / 180.0);

  VoxelGrid out = grid;
  int flagged = 0;
  for (int j = 0; j < dims.y(); ++j) {
    for (int i = 0; i < dims.x(); ++i) {
      for (int k = dims.z() - 1; k >= 0; --k) {
        if (grid.at(i, j, k) != CellState::Occupied) continue;
        const Eigen::Vector3f sum = normal_sum[grid.index(i, j, k)];
        if (sum.squaredNorm() < 1e-12f) continue;  // filled later, no points
        const Eigen::Vector3f n = sum.normalized();
        if (n.z() < min_up_dot) continue;  // downward facing, no support

        for (int kk = k - 1; kk >= 0; --kk) {
          const CellState s = out.at(i, j, kk);
          if (s == CellState::Occupied) break;
          if (s == CellState::Free) {
            ++flagged;  // observation contradicts the support assumption
            break;
          }
          out.set(i, j, kk, CellState::Occupied);
        }
      }
    }
  }
  if (flagged_columns) *flagged_columns = flagged;
  return out;
}

namespace {

constexpr char kGridMagic[4] = {'A', 'V', 'G', '1'};

template <typename T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
void read_pod(std::istream& is, T& v) {
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
}

}  // namespace

void save_voxel_grid(const VoxelGrid& grid, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path + " for writing");
  os.write(kGridMagic, 4);
  const int32_t d[3] = {grid.dims().x(), grid.dims().y(), grid.dims().z()};
  write_pod(os, d[0]);
  write_pod(os, d[1]);
  write_pod(os, d[2]);
  write_pod(os, grid.voxel_size());
  write_pod(os, grid.origin().x());
  write_pod(os, grid.origin().y());
  write_pod(os, grid.origin().z());
  const uint8_t up = static_cast<uint8_t>(grid.up_axis());
  write_pod(os, up);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) write_pod(os, grid.frame().rotation(r, c));
  os.write(reinterpret_cast<const char*>(grid.raw().data()),
           static_cast<std::streamsize>(grid.raw().size()));
  if (!os) throw IoError("short write to " + path);
}

VoxelGrid load_voxel_grid(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kGridMagic, 4) != 0)
    throw IoError("not a voxel grid file: " + path);
  int32_t d[3];
  read_pod(is, d[0]);
  read_pod(is, d[1]);
  read_pod(is, d[2]);
  double voxel, ox, oy, oz;
  read_pod(is, voxel);
  read_pod(is, ox);
  read_pod(is, oy);
  read_pod(is, oz);
  uint8_t up;
  read_pod(is, up);
  Eigen::Matrix3d rot;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) read_pod(is, rot(r, c));
  ManhattanFrame frame;
  frame.rotation = rot;
  frame.axis2 = rot.row(0);
  frame.axis3 = rot.row(1);
  frame.gravity = rot.row(2);
  VoxelGrid grid({d[0], d[1], d[2]}, voxel, {ox, oy, oz}, frame);
  is.read(reinterpret_cast<char*>(grid.raw().data()),
          static_cast<std::streamsize>(grid.raw().size()));
  if (!is) throw IoError("truncated voxel grid file: " + path);
  return grid;
}

}  // namespace aff
