#pragma once

#include <Eigen/Core>
#include <vector>

#include "aff/camera.hpp"

namespace aff {

/// Backprojected depth map. One entry per valid pixel; pixel_index maps a
/// point back to its source pixel (v * width + u).
struct PointCloud {
  std::vector<Eigen::Vector3d> points;
  std::vector<Eigen::Vector3d> normals;
  std::vector<int> pixel_index;
  int image_width = 0;
  int image_height = 0;

  size_t size() const { return points.size(); }
};

/// Backproject every valid pixel and estimate per-point normals from a
/// plane fit over the 5x5 pixel neighbourhood, oriented toward the camera.
/// Throws AllPixelsMissing when the depth map has no valid pixel.
PointCloud backproject(const DepthMap& depth);

}  // namespace aff
