#pragma once

#include <Eigen/Core>

#include "aff/image.hpp"

namespace aff {

constexpr float kMissingDepth = 0.0f;

/// Pinhole model. Depth sensors in this class rarely ship calibration, so
/// the documented default is fx = fy = 570 with the principal point at the
/// image center.
struct CameraIntrinsics {
  double fx = 570.0, fy = 570.0;
  double cx = 0.0, cy = 0.0;
  int width = 0, height = 0;

  static CameraIntrinsics make_default(int width, int height) {
    CameraIntrinsics k;
    k.fx = 570.0;
    k.fy = 570.0;
    k.cx = width / 2.0;
    k.cy = height / 2.0;
    k.width = width;
    k.height = height;
    return k;
  }

  bool valid() const {
    return fx > 0 && fy > 0 && width > 0 && height > 0 && cx >= 0 &&
           cx < width && cy >= 0 && cy < height;
  }

  /// Backproject pixel (u, v) at metric depth d into the camera frame
  /// (x right, y down, z forward).
  Eigen::Vector3d unproject(double u, double v, double d) const {
    return {(u - cx) * d / fx, (v - cy) * d / fy, d};
  }

  /// Perspective projection back to pixel coordinates.
  Eigen::Vector2d project(const Eigen::Vector3d& p) const {
    return {fx * p.x() / p.z() + cx, fy * p.y() / p.z() + cy};
  }

  bool operator==(const CameraIntrinsics&) const = default;
};

/// Metric depth image; 0 marks missing data.
struct DepthMap {
  ImageF depths;
  CameraIntrinsics intrinsics;

  int width() const { return depths.width(); }
  int height() const { return depths.height(); }
  bool valid_at(int x, int y) const {
    return depths.at(x, y) > 0.0f;
  }
};

}  // namespace aff
