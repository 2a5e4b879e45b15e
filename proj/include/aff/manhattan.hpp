#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>

#include "aff/image.hpp"
#include "aff/point_cloud.hpp"

namespace aff {

/// Scene coordinate frame with one axis locked to gravity and the others
/// to the dominant wall directions. `rotation` maps camera-frame points
/// into frame coordinates: rows are (axis2, axis3, gravity), so the third
/// output coordinate is height along the up direction.
struct ManhattanFrame {
  Eigen::Vector3d gravity;  // unit up direction, camera frame
  Eigen::Vector3d axis2;
  Eigen::Vector3d axis3;
  Eigen::Matrix3d rotation;

  Eigen::Vector3d to_frame(const Eigen::Vector3d& p_cam) const {
    return rotation * p_cam;
  }
  Eigen::Vector3d to_camera(const Eigen::Vector3d& p_frame) const {
    return rotation.transpose() * p_frame;
  }

  static ManhattanFrame from_axes(const Eigen::Vector3d& gravity,
                                  const Eigen::Vector3d& axis2);
};

struct FrameEstimationParams {
  uint64_t seed = 1;
  int ransac_iters = 1000;
  double inlier_threshold_deg = 10.0;
  double min_consensus_fraction = 0.05;
  // Gravity search window around the camera's visual up (-y image axis);
  // the camera is assumed roughly upright.
  double gravity_window_deg = 45.0;
  size_t min_points = 100;
};

/// Estimate the Manhattan frame from point normals. Gravity comes from the
/// dominant upward normal cluster, or from a plane fit to the floor_mask
/// pixels when one is supplied. The horizontal axis is selected by RANSAC
/// over normals perpendicular to gravity; axis3 = gravity x axis2.
/// Deterministic for a fixed seed. Throws DegenerateScene when no
/// horizontal direction reaches the consensus fraction.
ManhattanFrame estimate_frame(
    const PointCloud& cloud,
    const std::optional<ImageU8>& floor_mask = std::nullopt,
    const FrameEstimationParams& params = {});

}  // namespace aff
