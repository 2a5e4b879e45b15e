#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "aff/camera.hpp"
#include "aff/image.hpp"
#include "aff/labeler.hpp"
#include "aff/pose_filter.hpp"

namespace aff {

/// Axis-aligned solid in world coordinates (z up).
struct SceneBox {
  Eigen::Vector3d min = Eigen::Vector3d::Zero();
  Eigen::Vector3d size = Eigen::Vector3d::Zero();
  std::string tag;  // floor / wall / ceiling / table / bed / shelf / ...

  Eigen::Vector3d max() const { return min + size; }
};

struct NoiseModel {
  double sigma = 0.0;        // metres, additive gaussian
  double dropout = 0.0;      // probability a pixel goes missing
  uint64_t seed = 1;
};

/// Box-and-plane room with a pinhole camera inside. The room shell
/// (floor, walls, optional ceiling) is generated from `room`; `boxes`
/// holds the furniture. World frame: z up, room interior starts at the
/// origin.
struct SceneSpec {
  Eigen::Vector3d room = {6.0, 5.0, 2.8};
  bool ceiling = true;
  std::vector<SceneBox> boxes;

  Eigen::Vector3d cam_pos = {0.8, 0.8, 2.0};
  double yaw_deg = 45.0;    // about z, 0 faces +x
  double pitch_deg = 30.0;  // positive looks down

  CameraIntrinsics intrinsics = CameraIntrinsics::make_default(120, 90);
  NoiseModel noise;

  /// Furniture plus the room shell slabs.
  std::vector<SceneBox> solids() const;

  /// Camera rotation: rows are (right, down, forward) in world coords.
  Eigen::Matrix3d camera_rotation() const;
};

/// One primitive per line, documented in the repo. Round-trips exactly.
SceneSpec parse_scene(const std::string& text);
std::string scene_to_text(const SceneSpec& spec);
SceneSpec load_scene(const std::string& path);
void save_scene(const SceneSpec& spec, const std::string& path);

/// Exact ray-box depth per pixel, then optional noise and dropout.
/// Throws CameraInsideGeometry when the camera sits inside a solid.
DepthMap render_depth(const SceneSpec& spec);

/// Procedural shaded color image (flat per-category colors, face shading,
/// seeded pixel noise) for training the appearance-based predictors.
ImageRgb render_rgb(const SceneSpec& spec);

/// Ground-truth pixel mask of floor-tagged surfaces (useful as the
/// optional floor input of the label generator).
ImageU8 render_floor_mask(const SceneSpec& spec);

struct OracleResult {
  std::vector<AffordanceMap> maps;   // bank order
  std::vector<ImageU8> margin;       // 1 = within the abstention band
};

/// Analytic affordance labels: evaluates the filter-bank criteria cells
/// against the exact scene geometry and an analytic visibility model
/// (no voxel grid is built). Pixels whose label changes under sub-voxel
/// re-alignment of the criteria lattice are marked Unknown and flagged in
/// the margin mask, so comparisons against the discretized pipeline skip
/// the band around decision boundaries.
OracleResult oracle_affordances(const SceneSpec& spec,
                                const std::vector<PoseFilter>& bank,
                                const CameraIntrinsics& intrinsics,
                                double voxel_size,
                                const LabelThresholds& thresholds = {});

/// Fixed 20-scene noise-free verification suite.
std::vector<SceneSpec> make_oracle_suite();

/// Procedurally varied scenes for training/evaluating the predictors.
std::vector<SceneSpec> make_training_suite(int count, uint64_t seed);

}  // namespace aff
