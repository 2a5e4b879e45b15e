#pragma once

#include <Eigen/Core>
#include <array>
#include <string>
#include <vector>

#include "aff/voxel_grid.hpp"

namespace aff {

enum class Affordance : int {
  Standing = 0,
  SittingUpright = 1,
  Lying = 2,
  ReachHand = 3,
  ReachFeet = 4,
};

constexpr int kNumAffordances = 5;
const char* to_string(Affordance a);
Affordance affordance_from_string(const std::string& name);
std::array<Affordance, kNumAffordances> all_affordances();

/// Body measurements the pose criteria are derived from (metres).
struct HumanDims {
  double height = 1.8;
  double shoulder_width = 0.5;
  double sitting_height = 0.5;  // seat-to-floor clearance needed for shins
  double sitting_depth = 0.4;   // forward extent of the legs when seated
  double lying_length = 1.8;
  double lying_width = 0.6;
  double reach_radius = 0.7;

  double hand_height() const { return 0.55 * height; }
  double body_standoff() const { return reach_radius - 0.2; }
};

/// Axis-aligned criteria region in metres, relative to the contact point.
/// Intervals are half-open (lo, hi] per axis so template boxes quantize
/// to unambiguous voxel runs.
struct BoxRegion {
  Eigen::Vector3d lo, hi;
};

/// Continuous-space pose criteria: every freespace box must be empty,
/// every support box must contain solid surface, the contact point is the
/// anchor. Shared input for the voxel filter bank and the analytic oracle.
struct PoseTemplate {
  Affordance affordance;
  std::vector<BoxRegion> freespace;
  std::vector<BoxRegion> support;
  bool orientation_sensitive = true;
};

std::vector<PoseTemplate> build_pose_templates(const HumanDims& dims = {});

/// Voxelized pose criteria anchored at the contact cell (0,0,0).
struct PoseFilter {
  Affordance affordance;
  std::string name;
  std::vector<Eigen::Vector3i> freespace_cells;
  std::vector<Eigen::Vector3i> support_cells;
  Eigen::Vector3i contact_joint = Eigen::Vector3i::Zero();
  bool orientation_sensitive = true;

  // Offset sets for the four yaw rotations, precomputed.
  std::array<std::vector<Eigen::Vector3i>, 4> freespace_rot;
  std::array<std::vector<Eigen::Vector3i>, 4> support_rot;

  size_t criteria_count() const {
    return freespace_cells.size() + support_cells.size();
  }
  /// Inclusive cell bounds over every rotation.
  void bounds(Eigen::Vector3i& lo, Eigen::Vector3i& hi) const;
};

/// Rotate a cell offset by k * 90 degrees about the up axis.
inline Eigen::Vector3i rotate_yaw(const Eigen::Vector3i& c, int k) {
  switch (k & 3) {
    case 1: return {-c.y(), c.x(), c.z()};
    case 2: return {-c.x(), -c.y(), c.z()};
    case 3: return {c.y(), -c.x(), c.z()};
    default: return c;
  }
}

/// Quantize the pose templates at the given voxel size. Throws InvalidDims
/// when any criteria box collapses below one voxel.
std::vector<PoseFilter> build_filter_bank(const HumanDims& dims,
                                          double voxel_size);

PoseFilter quantize_template(const PoseTemplate& tpl, double voxel_size);

}  // namespace aff
