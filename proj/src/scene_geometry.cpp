#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>

#include "aff/errors.hpp"
#include "aff/manhattan.hpp"
#include "aff/point_cloud.hpp"
#include "aff/rng.hpp"

namespace aff {

namespace {

constexpr int kNormalRadius = 2;  // 5x5 pixel neighbourhood

Eigen::Vector3d plane_normal(const std::vector<Eigen::Vector3d>& pts) {
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& p : pts) mean += p;
  mean /= static_cast<double>(pts.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : pts) {
    const Eigen::Vector3d d = p - mean;
    cov += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
  return es.eigenvectors().col(0);  // smallest eigenvalue
}

}  // namespace

PointCloud backproject(const DepthMap& depth) {
  const CameraIntrinsics& k = depth.intrinsics;
  const int w = depth.width();
  const int h = depth.height();

  PointCloud cloud;
  cloud.image_width = w;
  cloud.image_height = h;

  // Dense point buffer so the normal fit can index by pixel.
  std::vector<Eigen::Vector3d> dense(static_cast<size_t>(w) * h);
  std::vector<uint8_t> valid(static_cast<size_t>(w) * h, 0);
  size_t n_valid = 0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!depth.valid_at(x, y)) continue;
      const double d = depth.depths.at(x, y);
      dense[static_cast<size_t>(y) * w + x] = k.unproject(x, y, d);
      valid[static_cast<size_t>(y) * w + x] = 1;
      ++n_valid;
    }
  if (n_valid == 0) throw AllPixelsMissing("depth map has no valid pixel");

  cloud.points.reserve(n_valid);
  cloud.normals.reserve(n_valid);
  cloud.pixel_index.reserve(n_valid);

  std::vector<Eigen::Vector3d> nbrs;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const size_t idx = static_cast<size_t>(y) * w + x;
      if (!valid[idx]) continue;
      const Eigen::Vector3d& p = dense[idx];

      nbrs.clear();
      for (int dy = -kNormalRadius; dy <= kNormalRadius; ++dy)
        for (int dx = -kNormalRadius; dx <= kNormalRadius; ++dx) {
          const int nx = x + dx, ny = y + dy;
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          const size_t nidx = static_cast<size_t>(ny) * w + nx;
          if (valid[nidx]) nbrs.push_back(dense[nidx]);
        }

      Eigen::Vector3d n;
      if (nbrs.size() >= 3) {
        n = plane_normal(nbrs);
      } else {
        n = -p.normalized();  // lone point: face the camera
      }
      // Orient toward the camera at the origin.
      if (n.dot(p) > 0) n = -n;
      n.normalize();

      cloud.points.push_back(p);
      cloud.normals.push_back(n);
      cloud.pixel_index.push_back(y * w + x);
    }
  }
  return cloud;
}

ManhattanFrame ManhattanFrame::from_axes(const Eigen::Vector3d& gravity_in,
                                         const Eigen::Vector3d& axis2_in) {
  ManhattanFrame f;
  f.gravity = gravity_in.normalized();
  f.axis2 = (axis2_in - axis2_in.dot(f.gravity) * f.gravity).normalized();
  f.axis3 = f.gravity.cross(f.axis2);
  f.rotation.row(0) = f.axis2;
  f.rotation.row(1) = f.axis3;
  f.rotation.row(2) = f.gravity;
  return f;
}

namespace {

// Dominant normal direction among candidates, RANSAC + mean refinement.
Eigen::Vector3d ransac_direction(const std::vector<Eigen::Vector3d>& normals,
                                 const std::vector<int>& candidates,
                                 double inlier_cos, int iters, Rng& rng) {
  int best_count = -1;
  Eigen::Vector3d best = normals[candidates[0]];
  for (int it = 0; it < iters; ++it) {
    const Eigen::Vector3d& c =
        normals[candidates[rng.uniform_index(candidates.size())]];
    int count = 0;
    for (int i : candidates)
      if (std::abs(normals[i].dot(c)) >= inlier_cos) ++count;
    if (count > best_count) {
      best_count = count;
      best = c;
    }
  }
  // Refine as the mean of inliers, sign-aligned with the winner.
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (int i : candidates) {
    const double d = normals[i].dot(best);
    if (std::abs(d) >= inlier_cos) mean += (d >= 0 ? 1.0 : -1.0) * normals[i];
  }
  if (mean.norm() > 1e-12) best = mean.normalized();
  return best;
}

}  // namespace

ManhattanFrame estimate_frame(const PointCloud& cloud,
                              const std::optional<ImageU8>& floor_mask,
                              const FrameEstimationParams& params) {
  if (cloud.size() < params.min_points)
    throw DegenerateScene("too few points for frame estimation");

  Rng rng(params.seed);
  const double inlier_cos =
      std::cos(params.inlier_threshold_deg * M_PI / 180.0);

  // --- gravity ---
  Eigen::Vector3d gravity;
  const Eigen::Vector3d visual_up(0.0, -1.0, 0.0);  // image y points down
  if (floor_mask) {
    std::vector<Eigen::Vector3d> floor_pts;
    for (size_t i = 0; i < cloud.size(); ++i) {
      const int px = cloud.pixel_index[i] % cloud.image_width;
      const int py = cloud.pixel_index[i] / cloud.image_width;
      if (floor_mask->in_bounds(px, py) && floor_mask->at(px, py))
        floor_pts.push_back(cloud.points[i]);
    }
    if (floor_pts.size() < 3)
      throw DegenerateScene("floor mask selects too few points");
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (const auto& p : floor_pts) mean += p;
    mean /= static_cast<double>(floor_pts.size());
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const auto& p : floor_pts) {
      const Eigen::Vector3d d = p - mean;
      cov += d * d.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
    gravity = es.eigenvectors().col(0);
    // The floor lies below the camera; up points from the floor to it.
    if (gravity.dot(-mean) < 0) gravity = -gravity;
  } else {
    const double window_cos =
        std::cos(params.gravity_window_deg * M_PI / 180.0);
    std::vector<int> up_candidates;
    for (size_t i = 0; i < cloud.size(); ++i)
      if (cloud.normals[i].dot(visual_up) >= window_cos)
        up_candidates.push_back(static_cast<int>(i));
    if (up_candidates.size() < params.min_points / 10)
      throw DegenerateScene("no upward normal cluster");
    gravity = ransac_direction(cloud.normals, up_candidates, inlier_cos,
                               params.ransac_iters, rng);
    if (gravity.dot(visual_up) < 0) gravity = -gravity;
  }
  gravity.normalize();

  // --- horizontal axis ---
  // Candidates: normals roughly perpendicular to gravity.
  const double horiz_sin =
      std::sin(params.inlier_threshold_deg * M_PI / 180.0);
  std::vector<int> horiz;
  for (size_t i = 0; i < cloud.size(); ++i)
    if (std::abs(cloud.normals[i].dot(gravity)) <= horiz_sin)
      horiz.push_back(static_cast<int>(i));

  const size_t min_consensus = static_cast<size_t>(
      params.min_consensus_fraction * static_cast<double>(cloud.size()));
  if (horiz.size() < std::max<size_t>(min_consensus, 2))
    throw DegenerateScene("no horizontal normal consensus");

  auto project_horiz = [&](const Eigen::Vector3d& n) {
    Eigen::Vector3d h = n - n.dot(gravity) * gravity;
    const double len = h.norm();
    return len > 1e-12 ? Eigen::Vector3d(h / len) : Eigen::Vector3d::Zero();
  };

  // Score a direction by normals close to any of its four cardinal
  // rotations about gravity (Manhattan assumption).
  auto cardinal_inlier = [&](const Eigen::Vector3d& d,
                             const Eigen::Vector3d& n) {
    const Eigen::Vector3d h = project_horiz(n);
    if (h.isZero()) return false;
    const double a = std::abs(h.dot(d));
    const double b = std::abs(h.dot(gravity.cross(d)));
    return std::max(a, b) >= inlier_cos;
  };

  int best_count = -1;
  Eigen::Vector3d best_dir = Eigen::Vector3d::Zero();
  for (int it = 0; it < params.ransac_iters; ++it) {
    const Eigen::Vector3d d =
        project_horiz(cloud.normals[horiz[rng.uniform_index(horiz.size())]]);
    if (d.isZero()) continue;
    int count = 0;
    for (int i : horiz)
      if (cardinal_inlier(d, cloud.normals[i])) ++count;
    if (count > best_count) {
      best_count = count;
      best_dir = d;
    }
  }
  if (best_count < static_cast<int>(min_consensus) || best_dir.isZero())
    throw DegenerateScene("no horizontal normal consensus");

  // Refine with a circular mean folded to the 90-degree Manhattan period.
  const Eigen::Vector3d ortho = gravity.cross(best_dir);
  double sum_sin = 0, sum_cos = 0;
  for (int i : horiz) {
    if (!cardinal_inlier(best_dir, cloud.normals[i])) continue;
    const Eigen::Vector3d h = project_horiz(cloud.normals[i]);
    const double theta = std::atan2(h.dot(ortho), h.dot(best_dir));
    sum_sin += std::sin(4.0 * theta);
    sum_cos += std::cos(4.0 * theta);
  }
  double mean_theta = 0.25 * std::atan2(sum_sin, sum_cos);
  const Eigen::Vector3d axis2 =
      (std::cos(mean_theta) * best_dir + std::sin(mean_theta) * ortho)
          .normalized();

  return ManhattanFrame::from_axes(gravity, axis2);
}

}  // namespace aff
