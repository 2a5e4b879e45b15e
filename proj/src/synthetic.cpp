#include "aff/synthetic.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "aff/errors.hpp"
#include "aff/rng.hpp"

namespace aff {

namespace {
constexpr double kShellThickness = 0.3;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace

std::vector<SceneBox> SceneSpec::solids() const {
  std::vector<SceneBox> out;
  const double t = kShellThickness;
  const double rx = room.x(), ry = room.y(), rz = room.z();
  out.push_back({{-t, -t, -t}, {rx + 2 * t, ry + 2 * t, t}, "floor"});
  out.push_back({{-t, -t, 0}, {t, ry + 2 * t, rz}, "wall"});
  out.push_back({{rx, -t, 0}, {t, ry + 2 * t, rz}, "wall"});
  out.push_back({{-t, -t, 0}, {rx + 2 * t, t, rz}, "wall"});
  out.push_back({{-t, ry, 0}, {rx + 2 * t, t, rz}, "wall"});
  if (ceiling)
    out.push_back({{-t, -t, rz}, {rx + 2 * t, ry + 2 * t, t}, "ceiling"});
  out.insert(out.end(), boxes.begin(), boxes.end());
  return out;
}

Eigen::Matrix3d SceneSpec::camera_rotation() const {
  const double yaw = yaw_deg * M_PI / 180.0;
  const double pitch = pitch_deg * M_PI / 180.0;
  const Eigen::Vector3d forward(std::cos(yaw) * std::cos(pitch),
                                std::sin(yaw) * std::cos(pitch),
                                -std::sin(pitch));
  const Eigen::Vector3d right(std::sin(yaw), -std::cos(yaw), 0.0);
  const Eigen::Vector3d down = forward.cross(right);
  Eigen::Matrix3d R;
  R.row(0) = right;
  R.row(1) = down;
  R.row(2) = forward;
  return R;
}

// --------------------------------------------------------------------------
// Scene text format: one primitive per line.
//   room X Y Z
//   ceiling on|off
//   image W H FX [FY CX CY]
//   camera PX PY PZ YAW PITCH
//   noise SIGMA DROPOUT SEED
//   box TAG MINX MINY MINZ SX SY SZ
// '#' starts a comment.

SceneSpec parse_scene(const std::string& text) {
  SceneSpec spec;
  spec.intrinsics = CameraIntrinsics::make_default(120, 90);
  std::istringstream stream(text);
  std::string line;
  bool fx_explicit = false;
  while (std::getline(stream, line)) {
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string kw;
    if (!(ls >> kw)) continue;
    if (kw == "room") {
      ls >> spec.room.x() >> spec.room.y() >> spec.room.z();
    } else if (kw == "ceiling") {
      std::string v;
      ls >> v;
      spec.ceiling = (v == "on" || v == "1" || v == "true");
    } else if (kw == "image") {
      int w = 0, h = 0;
      double fx = 0;
      ls >> w >> h >> fx;
      spec.intrinsics.width = w;
      spec.intrinsics.height = h;
      spec.intrinsics.fx = fx;
      spec.intrinsics.fy = fx;
      spec.intrinsics.cx = w / 2.0;
      spec.intrinsics.cy = h / 2.0;
      double fy, cx, cy;
      if (ls >> fy >> cx >> cy) {
        spec.intrinsics.fy = fy;
        spec.intrinsics.cx = cx;
        spec.intrinsics.cy = cy;
      }
      fx_explicit = true;
    } else if (kw == "camera") {
      ls >> spec.cam_pos.x() >> spec.cam_pos.y() >> spec.cam_pos.z() >>
          spec.yaw_deg >> spec.pitch_deg;
    } else if (kw == "noise") {
      ls >> spec.noise.sigma >> spec.noise.dropout >> spec.noise.seed;
    } else if (kw == "box") {
      SceneBox b;
      ls >> b.tag >> b.min.x() >> b.min.y() >> b.min.z() >> b.size.x() >>
          b.size.y() >> b.size.z();
      spec.boxes.push_back(b);
    } else {
      throw IoError("unknown scene keyword: " + kw);
    }
  }
  if (!fx_explicit && spec.intrinsics.width == 0)
    throw IoError("scene is missing an image line");
  return spec;
}

std::string scene_to_text(const SceneSpec& s) {
  std::ostringstream os;
  os << "room " << fmt_double(s.room.x()) << ' ' << fmt_double(s.room.y())
     << ' ' << fmt_double(s.room.z()) << '\n';
  os << "ceiling " << (s.ceiling ? "on" : "off") << '\n';
  os << "image " << s.intrinsics.width << ' ' << s.intrinsics.height << ' '
     << fmt_double(s.intrinsics.fx) << ' ' << fmt_double(s.intrinsics.fy)
     << ' ' << fmt_double(s.intrinsics.cx) << ' '
     << fmt_double(s.intrinsics.cy) << '\n';
  os << "camera " << fmt_double(s.cam_pos.x()) << ' '
     << fmt_double(s.cam_pos.y()) << ' ' << fmt_double(s.cam_pos.z()) << ' '
     << fmt_double(s.yaw_deg) << ' ' << fmt_double(s.pitch_deg) << '\n';
  os << "noise " << fmt_double(s.noise.sigma) << ' '
     << fmt_double(s.noise.dropout) << ' ' << s.noise.seed << '\n';
  for (const auto& b : s.boxes)
    os << "box " << b.tag << ' ' << fmt_double(b.min.x()) << ' '
       << fmt_double(b.min.y()) << ' ' << fmt_double(b.min.z()) << ' '
       << fmt_double(b.size.x()) << ' ' << fmt_double(b.size.y()) << ' '
       << fmt_double(b.size.z()) << '\n';
  return os.str();
}

SceneSpec load_scene(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open scene " + path);
  std::stringstream buf;
  buf << is.rdbuf();
  return parse_scene(buf.str());
}

void save_scene(const SceneSpec& spec, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write scene " + path);
  os << scene_to_text(spec);
}

// --------------------------------------------------------------------------
// Ray casting

namespace {

struct RayHit {
  double t = std::numeric_limits<double>::infinity();
  int box = -1;
  int axis = 0;  // entry face axis
  int sign = 0;  // entry from the -face (-1) or +face (+1)
  bool hit() const { return box >= 0; }
};

RayHit intersect_solids(const std::vector<SceneBox>& solids,
                        const Eigen::Vector3d& origin,
                        const Eigen::Vector3d& dir) {
  RayHit best;
  for (size_t b = 0; b < solids.size(); ++b) {
    const Eigen::Vector3d lo = solids[b].min;
    const Eigen::Vector3d hi = solids[b].max();
    double t0 = 1e-9, t1 = best.t;
    int axis = -1, sign = 0;
    bool ok = true;
    for (int a = 0; a < 3 && ok; ++a) {
      if (std::abs(dir[a]) < 1e-15) {
        if (origin[a] < lo[a] || origin[a] > hi[a]) ok = false;
        continue;
      }
      double ta = (lo[a] - origin[a]) / dir[a];
      double tb = (hi[a] - origin[a]) / dir[a];
      int s = dir[a] > 0 ? -1 : 1;
      if (ta > tb) std::swap(ta, tb);
      if (ta > t0) {
        t0 = ta;
        axis = a;
        sign = s;
      }
      t1 = std::min(t1, tb);
      if (t0 > t1) ok = false;
    }
    if (ok && t0 < best.t && axis >= 0) {
      best.t = t0;
      best.box = static_cast<int>(b);
      best.axis = axis;
      best.sign = sign;
    }
  }
  return best;
}

bool inside_any(const std::vector<SceneBox>& solids,
                const Eigen::Vector3d& q) {
  for (const auto& b : solids) {
    const Eigen::Vector3d hi = b.max();
    if (q.x() >= b.min.x() && q.x() <= hi.x() && q.y() >= b.min.y() &&
        q.y() <= hi.y() && q.z() >= b.min.z() && q.z() <= hi.z())
      return true;
  }
  return false;
}

}  // namespace

DepthMap render_depth(const SceneSpec& spec) {
  const auto solids = spec.solids();
  if (inside_any(solids, spec.cam_pos))
    throw CameraInsideGeometry("camera position intersects scene geometry");

  const CameraIntrinsics& k = spec.intrinsics;
  const Eigen::Matrix3d Rwc = spec.camera_rotation().transpose();

  DepthMap depth;
  depth.intrinsics = k;
  depth.depths = ImageF(k.width, k.height, kMissingDepth);

  for (int y = 0; y < k.height; ++y) {
    for (int x = 0; x < k.width; ++x) {
      // Unnormalized direction with unit camera-z so the ray parameter is
      // exactly the depth.
      const Eigen::Vector3d dir_cam((x - k.cx) / k.fx, (y - k.cy) / k.fy, 1.0);
      const Eigen::Vector3d dir = Rwc * dir_cam;
      const RayHit hit = intersect_solids(solids, spec.cam_pos, dir);
      if (hit.hit()) depth.depths.at(x, y) = static_cast<float>(hit.t);
    }
  }

  if (spec.noise.sigma > 0 || spec.noise.dropout > 0) {
    Rng rng(spec.noise.seed);
    for (int y = 0; y < k.height; ++y)
      for (int x = 0; x < k.width; ++x) {
        const double u = rng.uniform();
        const double n = rng.normal();
        float& d = depth.depths.at(x, y);
        if (d == kMissingDepth) continue;
        if (u < spec.noise.dropout) {
          d = kMissingDepth;
        } else if (spec.noise.sigma > 0) {
          d = static_cast<float>(
              std::max(0.05, d + spec.noise.sigma * n));
        }
      }
  }
  return depth;
}

namespace {

Rgb category_color(const std::string& tag) {
  if (tag == "floor") return {112, 130, 104};
  if (tag == "wall") return {198, 198, 192};
  if (tag == "ceiling") return {235, 235, 232};
  if (tag == "table") return {152, 102, 58};
  if (tag == "bed") return {72, 92, 164};
  if (tag == "shelf") return {94, 62, 40};
  if (tag == "crate") return {204, 132, 58};
  return {160, 160, 160};
}

}  // namespace

ImageRgb render_rgb(const SceneSpec& spec) {
  const auto solids = spec.solids();
  if (inside_any(solids, spec.cam_pos))
    throw CameraInsideGeometry("camera position intersects scene geometry");

  const CameraIntrinsics& k = spec.intrinsics;
  const Eigen::Matrix3d Rwc = spec.camera_rotation().transpose();
  const Eigen::Vector3d light = Eigen::Vector3d(0.35, 0.25, 0.9).normalized();

  ImageRgb img(k.width, k.height, Rgb{8, 8, 12});
  Rng rng(spec.noise.seed + 0x9e3779b9u);
  for (int y = 0; y < k.height; ++y)
    for (int x = 0; x < k.width; ++x) {
      const Eigen::Vector3d dir_cam((x - k.cx) / k.fx, (y - k.cy) / k.fy, 1.0);
      const Eigen::Vector3d dir = (Rwc * dir_cam).normalized();
      const RayHit hit = intersect_solids(solids, spec.cam_pos, dir);
      const double jitter = rng.uniform();  // one draw per pixel, always
      if (!hit.hit()) continue;
      Eigen::Vector3d n = Eigen::Vector3d::Zero();
      n[hit.axis] = hit.sign;
      const Rgb base = category_color(solids[hit.box].tag);
      const double shade = 0.62 + 0.38 * std::max(0.0, n.dot(light));
      const double noise = (jitter - 0.5) * 14.0;
      auto ch = [&](uint8_t c) {
        const double v = c * shade + noise;
        return static_cast<uint8_t>(v < 0 ? 0 : (v > 255 ? 255 : v + 0.5));
      };
      img.at(x, y) = {ch(base.r), ch(base.g), ch(base.b)};
    }
  return img;
}

ImageU8 render_floor_mask(const SceneSpec& spec) {
  const auto solids = spec.solids();
  const CameraIntrinsics& k = spec.intrinsics;
  const Eigen::Matrix3d Rwc = spec.camera_rotation().transpose();
  ImageU8 mask(k.width, k.height, 0);
  for (int y = 0; y < k.height; ++y)
    for (int x = 0; x < k.width; ++x) {
      const Eigen::Vector3d dir_cam((x - k.cx) / k.fx, (y - k.cy) / k.fy, 1.0);
      const Eigen::Vector3d dir = Rwc * dir_cam;
      const RayHit hit = intersect_solids(solids, spec.cam_pos, dir);
      if (hit.hit() && solids[hit.box].tag == "floor") mask.at(x, y) = 1;
    }
  return mask;
}

// --------------------------------------------------------------------------
// Analytic oracle.
//
// Classifies what the pipeline can know about each criteria cell directly
// from the exact geometry: a cell is known-occupied when it contains
// observed surface or lies in a column assumed-supported beneath an
// observed upward face, known-free when the camera saw through it, and
// unknown otherwise. Labels are evaluated for an ensemble of sub-voxel
// lattice alignments; pixels whose label is alignment-dependent form the
// abstention band.

namespace {

class OracleEvaluator {
 public:
  OracleEvaluator(const SceneSpec& spec, const CameraIntrinsics& k,
                  double voxel_size, const LabelThresholds& th)
      : solids_(spec.solids()), k_(k), voxel_(voxel_size), th_(th),
        cam_(spec.cam_pos), Rcw_(spec.camera_rotation()) {
    step_ = voxel_ / 4.0;
    const double pad = 2.0;
    lat_origin_ = Eigen::Vector3d(-pad, -pad, -pad);
    const Eigen::Vector3d extent =
        spec.room + Eigen::Vector3d::Constant(2 * pad);
    for (int a = 0; a < 3; ++a)
      lat_dims_[a] = static_cast<int>(std::ceil(extent[a] / step_)) + 2;
    const size_t n = static_cast<size_t>(lat_dims_.x()) * lat_dims_.y() *
                     lat_dims_.z();
    t_first_.assign(n, -1.0f);
    filled_.assign(n, -1);
    for (auto& m : state_) m.assign(n, -1);
  }

  enum State : int8_t { kUnknown = 0, kFree = 1, kOccupied = 2 };

  /// Pipeline-equivalent knowledge state of the cell centred at q.
  State cell_state(const Eigen::Vector3d& q, int inset_level) {
    const int64_t idx = lattice_index(q);
    if (idx >= 0) {
      int8_t& memo = state_[inset_level][static_cast<size_t>(idx)];
      if (memo < 0) memo = static_cast<int8_t>(compute_state(q, inset_level));
      return static_cast<State>(memo);
    }
    return compute_state(q, inset_level);
  }

  bool in_frustum(const Eigen::Vector3d& q, int inset_level) const {
    static constexpr double kInset[3] = {0.0, 1.0, -1.0};
    const Eigen::Vector3d pc = Rcw_ * (q - cam_);
    if (pc.z() < 0.05) return false;
    const double b = kInset[inset_level];
    const double u = k_.fx * pc.x() / pc.z() + k_.cx;
    const double v = k_.fy * pc.y() / pc.z() + k_.cy;
    return u >= -0.5 + b && u <= k_.width - 0.5 - b && v >= -0.5 + b &&
           v <= k_.height - 0.5 - b;
  }

  const std::vector<SceneBox>& solids() const { return solids_; }

 private:
  int64_t lattice_index(const Eigen::Vector3d& q) const {
    Eigen::Vector3i c;
    for (int a = 0; a < 3; ++a) {
      const double g = (q[a] - lat_origin_[a]) / step_;
      const int i = static_cast<int>(std::lround(g));
      if (i < 0 || i >= lat_dims_[a]) return -1;
      c[a] = i;
    }
    return (static_cast<int64_t>(c.z()) * lat_dims_.y() + c.y()) *
               lat_dims_.x() +
           c.x();
  }

  // First-hit distance along the camera ray through q (unit parameter).
  double t_first(const Eigen::Vector3d& q) {
    const int64_t idx = lattice_index(q);
    if (idx >= 0 && t_first_[static_cast<size_t>(idx)] >= 0.0f)
      return t_first_[static_cast<size_t>(idx)];
    const Eigen::Vector3d d = (q - cam_).normalized();
    const RayHit hit = intersect_solids(solids_, cam_, d);
    const double t =
        hit.hit() ? hit.t : std::numeric_limits<double>::infinity();
    if (idx >= 0)
      t_first_[static_cast<size_t>(idx)] = static_cast<float>(
          std::min(t, 1e9));
    return t;
  }

  bool visible_point(const Eigen::Vector3d& q, int inset_level) {
    if (!in_frustum(q, inset_level)) return false;
    const double tq = (q - cam_).norm();
    return t_first(q) >= tq - 1e-5;
  }

  // True when a surface point (on a solid boundary) is directly observed.
  bool surface_visible(const Eigen::Vector3d& p, int inset_level) {
    if (!in_frustum(p, inset_level)) return false;
    const double tp = (p - cam_).norm();
    const Eigen::Vector3d d = (p - cam_) / tp;
    const RayHit hit = intersect_solids(solids_, cam_, d);
    return hit.hit() && hit.t >= tp - 2e-4;
  }

  // Column-fill mirror: q is assumed-occupied when the nearest visible
  // upward face above it has no observed free air in between.
  bool filled(const Eigen::Vector3d& q) {
    const int64_t idx = lattice_index(q);
    if (idx >= 0 && filled_[static_cast<size_t>(idx)] >= 0)
      return filled_[static_cast<size_t>(idx)] > 0;
    const bool result = compute_filled(q);
    if (idx >= 0) filled_[static_cast<size_t>(idx)] = result ? 1 : 0;
    return result;
  }

  bool compute_filled(const Eigen::Vector3d& q) {
    double best_top = std::numeric_limits<double>::infinity();
    for (const auto& b : solids_) {
      const Eigen::Vector3d hi = b.max();
      if (q.x() < b.min.x() || q.x() > hi.x() || q.y() < b.min.y() ||
          q.y() > hi.y())
        continue;
      const double top = hi.z();
      if (top < q.z() - 1e-9 || top >= best_top) continue;
      if (surface_visible({q.x(), q.y(), top}, 0)) best_top = top;
    }
    if (!std::isfinite(best_top)) return false;
    // Walk the open segment; observed free air stops the fill.
    for (double z = q.z() + step_; z < best_top - step_ * 0.5; z += step_) {
      const Eigen::Vector3d s(q.x(), q.y(), z);
      if (!inside_any(solids_, s) && visible_point(s, 0)) return false;
    }
    return true;
  }

  State compute_state(const Eigen::Vector3d& q, int inset_level) {
    // Cells containing directly observed surface.
    for (const auto& b : solids_) {
      const Eigen::Vector3d hi = b.max();
      Eigen::Vector3d p;
      bool inside = true;
      for (int a = 0; a < 3; ++a) {
        p[a] = std::clamp(q[a], b.min[a], hi[a]);
        inside = inside && q[a] >= b.min[a] && q[a] <= hi[a];
      }
      if (inside) {
        // Project to the nearest face.
        double best = std::numeric_limits<double>::infinity();
        int axis = 0;
        double face = 0;
        for (int a = 0; a < 3; ++a) {
          if (q[a] - b.min[a] < best) {
            best = q[a] - b.min[a];
            axis = a;
            face = b.min[a];
          }
          if (hi[a] - q[a] < best) {
            best = hi[a] - q[a];
            axis = a;
            face = hi[a];
          }
        }
        p = q;
        p[axis] = face;
      }
      if ((q - p).norm() <= voxel_ / 2.0 && surface_visible(p, inset_level))
        return kOccupied;
    }

    if (inside_any(solids_, q)) {
      // One-voxel shell behind the observed entry face.
      if (in_frustum(q, inset_level)) {
        const double tq = (q - cam_).norm();
        if (tq - t_first(q) <= voxel_) return kOccupied;
      }
      return filled(q) ? kOccupied : kUnknown;
    }
    if (visible_point(q, inset_level)) return kFree;
    return filled(q) ? kOccupied : kUnknown;
  }

  std::vector<SceneBox> solids_;
  CameraIntrinsics k_;
  double voxel_;
  LabelThresholds th_;
  Eigen::Vector3d cam_;
  Eigen::Matrix3d Rcw_;

  double step_;
  Eigen::Vector3d lat_origin_;
  Eigen::Vector3i lat_dims_ = Eigen::Vector3i::Zero();
  std::vector<float> t_first_;
  std::vector<int8_t> filled_;
  std::vector<int8_t> state_[3];
};

}  // namespace

OracleResult oracle_affordances(const SceneSpec& spec,
                                const std::vector<PoseFilter>& bank,
                                const CameraIntrinsics& k, double voxel_size,
                                const LabelThresholds& th) {
  OracleEvaluator eval(spec, k, voxel_size, th);
  const auto& solids = eval.solids();
  const Eigen::Matrix3d Rwc = spec.camera_rotation().transpose();
  const double v = voxel_size;

  OracleResult result;
  result.maps.resize(bank.size());
  result.margin.resize(bank.size());
  for (size_t f = 0; f < bank.size(); ++f) {
    result.maps[f].affordance = bank[f].name;
    result.maps[f].source = "generated";
    result.maps[f].labels =
        Image<TriState>(k.width, k.height, TriState::Unknown);
    result.margin[f] = ImageU8(k.width, k.height, 0);
  }

  // Nine sub-voxel lattice alignments; disagreement marks the margin band.
  std::vector<Eigen::Vector3d> jitters;
  jitters.emplace_back(0, 0, 0);
  const double jq = v / 4.0;
  for (int sx : {-1, 1})
    for (int sy : {-1, 1})
      for (int sz : {-1, 1}) jitters.emplace_back(sx * jq, sy * jq, sz * jq);

  struct PixelLabels {
    std::array<TriState, 8> label;
    std::array<bool, 8> margin;
  };
  std::unordered_map<int64_t, PixelLabels> anchor_cache;

  auto evaluate_anchor = [&](const Eigen::Vector3d& h) {
    PixelLabels out{};
    for (size_t f = 0; f < bank.size(); ++f) {
      const PoseFilter& filter = bank[f];
      const double total = static_cast<double>(filter.criteria_count());
      const int n_rot = filter.orientation_sensitive ? 4 : 1;
      TriState first = TriState::Unknown;
      bool disagree = false;
      for (size_t j = 0; j < jitters.size(); ++j) {
        const int inset = static_cast<int>(j % 3);
        Eigen::Vector3d anchor;
        for (int a = 0; a < 3; ++a) {
          const double phase = jitters[j][a];
          anchor[a] =
              phase + v * std::floor((h[a] - phase) / v) + v / 2.0;
        }
        double best = -1.0, best_unk = 0.0;
        for (int r = 0; r < n_rot; ++r) {
          int sat = 0, unk = 0;
          for (const auto& off : filter.freespace_rot[r]) {
            const Eigen::Vector3d q = anchor + off.cast<double>() * v;
            const auto s = eval.cell_state(q, inset);
            if (s == OracleEvaluator::kFree) ++sat;
            else if (s == OracleEvaluator::kUnknown) ++unk;
          }
          for (const auto& off : filter.support_rot[r]) {
            const Eigen::Vector3d q = anchor + off.cast<double>() * v;
            const auto s = eval.cell_state(q, inset);
            if (s == OracleEvaluator::kOccupied) ++sat;
            else if (s == OracleEvaluator::kUnknown) ++unk;
          }
          const double resp = sat / total;
          if (resp > best) {
            best = resp;
            best_unk = unk / total;
          }
        }
        TriState label = TriState::Unknown;
        if (best >= th.t_hi) label = TriState::Supports;
        else if (best <= th.t_lo && best_unk <= th.u_max)
          label = TriState::Not;
        if (j == 0) first = label;
        else if (label != first) disagree = true;
      }
      out.label[f] = disagree ? TriState::Unknown : first;
      out.margin[f] = disagree;
    }
    return out;
  };

  for (int y = 0; y < k.height; ++y) {
    for (int x = 0; x < k.width; ++x) {
      const Eigen::Vector3d dir_cam((x - k.cx) / k.fx, (y - k.cy) / k.fy, 1.0);
      const Eigen::Vector3d dir = (Rwc * dir_cam).normalized();
      const RayHit hit = intersect_solids(solids, spec.cam_pos, dir);
      if (!hit.hit()) continue;
      const Eigen::Vector3d h = spec.cam_pos + hit.t * dir;

      int64_t key = 0;
      for (int a = 0; a < 3; ++a)
        key = key * 1000003 +
              static_cast<int64_t>(std::floor(h[a] / (v / 4.0)));
      auto it = anchor_cache.find(key);
      if (it == anchor_cache.end())
        it = anchor_cache.emplace(key, evaluate_anchor(h)).first;
      for (size_t f = 0; f < bank.size(); ++f) {
        result.maps[f].labels.at(x, y) = it->second.label[f];
        result.margin[f].at(x, y) = it->second.margin[f] ? 1 : 0;
      }
    }
  }
  return result;
}

// --------------------------------------------------------------------------
// Scene suites

namespace {

bool overlaps(const SceneBox& a, const SceneBox& b, double gap) {
  const Eigen::Vector3d alo = a.min, ahi = a.max();
  const Eigen::Vector3d blo = b.min, bhi = b.max();
  return alo.x() - gap < bhi.x() && blo.x() - gap < ahi.x() &&
         alo.y() - gap < bhi.y() && blo.y() - gap < ahi.y();
}

// Wardrobe with an open cubby at the bottom facing `facing` (0:+x, 1:-x,
// 2:+y, 3:-y): five slabs around a small cavity.
void add_wardrobe(std::vector<SceneBox>& boxes, const Eigen::Vector3d& min,
                  const Eigen::Vector3d& size, int facing) {
  const double wall = 0.12;
  const double cav_h = 0.38;
  const double cav_bottom = 0.1;
  const Eigen::Vector3d hi = min + size;
  // bottom slab under the cavity, top block above it
  boxes.push_back({{min.x(), min.y(), min.z()},
                   {size.x(), size.y(), cav_bottom},
                   "shelf"});
  boxes.push_back({{min.x(), min.y(), min.z() + cav_bottom + cav_h},
                   {size.x(), size.y(),
                    size.z() - cav_bottom - cav_h},
                   "shelf"});
  // two side slabs + back slab around the cavity layer
  const double z0 = min.z() + cav_bottom;
  if (facing <= 1) {
    boxes.push_back({{min.x(), min.y(), z0}, {size.x(), wall, cav_h}, "shelf"});
    boxes.push_back(
        {{min.x(), hi.y() - wall, z0}, {size.x(), wall, cav_h}, "shelf"});
    const double bx = facing == 0 ? min.x() : hi.x() - wall;
    boxes.push_back({{bx, min.y() + wall, z0},
                     {wall, size.y() - 2 * wall, cav_h},
                     "shelf"});
  } else {
    boxes.push_back({{min.x(), min.y(), z0}, {wall, size.y(), cav_h}, "shelf"});
    boxes.push_back(
        {{hi.x() - wall, min.y(), z0}, {wall, size.y(), cav_h}, "shelf"});
    const double by = facing == 2 ? min.y() : hi.y() - wall;
    boxes.push_back({{min.x() + wall, by, z0},
                     {size.x() - 2 * wall, wall, cav_h},
                     "shelf"});
  }
}

SceneSpec make_room_scene(Rng& rng, int img_w, int img_h, double fx) {
  SceneSpec spec;
  spec.room = {rng.uniform(4.8, 6.4), rng.uniform(4.4, 6.0),
               rng.uniform(2.6, 3.0)};
  spec.ceiling = true;
  spec.intrinsics = CameraIntrinsics::make_default(img_w, img_h);
  spec.intrinsics.fx = fx;
  spec.intrinsics.fy = fx;

  // High vantage with a wide vertical FOV so the rays sweep both the
  // floor and the space above head height; the freespace criteria can
  // only be confirmed where the camera actually looked.
  spec.cam_pos = {rng.uniform(0.55, 1.0), rng.uniform(0.55, 1.0),
                  rng.uniform(1.95, std::min(2.45, spec.room.z() - 0.25))};
  const Eigen::Vector2d to_center(spec.room.x() / 2 - spec.cam_pos.x(),
                                  spec.room.y() / 2 - spec.cam_pos.y());
  spec.yaw_deg = std::atan2(to_center.y(), to_center.x()) * 180.0 / M_PI +
                 rng.uniform(-8.0, 8.0);
  spec.pitch_deg = rng.uniform(14.0, 24.0);
  spec.noise = {0.0, 0.0, rng.next_u64() % 100000};

  auto try_place = [&](double sx, double sy, double sz,
                       const char* tag) -> bool {
    for (int attempt = 0; attempt < 40; ++attempt) {
      const double x =
          rng.uniform(1.6, std::max(1.7, spec.room.x() - sx - 0.5));
      const double y =
          rng.uniform(1.6, std::max(1.7, spec.room.y() - sy - 0.5));
      SceneBox b{{x, y, 0.0}, {sx, sy, sz}, tag};
      bool ok = true;
      for (const auto& other : spec.boxes)
        if (overlaps(b, other, 0.75)) ok = false;
      if (!ok) continue;
      if (std::string(tag) == "wardrobe") {
        const Eigen::Vector2d c(x + sx / 2, y + sy / 2);
        const Eigen::Vector2d d(spec.cam_pos.x() - c.x(),
                                spec.cam_pos.y() - c.y());
        // Leave the side toward the camera open.
        const int facing = std::abs(d.x()) > std::abs(d.y())
                               ? (d.x() > 0 ? 0 : 1)
                               : (d.y() > 0 ? 2 : 3);
        add_wardrobe(spec.boxes, b.min, b.size, facing);
      } else {
        spec.boxes.push_back(b);
      }
      return true;
    }
    return false;
  };

  // Always one sit-height surface, usually a wardrobe (supplies cubby
  // negatives), sometimes extras.
  if (rng.uniform() < 0.5) {
    try_place(rng.uniform(1.0, 1.6), rng.uniform(0.75, 1.15),
              rng.uniform(0.46, 0.66), "table");
  } else {
    try_place(rng.uniform(1.5, 1.7), rng.uniform(1.9, 2.1),
              rng.uniform(0.42, 0.55), "bed");
  }
  try_place(rng.uniform(0.85, 1.1), rng.uniform(0.62, 0.8),
            rng.uniform(1.9, 2.2), "wardrobe");
  if (rng.uniform() < 0.55)
    try_place(rng.uniform(0.45, 0.7), rng.uniform(0.45, 0.7),
              rng.uniform(0.18, 0.32), "crate");
  if (rng.uniform() < 0.4)
    try_place(rng.uniform(1.0, 1.5), rng.uniform(0.7, 1.0),
              rng.uniform(0.5, 0.72), "table");
  return spec;
}

}  // namespace

std::vector<SceneSpec> make_oracle_suite() {
  Rng rng(20240917);
  std::vector<SceneSpec> out;
  for (int i = 0; i < 20; ++i) out.push_back(make_room_scene(rng, 120, 90, 62.0));
  return out;
}

std::vector<SceneSpec> make_training_suite(int count, uint64_t seed) {
  Rng rng(seed);
  std::vector<SceneSpec> out;
  for (int i = 0; i < count; ++i)
    out.push_back(make_room_scene(rng, 96, 72, 50.0));
  return out;
}

}  // namespace aff
