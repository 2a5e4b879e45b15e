#include "aff/pose_filter.hpp"

#include <cmath>
#include <set>

#include "aff/errors.hpp"

namespace aff {

const char* to_string(Affordance a) {
  switch (a) {
    case Affordance::Standing: return "standing";
    case Affordance::SittingUpright: return "sitting_upright";
    case Affordance::Lying: return "lying";
    case Affordance::ReachHand: return "reach_hand";
    case Affordance::ReachFeet: return "reach_feet";
  }
  return "unknown";
}

Affordance affordance_from_string(const std::string& name) {
  for (Affordance a : all_affordances())
    if (name == to_string(a)) return a;
  throw PipelineError("unknown affordance: " + name);
}

std::array<Affordance, kNumAffordances> all_affordances() {
  return {Affordance::Standing, Affordance::SittingUpright, Affordance::Lying,
          Affordance::ReachHand, Affordance::ReachFeet};
}

namespace {

BoxRegion box(double x0, double x1, double y0, double y1, double z0,
              double z1) {
  return {{x0, y0, z0}, {x1, y1, z1}};
}

BoxRegion translate(const BoxRegion& b, const Eigen::Vector3d& t) {
  return {b.lo + t, b.hi + t};
}

// One-voxel-scale box marking the contact cell itself.
BoxRegion contact_box() { return box(-0.05, 0.05, -0.05, 0.05, -0.05, 0.05); }

}  // namespace

std::vector<PoseTemplate> build_pose_templates(const HumanDims& d) {
  std::vector<PoseTemplate> out;
  const double hw = d.shoulder_width / 2.0;

  {
    // Standing: solid contact underfoot, body-sized free column above.
    PoseTemplate t;
    t.affordance = Affordance::Standing;
    t.orientation_sensitive = false;
    t.support = {contact_box()};
    t.freespace = {box(-hw, hw, -hw, hw, 0.0, d.height)};
    out.push_back(std::move(t));
  }
  {
    // Sitting upright, facing +y: seat under the pelvis, torso room above,
    // leg room forward and below the seat so only edges of raised
    // surfaces qualify.
    PoseTemplate t;
    t.affordance = Affordance::SittingUpright;
    t.support = {contact_box()};
    t.freespace = {
        box(-hw, hw, -0.15, 0.15, 0.0, d.height / 2.0),              // torso
        box(-0.15, 0.15, 0.05, d.sitting_depth + 0.05, 0.0, 0.25),   // thighs
        box(-0.15, 0.15, d.sitting_depth - 0.05, d.sitting_depth + 0.25,
            -d.sitting_height + 0.1, 0.05),                          // shins
    };
    out.push_back(std::move(t));
  }
  {
    // Lying, long axis +y: full-footprint support slab plus a thin free
    // layer above it.
    PoseTemplate t;
    t.affordance = Affordance::Lying;
    const double lw = d.lying_width / 2.0;
    const double ll = d.lying_length / 2.0;
    t.support = {box(-lw, lw, -ll, ll, -0.05, 0.05)};
    t.freespace = {box(-lw, lw, -ll, ll, 0.05, 0.35)};
    out.push_back(std::move(t));
  }

  // Reaching: a standing body displaced from the touched point, with an
  // arm corridor between. The same geometry is anchored either at the
  // hand (what can be touched) or at the feet (where one can stand and
  // touch).
  const double hh = d.hand_height();
  const double bd = d.body_standoff();
  const BoxRegion reach_floor =
      box(-0.05, 0.05, -bd - 0.05, -bd + 0.05, -hh - 0.05, -hh + 0.05);
  const BoxRegion reach_body =
      box(-hw, hw, -bd - 0.15, -bd + 0.15, -hh, -hh + d.height);
  const BoxRegion reach_arm =
      box(-0.15, 0.15, -bd + 0.15, -0.05, 0.0, 0.2);
  {
    PoseTemplate t;
    t.affordance = Affordance::ReachHand;
    t.support = {contact_box(), reach_floor};
    t.freespace = {reach_body, reach_arm};
    out.push_back(std::move(t));
  }
  {
    PoseTemplate t;
    t.affordance = Affordance::ReachFeet;
    const Eigen::Vector3d shift(0.0, bd, hh);
    t.support = {contact_box(), translate(contact_box(), shift)};
    t.freespace = {translate(reach_body, shift), translate(reach_arm, shift)};
    out.push_back(std::move(t));
  }
  return out;
}

namespace {

struct CellLess {
  bool operator()(const Eigen::Vector3i& a, const Eigen::Vector3i& b) const {
    if (a.z() != b.z()) return a.z() < b.z();
    if (a.y() != b.y()) return a.y() < b.y();
    return a.x() < b.x();
  }
};

// Cells whose centre k*v lies in the half-open interval (lo, hi].
void axis_range(double lo, double hi, double v, int& c0, int& c1) {
  const double eps = 1e-9;
  c0 = static_cast<int>(std::floor(lo / v + eps)) + 1;
  c1 = static_cast<int>(std::floor(hi / v + eps));
}

void quantize_box(const BoxRegion& b, double v,
                  std::set<Eigen::Vector3i, CellLess>& cells) {
  int x0, x1, y0, y1, z0, z1;
  axis_range(b.lo.x(), b.hi.x(), v, x0, x1);
  axis_range(b.lo.y(), b.hi.y(), v, y0, y1);
  axis_range(b.lo.z(), b.hi.z(), v, z0, z1);
  if (x0 > x1 || y0 > y1 || z0 > z1)
    throw InvalidDims("criteria box collapses below one voxel");
  for (int z = z0; z <= z1; ++z)
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) cells.insert({x, y, z});
}

}  // namespace

PoseFilter quantize_template(const PoseTemplate& tpl, double voxel_size) {
  PoseFilter f;
  f.affordance = tpl.affordance;
  f.name = to_string(tpl.affordance);
  f.orientation_sensitive = tpl.orientation_sensitive;
  f.contact_joint = Eigen::Vector3i::Zero();

  std::set<Eigen::Vector3i, CellLess> support, freespace;
  for (const auto& b : tpl.support) quantize_box(b, voxel_size, support);
  for (const auto& b : tpl.freespace) quantize_box(b, voxel_size, freespace);
  // Support wins where the slabs touch; keeps the two sets disjoint.
  for (const auto& c : support) freespace.erase(c);

  f.support_cells.assign(support.begin(), support.end());
  f.freespace_cells.assign(freespace.begin(), freespace.end());

  for (int k = 0; k < 4; ++k) {
    f.support_rot[k].reserve(f.support_cells.size());
    for (const auto& c : f.support_cells)
      f.support_rot[k].push_back(rotate_yaw(c, k));
    f.freespace_rot[k].reserve(f.freespace_cells.size());
    for (const auto& c : f.freespace_cells)
      f.freespace_rot[k].push_back(rotate_yaw(c, k));
  }
  return f;
}

std::vector<PoseFilter> build_filter_bank(const HumanDims& dims,
                                          double voxel_size) {
  if (voxel_size <= 0) throw InvalidDims("voxel_size must be positive");
  std::vector<PoseFilter> bank;
  for (const auto& tpl : build_pose_templates(dims))
    bank.push_back(quantize_template(tpl, voxel_size));
  return bank;
}

void PoseFilter::bounds(Eigen::Vector3i& lo, Eigen::Vector3i& hi) const {
  lo = Eigen::Vector3i::Constant(0);
  hi = Eigen::Vector3i::Constant(0);
  for (int k = 0; k < 4; ++k) {
    for (const auto* set : {&freespace_rot[k], &support_rot[k]})
      for (const auto& c : *set) {
        lo = lo.cwiseMin(c);
        hi = hi.cwiseMax(c);
      }
  }
}

}  // namespace aff
