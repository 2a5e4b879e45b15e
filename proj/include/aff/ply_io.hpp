#pragma once

#include <string>

#include "aff/point_cloud.hpp"

namespace aff {

/// ASCII PLY with positions and normals, for debugging in external viewers.
void save_ply(const PointCloud& cloud, const std::string& path);

}  // namespace aff
