#include "aff/ply_io.hpp"

#include <cstdio>
#include <fstream>

#include "aff/errors.hpp"

namespace aff {

void save_ply(const PointCloud& cloud, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path);
  os << "ply\nformat ascii 1.0\n";
  os << "element vertex " << cloud.size() << "\n";
  os << "property float x\nproperty float y\nproperty float z\n";
  os << "property float nx\nproperty float ny\nproperty float nz\n";
  os << "end_header\n";
  char buf[160];
  for (size_t i = 0; i < cloud.size(); ++i) {
    const auto& p = cloud.points[i];
    const auto& n = cloud.normals[i];
    std::snprintf(buf, sizeof(buf), "%.6f %.6f %.6f %.6f %.6f %.6f\n", p.x(),
                  p.y(), p.z(), n.x(), n.y(), n.z());
    os << buf;
  }
}

}  // namespace aff
