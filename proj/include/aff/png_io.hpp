#pragma once

#include <string>

#include "aff/camera.hpp"
#include "aff/image.hpp"
#include "aff/labeler.hpp"

namespace aff {

// Depth files: 16-bit single-channel PNG, value = millimetres, 0 = missing.
void save_depth_png(const DepthMap& depth, const std::string& path);
ImageU16 load_png16(const std::string& path);
DepthMap load_depth_png(const std::string& path, const CameraIntrinsics& k);

// Label files: 8-bit grayscale, 0 = Not, 128 = Unknown, 255 = Supports.
void save_affordance_png(const AffordanceMap& map, const std::string& path);
AffordanceMap load_affordance_png(const std::string& path,
                                  const std::string& affordance);

// Soft score maps in [0,1], stored as 16-bit PNG (value / 65535).
void save_score_png(const ImageF& scores, const std::string& path);
ImageF load_score_png(const std::string& path);

void save_rgb_png(const ImageRgb& img, const std::string& path);
ImageRgb load_rgb_png(const std::string& path);

}  // namespace aff
