#pragma once

#include <vector>

#include "aff/image.hpp"

namespace aff {

struct HogParams {
  int cell_size = 8;  // pixels
  int bins = 9;       // unsigned orientation bins over [0, pi)
  float clip = 0.2f;  // L2-Hys clipping
};

/// Per-cell gradient-orientation histograms after 2x2-cell block L2-Hys
/// normalization (each cell averages its normalized copies over the
/// blocks containing it).
struct HogDescriptor {
  int cells_x = 0, cells_y = 0, bins = 0;
  std::vector<float> values;  // (cy, cx, bin) order

  float at(int cx, int cy, int b) const {
    return values[(static_cast<size_t>(cy) * cells_x + cx) * bins + b];
  }
  float& at(int cx, int cy, int b) {
    return values[(static_cast<size_t>(cy) * cells_x + cx) * bins + b];
  }
  size_t size() const { return values.size(); }
};

/// HOG over the whole image; image dimensions are truncated to whole
/// cells.
HogDescriptor compute_hog(const ImageF& gray, const HogParams& params = {});

/// HOG over a window of the image. The window must lie inside the image
/// and span at least 2x2 cells; otherwise WindowTooSmall.
HogDescriptor extract_hog(const ImageF& gray, int x, int y, int w, int h,
                          const HogParams& params = {});

}  // namespace aff
