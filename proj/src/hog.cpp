#include "aff/hog.hpp"

#include <cmath>

#include "aff/errors.hpp"

namespace aff {

HogDescriptor compute_hog(const ImageF& gray, const HogParams& p) {
  const int w = gray.width(), h = gray.height();
  HogDescriptor d;
  d.cells_x = w / p.cell_size;
  d.cells_y = h / p.cell_size;
  d.bins = p.bins;
  if (d.cells_x < 2 || d.cells_y < 2)
    throw WindowTooSmall("HOG needs at least 2x2 cells");

  // Raw per-cell histograms with soft orientation binning.
  std::vector<float> hist(static_cast<size_t>(d.cells_x) * d.cells_y * p.bins,
                          0.0f);
  const int px_w = d.cells_x * p.cell_size;
  const int px_h = d.cells_y * p.cell_size;
  for (int y = 0; y < px_h; ++y) {
    const int ym = y > 0 ? y - 1 : 0;
    const int yp = y < h - 1 ? y + 1 : h - 1;
    for (int x = 0; x < px_w; ++x) {
      const int xm = x > 0 ? x - 1 : 0;
      const int xp = x < w - 1 ? x + 1 : w - 1;
      const float gx = 0.5f * (gray.at(xp, y) - gray.at(xm, y));
      const float gy = 0.5f * (gray.at(x, yp) - gray.at(x, ym));
      const float mag = std::sqrt(gx * gx + gy * gy);
      if (mag == 0.0f) continue;
      float theta = std::atan2(gy, gx);  // fold to [0, pi)
      if (theta < 0) theta += static_cast<float>(M_PI);
      if (theta >= static_cast<float>(M_PI)) theta -= static_cast<float>(M_PI);
      const float bf = theta * p.bins / static_cast<float>(M_PI) - 0.5f;
      int b0 = static_cast<int>(std::floor(bf));
      const float frac = bf - b0;
      b0 = (b0 % p.bins + p.bins) % p.bins;
      const int b1 = (b0 + 1) % p.bins;
      const int cx = x / p.cell_size;
      const int cy = y / p.cell_size;
      const size_t base =
          (static_cast<size_t>(cy) * d.cells_x + cx) * p.bins;
      hist[base + b0] += mag * (1 - frac);
      hist[base + b1] += mag * frac;
    }
  }

  // 2x2-cell block L2-Hys normalization, averaged back onto cells.
  d.values.assign(hist.size(), 0.0f);
  std::vector<float> counts(static_cast<size_t>(d.cells_x) * d.cells_y, 0.0f);
  const float eps = 1e-5f;
  std::vector<float> block(4 * p.bins);
  for (int by = 0; by + 1 < d.cells_y; ++by) {
    for (int bx = 0; bx + 1 < d.cells_x; ++bx) {
      float norm2 = 0.0f;
      for (int i = 0; i < 4; ++i) {
        const int cx = bx + (i & 1), cy = by + (i >> 1);
        const size_t base =
            (static_cast<size_t>(cy) * d.cells_x + cx) * p.bins;
        for (int b = 0; b < p.bins; ++b) {
          block[i * p.bins + b] = hist[base + b];
          norm2 += hist[base + b] * hist[base + b];
        }
      }
      const float inv = 1.0f / std::sqrt(norm2 + eps * eps);
      float renorm2 = 0.0f;
      for (float& v : block) {
        v = std::min(v * inv, p.clip);
        renorm2 += v * v;
      }
      const float inv2 = 1.0f / std::sqrt(renorm2 + eps * eps);
      for (int i = 0; i < 4; ++i) {
        const int cx = bx + (i & 1), cy = by + (i >> 1);
        const size_t base =
            (static_cast<size_t>(cy) * d.cells_x + cx) * p.bins;
        for (int b = 0; b < p.bins; ++b)
          d.values[base + b] += block[i * p.bins + b] * inv2;
        counts[static_cast<size_t>(cy) * d.cells_x + cx] += 1.0f;
      }
    }
  }
  for (int cy = 0; cy < d.cells_y; ++cy)
    for (int cx = 0; cx < d.cells_x; ++cx) {
      const float c = counts[static_cast<size_t>(cy) * d.cells_x + cx];
      if (c > 0)
        for (int b = 0; b < p.bins; ++b) d.at(cx, cy, b) /= c;
    }
  return d;
}

HogDescriptor extract_hog(const ImageF& gray, int x, int y, int w, int h,
                          const HogParams& p) {
  if (x < 0 || y < 0 || x + w > gray.width() || y + h > gray.height())
    throw WindowTooSmall("window outside image");
  if (w < 2 * p.cell_size || h < 2 * p.cell_size)
    throw WindowTooSmall("window below 2x2 HOG cells");
  ImageF crop(w, h);
  for (int yy = 0; yy < h; ++yy)
    for (int xx = 0; xx < w; ++xx) crop.at(xx, yy) = gray.at(x + xx, y + yy);
  return compute_hog(crop, p);
}

}  // namespace aff
