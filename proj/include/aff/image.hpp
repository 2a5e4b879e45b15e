#pragma once

#include <array>
#include <cassert>
#include <cstdint>
#include <vector>

namespace aff {

/// Dense row-major 2D grid. (0,0) is the top-left pixel, x goes right,
/// y goes down.
template <typename T>
class Image {
 public:
  Image() = default;
  Image(int width, int height, T fill = T{})
      : width_(width), height_(height),
        data_(static_cast<size_t>(width) * height, fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return data_.empty(); }
  size_t size() const { return data_.size(); }

  bool in_bounds(int x, int y) const {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  T& at(int x, int y) {
    assert(in_bounds(x, y));
    return data_[static_cast<size_t>(y) * width_ + x];
  }
  const T& at(int x, int y) const {
    assert(in_bounds(x, y));
    return data_[static_cast<size_t>(y) * width_ + x];
  }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  template <typename U>
  bool same_size(const Image<U>& other) const {
    return width_ == other.width() && height_ == other.height();
  }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using ImageF = Image<float>;
using ImageU8 = Image<uint8_t>;
using ImageU16 = Image<uint16_t>;

struct Rgb {
  uint8_t r = 0, g = 0, b = 0;
  bool operator==(const Rgb&) const = default;
};
using ImageRgb = Image<Rgb>;

/// Luma conversion used by every feature extractor, [0,1] floats.
inline ImageF to_gray(const ImageRgb& rgb) {
  ImageF out(rgb.width(), rgb.height());
  for (int y = 0; y < rgb.height(); ++y)
    for (int x = 0; x < rgb.width(); ++x) {
      const Rgb& p = rgb.at(x, y);
      out.at(x, y) =
          (0.299f * p.r + 0.587f * p.g + 0.114f * p.b) / 255.0f;
    }
  return out;
}

/// Bilinear resize; preserves constants exactly.
template <typename T>
Image<T> resize_bilinear(const Image<T>& src, int new_w, int new_h);

inline float bilinear_sample(const ImageF& img, float x, float y) {
  // Clamped sampling in pixel-center coordinates.
  if (x < 0) x = 0;
  if (y < 0) y = 0;
  if (x > img.width() - 1.0f) x = img.width() - 1.0f;
  if (y > img.height() - 1.0f) y = img.height() - 1.0f;
  const int x0 = static_cast<int>(x);
  const int y0 = static_cast<int>(y);
  const int x1 = x0 + 1 < img.width() ? x0 + 1 : x0;
  const int y1 = y0 + 1 < img.height() ? y0 + 1 : y0;
  const float fx = x - x0, fy = y - y0;
  return img.at(x0, y0) * (1 - fx) * (1 - fy) +
         img.at(x1, y0) * fx * (1 - fy) +
         img.at(x0, y1) * (1 - fx) * fy + img.at(x1, y1) * fx * fy;
}

template <>
inline ImageF resize_bilinear(const ImageF& src, int new_w, int new_h) {
  ImageF out(new_w, new_h);
  const float sx = static_cast<float>(src.width()) / new_w;
  const float sy = static_cast<float>(src.height()) / new_h;
  for (int y = 0; y < new_h; ++y)
    for (int x = 0; x < new_w; ++x) {
      const float ux = (x + 0.5f) * sx - 0.5f;
      const float uy = (y + 0.5f) * sy - 0.5f;
      out.at(x, y) = bilinear_sample(src, ux, uy);
    }
  return out;
}

inline ImageRgb resize_bilinear_rgb(const ImageRgb& src, int new_w,
                                    int new_h) {
  ImageF r(src.width(), src.height()), g(src.width(), src.height()),
      b(src.width(), src.height());
  for (int y = 0; y < src.height(); ++y)
    for (int x = 0; x < src.width(); ++x) {
      r.at(x, y) = src.at(x, y).r;
      g.at(x, y) = src.at(x, y).g;
      b.at(x, y) = src.at(x, y).b;
    }
  ImageF rr = resize_bilinear(r, new_w, new_h);
  ImageF gg = resize_bilinear(g, new_w, new_h);
  ImageF bb = resize_bilinear(b, new_w, new_h);
  ImageRgb out(new_w, new_h);
  for (int y = 0; y < new_h; ++y)
    for (int x = 0; x < new_w; ++x) {
      auto clamp8 = [](float v) {
        return static_cast<uint8_t>(v < 0 ? 0 : (v > 255 ? 255 : v + 0.5f));
      };
      out.at(x, y) = {clamp8(rr.at(x, y)), clamp8(gg.at(x, y)),
                      clamp8(bb.at(x, y))};
    }
  return out;
}

}  // namespace aff
