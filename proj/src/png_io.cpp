#include "aff/png_io.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <memory>
#include <vector>

#include "aff/errors.hpp"

namespace aff {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void write_png(const std::string& path, int width, int height, int bit_depth,
               int color_type, const std::vector<png_bytep>& rows) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw IoError("cannot open " + path + " for writing");

  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng write failed for " + path);
  }
  png_init_io(png, fp.get());
  // Fixed settings keep the byte stream reproducible run to run.
  png_set_compression_level(png, 6);
  png_set_IHDR(png, info, width, height, bit_depth, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if (bit_depth == 16) png_set_swap(png);  // little-endian in memory
  png_write_image(png, const_cast<png_bytep*>(rows.data()));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

struct PngData {
  int width = 0, height = 0, bit_depth = 0, channels = 0;
  std::vector<uint8_t> bytes;  // row-major, little-endian for 16-bit
};

PngData read_png(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw IoError("cannot open " + path);

  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("libpng read failed for " + path);
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);

  PngData out;
  out.width = png_get_image_width(png, info);
  out.height = png_get_image_height(png, info);
  out.bit_depth = png_get_bit_depth(png, info);

  if (png_get_color_type(png, info) == PNG_COLOR_TYPE_PALETTE)
    png_set_palette_to_rgb(png);
  if (out.bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (out.bit_depth == 16) png_set_swap(png);
  png_read_update_info(png, info);

  out.channels = png_get_channels(png, info);
  const size_t rowbytes = png_get_rowbytes(png, info);
  out.bytes.resize(rowbytes * out.height);
  std::vector<png_bytep> rows(out.height);
  for (int y = 0; y < out.height; ++y) rows[y] = out.bytes.data() + y * rowbytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

}  // namespace

void save_depth_png(const DepthMap& depth, const std::string& path) {
  const int w = depth.width(), h = depth.height();
  std::vector<uint16_t> mm(static_cast<size_t>(w) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const float d = depth.depths.at(x, y);
      const double v = std::lround(d * 1000.0);
      mm[static_cast<size_t>(y) * w + x] =
          static_cast<uint16_t>(v < 0 ? 0 : (v > 65535 ? 65535 : v));
    }
  std::vector<png_bytep> rows(h);
  for (int y = 0; y < h; ++y)
    rows[y] = reinterpret_cast<png_bytep>(mm.data() + static_cast<size_t>(y) * w);
  write_png(path, w, h, 16, PNG_COLOR_TYPE_GRAY, rows);
}

ImageU16 load_png16(const std::string& path) {
  PngData d = read_png(path);
  if (d.bit_depth != 16 || d.channels != 1)
    throw IoError(path + ": expected 16-bit single-channel PNG");
  ImageU16 img(d.width, d.height);
  const uint16_t* src = reinterpret_cast<const uint16_t*>(d.bytes.data());
  std::copy(src, src + img.size(), img.data().begin());
  return img;
}

DepthMap load_depth_png(const std::string& path, const CameraIntrinsics& k) {
  const ImageU16 mm = load_png16(path);
  DepthMap depth;
  depth.depths = ImageF(mm.width(), mm.height());
  for (int y = 0; y < mm.height(); ++y)
    for (int x = 0; x < mm.width(); ++x)
      depth.depths.at(x, y) = mm.at(x, y) / 1000.0f;
  depth.intrinsics = k;
  depth.intrinsics.width = mm.width();
  depth.intrinsics.height = mm.height();
  return depth;
}

namespace {
constexpr uint8_t kLabelNot = 0;
constexpr uint8_t kLabelUnknown = 128;
constexpr uint8_t kLabelSupports = 255;
}  // namespace

void save_affordance_png(const AffordanceMap& map, const std::string& path) {
  const int w = map.labels.width(), h = map.labels.height();
  std::vector<uint8_t> px(static_cast<size_t>(w) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      uint8_t v = kLabelUnknown;
      switch (map.labels.at(x, y)) {
        case TriState::Not: v = kLabelNot; break;
        case TriState::Unknown: v = kLabelUnknown; break;
        case TriState::Supports: v = kLabelSupports; break;
      }
      px[static_cast<size_t>(y) * w + x] = v;
    }
  std::vector<png_bytep> rows(h);
  for (int y = 0; y < h; ++y) rows[y] = px.data() + static_cast<size_t>(y) * w;
  write_png(path, w, h, 8, PNG_COLOR_TYPE_GRAY, rows);
}

AffordanceMap load_affordance_png(const std::string& path,
                                  const std::string& affordance) {
  PngData d = read_png(path);
  if (d.bit_depth != 8 || d.channels != 1)
    throw IoError(path + ": expected 8-bit single-channel PNG");
  AffordanceMap map;
  map.affordance = affordance;
  map.source = "generated";
  map.labels = Image<TriState>(d.width, d.height, TriState::Unknown);
  for (int y = 0; y < d.height; ++y)
    for (int x = 0; x < d.width; ++x) {
      const uint8_t v = d.bytes[static_cast<size_t>(y) * d.width + x];
      map.labels.at(x, y) = v == kLabelNot       ? TriState::Not
                            : v == kLabelSupports ? TriState::Supports
                                                  : TriState::Unknown;
    }
  return map;
}

void save_score_png(const ImageF& scores, const std::string& path) {
  const int w = scores.width(), h = scores.height();
  std::vector<uint16_t> px(static_cast<size_t>(w) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      float s = scores.at(x, y);
      s = s < 0 ? 0 : (s > 1 ? 1 : s);
      px[static_cast<size_t>(y) * w + x] =
          static_cast<uint16_t>(std::lround(s * 65535.0));
    }
  std::vector<png_bytep> rows(h);
  for (int y = 0; y < h; ++y)
    rows[y] = reinterpret_cast<png_bytep>(px.data() + static_cast<size_t>(y) * w);
  write_png(path, w, h, 16, PNG_COLOR_TYPE_GRAY, rows);
}

ImageF load_score_png(const std::string& path) {
  const ImageU16 px = load_png16(path);
  ImageF out(px.width(), px.height());
  for (int y = 0; y < px.height(); ++y)
    for (int x = 0; x < px.width(); ++x)
      out.at(x, y) = px.at(x, y) / 65535.0f;
  return out;
}

void save_rgb_png(const ImageRgb& img, const std::string& path) {
  const int w = img.width(), h = img.height();
  std::vector<uint8_t> px(static_cast<size_t>(w) * h * 3);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const Rgb& p = img.at(x, y);
      uint8_t* dst = px.data() + (static_cast<size_t>(y) * w + x) * 3;
      dst[0] = p.r;
      dst[1] = p.g;
      dst[2] = p.b;
    }
  std::vector<png_bytep> rows(h);
  for (int y = 0; y < h; ++y)
    rows[y] = px.data() + static_cast<size_t>(y) * w * 3;
  write_png(path, w, h, 8, PNG_COLOR_TYPE_RGB, rows);
}

ImageRgb load_rgb_png(const std::string& path) {
  PngData d = read_png(path);
  if (d.bit_depth != 8 || (d.channels != 3 && d.channels != 4))
    throw IoError(path + ": expected 8-bit RGB PNG");
  ImageRgb img(d.width, d.height);
  for (int y = 0; y < d.height; ++y)
    for (int x = 0; x < d.width; ++x) {
      const uint8_t* src =
          d.bytes.data() + (static_cast<size_t>(y) * d.width + x) * d.channels;
      img.at(x, y) = {src[0], src[1], src[2]};
    }
  return img;
}

}  // namespace aff
