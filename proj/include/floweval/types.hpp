#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace floweval {

/// Dense two-component optical flow with a per-pixel validity mask.
/// Planes are row-major with the origin at the top-left pixel; u is the
/// horizontal displacement, v the vertical one, both in pixels. Pixels with
/// valid == 0 never contribute to a metric, a statistic or a gradient, and
/// their u/v samples carry no meaning.
struct FlowField {
  int width = 0;
  int height = 0;
  std::vector<float> u;
  std::vector<float> v;
  std::vector<std::uint8_t> valid;

  static FlowField make(int width, int height, float u0 = 0.0f, float v0 = 0.0f,
                        bool valid0 = true);

  std::size_t size() const { return static_cast<std::size_t>(width) * height; }
  std::size_t idx(int r, int c) const {
    return static_cast<std::size_t>(r) * width + c;
  }
  bool same_dims(const FlowField& o) const {
    return width == o.width && height == o.height;
  }
};

/// 8-bit raster with 1 (gray) or 3 (RGB) interleaved channels, row-major.
struct ColorImage {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<std::uint8_t> data;

  static ColorImage make(int width, int height, int channels,
                         std::uint8_t fill = 0);

  std::size_t size() const { return static_cast<std::size_t>(width) * height; }
  std::size_t idx(int r, int c) const {
    return (static_cast<std::size_t>(r) * width + c) * channels;
  }
};

/// Single-channel 8-bit raster, row-major.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  static GrayImage make(int width, int height, std::uint8_t fill = 0);

  std::size_t idx(int r, int c) const {
    return static_cast<std::size_t>(r) * width + c;
  }
};

/// Rectangle in pixel coordinates, top-left anchored.
struct Rect {
  int top = 0;
  int left = 0;
  int height = 0;
  int width = 0;
};

/// Extract a rectangular sub-field. Throws BadRegion if the rectangle does
/// not lie fully inside the frame.
FlowField crop(const FlowField& flow, const Rect& r);
ColorImage crop(const ColorImage& image, const Rect& r);

}  // namespace floweval
