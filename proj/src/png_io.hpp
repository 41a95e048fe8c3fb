#pragma once

// Internal PNG container codec (libpng behind the flow-io contracts).

#include <cstdint>
#include <span>
#include <vector>

namespace floweval::detail {

struct PngImage {
  int width = 0;
  int height = 0;
  int channels = 0;   // after palette expansion / alpha stripping
  int bit_depth = 0;  // 8 or 16
  bool had_alpha = false;
  std::vector<std::uint8_t> data8;     // used when bit_depth == 8
  std::vector<std::uint16_t> data16;   // used when bit_depth == 16
};

bool is_png(std::span<const std::uint8_t> bytes);

/// Decode a PNG byte stream. Palette images are expanded to RGB, sub-8-bit
/// gray to 8, alpha channels are dropped. 16-bit data is kept unless
/// strip_16. Throws NotPng on a bad signature, UnsupportedFormat otherwise.
PngImage decode_png(std::span<const std::uint8_t> bytes, bool strip_16);

std::vector<std::uint8_t> encode_png8(int width, int height, int channels,
                                      std::span<const std::uint8_t> data);
std::vector<std::uint8_t> encode_png16(int width, int height, int channels,
                                       std::span<const std::uint16_t> data);

}  // namespace floweval::detail
