#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "floweval/types.hpp"

namespace floweval {

// Middlebury/Sintel .flo container:
//   [f32-LE 202021.25][i32-LE width][i32-LE height][w*h x (f32-LE u, f32-LE v)]
// row-major, pairs interleaved. A component with magnitude above
// kUnknownFlowThreshold marks the pixel as unknown; the writer stores
// kUnknownFlowSentinel for both components of invalid pixels.
inline constexpr float kFloMagic = 202021.25f;
inline constexpr double kUnknownFlowThreshold = 1e9;
inline constexpr float kUnknownFlowSentinel = 1e10f;

/// Decode a .flo byte stream. Throws BadMagic, NonPositiveDims or Truncated.
/// Pixels with non-finite or above-threshold components come back invalid.
FlowField read_flo(std::span<const std::uint8_t> bytes);

/// Encode to the exact layout read_flo accepts; invalid pixels are written
/// as (1e10, 1e10). Bit-exact round trip on valid pixels.
std::vector<std::uint8_t> write_flo(const FlowField& flow);

// KITTI flow maps are 16-bit RGB PNGs: R stores u, G stores v, B is the
// validity channel (nonzero = valid); u = (R - 2^15) / 64, same for v.

/// Decode a KITTI flow PNG. Throws NotPng, WrongBitDepth, WrongChannelCount.
FlowField read_kitti_png(std::span<const std::uint8_t> bytes);

/// Encode to the KITTI convention, raw = round(value * 64 + 2^15) with ties
/// away from zero. Invalid pixels get raw (0, 0) and validity 0. Throws
/// OutOfRange when a valid displacement does not fit the 16-bit range.
std::vector<std::uint8_t> write_kitti_png(const FlowField& flow);

/// Decode an 8-bit grayscale or RGB image from PNG or binary PPM/PGM bytes.
/// Anything else throws UnsupportedFormat.
ColorImage read_image(std::span<const std::uint8_t> bytes);

/// Encode as 8-bit PNG (grayscale or RGB depending on channels).
std::vector<std::uint8_t> write_png(const ColorImage& image);
std::vector<std::uint8_t> write_png(const GrayImage& image);

// Path-level helpers. Flow format is picked by extension: .flo or .png
// (KITTI). Open/launder failures throw IoError with the path in the message.
FlowField read_flow_file(const std::filesystem::path& path);
void write_flow_file(const std::filesystem::path& path, const FlowField& flow);
ColorImage read_image_file(const std::filesystem::path& path);
void write_png_file(const std::filesystem::path& path, const ColorImage& image);
void write_png_file(const std::filesystem::path& path, const GrayImage& image);

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);
void write_bytes(const std::filesystem::path& path,
                 std::span<const std::uint8_t> bytes);

}  // namespace floweval
