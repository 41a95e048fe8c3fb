#include "floweval/flow_io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>

#include "floweval/errors.hpp"
#include "png_io.hpp"

namespace floweval {

namespace {

std::uint32_t get_u32le(const std::uint8_t* p) {
  return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 |
         std::uint32_t(p[2]) << 16 | std::uint32_t(p[3]) << 24;
}

float get_f32le(const std::uint8_t* p) {
  return std::bit_cast<float>(get_u32le(p));
}

std::int32_t get_i32le(const std::uint8_t* p) {
  return std::bit_cast<std::int32_t>(get_u32le(p));
}

void put_u32le(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(std::uint8_t(v));
  out.push_back(std::uint8_t(v >> 8));
  out.push_back(std::uint8_t(v >> 16));
  out.push_back(std::uint8_t(v >> 24));
}

void put_f32le(std::vector<std::uint8_t>& out, float f) {
  put_u32le(out, std::bit_cast<std::uint32_t>(f));
}

bool flow_sample_valid(float u, float v) {
  return std::isfinite(u) && std::isfinite(v) &&
         std::abs(double(u)) <= kUnknownFlowThreshold &&
         std::abs(double(v)) <= kUnknownFlowThreshold;
}

}  // namespace

FlowField read_flo(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4) throw Truncated(".flo stream shorter than its magic");
  if (get_f32le(bytes.data()) != kFloMagic)
    throw BadMagic(".flo magic mismatch (expected 202021.25)");
  if (bytes.size() < 12) throw Truncated(".flo header truncated");
  const std::int32_t w = get_i32le(bytes.data() + 4);
  const std::int32_t h = get_i32le(bytes.data() + 8);
  if (w <= 0 || h <= 0)
    throw NonPositiveDims(".flo dimensions " + std::to_string(w) + "x" +
                          std::to_string(h));
  const std::uint64_t pixels = std::uint64_t(w) * std::uint64_t(h);
  if (pixels > (bytes.size() - 12) / 8)
    throw Truncated(".flo payload shorter than " + std::to_string(w) + "x" +
                    std::to_string(h) + " promises");

  FlowField f = FlowField::make(w, h);
  const std::uint8_t* p = bytes.data() + 12;
  for (std::size_t i = 0; i < f.size(); ++i, p += 8) {
    f.u[i] = get_f32le(p);
    f.v[i] = get_f32le(p + 4);
    f.valid[i] = flow_sample_valid(f.u[i], f.v[i]) ? 1 : 0;
  }
  return f;
}

std::vector<std::uint8_t> write_flo(const FlowField& flow) {
  if (flow.width <= 0 || flow.height <= 0)
    throw NonPositiveDims("cannot write an empty flow field");
  std::vector<std::uint8_t> out;
  out.reserve(12 + flow.size() * 8);
  put_f32le(out, kFloMagic);
  put_u32le(out, std::uint32_t(flow.width));
  put_u32le(out, std::uint32_t(flow.height));
  for (std::size_t i = 0; i < flow.size(); ++i) {
    if (flow.valid[i]) {
      put_f32le(out, flow.u[i]);
      put_f32le(out, flow.v[i]);
    } else {
      put_f32le(out, kUnknownFlowSentinel);
      put_f32le(out, kUnknownFlowSentinel);
    }
  }
  return out;
}

FlowField read_kitti_png(std::span<const std::uint8_t> bytes) {
  detail::PngImage png = detail::decode_png(bytes, /*strip_16=*/false);
  if (png.bit_depth != 16)
    throw WrongBitDepth("KITTI flow PNG must be 16-bit, got " +
                        std::to_string(png.bit_depth));
  if (png.channels != 3 || png.had_alpha)
    throw WrongChannelCount("KITTI flow PNG must have 3 channels, got " +
                            std::to_string(png.channels));

  FlowField f = FlowField::make(png.width, png.height);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double raw_u = png.data16[3 * i];
    const double raw_v = png.data16[3 * i + 1];
    f.u[i] = float((raw_u - 32768.0) / 64.0);
    f.v[i] = float((raw_v - 32768.0) / 64.0);
    f.valid[i] = png.data16[3 * i + 2] != 0 ? 1 : 0;
  }
  return f;
}

std::vector<std::uint8_t> write_kitti_png(const FlowField& flow) {
  if (flow.width <= 0 || flow.height <= 0)
    throw NonPositiveDims("cannot write an empty flow field");
  std::vector<std::uint16_t> raw(flow.size() * 3, 0);
  for (std::size_t i = 0; i < flow.size(); ++i) {
    if (!flow.valid[i]) continue;
    // ties away from zero via llround
    for (int ch = 0; ch < 2; ++ch) {
      const float value = ch == 0 ? flow.u[i] : flow.v[i];
      if (!std::isfinite(value))
        throw OutOfRange("non-finite displacement at valid pixel " +
                         std::to_string(i));
      const long long q = std::llround(double(value) * 64.0 + 32768.0);
      if (q < 0 || q > 65535)
        throw OutOfRange("displacement " + std::to_string(value) +
                         " exceeds the encodable range [-512, 511.984375]");
      raw[3 * i + ch] = std::uint16_t(q);
    }
    raw[3 * i + 2] = 1;
  }
  return detail::encode_png16(flow.width, flow.height, 3, raw);
}

namespace {

// Binary PPM (P6) / PGM (P5), maxval 255.
ColorImage read_pnm(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 2;  // past the magic
  auto next_int = [&]() -> int {
    for (;;) {
      while (pos < bytes.size() && std::isspace(bytes[pos])) ++pos;
      if (pos < bytes.size() && bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        continue;
      }
      break;
    }
    if (pos >= bytes.size() || !std::isdigit(bytes[pos]))
      throw UnsupportedFormat("malformed PNM header");
    int v = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos]))
      v = v * 10 + (bytes[pos++] - '0');
    return v;
  };
  const int channels = bytes[1] == '6' ? 3 : 1;
  const int w = next_int();
  const int h = next_int();
  const int maxval = next_int();
  if (w <= 0 || h <= 0) throw UnsupportedFormat("bad PNM dimensions");
  if (maxval != 255)
    throw UnsupportedFormat("only maxval 255 PNM is supported, got " +
                            std::to_string(maxval));
  ++pos;  // single whitespace byte before the raster
  const std::size_t n = std::size_t(w) * h * channels;
  if (pos + n > bytes.size()) throw UnsupportedFormat("PNM raster truncated");
  ColorImage img = ColorImage::make(w, h, channels);
  std::memcpy(img.data.data(), bytes.data() + pos, n);
  return img;
}

}  // namespace

ColorImage read_image(std::span<const std::uint8_t> bytes) {
  if (detail::is_png(bytes)) {
    detail::PngImage png = detail::decode_png(bytes, /*strip_16=*/true);
    if (png.channels != 1 && png.channels != 3)
      throw UnsupportedFormat("expected a grayscale or RGB image, got " +
                              std::to_string(png.channels) + " channels");
    ColorImage img = ColorImage::make(png.width, png.height, png.channels);
    img.data = std::move(png.data8);
    return img;
  }
  if (bytes.size() >= 2 && bytes[0] == 'P' &&
      (bytes[1] == '5' || bytes[1] == '6'))
    return read_pnm(bytes);
  throw UnsupportedFormat("not a PNG or binary PPM/PGM stream");
}

std::vector<std::uint8_t> write_png(const ColorImage& image) {
  return detail::encode_png8(image.width, image.height, image.channels,
                             image.data);
}

std::vector<std::uint8_t> write_png(const GrayImage& image) {
  return detail::encode_png8(image.width, image.height, 1, image.data);
}

namespace {

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext;
}

}  // namespace

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes(
      (std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed for " + path.string());
  return bytes;
}

void write_bytes(const std::filesystem::path& path,
                 std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            std::streamsize(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

FlowField read_flow_file(const std::filesystem::path& path) {
  const std::string ext = lower_extension(path);
  if (ext != ".flo" && ext != ".png")
    throw UnsupportedFormat("unsupported flow format '" + ext + "' for " +
                            path.string());
  const auto bytes = read_bytes(path);
  return ext == ".flo" ? read_flo(bytes) : read_kitti_png(bytes);
}

void write_flow_file(const std::filesystem::path& path,
                     const FlowField& flow) {
  const std::string ext = lower_extension(path);
  if (ext == ".flo")
    write_bytes(path, write_flo(flow));
  else if (ext == ".png")
    write_bytes(path, write_kitti_png(flow));
  else
    throw UnsupportedFormat("unsupported flow format '" + ext + "' for " +
                            path.string());
}

ColorImage read_image_file(const std::filesystem::path& path) {
  return read_image(read_bytes(path));
}

void write_png_file(const std::filesystem::path& path,
                    const ColorImage& image) {
  write_bytes(path, write_png(image));
}

void write_png_file(const std::filesystem::path& path,
                    const GrayImage& image) {
  write_bytes(path, write_png(image));
}

}  // namespace floweval
