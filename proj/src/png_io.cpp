#include "png_io.hpp"

#include <png.h>

#include <csetjmp>
#include <cstring>
#include <string>

#include "floweval/errors.hpp"

namespace floweval::detail {

namespace {

constexpr std::uint8_t kSignature[8] = {137, 80, 78, 71, 13, 10, 26, 10};

// POD context shared with libpng callbacks; no destructor may sit between
// setjmp and the longjmp inside libpng.
struct PngCtx {
  const std::uint8_t* in = nullptr;
  std::size_t in_size = 0;
  std::size_t in_pos = 0;
  std::vector<std::uint8_t>* out = nullptr;
  char errmsg[192] = {0};
};

void on_error(png_structp png, png_const_charp msg) {
  auto* ctx = static_cast<PngCtx*>(png_get_error_ptr(png));
  if (ctx) std::strncpy(ctx->errmsg, msg, sizeof(ctx->errmsg) - 1);
  longjmp(png_jmpbuf(png), 1);
}

void on_warning(png_structp, png_const_charp) {}

void read_cb(png_structp png, png_bytep dst, png_size_t count) {
  auto* ctx = static_cast<PngCtx*>(png_get_io_ptr(png));
  if (ctx->in_pos + count > ctx->in_size)
    png_error(png, "unexpected end of stream");
  std::memcpy(dst, ctx->in + ctx->in_pos, count);
  ctx->in_pos += count;
}

void write_cb(png_structp png, png_bytep src, png_size_t count) {
  auto* ctx = static_cast<PngCtx*>(png_get_io_ptr(png));
  ctx->out->insert(ctx->out->end(), src, src + count);
}

void flush_cb(png_structp) {}

}  // namespace

bool is_png(std::span<const std::uint8_t> bytes) {
  return bytes.size() >= 8 && std::memcmp(bytes.data(), kSignature, 8) == 0;
}

PngImage decode_png(std::span<const std::uint8_t> bytes, bool strip_16) {
  if (!is_png(bytes)) throw NotPng("missing PNG signature");

  PngCtx ctx;
  ctx.in = bytes.data();
  ctx.in_size = bytes.size();

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &ctx,
                                           on_error, on_warning);
  if (!png) throw UnsupportedFormat("libpng read init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw UnsupportedFormat("libpng info init failed");
  }

  PngImage out;
  std::vector<std::uint8_t> buffer;
  std::vector<png_bytep> rows;

  if (setjmp(png_jmpbuf(png))) {
    std::string msg = ctx.errmsg[0] ? ctx.errmsg : "decode failed";
    png_destroy_read_struct(&png, &info, nullptr);
    throw UnsupportedFormat("PNG decode: " + msg);
  }

  png_set_read_fn(png, &ctx, read_cb);
  png_read_info(png, info);

  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  out.had_alpha = (color & PNG_COLOR_MASK_ALPHA) != 0 ||
                  png_get_valid(png, info, PNG_INFO_tRNS);

  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8)
    png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (strip_16 && depth == 16) png_set_strip_16(png);
  png_set_strip_alpha(png);
  png_set_interlace_handling(png);
  png_read_update_info(png, info);

  out.width = int(png_get_image_width(png, info));
  out.height = int(png_get_image_height(png, info));
  out.channels = png_get_channels(png, info);
  out.bit_depth = png_get_bit_depth(png, info);

  const std::size_t rowbytes = png_get_rowbytes(png, info);
  buffer.resize(rowbytes * out.height);
  rows.resize(out.height);
  for (int r = 0; r < out.height; ++r) rows[r] = buffer.data() + r * rowbytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  const std::size_t n =
      std::size_t(out.width) * out.height * out.channels;
  if (out.bit_depth == 16) {
    // PNG stores 16-bit samples big-endian
    out.data16.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      out.data16[i] = std::uint16_t((buffer[2 * i] << 8) | buffer[2 * i + 1]);
  } else {
    out.data8.assign(buffer.begin(), buffer.begin() + n);
  }
  return out;
}

namespace {

std::vector<std::uint8_t> encode_png(int width, int height, int channels,
                                     int bit_depth,
                                     const std::vector<std::uint8_t>& raw) {
  PngCtx ctx;
  std::vector<std::uint8_t> bytes;
  ctx.out = &bytes;

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &ctx,
                                            on_error, on_warning);
  if (!png) throw UnsupportedFormat("libpng write init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw UnsupportedFormat("libpng info init failed");
  }

  std::vector<png_bytep> rows;

  if (setjmp(png_jmpbuf(png))) {
    std::string msg = ctx.errmsg[0] ? ctx.errmsg : "encode failed";
    png_destroy_write_struct(&png, &info);
    throw UnsupportedFormat("PNG encode: " + msg);
  }

  png_set_write_fn(png, &ctx, write_cb, flush_cb);
  png_set_IHDR(png, info, png_uint_32(width), png_uint_32(height), bit_depth,
               channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  const std::size_t rowbytes =
      std::size_t(width) * channels * (bit_depth / 8);
  rows.resize(height);
  for (int r = 0; r < height; ++r)
    rows[r] = const_cast<png_bytep>(raw.data() + r * rowbytes);
  png_write_image(png, rows.data());
  png_write_end(png, info);
  png_destroy_write_struct(&png, &info);
  return bytes;
}

}  // namespace

std::vector<std::uint8_t> encode_png8(int width, int height, int channels,
                                      std::span<const std::uint8_t> data) {
  std::vector<std::uint8_t> raw(data.begin(), data.end());
  return encode_png(width, height, channels, 8, raw);
}

std::vector<std::uint8_t> encode_png16(int width, int height, int channels,
                                       std::span<const std::uint16_t> data) {
  std::vector<std::uint8_t> raw(data.size() * 2);
  for (std::size_t i = 0; i < data.size(); ++i) {
    raw[2 * i] = std::uint8_t(data[i] >> 8);
    raw[2 * i + 1] = std::uint8_t(data[i] & 0xFF);
  }
  return encode_png(width, height, channels, 16, raw);
}

}  // namespace floweval::detail
