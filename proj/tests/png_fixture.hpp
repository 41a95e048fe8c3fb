#pragma once

// Minimal hand-rolled PNG encoder for test fixtures: zlib stream made of
// stored (uncompressed) deflate blocks, own crc32/adler32. Independent of
// the library's PNG path so decoder tests do not go through it.

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

namespace pngfixture {

inline std::uint32_t crc32(const std::uint8_t* p, std::size_t n,
                           std::uint32_t crc = 0xFFFFFFFFu) {
  for (std::size_t i = 0; i < n; ++i) {
    crc ^= p[i];
    for (int k = 0; k < 8; ++k)
      crc = (crc >> 1) ^ (0xEDB88320u & (~(crc & 1u) + 1u));
  }
  return crc;
}

inline std::uint32_t adler32(const std::uint8_t* p, std::size_t n) {
  std::uint32_t a = 1, b = 0;
  for (std::size_t i = 0; i < n; ++i) {
    a = (a + p[i]) % 65521u;
    b = (b + a) % 65521u;
  }
  return (b << 16) | a;
}

inline void put_u32be(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(std::uint8_t(v >> 24));
  out.push_back(std::uint8_t(v >> 16));
  out.push_back(std::uint8_t(v >> 8));
  out.push_back(std::uint8_t(v));
}

inline void put_chunk(std::vector<std::uint8_t>& out, const char type[4],
                      const std::vector<std::uint8_t>& body) {
  put_u32be(out, std::uint32_t(body.size()));
  std::vector<std::uint8_t> tb;
  tb.insert(tb.end(), type, type + 4);
  tb.insert(tb.end(), body.begin(), body.end());
  out.insert(out.end(), tb.begin(), tb.end());
  put_u32be(out, crc32(tb.data(), tb.size()) ^ 0xFFFFFFFFu);
}

inline std::vector<std::uint8_t> zlib_stored(
    const std::vector<std::uint8_t>& raw) {
  std::vector<std::uint8_t> z{0x78, 0x01};
  std::size_t pos = 0;
  do {
    const std::size_t len = std::min<std::size_t>(raw.size() - pos, 65535);
    const bool final = pos + len == raw.size();
    z.push_back(final ? 1 : 0);
    z.push_back(std::uint8_t(len & 0xFF));
    z.push_back(std::uint8_t(len >> 8));
    z.push_back(std::uint8_t(~len & 0xFF));
    z.push_back(std::uint8_t((~len >> 8) & 0xFF));
    z.insert(z.end(), raw.begin() + pos, raw.begin() + pos + len);
    pos += len;
  } while (pos < raw.size());
  put_u32be(z, adler32(raw.data(), raw.size()));
  return z;
}

/// samples: row-major, channels interleaved; 16-bit values stored as-is.
inline std::vector<std::uint8_t> make_png16(
    int width, int height, int channels,
    const std::vector<std::uint16_t>& samples) {
  std::vector<std::uint8_t> png{137, 80, 78, 71, 13, 10, 26, 10};
  std::vector<std::uint8_t> ihdr;
  put_u32be(ihdr, std::uint32_t(width));
  put_u32be(ihdr, std::uint32_t(height));
  ihdr.push_back(16);                            // bit depth
  ihdr.push_back(channels == 1 ? 0 : 2);         // gray / truecolor
  ihdr.push_back(0);                             // compression
  ihdr.push_back(0);                             // filter
  ihdr.push_back(0);                             // no interlace
  put_chunk(png, "IHDR", ihdr);
  std::vector<std::uint8_t> raw;
  for (int r = 0; r < height; ++r) {
    raw.push_back(0);  // filter: none
    for (int c = 0; c < width * channels; ++c) {
      const std::uint16_t s = samples[std::size_t(r) * width * channels + c];
      raw.push_back(std::uint8_t(s >> 8));
      raw.push_back(std::uint8_t(s & 0xFF));
    }
  }
  put_chunk(png, "IDAT", zlib_stored(raw));
  put_chunk(png, "IEND", {});
  return png;
}

/// 8-bit variant (gray or RGB).
inline std::vector<std::uint8_t> make_png8(
    int width, int height, int channels,
    const std::vector<std::uint8_t>& samples) {
  std::vector<std::uint8_t> png{137, 80, 78, 71, 13, 10, 26, 10};
  std::vector<std::uint8_t> ihdr;
  put_u32be(ihdr, std::uint32_t(width));
  put_u32be(ihdr, std::uint32_t(height));
  ihdr.push_back(8);
  ihdr.push_back(channels == 1 ? 0 : 2);
  ihdr.push_back(0);
  ihdr.push_back(0);
  ihdr.push_back(0);
  put_chunk(png, "IHDR", ihdr);
  std::vector<std::uint8_t> raw;
  for (int r = 0; r < height; ++r) {
    raw.push_back(0);
    for (int c = 0; c < width * channels; ++c)
      raw.push_back(samples[std::size_t(r) * width * channels + c]);
  }
  put_chunk(png, "IDAT", zlib_stored(raw));
  put_chunk(png, "IEND", {});
  return png;
}

}  // namespace pngfixture
