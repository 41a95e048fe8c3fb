#include "floweval/types.hpp"

#include <string>

#include "floweval/errors.hpp"
#include "validate.hpp"

namespace floweval {

namespace detail {

void check_rect(int frame_w, int frame_h, const Rect& r) {
  if (r.width < 1 || r.height < 1 || r.top < 0 || r.left < 0 ||
      r.top + r.height > frame_h || r.left + r.width > frame_w)
    throw BadRegion("rectangle " + std::to_string(r.top) + "," +
                    std::to_string(r.left) + "," + std::to_string(r.height) +
                    "," + std::to_string(r.width) + " does not fit a " +
                    std::to_string(frame_w) + "x" + std::to_string(frame_h) +
                    " frame");
}

}  // namespace detail

FlowField FlowField::make(int width, int height, float u0, float v0,
                          bool valid0) {
  FlowField f;
  f.width = width;
  f.height = height;
  const std::size_t n = static_cast<std::size_t>(width) * height;
  f.u.assign(n, u0);
  f.v.assign(n, v0);
  f.valid.assign(n, valid0 ? 1 : 0);
  return f;
}

ColorImage ColorImage::make(int width, int height, int channels,
                            std::uint8_t fill) {
  ColorImage img;
  img.width = width;
  img.height = height;
  img.channels = channels;
  img.data.assign(static_cast<std::size_t>(width) * height * channels, fill);
  return img;
}

GrayImage GrayImage::make(int width, int height, std::uint8_t fill) {
  GrayImage img;
  img.width = width;
  img.height = height;
  img.data.assign(static_cast<std::size_t>(width) * height, fill);
  return img;
}

FlowField crop(const FlowField& flow, const Rect& r) {
  detail::check_rect(flow.width, flow.height, r);
  FlowField out = FlowField::make(r.width, r.height);
  for (int rr = 0; rr < r.height; ++rr)
    for (int cc = 0; cc < r.width; ++cc) {
      const std::size_t src = flow.idx(r.top + rr, r.left + cc);
      const std::size_t dst = out.idx(rr, cc);
      out.u[dst] = flow.u[src];
      out.v[dst] = flow.v[src];
      out.valid[dst] = flow.valid[src];
    }
  return out;
}

ColorImage crop(const ColorImage& image, const Rect& r) {
  detail::check_rect(image.width, image.height, r);
  ColorImage out = ColorImage::make(r.width, r.height, image.channels);
  for (int rr = 0; rr < r.height; ++rr)
    for (int cc = 0; cc < r.width; ++cc)
      for (int ch = 0; ch < image.channels; ++ch)
        out.data[out.idx(rr, cc) + ch] =
            image.data[image.idx(r.top + rr, r.left + cc) + ch];
  return out;
}

}  // namespace floweval
