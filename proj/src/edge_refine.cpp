#include "floweval/edge_refine.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "er_detail.hpp"
#include "floweval/errors.hpp"

namespace floweval {

namespace {

void check_config(const ErConfig& cfg) {
  if (!(cfg.n1 > 0.0) || !(cfg.n2 > 0.0))
    throw OutOfRange("er bandwidths must be positive");
  if (cfg.radius < 1) throw OutOfRange("er radius must be at least 1");
}

}  // namespace

double er_weight(const ColorImage& image, int i, int j, int ni, int nj,
                 const ErConfig& config) {
  check_config(config);
  if (i < 0 || j < 0 || ni < 0 || nj < 0 || i >= image.height ||
      ni >= image.height || j >= image.width || nj >= image.width)
    throw OutOfBounds("pixel (" + std::to_string(i) + "," + std::to_string(j) +
                      ") or (" + std::to_string(ni) + "," +
                      std::to_string(nj) + ") outside a " +
                      std::to_string(image.width) + "x" +
                      std::to_string(image.height) + " image");
  const int d2 = detail::color_dist2(image, image.idx(i, j), image.idx(ni, nj));
  return detail::er_spatial_factor(i - ni, j - nj, config.n1) *
         detail::er_color_factor(double(d2), config.n2, image.channels);
}

FlowField edge_refine(const FlowField& flow, const ColorImage& image,
                      const ErConfig& config) {
  check_config(config);
  if (flow.width != image.width || flow.height != image.height)
    throw DimensionMismatch(
        "flow is " + std::to_string(flow.width) + "x" +
        std::to_string(flow.height) + " but the guide image is " +
        std::to_string(image.width) + "x" + std::to_string(image.height));

  const int w = flow.width, h = flow.height;
  const int rad = config.radius, side = 2 * rad + 1;
  const int channels = image.channels;

  // weight = spatial_lut[offset] * color_lut[color distance^2]
  std::vector<double> slut(std::size_t(side) * side);
  for (int di = -rad; di <= rad; ++di)
    for (int dj = -rad; dj <= rad; ++dj)
      slut[std::size_t(di + rad) * side + (dj + rad)] =
          detail::er_spatial_factor(di, dj, config.n1);
  const int max_d2 = channels * 255 * 255;
  std::vector<double> clut(max_d2 + 1);
  for (int d2 = 0; d2 <= max_d2; ++d2)
    clut[d2] = detail::er_color_factor(double(d2), config.n2, channels);

  FlowField out = flow;  // invalid pixels pass through unchanged
#pragma omp parallel
  {
    std::vector<std::pair<float, double>> vw_u, vw_v;
    std::vector<double> prod_u, prod_v;
    vw_u.reserve(std::size_t(side) * side);
    vw_v.reserve(std::size_t(side) * side);
    prod_u.reserve(std::size_t(side) * side);
    prod_v.reserve(std::size_t(side) * side);

#pragma omp for schedule(static)
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        const std::size_t i = std::size_t(r) * w + c;
        if (!flow.valid[i]) continue;
        vw_u.clear();
        vw_v.clear();
        prod_u.clear();
        prod_v.clear();
        const std::size_t center = image.idx(r, c);
        const int r_lo = std::max(0, r - rad), r_hi = std::min(h - 1, r + rad);
        const int c_lo = std::max(0, c - rad), c_hi = std::min(w - 1, c + rad);
        for (int nr = r_lo; nr <= r_hi; ++nr) {
          for (int nc = c_lo; nc <= c_hi; ++nc) {
            const std::size_t ni = std::size_t(nr) * w + nc;
            if (!flow.valid[ni]) continue;
            const int d2 =
                detail::color_dist2(image, center, image.idx(nr, nc));
            const double wgt =
                slut[std::size_t(nr - r + rad) * side + (nc - c + rad)] *
                clut[d2];
            if (config.mode == ErMode::weighted_median) {
              vw_u.emplace_back(flow.u[ni], wgt);
              vw_v.emplace_back(flow.v[ni], wgt);
            } else {
              prod_u.push_back(wgt * double(flow.u[ni]));
              prod_v.push_back(wgt * double(flow.v[ni]));
            }
          }
        }
        if (config.mode == ErMode::weighted_median) {
          out.u[i] = detail::weighted_median(vw_u);
          out.v[i] = detail::weighted_median(vw_v);
        } else {
          out.u[i] = float(detail::lower_median(prod_u));
          out.v[i] = float(detail::lower_median(prod_v));
        }
      }
    }
  }
  return out;
}

}  // namespace floweval
