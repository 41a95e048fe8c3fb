#include "floweval/viz.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "floweval/errors.hpp"

namespace floweval {

namespace {

// nearest-rank 99th percentile; consumes the scratch vector
double percentile99(std::vector<double>& vals) {
  if (vals.empty()) return 0.0;
  std::size_t rank = std::size_t(std::ceil(0.99 * double(vals.size())));
  if (rank == 0) rank = 1;
  const std::size_t k = std::min(rank, vals.size()) - 1;
  std::nth_element(vals.begin(), vals.begin() + k, vals.end());
  return vals[k];
}

std::uint8_t to_byte(double x) {
  return std::uint8_t(std::lround(255.0 * std::clamp(x, 0.0, 1.0)));
}

// value-1 HSV to RGB; hue in radians [0, 2*pi), sat in [0, 1]
void hsv_to_rgb(double hue, double sat, std::uint8_t* rgb) {
  double hh = hue / (std::numbers::pi / 3.0);
  int sector = int(hh);
  double frac = hh - sector;
  if (sector >= 6 || sector < 0) {
    sector = 0;
    frac = 0.0;
  }
  const double p = 1.0 - sat;
  const double q = 1.0 - sat * frac;
  const double t = 1.0 - sat * (1.0 - frac);
  double r, g, b;
  switch (sector) {
    case 0: r = 1, g = t, b = p; break;
    case 1: r = q, g = 1, b = p; break;
    case 2: r = p, g = 1, b = t; break;
    case 3: r = p, g = q, b = 1; break;
    case 4: r = t, g = p, b = 1; break;
    default: r = 1, g = p, b = q; break;
  }
  rgb[0] = to_byte(r);
  rgb[1] = to_byte(g);
  rgb[2] = to_byte(b);
}

GrayImage map_magnitudes(const std::vector<double>& mag,
                         const std::vector<std::uint8_t>& has_sample, int w,
                         int h, std::optional<double> norm_opt) {
  double norm;
  if (norm_opt) {
    norm = *norm_opt;
  } else {
    std::vector<double> vals;
    vals.reserve(mag.size());
    for (std::size_t i = 0; i < mag.size(); ++i)
      if (has_sample[i]) vals.push_back(mag[i]);
    norm = percentile99(vals);
  }
  if (!(norm > 0.0)) norm = 1.0;

  GrayImage out = GrayImage::make(w, h, 255);
  const long long n = (long long)mag.size();
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < n; ++i) {
    if (!has_sample[i]) continue;
    out.data[i] = std::uint8_t(255 - to_byte(mag[i] / norm));
  }
  return out;
}

}  // namespace

ColorImage flow_to_color(const FlowField& flow,
                         std::optional<double> max_norm) {
  double norm;
  if (max_norm) {
    norm = *max_norm;
  } else {
    std::vector<double> mags;
    mags.reserve(flow.size());
    for (std::size_t i = 0; i < flow.size(); ++i)
      if (flow.valid[i])
        mags.push_back(std::hypot(double(flow.u[i]), double(flow.v[i])));
    norm = percentile99(mags);
  }
  if (!(norm > 0.0)) norm = 1.0;

  ColorImage out = ColorImage::make(flow.width, flow.height, 3, 0);
  const long long n = (long long)flow.size();
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < n; ++i) {
    if (!flow.valid[i]) continue;  // stays black
    const double u = flow.u[i], v = flow.v[i];
    const double mag = std::hypot(u, v);
    const double sat = std::min(mag / norm, 1.0);
    double hue = std::atan2(v, u);
    if (hue < 0) hue += 2.0 * std::numbers::pi;
    hsv_to_rgb(hue, sat, &out.data[3 * std::size_t(i)]);
  }
  return out;
}

GrayImage gradient_magnitude_map(const GradientField& g, FlowComponent which,
                                 std::optional<double> norm) {
  int first = 0, last = 3;
  if (which == FlowComponent::u) last = 1;
  if (which == FlowComponent::v) first = 2;

  std::vector<double> mag(g.size(), 0.0);
  std::vector<std::uint8_t> has(g.size(), 0);
  long long total = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double s = 0;
    bool any = false;
    for (int p = first; p <= last; ++p) {
      if (!g.valid[p][i]) continue;
      s += g.plane[p][i] * g.plane[p][i];
      any = true;
    }
    if (any) {
      mag[i] = std::sqrt(s);
      has[i] = 1;
      ++total;
    }
  }
  if (total == 0)
    throw EmptyField("gradient field has no valid sample in the selection");
  return map_magnitudes(mag, has, g.width, g.height, norm);
}

GrayImage gradient_difference_map(const GradientField& gt,
                                  const GradientField& est,
                                  std::optional<double> norm) {
  if (gt.width != est.width || gt.height != est.height)
    throw DimensionMismatch(
        "gradient fields are " + std::to_string(gt.width) + "x" +
        std::to_string(gt.height) + " vs " + std::to_string(est.width) + "x" +
        std::to_string(est.height));

  std::vector<double> mag(gt.size(), 0.0);
  std::vector<std::uint8_t> has(gt.size(), 0);
  for (std::size_t i = 0; i < gt.size(); ++i) {
    double s = 0;
    bool any = false;
    for (int p = 0; p < 4; ++p) {
      if (!gt.valid[p][i] || !est.valid[p][i]) continue;
      const double d = gt.plane[p][i] - est.plane[p][i];
      s += d * d;
      any = true;
    }
    if (any) {
      mag[i] = std::sqrt(s);
      has[i] = 1;
    }
  }
  return map_magnitudes(mag, has, gt.width, gt.height, norm);
}

}  // namespace floweval
