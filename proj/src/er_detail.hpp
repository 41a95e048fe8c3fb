#pragma once

// Shared pieces of the edge-refinement kernels. Both the OpenMP kernel and
// the serial reference build their weights from these, so the two paths are
// bit-identical by construction.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "floweval/types.hpp"

namespace floweval::detail {

inline double er_spatial_factor(int di, int dj, double n1) {
  return std::exp(-0.5 * ((double(di) * di + double(dj) * dj) / (n1 * n1)));
}

inline double er_color_factor(double dist2, double n2, int channels) {
  return std::exp(-0.5 * (dist2 / (n2 * n2 * channels)));
}

inline int color_dist2(const ColorImage& img, std::size_t a, std::size_t b) {
  int sum = 0;
  for (int ch = 0; ch < img.channels; ++ch) {
    const int d = int(img.data[a + ch]) - int(img.data[b + ch]);
    sum += d * d;
  }
  return sum;
}

// Value at which the cumulative sorted weight first reaches half the total.
inline float weighted_median(std::vector<std::pair<float, double>>& vw) {
  std::sort(vw.begin(), vw.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  double total = 0;
  for (const auto& [v, w] : vw) total += w;
  double cum = 0;
  for (const auto& [v, w] : vw) {
    cum += w;
    if (cum >= 0.5 * total) return v;
  }
  return vw.back().first;
}

// Lower of the two middles for even counts.
inline double lower_median(std::vector<double>& v) {
  const std::size_t k = (v.size() - 1) / 2;
  std::nth_element(v.begin(), v.begin() + k, v.end());
  return v[k];
}

}  // namespace floweval::detail
