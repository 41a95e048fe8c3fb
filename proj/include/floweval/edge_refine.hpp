#pragma once

#include "floweval/types.hpp"

namespace floweval {

/// How edge refinement turns weighted neighbor flows into an output value.
/// weighted_median: weighted median of the neighbor values (default).
/// product_median: plain median of the products weight * value.
enum class ErMode {
  weighted_median,
  product_median,
};

struct ErConfig {
  double n1 = 7.0;  // spatial bandwidth, pixels
  double n2 = 7.0;  // color bandwidth, intensity units
  int radius = 7;   // neighborhood half-width -> (2*radius+1)^2 window
  ErMode mode = ErMode::weighted_median;
};

/// Bilateral weight between the pixel at (i, j) and its neighbor (ni, nj):
///   exp(-0.5 * ((i-ni)^2 + (j-nj)^2) / n1^2)
/// * exp(-0.5 * ||I(i,j) - I(ni,nj)||^2 / (n2^2 * C))
/// where C is the channel count and the color norm sums squared per-channel
/// differences. Always in (0, 1]. Throws OutOfBounds for coordinates outside
/// the image.
double er_weight(const ColorImage& image, int i, int j, int ni, int nj,
                 const ErConfig& config = {});

/// Edge-refinement post-processing: each valid flow vector is replaced, per
/// component, by the (weighted or product) median over the valid pixels of
/// its window, weighted by er_weight against the first frame of the pair.
/// Invalid pixels pass through unchanged and stay invalid. Throws
/// DimensionMismatch when flow and image sizes differ.
FlowField edge_refine(const FlowField& flow, const ColorImage& image,
                      const ErConfig& config = {});

}  // namespace floweval
