#pragma once

#include <optional>

#include "floweval/metrics.hpp"
#include "floweval/types.hpp"

namespace floweval {

/// Which flow component's gradient planes feed gradient_magnitude_map.
enum class FlowComponent {
  u,     // ux, uy
  v,     // vx, vy
  both,  // all four planes
};

/// Color-wheel coding: hue from atan2(v, u), saturation from |(u, v)|
/// normalized by max_norm (default: 99th percentile of the valid
/// magnitudes). Zero flow maps to white, invalid pixels to black.
ColorImage flow_to_color(const FlowField& flow,
                         std::optional<double> max_norm = {});

/// Per-pixel gradient magnitude over the selected planes' valid samples,
/// mapped linearly so 0 -> white and norm (default: 99th percentile) ->
/// black, clamped. Pixels without a valid selected sample are white. Throws
/// EmptyField when no valid sample exists.
GrayImage gradient_magnitude_map(const GradientField& g,
                                 FlowComponent which = FlowComponent::both,
                                 std::optional<double> norm = {});

/// Per-pixel magnitude of (gt - est) over the four planes' joint-valid
/// samples, with the same white-to-black mapping; darker means larger
/// difference. Throws DimensionMismatch.
GrayImage gradient_difference_map(const GradientField& gt,
                                  const GradientField& est,
                                  std::optional<double> norm = {});

}  // namespace floweval
