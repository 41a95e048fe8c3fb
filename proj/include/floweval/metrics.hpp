#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "floweval/types.hpp"

namespace floweval {

/// Restricts a metric to a rectangle or to an explicit per-pixel mask.
/// Samples outside the region behave exactly like invalid pixels.
class EvalRegion {
 public:
  static EvalRegion rect(const Rect& r);
  static EvalRegion mask(int width, int height, std::vector<std::uint8_t> mask);

  /// Per-pixel in-region flags for a width x height frame.
  /// Throws BadRegion if the rectangle falls outside the frame or the mask
  /// size does not match it.
  std::vector<std::uint8_t> resolve(int width, int height) const;

 private:
  EvalRegion() = default;
  std::optional<Rect> rect_;
  std::vector<std::uint8_t> mask_;
  int mask_width_ = 0;
  int mask_height_ = 0;
};

// Plane indices of a GradientField.
inline constexpr int kPlaneUx = 0;
inline constexpr int kPlaneUy = 1;
inline constexpr int kPlaneVx = 2;
inline constexpr int kPlaneVy = 3;
inline constexpr const char* kPlaneNames[4] = {"ux", "uy", "vx", "vy"};

/// The four flow-gradient planes (ux, uy, vx, vy) with per-plane validity.
/// A sample is valid only when both flow pixels entering its finite
/// difference are valid; the last column of x-gradients and the last row of
/// y-gradients are always invalid. Invalid samples hold 0.
struct GradientField {
  int width = 0;
  int height = 0;
  std::array<std::vector<double>, 4> plane;
  std::array<std::vector<std::uint8_t>, 4> valid;

  std::size_t size() const { return static_cast<std::size_t>(width) * height; }
  std::size_t idx(int r, int c) const {
    return static_cast<std::size_t>(r) * width + c;
  }
};

/// Mean and population standard deviation (divide by n) of the masked
/// samples of one plane.
struct FieldStats {
  double mean = 0.0;
  double stddev = 0.0;
  long long n = 0;
};

/// One gradient plane plus its validity mask, as consumed by ess().
struct PlaneView {
  std::span<const double> values;
  std::span<const std::uint8_t> valid;
};

/// AEPE, MESD and the per-plane ESS values for one gt/estimate comparison.
/// mesd is always (1 - (ess_ux+ess_uy+ess_vx+ess_vy)/4) * 100.
struct MetricReport {
  double aepe = 0.0;
  double mesd = 0.0;
  double ess_ux = 0.0;
  double ess_uy = 0.0;
  double ess_vx = 0.0;
  double ess_vy = 0.0;
  long long n_flow = 0;
  long long n_grad_ux = 0;
  long long n_grad_uy = 0;
  long long n_grad_vx = 0;
  long long n_grad_vy = 0;

  double ess(int p) const {
    const double e[4] = {ess_ux, ess_uy, ess_vx, ess_vy};
    return e[p];
  }
  long long n_grad(int p) const {
    const long long n[4] = {n_grad_ux, n_grad_uy, n_grad_vx, n_grad_vy};
    return n[p];
  }
};

// Stabilizer added SSIM-style to numerator and denominator of each ESS
// factor so that constant (zero-gradient) planes compare as identical.
inline constexpr double kEssEpsilon = 1e-12;

/// Finite-difference gradients with the half templates
///   gx: out(r,c) = (f(r,c) - f(r,c+1)) / 2,
///   gy: out(r,c) = (f(r,c) - f(r+1,c)) / 2.
/// Throws TooSmall when either dimension is below 2.
GradientField gradient(const FlowField& flow);

FieldStats plane_stats(PlaneView p);

/// Edge structure similarity of two planes over their joint-valid samples:
/// the product of luminance, contrast and structure comparisons, each
/// stabilized with kEssEpsilon. Throws InsufficientSamples when fewer than
/// two joint-valid samples exist. Result lies in [-1, 1] up to epsilon.
double ess(PlaneView a, PlaneView b);

/// Average endpoint error over joint-valid pixels (optionally restricted to
/// a region). Throws DimensionMismatch or EmptyRegion.
double aepe(const FlowField& gt, const FlowField& est,
            const EvalRegion* region = nullptr);

/// Motion edge structure difference in percent:
/// (1 - mean of the four gradient-plane ESS values) * 100. 0 is a perfect
/// edge-structure match, 200 the worst case. Throws DimensionMismatch or
/// InsufficientSamples.
double mesd(const FlowField& gt, const FlowField& est,
            const EvalRegion* region = nullptr);

/// AEPE + MESD + per-plane ESS values and sample counts in one pass.
MetricReport evaluate(const FlowField& gt, const FlowField& est,
                      const EvalRegion* region = nullptr);

}  // namespace floweval
