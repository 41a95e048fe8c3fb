#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "floweval/errors.hpp"
#include "floweval/metrics.hpp"
#include "floweval/viz.hpp"
#include "test_util.hpp"

using namespace floweval;

namespace {

// Hue in degrees recovered from an RGB pixel; requires max > min.
double rgb_hue(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8) {
  const double r = r8 / 255.0, g = g8 / 255.0, b = b8 / 255.0;
  const double mx = std::max({r, g, b}), mn = std::min({r, g, b});
  const double d = mx - mn;
  double h;
  if (mx == r)
    h = 60.0 * std::fmod((g - b) / d + 6.0, 6.0);
  else if (mx == g)
    h = 60.0 * ((b - r) / d + 2.0);
  else
    h = 60.0 * ((r - g) / d + 4.0);
  return h;
}

double angle_diff(double a, double b) {
  double d = std::fmod(a - b + 540.0, 360.0) - 180.0;
  return std::abs(d);
}

}  // namespace

TEST_CASE("zero flow renders white, invalid pixels render black") {
  FlowField f = FlowField::make(4, 3);
  f.valid[f.idx(1, 2)] = 0;
  ColorImage img = flow_to_color(f);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 4; ++c) {
      const std::size_t i = img.idx(r, c);
      if (f.valid[f.idx(r, c)]) {
        CHECK(img.data[i] == 255);
        CHECK(img.data[i + 1] == 255);
        CHECK(img.data[i + 2] == 255);
      } else {
        CHECK(img.data[i] == 0);
        CHECK(img.data[i + 1] == 0);
        CHECK(img.data[i + 2] == 0);
      }
    }
}

TEST_CASE("unit rightward flow is the fully saturated zero-hue color") {
  FlowField f = FlowField::make(1, 1, 1.0f, 0.0f);
  ColorImage img = flow_to_color(f, 1.0);
  CHECK(img.data[0] == 255);
  CHECK(img.data[1] == 0);
  CHECK(img.data[2] == 0);
}

TEST_CASE("valid pixels are never black") {
  std::mt19937 rng(1);
  FlowField f = testutil::random_flow(rng, 16, 16, 20.0, 0.8);
  ColorImage img = flow_to_color(f);
  for (int r = 0; r < 16; ++r)
    for (int c = 0; c < 16; ++c) {
      const std::size_t i = img.idx(r, c);
      const int mx = std::max({img.data[i], img.data[i + 1], img.data[i + 2]});
      if (f.valid[f.idx(r, c)])
        CHECK(mx == 255);
      else
        CHECK(mx == 0);
    }
}

TEST_CASE("rotating all vectors by 90 degrees rotates hues by 90 degrees") {
  std::mt19937 rng(2);
  FlowField f = testutil::random_flow(rng, 12, 12, 4.0, 1.0);
  FlowField rot = f;
  for (std::size_t i = 0; i < f.size(); ++i) {
    rot.u[i] = -f.v[i];
    rot.v[i] = f.u[i];
  }
  // same explicit normalization; keep saturation high so hue is well defined
  ColorImage a = flow_to_color(f, 4.0);
  ColorImage b = flow_to_color(rot, 4.0);
  int checked = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double mag = std::hypot(double(f.u[i]), double(f.v[i]));
    if (mag < 2.0) continue;  // saturation >= 0.5
    const double ha = rgb_hue(a.data[3 * i], a.data[3 * i + 1], a.data[3 * i + 2]);
    const double hb = rgb_hue(b.data[3 * i], b.data[3 * i + 1], b.data[3 * i + 2]);
    CHECK(angle_diff(hb, ha + 90.0) <= 2.0);
    ++checked;
  }
  CHECK(checked > 20);
}

TEST_CASE("gradient map of constant flow is all white") {
  GradientField g = gradient(FlowField::make(6, 6, 2.0f, 7.0f));
  GrayImage img = gradient_magnitude_map(g);
  for (auto px : img.data) CHECK(px == 255);
}

TEST_CASE("a step edge renders as a one-pixel dark line") {
  FlowField f = FlowField::make(6, 5);
  for (int r = 0; r < 5; ++r)
    for (int c = 0; c < 6; ++c) f.u[f.idx(r, c)] = c < 3 ? 0.0f : 10.0f;
  GrayImage img = gradient_magnitude_map(gradient(f), FlowComponent::u);
  for (int r = 0; r < 5; ++r)
    for (int c = 0; c < 6; ++c) {
      if (c == 2)
        CHECK(img.data[img.idx(r, c)] == 0);
      else
        CHECK(img.data[img.idx(r, c)] == 255);
    }
}

TEST_CASE("darkness scales linearly under a fixed normalization") {
  auto ramp = [](float slope) {
    FlowField f = FlowField::make(8, 6);
    for (int r = 0; r < 6; ++r)
      for (int c = 0; c < 8; ++c) f.u[f.idx(r, c)] = slope * c;
    return f;
  };
  GrayImage m1 = gradient_magnitude_map(gradient(ramp(0.4f)),
                                        FlowComponent::u, 1.0);
  GrayImage m2 = gradient_magnitude_map(gradient(ramp(0.8f)),
                                        FlowComponent::u, 1.0);
  for (int r = 0; r < 5; ++r)
    for (int c = 0; c < 7; ++c) {
      const int d1 = 255 - m1.data[m1.idx(r, c)];
      const int d2 = 255 - m2.data[m2.idx(r, c)];
      CHECK(std::abs(d2 - 2 * d1) <= 1);
    }
}

TEST_CASE("gradient map demands at least one valid sample") {
  FlowField f = FlowField::make(4, 4, 0.0f, 0.0f, false);
  CHECK_THROWS_AS(gradient_magnitude_map(gradient(f)), EmptyField);
}

TEST_CASE("difference map of a field with itself is white") {
  std::mt19937 rng(3);
  FlowField f = testutil::random_masked_flow(rng, 10, 8);
  GradientField g = gradient(f);
  GrayImage img = gradient_difference_map(g, g);
  for (auto px : img.data) CHECK(px == 255);
}

TEST_CASE("difference map darkens only where the fields differ") {
  FlowField gt = FlowField::make(10, 10, 1.0f, 1.0f);
  FlowField est = gt;
  for (int r = 2; r <= 4; ++r)
    for (int c = 2; c <= 4; ++c) est.u[est.idx(r, c)] += 8.0f;
  GrayImage img = gradient_difference_map(gradient(gt), gradient(est));
  int dark = 0;
  for (int r = 0; r < 10; ++r)
    for (int c = 0; c < 10; ++c) {
      if (img.data[img.idx(r, c)] < 255) {
        ++dark;
        CHECK(r >= 1);
        CHECK(r <= 5);
        CHECK(c >= 1);
        CHECK(c <= 5);
      }
    }
  CHECK(dark > 0);
}

TEST_CASE("difference map is symmetric in its arguments") {
  std::mt19937 rng(4);
  FlowField a = testutil::random_masked_flow(rng, 9, 9);
  FlowField b = testutil::random_masked_flow(rng, 9, 9);
  GradientField ga = gradient(a), gb = gradient(b);
  CHECK(gradient_difference_map(ga, gb).data ==
        gradient_difference_map(gb, ga).data);
  GradientField small = gradient(FlowField::make(4, 4));
  CHECK_THROWS_AS(gradient_difference_map(ga, small), DimensionMismatch);
}
