// Compares the serial reference kernels against the OpenMP ones on
// synthetic frames and prints timings and agreement.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "floweval/edge_refine.hpp"
#include "floweval/metrics.hpp"
#include "floweval/reference.hpp"
#include "floweval/types.hpp"

using namespace floweval;
using clock_type = std::chrono::steady_clock;

namespace {

double time_best_of(int reps, const std::function<void()>& fn) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    const auto t0 = clock_type::now();
    fn();
    const auto t1 = clock_type::now();
    best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
  }
  return best;
}

void print_row(const char* name, double serial_s, double parallel_s,
               const char* agreement) {
  std::printf("%-12s  %10.2f ms  %10.2f ms  %7.2fx  %s\n", name,
              serial_s * 1e3, parallel_s * 1e3, serial_s / parallel_s,
              agreement);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"serial vs OpenMP kernel benchmark"};
  int width = 512, height = 256, reps = 3, radius = 7;
  unsigned seed = 1;
  app.add_option("--width", width);
  app.add_option("--height", height);
  app.add_option("--reps", reps);
  app.add_option("--radius", radius, "er window half-width");
  app.add_option("--seed", seed);
  CLI11_PARSE(app, argc, argv);

  std::mt19937 rng(seed);
  std::uniform_real_distribution<float> val(-8.0f, 8.0f);
  FlowField gt = FlowField::make(width, height);
  FlowField est = FlowField::make(width, height);
  ColorImage img = ColorImage::make(width, height, 3);
  std::uniform_int_distribution<int> px(0, 255);
  for (std::size_t i = 0; i < gt.size(); ++i) {
    gt.u[i] = val(rng);
    gt.v[i] = val(rng);
    est.u[i] = gt.u[i] + 0.1f * val(rng);
    est.v[i] = gt.v[i] + 0.1f * val(rng);
  }
  for (auto& p : img.data) p = std::uint8_t(px(rng));

#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (built without OpenMP)\n");
#endif
  std::printf("frame: %dx%d, er radius: %d, best of %d reps\n\n", width,
              height, radius, reps);
  std::printf("%-12s  %13s  %13s  %8s  %s\n", "kernel", "serial", "parallel",
              "speedup", "agreement");

  {
    GradientField a, b;
    const double ts = time_best_of(reps, [&] { a = ref::gradient(gt); });
    const double tp = time_best_of(reps, [&] { b = gradient(gt); });
    bool same = true;
    for (int p = 0; p < 4; ++p)
      same = same && a.plane[p] == b.plane[p] && a.valid[p] == b.valid[p];
    print_row("gradient", ts, tp, same ? "bit-exact" : "MISMATCH");
  }
  {
    MetricReport a, b;
    const double ts = time_best_of(reps, [&] { a = ref::evaluate(gt, est); });
    const double tp = time_best_of(reps, [&] { b = evaluate(gt, est); });
    char msg[64];
    std::snprintf(msg, sizeof(msg), "|d aepe|=%.1e |d mesd|=%.1e",
                  std::abs(a.aepe - b.aepe), std::abs(a.mesd - b.mesd));
    print_row("evaluate", ts, tp, msg);
  }
  {
    ErConfig cfg;
    cfg.radius = radius;
    FlowField a, b;
    const double ts =
        time_best_of(reps, [&] { a = ref::edge_refine(est, img, cfg); });
    const double tp = time_best_of(reps, [&] { b = edge_refine(est, img, cfg); });
    const bool same = a.u == b.u && a.v == b.v && a.valid == b.valid;
    print_row("edge_refine", ts, tp, same ? "bit-exact" : "MISMATCH");
  }
  return 0;
}
