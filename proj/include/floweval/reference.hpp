#pragma once

// Serial reference implementations of the compute kernels. These are plain
// single-threaded loops kept for testing and for the benchmark tool; the
// OpenMP kernels in the main namespace must reproduce them (bit-exactly for
// the per-pixel kernels, to tight tolerance for the reductions).

#include "floweval/edge_refine.hpp"
#include "floweval/metrics.hpp"
#include "floweval/types.hpp"

namespace floweval::ref {

GradientField gradient(const FlowField& flow);
double ess(PlaneView a, PlaneView b);
double aepe(const FlowField& gt, const FlowField& est,
            const EvalRegion* region = nullptr);
double mesd(const FlowField& gt, const FlowField& est,
            const EvalRegion* region = nullptr);
MetricReport evaluate(const FlowField& gt, const FlowField& est,
                      const EvalRegion* region = nullptr);
FlowField edge_refine(const FlowField& flow, const ColorImage& image,
                      const ErConfig& config = {});

}  // namespace floweval::ref
