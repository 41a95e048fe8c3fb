#include "floweval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "floweval/errors.hpp"
#include "validate.hpp"

namespace floweval {

EvalRegion EvalRegion::rect(const Rect& r) {
  EvalRegion reg;
  reg.rect_ = r;
  return reg;
}

EvalRegion EvalRegion::mask(int width, int height,
                            std::vector<std::uint8_t> mask) {
  EvalRegion reg;
  reg.mask_ = std::move(mask);
  reg.mask_width_ = width;
  reg.mask_height_ = height;
  return reg;
}

std::vector<std::uint8_t> EvalRegion::resolve(int width, int height) const {
  const std::size_t n = std::size_t(width) * height;
  if (rect_) {
    detail::check_rect(width, height, *rect_);
    std::vector<std::uint8_t> out(n, 0);
    for (int r = rect_->top; r < rect_->top + rect_->height; ++r)
      std::fill_n(out.begin() + std::size_t(r) * width + rect_->left,
                  rect_->width, std::uint8_t(1));
    return out;
  }
  if (mask_width_ != width || mask_height_ != height || mask_.size() != n)
    throw BadRegion("region mask is " + std::to_string(mask_width_) + "x" +
                    std::to_string(mask_height_) + " but the frame is " +
                    std::to_string(width) + "x" + std::to_string(height));
  return mask_;
}

namespace {

// Reductions accumulate fixed-size index blocks in parallel, then fold the
// block partials serially, so results do not depend on the thread count.
constexpr long long kReduceBlock = 4096;

struct PairSums {
  long long n = 0;
  double mean_a = 0, mean_b = 0;
  double var_a = 0, var_b = 0, cov = 0;
};

PairSums pair_stats(std::span<const double> a,
                    std::span<const std::uint8_t> av,
                    std::span<const double> b,
                    std::span<const std::uint8_t> bv) {
  const long long n = (long long)a.size();
  const long long nb = (n + kReduceBlock - 1) / kReduceBlock;
  std::vector<std::array<double, 2>> sums(nb, {0.0, 0.0});
  std::vector<long long> counts(nb, 0);
#pragma omp parallel for schedule(static)
  for (long long bi = 0; bi < nb; ++bi) {
    const long long lo = bi * kReduceBlock;
    const long long hi = std::min(n, lo + kReduceBlock);
    double sa = 0, sb = 0;
    long long cnt = 0;
    for (long long i = lo; i < hi; ++i) {
      if (!av[i] || !bv[i]) continue;
      sa += a[i];
      sb += b[i];
      ++cnt;
    }
    sums[bi] = {sa, sb};
    counts[bi] = cnt;
  }
  PairSums out;
  double sa = 0, sb = 0;
  for (long long bi = 0; bi < nb; ++bi) {
    sa += sums[bi][0];
    sb += sums[bi][1];
    out.n += counts[bi];
  }
  if (out.n == 0) return out;
  out.mean_a = sa / double(out.n);
  out.mean_b = sb / double(out.n);

  std::vector<std::array<double, 3>> cent(nb, {0.0, 0.0, 0.0});
  const double ma = out.mean_a, mb = out.mean_b;
#pragma omp parallel for schedule(static)
  for (long long bi = 0; bi < nb; ++bi) {
    const long long lo = bi * kReduceBlock;
    const long long hi = std::min(n, lo + kReduceBlock);
    double daa = 0, dbb = 0, dab = 0;
    for (long long i = lo; i < hi; ++i) {
      if (!av[i] || !bv[i]) continue;
      const double da = a[i] - ma;
      const double db = b[i] - mb;
      daa += da * da;
      dbb += db * db;
      dab += da * db;
    }
    cent[bi] = {daa, dbb, dab};
  }
  double daa = 0, dbb = 0, dab = 0;
  for (long long bi = 0; bi < nb; ++bi) {
    daa += cent[bi][0];
    dbb += cent[bi][1];
    dab += cent[bi][2];
  }
  out.var_a = daa / double(out.n);
  out.var_b = dbb / double(out.n);
  out.cov = dab / double(out.n);
  return out;
}

double ess_from(const PairSums& s) {
  const double eps = kEssEpsilon;
  const double sd_a = std::sqrt(s.var_a);
  const double sd_b = std::sqrt(s.var_b);
  const double lum = (2.0 * s.mean_a * s.mean_b + eps) /
                     (s.mean_a * s.mean_a + s.mean_b * s.mean_b + eps);
  const double con = (2.0 * sd_a * sd_b + eps) / (s.var_a + s.var_b + eps);
  const double str = (s.cov + eps) / (sd_a * sd_b + eps);
  return lum * con * str;
}

// Gradients of gt and est under one shared (joint) validity mask. Both
// fields end up with identical per-plane masks, which is exactly what the
// per-plane ESS pairs need.
struct PairGradients {
  int width = 0, height = 0;
  std::array<std::vector<double>, 4> gt, est;
  std::array<std::vector<std::uint8_t>, 4> valid;
};

PairGradients pair_gradients(const FlowField& a, const FlowField& b,
                             const std::vector<std::uint8_t>& jv) {
  const int w = a.width, h = a.height;
  PairGradients pg;
  pg.width = w;
  pg.height = h;
  const std::size_t n = a.size();
  for (int p = 0; p < 4; ++p) {
    pg.gt[p].assign(n, 0.0);
    pg.est[p].assign(n, 0.0);
    pg.valid[p].assign(n, 0);
  }
#pragma omp parallel for schedule(static)
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const std::size_t i = std::size_t(r) * w + c;
      if (c + 1 < w && jv[i] && jv[i + 1]) {
        pg.gt[kPlaneUx][i] = (double(a.u[i]) - double(a.u[i + 1])) * 0.5;
        pg.gt[kPlaneVx][i] = (double(a.v[i]) - double(a.v[i + 1])) * 0.5;
        pg.est[kPlaneUx][i] = (double(b.u[i]) - double(b.u[i + 1])) * 0.5;
        pg.est[kPlaneVx][i] = (double(b.v[i]) - double(b.v[i + 1])) * 0.5;
        pg.valid[kPlaneUx][i] = 1;
        pg.valid[kPlaneVx][i] = 1;
      }
      if (r + 1 < h && jv[i] && jv[i + w]) {
        pg.gt[kPlaneUy][i] = (double(a.u[i]) - double(a.u[i + w])) * 0.5;
        pg.gt[kPlaneVy][i] = (double(a.v[i]) - double(a.v[i + w])) * 0.5;
        pg.est[kPlaneUy][i] = (double(b.u[i]) - double(b.u[i + w])) * 0.5;
        pg.est[kPlaneVy][i] = (double(b.v[i]) - double(b.v[i + w])) * 0.5;
        pg.valid[kPlaneUy][i] = 1;
        pg.valid[kPlaneVy][i] = 1;
      }
    }
  }
  return pg;
}

double aepe_mean(const FlowField& gt, const FlowField& est,
                 const std::vector<std::uint8_t>& jv, long long n_flow) {
  const long long n = (long long)gt.size();
  const long long nb = (n + kReduceBlock - 1) / kReduceBlock;
  std::vector<double> partial(nb, 0.0);
#pragma omp parallel for schedule(static)
  for (long long bi = 0; bi < nb; ++bi) {
    const long long lo = bi * kReduceBlock;
    const long long hi = std::min(n, lo + kReduceBlock);
    double s = 0;
    for (long long i = lo; i < hi; ++i) {
      if (!jv[i]) continue;
      const double du = double(gt.u[i]) - double(est.u[i]);
      const double dv = double(gt.v[i]) - double(est.v[i]);
      s += std::sqrt(du * du + dv * dv);
    }
    partial[bi] = s;
  }
  double sum = 0;
  for (long long bi = 0; bi < nb; ++bi) sum += partial[bi];
  return sum / double(n_flow);
}

MetricReport evaluate_impl(const FlowField& gt, const FlowField& est,
                           const EvalRegion* region, bool want_aepe,
                           bool want_mesd) {
  if (!gt.same_dims(est))
    throw DimensionMismatch(
        "dimension mismatch: " + std::to_string(gt.width) + "x" +
        std::to_string(gt.height) + " vs " + std::to_string(est.width) + "x" +
        std::to_string(est.height));

  std::vector<std::uint8_t> reg;
  if (region) reg = region->resolve(gt.width, gt.height);

  std::vector<std::uint8_t> jv(gt.size());
  long long n_flow = 0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    jv[i] = gt.valid[i] && est.valid[i] && (reg.empty() || reg[i]) ? 1 : 0;
    n_flow += jv[i];
  }

  MetricReport rep;
  rep.n_flow = n_flow;

  if (want_aepe) {
    if (n_flow == 0) throw EmptyRegion("no joint-valid pixels to compare");
    rep.aepe = aepe_mean(gt, est, jv, n_flow);
  }

  if (want_mesd) {
    if (gt.width < 2 || gt.height < 2)
      throw InsufficientSamples("frame too small for gradient statistics");
    PairGradients pg = pair_gradients(gt, est, jv);
    double e[4];
    long long ng[4];
    for (int p = 0; p < 4; ++p) {
      PairSums s = pair_stats(pg.gt[p], pg.valid[p], pg.est[p], pg.valid[p]);
      if (s.n < 2)
        throw InsufficientSamples(
            std::string("gradient plane ") + kPlaneNames[p] + " has " +
            std::to_string(s.n) + " joint-valid samples (need at least 2)");
      e[p] = ess_from(s);
      ng[p] = s.n;
    }
    rep.ess_ux = e[0];
    rep.ess_uy = e[1];
    rep.ess_vx = e[2];
    rep.ess_vy = e[3];
    rep.n_grad_ux = ng[0];
    rep.n_grad_uy = ng[1];
    rep.n_grad_vx = ng[2];
    rep.n_grad_vy = ng[3];
    rep.mesd =
        (1.0 - (rep.ess_ux + rep.ess_uy + rep.ess_vx + rep.ess_vy) / 4.0) *
        100.0;
  }
  return rep;
}

}  // namespace

GradientField gradient(const FlowField& flow) {
  if (flow.width < 2 || flow.height < 2)
    throw TooSmall("gradient needs at least a 2x2 field, got " +
                   std::to_string(flow.width) + "x" +
                   std::to_string(flow.height));
  const int w = flow.width, h = flow.height;
  GradientField g;
  g.width = w;
  g.height = h;
  for (int p = 0; p < 4; ++p) {
    g.plane[p].assign(flow.size(), 0.0);
    g.valid[p].assign(flow.size(), 0);
  }
#pragma omp parallel for schedule(static)
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const std::size_t i = std::size_t(r) * w + c;
      if (c + 1 < w && flow.valid[i] && flow.valid[i + 1]) {
        g.plane[kPlaneUx][i] = (double(flow.u[i]) - double(flow.u[i + 1])) * 0.5;
        g.plane[kPlaneVx][i] = (double(flow.v[i]) - double(flow.v[i + 1])) * 0.5;
        g.valid[kPlaneUx][i] = 1;
        g.valid[kPlaneVx][i] = 1;
      }
      if (r + 1 < h && flow.valid[i] && flow.valid[i + w]) {
        g.plane[kPlaneUy][i] = (double(flow.u[i]) - double(flow.u[i + w])) * 0.5;
        g.plane[kPlaneVy][i] = (double(flow.v[i]) - double(flow.v[i + w])) * 0.5;
        g.valid[kPlaneUy][i] = 1;
        g.valid[kPlaneVy][i] = 1;
      }
    }
  }
  return g;
}

FieldStats plane_stats(PlaneView p) {
  if (p.values.size() != p.valid.size())
    throw DimensionMismatch("plane and mask sizes differ");
  PairSums s = pair_stats(p.values, p.valid, p.values, p.valid);
  if (s.n == 0) throw InsufficientSamples("plane has no valid samples");
  return FieldStats{s.mean_a, std::sqrt(s.var_a), s.n};
}

double ess(PlaneView a, PlaneView b) {
  if (a.values.size() != b.values.size() ||
      a.values.size() != a.valid.size() || b.values.size() != b.valid.size())
    throw DimensionMismatch("ess planes/masks have mismatched sizes");
  PairSums s = pair_stats(a.values, a.valid, b.values, b.valid);
  if (s.n < 2)
    throw InsufficientSamples("ess needs at least 2 joint-valid samples, got " +
                              std::to_string(s.n));
  return ess_from(s);
}

double aepe(const FlowField& gt, const FlowField& est,
            const EvalRegion* region) {
  return evaluate_impl(gt, est, region, true, false).aepe;
}

double mesd(const FlowField& gt, const FlowField& est,
            const EvalRegion* region) {
  return evaluate_impl(gt, est, region, false, true).mesd;
}

MetricReport evaluate(const FlowField& gt, const FlowField& est,
                      const EvalRegion* region) {
  return evaluate_impl(gt, est, region, true, true);
}

}  // namespace floweval
