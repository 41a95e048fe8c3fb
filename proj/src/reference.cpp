#include "floweval/reference.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "er_detail.hpp"
#include "floweval/errors.hpp"

namespace floweval::ref {

namespace {

// gradients under an explicit per-pixel validity mask
GradientField gradient_masked(const FlowField& flow,
                              const std::vector<std::uint8_t>& ok) {
  const int w = flow.width, h = flow.height;
  GradientField g;
  g.width = w;
  g.height = h;
  for (int p = 0; p < 4; ++p) {
    g.plane[p].assign(flow.size(), 0.0);
    g.valid[p].assign(flow.size(), 0);
  }
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const std::size_t i = std::size_t(r) * w + c;
      if (c + 1 < w && ok[i] && ok[i + 1]) {
        g.plane[kPlaneUx][i] = (double(flow.u[i]) - double(flow.u[i + 1])) * 0.5;
        g.plane[kPlaneVx][i] = (double(flow.v[i]) - double(flow.v[i + 1])) * 0.5;
        g.valid[kPlaneUx][i] = 1;
        g.valid[kPlaneVx][i] = 1;
      }
      if (r + 1 < h && ok[i] && ok[i + w]) {
        g.plane[kPlaneUy][i] = (double(flow.u[i]) - double(flow.u[i + w])) * 0.5;
        g.plane[kPlaneVy][i] = (double(flow.v[i]) - double(flow.v[i + w])) * 0.5;
        g.valid[kPlaneUy][i] = 1;
        g.valid[kPlaneVy][i] = 1;
      }
    }
  }
  return g;
}

std::vector<std::uint8_t> joint_mask(const FlowField& gt, const FlowField& est,
                                     const EvalRegion* region) {
  if (!gt.same_dims(est))
    throw DimensionMismatch(
        "dimension mismatch: " + std::to_string(gt.width) + "x" +
        std::to_string(gt.height) + " vs " + std::to_string(est.width) + "x" +
        std::to_string(est.height));
  std::vector<std::uint8_t> reg;
  if (region) reg = region->resolve(gt.width, gt.height);
  std::vector<std::uint8_t> jv(gt.size());
  for (std::size_t i = 0; i < gt.size(); ++i)
    jv[i] = gt.valid[i] && est.valid[i] && (reg.empty() || reg[i]) ? 1 : 0;
  return jv;
}

MetricReport evaluate_impl(const FlowField& gt, const FlowField& est,
                           const EvalRegion* region, bool want_aepe,
                           bool want_mesd) {
  const std::vector<std::uint8_t> jv = joint_mask(gt, est, region);
  MetricReport rep;
  for (std::size_t i = 0; i < jv.size(); ++i) rep.n_flow += jv[i];

  if (want_aepe) {
    if (rep.n_flow == 0) throw EmptyRegion("no joint-valid pixels to compare");
    double sum = 0;
    for (std::size_t i = 0; i < gt.size(); ++i) {
      if (!jv[i]) continue;
      const double du = double(gt.u[i]) - double(est.u[i]);
      const double dv = double(gt.v[i]) - double(est.v[i]);
      sum += std::sqrt(du * du + dv * dv);
    }
    rep.aepe = sum / double(rep.n_flow);
  }

  if (want_mesd) {
    if (gt.width < 2 || gt.height < 2)
      throw InsufficientSamples("frame too small for gradient statistics");
    GradientField gg = gradient_masked(gt, jv);
    GradientField ge = gradient_masked(est, jv);
    double e[4];
    long long ng[4];
    for (int p = 0; p < 4; ++p) {
      e[p] = floweval::ref::ess(PlaneView{gg.plane[p], gg.valid[p]},
                                PlaneView{ge.plane[p], ge.valid[p]});
      long long n = 0;
      for (std::size_t i = 0; i < gg.valid[p].size(); ++i)
        n += gg.valid[p][i] && ge.valid[p][i];
      ng[p] = n;
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
  return gradient_masked(flow, flow.valid);
}

double ess(PlaneView a, PlaneView b) {
  if (a.values.size() != b.values.size() ||
      a.values.size() != a.valid.size() || b.values.size() != b.valid.size())
    throw DimensionMismatch("ess planes/masks have mismatched sizes");
  long long n = 0;
  double sum_a = 0, sum_b = 0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    if (!a.valid[i] || !b.valid[i]) continue;
    sum_a += a.values[i];
    sum_b += b.values[i];
    ++n;
  }
  if (n < 2)
    throw InsufficientSamples("ess needs at least 2 joint-valid samples, got " +
                              std::to_string(n));
  const double mean_a = sum_a / double(n);
  const double mean_b = sum_b / double(n);
  double var_a = 0, var_b = 0, cov = 0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    if (!a.valid[i] || !b.valid[i]) continue;
    const double da = a.values[i] - mean_a;
    const double db = b.values[i] - mean_b;
    var_a += da * da;
    var_b += db * db;
    cov += da * db;
  }
  var_a /= double(n);
  var_b /= double(n);
  cov /= double(n);
  const double eps = kEssEpsilon;
  const double sd_a = std::sqrt(var_a);
  const double sd_b = std::sqrt(var_b);
  const double lum = (2.0 * mean_a * mean_b + eps) /
                     (mean_a * mean_a + mean_b * mean_b + eps);
  const double con = (2.0 * sd_a * sd_b + eps) / (var_a + var_b + eps);
  const double str = (cov + eps) / (sd_a * sd_b + eps);
  return lum * con * str;
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

FlowField edge_refine(const FlowField& flow, const ColorImage& image,
                      const ErConfig& config) {
  if (!(config.n1 > 0.0) || !(config.n2 > 0.0))
    throw OutOfRange("er bandwidths must be positive");
  if (config.radius < 1) throw OutOfRange("er radius must be at least 1");
  if (flow.width != image.width || flow.height != image.height)
    throw DimensionMismatch(
        "flow is " + std::to_string(flow.width) + "x" +
        std::to_string(flow.height) + " but the guide image is " +
        std::to_string(image.width) + "x" + std::to_string(image.height));

  const int w = flow.width, h = flow.height, rad = config.radius;
  FlowField out = flow;
  std::vector<std::pair<float, double>> vw_u, vw_v;
  std::vector<double> prod_u, prod_v;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const std::size_t i = std::size_t(r) * w + c;
      if (!flow.valid[i]) continue;
      vw_u.clear();
      vw_v.clear();
      prod_u.clear();
      prod_v.clear();
      const std::size_t center = image.idx(r, c);
      for (int nr = std::max(0, r - rad); nr <= std::min(h - 1, r + rad); ++nr) {
        for (int nc = std::max(0, c - rad); nc <= std::min(w - 1, c + rad);
             ++nc) {
          const std::size_t ni = std::size_t(nr) * w + nc;
          if (!flow.valid[ni]) continue;
          const int d2 = detail::color_dist2(image, center, image.idx(nr, nc));
          const double wgt =
              detail::er_spatial_factor(nr - r, nc - c, config.n1) *
              detail::er_color_factor(double(d2), config.n2, image.channels);
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
  return out;
}

}  // namespace floweval::ref
