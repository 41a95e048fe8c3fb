// Command-line front end: metric, refine, viz, batch.
// Exit codes: 0 success, 1 input error, 2 internal error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "floweval/edge_refine.hpp"
#include "floweval/errors.hpp"
#include "floweval/flow_io.hpp"
#include "floweval/harness.hpp"
#include "floweval/metrics.hpp"
#include "floweval/reference.hpp"
#include "floweval/viz.hpp"

namespace fs = std::filesystem;
using namespace floweval;

namespace {

Rect parse_region(const std::string& s) {
  Rect r;
  char extra;
  if (std::sscanf(s.c_str(), "%d,%d,%d,%d%c", &r.top, &r.left, &r.height,
                  &r.width, &extra) != 4)
    throw BadRegion("--region expects top,left,height,width, got '" + s + "'");
  return r;
}

ErMode parse_mode(const std::string& s) {
  if (s == "weighted-median") return ErMode::weighted_median;
  if (s == "product-median") return ErMode::product_median;
  throw OutOfRange("--mode must be weighted-median or product-median, got '" +
                   s + "'");
}

FlowField load_flow(const char* what, const fs::path& p) {
  try {
    return read_flow_file(p);
  } catch (const Error& e) {
    throw Error(std::string(what) + " '" + p.string() + "': " + e.what());
  }
}

ColorImage load_image(const char* what, const fs::path& p) {
  try {
    return read_image_file(p);
  } catch (const Error& e) {
    throw Error(std::string(what) + " '" + p.string() + "': " + e.what());
  }
}

void emit(const std::string& text, const std::string& out_file) {
  if (out_file.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_file, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + out_file + " for writing");
  out << text;
}

struct MetricArgs {
  std::string gt, est, region, format = "json", out;
};

void run_metric(const MetricArgs& a) {
  FlowField gt = load_flow("gt", a.gt);
  FlowField est = load_flow("est", a.est);
  std::optional<EvalRegion> region;
  if (!a.region.empty()) region = EvalRegion::rect(parse_region(a.region));
  MetricReport rep = evaluate(gt, est, region ? &*region : nullptr);
  emit(a.format == "csv" ? metric_report_csv(rep) : metric_report_json(rep),
       a.out);
}

struct RefineArgs {
  std::string flow, image, out;
  double n1 = 7.0, n2 = 7.0;
  int radius = 7;
  std::string mode = "weighted-median";
};

void run_refine(const RefineArgs& a) {
  const std::string in_ext = fs::path(a.flow).extension().string();
  if (fs::path(a.out).extension() != in_ext)
    throw UnsupportedFormat("refined flow keeps the input format; expected '" +
                            in_ext + "' output, got '" + a.out + "'");
  FlowField flow = load_flow("flow", a.flow);
  ColorImage image = load_image("image", a.image);
  ErConfig cfg;
  cfg.n1 = a.n1;
  cfg.n2 = a.n2;
  cfg.radius = a.radius;
  cfg.mode = parse_mode(a.mode);
  write_flow_file(a.out, edge_refine(flow, image, cfg));
  std::cout << a.out << "\n";
}

struct VizArgs {
  std::string gt, est, out_dir, kind = "color", region;
  double norm = 0.0;  // 0 = percentile default
};

void run_viz(const VizArgs& a) {
  std::optional<double> norm;
  if (a.norm > 0.0) norm = a.norm;

  FlowField gt = load_flow("gt", a.gt);
  std::optional<FlowField> est;
  if (!a.est.empty()) est = load_flow("est", a.est);
  if (!a.region.empty()) {
    const Rect r = parse_region(a.region);
    gt = crop(gt, r);
    if (est) *est = crop(*est, r);
  }
  fs::create_directories(a.out_dir);
  const fs::path dir(a.out_dir);

  auto save = [&](const fs::path& name, const auto& image) {
    write_png_file(dir / name, image);
    std::cout << (dir / name).string() << "\n";
  };

  if (a.kind == "color") {
    save("color_gt.png", flow_to_color(gt, norm));
    if (est) save("color_est.png", flow_to_color(*est, norm));
  } else if (a.kind == "grad") {
    save("grad_gt.png",
         gradient_magnitude_map(gradient(gt), FlowComponent::both, norm));
    if (est)
      save("grad_est.png",
           gradient_magnitude_map(gradient(*est), FlowComponent::both, norm));
  } else {  // graddiff
    if (!est)
      throw MissingSecondInput("graddiff needs both a gt and an est flow");
    save("graddiff.png",
         gradient_difference_map(gradient(gt), gradient(*est), norm));
  }
}

struct BatchArgs {
  std::string manifest, format = "csv", out_dir;
  bool with_er = false;
  double n1 = 7.0, n2 = 7.0;
  int radius = 7;
  std::string mode = "weighted-median";
};

int run_batch_cmd(const BatchArgs& a) {
  Manifest manifest = load_manifest(a.manifest);
  BatchOptions opt;
  opt.with_er = a.with_er;
  opt.er.n1 = a.n1;
  opt.er.n2 = a.n2;
  opt.er.radius = a.radius;
  opt.er.mode = parse_mode(a.mode);

  AggregateReport rep = run_batch(manifest, opt);

  for (const auto& fr : rep.frames)
    if (!fr.ok)
      std::cerr << "warning: frame '" << fr.frame_id << "' skipped: "
                << fr.error << "\n";

  const fs::path out_dir = a.out_dir.empty() ? manifest.output_dir
                                             : fs::path(a.out_dir);
  fs::create_directories(out_dir);
  const fs::path out_file =
      out_dir / (rep.dataset + "_metrics." + (a.format == "json" ? "json" : "csv"));
  const std::string text =
      a.format == "json" ? report_json(rep) : report_csv(rep);
  std::ofstream out(out_file, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + out_file.string() + " for writing");
  out << text;
  out.close();

  std::cout << "frames evaluated: " << rep.summary.frames_ok << " of "
            << rep.frames.size() << "\n";
  if (rep.summary.frames_ok > 0) {
    std::cout << "mean aepe: " << format_double(rep.summary.mean_base.aepe)
              << "\nmean mesd: " << format_double(rep.summary.mean_base.mesd)
              << "%\n";
    if (rep.with_er && rep.summary.mean_refined) {
      std::cout << "mean aepe (er): "
                << format_double(rep.summary.mean_refined->aepe)
                << "\nmean mesd (er): "
                << format_double(rep.summary.mean_refined->mesd) << "%\n"
                << "relative improvement: aepe "
                << format_double(rep.summary.aepe_rel_improvement_pct)
                << "%, mesd "
                << format_double(rep.summary.mesd_rel_improvement_pct)
                << "%\n";
    }
  }
  std::cout << "report: " << out_file.string() << "\n";
  return rep.summary.frames_ok > 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Optical flow evaluation: endpoint error (AEPE) and motion edge "
      "structure difference (MESD), edge-refinement post-processing, and "
      "diagnostic imagery"};
  app.require_subcommand(1);

  MetricArgs m;
  auto* metric = app.add_subcommand(
      "metric", "Evaluate one estimate against a ground-truth flow");
  metric->add_option("gt", m.gt, "ground-truth flow (.flo or KITTI .png)")
      ->required();
  metric->add_option("est", m.est, "estimated flow")->required();
  metric->add_option("--region", m.region,
                     "restrict to a top,left,height,width rectangle");
  metric->add_option("--format", m.format, "output format")
      ->check(CLI::IsMember({"json", "csv"}));
  metric->add_option("--out", m.out, "write the report to a file");

  RefineArgs r;
  auto* refine = app.add_subcommand(
      "refine", "Apply edge-refinement post-processing to a flow field");
  refine->add_option("flow", r.flow, "flow to refine")->required();
  refine->add_option("image", r.image, "first frame of the pair")->required();
  refine->add_option("out", r.out, "output flow path (same format as input)")
      ->required();
  refine->add_option("--radius", r.radius, "neighborhood half-width");
  refine->add_option("--n1", r.n1, "spatial bandwidth");
  refine->add_option("--n2", r.n2, "color bandwidth");
  refine->add_option("--mode", r.mode, "weighted-median|product-median");

  VizArgs v;
  auto* viz = app.add_subcommand("viz", "Render diagnostic imagery");
  viz->add_option("gt", v.gt, "flow field (.flo or KITTI .png)")->required();
  viz->add_option("est", v.est, "second flow field (needed for graddiff)");
  viz->add_option("--out-dir", v.out_dir, "output directory")->required();
  viz->add_option("--kind", v.kind, "image kind")
      ->check(CLI::IsMember({"color", "grad", "graddiff"}));
  viz->add_option("--norm", v.norm,
                  "explicit normalization constant (default: 99th percentile)");
  viz->add_option("--region", v.region,
                  "crop to a top,left,height,width rectangle first");

  BatchArgs b;
  auto* batch = app.add_subcommand(
      "batch", "Evaluate every frame pair of a JSON manifest");
  batch->add_option("manifest", b.manifest, "manifest path")->required();
  batch->add_flag("--with-er", b.with_er,
                  "also evaluate the edge-refined estimate");
  batch->add_option("--format", b.format, "report format")
      ->check(CLI::IsMember({"csv", "json"}));
  batch->add_option("--out-dir", b.out_dir,
                    "override the manifest's output directory");
  batch->add_option("--radius", b.radius, "er neighborhood half-width");
  batch->add_option("--n1", b.n1, "er spatial bandwidth");
  batch->add_option("--n2", b.n2, "er color bandwidth");
  batch->add_option("--mode", b.mode, "er weighted-median|product-median");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*metric) run_metric(m);
    if (*refine) run_refine(r);
    if (*viz) run_viz(v);
    if (*batch) return run_batch_cmd(b);
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
}
