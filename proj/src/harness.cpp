#include "floweval/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "floweval/errors.hpp"
#include "floweval/flow_io.hpp"

namespace floweval {

namespace {

using nlohmann::json;

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

json report_to_json(const MetricReport& r) {
  return json{{"aepe", r.aepe},
              {"mesd", r.mesd},
              {"ess_ux", r.ess_ux},
              {"ess_uy", r.ess_uy},
              {"ess_vx", r.ess_vx},
              {"ess_vy", r.ess_vy},
              {"n_flow", r.n_flow},
              {"n_grad_ux", r.n_grad_ux},
              {"n_grad_uy", r.n_grad_uy},
              {"n_grad_vx", r.n_grad_vx},
              {"n_grad_vy", r.n_grad_vy}};
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void append_report_cells(std::vector<std::string>& cells,
                         const MetricReport& r) {
  cells.push_back(format_double(r.aepe));
  cells.push_back(format_double(r.mesd));
  cells.push_back(format_double(r.ess_ux));
  cells.push_back(format_double(r.ess_uy));
  cells.push_back(format_double(r.ess_vx));
  cells.push_back(format_double(r.ess_vy));
  cells.push_back(std::to_string(r.n_flow));
  cells.push_back(std::to_string(r.n_grad_ux));
  cells.push_back(std::to_string(r.n_grad_uy));
  cells.push_back(std::to_string(r.n_grad_vx));
  cells.push_back(std::to_string(r.n_grad_vy));
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string metric_report_json(const MetricReport& report) {
  return report_to_json(report).dump(2) + "\n";
}

std::string metric_report_csv(const MetricReport& report) {
  std::vector<std::string> cells;
  append_report_cells(cells, report);
  std::string out =
      "aepe,mesd,ess_ux,ess_uy,ess_vx,ess_vy,n_flow,n_grad_ux,n_grad_uy,"
      "n_grad_vx,n_grad_vy\n";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  out += '\n';
  return out;
}

double relative_improvement_pct(double before, double after) {
  if (before == 0.0)
    return after == 0.0 ? 0.0 : std::numeric_limits<double>::quiet_NaN();
  return (before - after) / before * 100.0;
}

Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ManifestError("cannot open manifest " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ManifestError("manifest " + path.string() + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("entries") ||
      !doc["entries"].is_array())
    throw ManifestError("manifest " + path.string() +
                        ": expected an object with an 'entries' array");

  const auto base = path.has_parent_path() ? path.parent_path()
                                           : std::filesystem::path(".");
  Manifest m;
  m.dataset = doc.value("dataset", std::string("dataset"));
  m.output_dir = resolve(base, doc.value("output_dir", std::string(".")));

  std::size_t index = 0;
  for (const auto& e : doc["entries"]) {
    if (!e.is_object() || !e.contains("gt") || !e.contains("est"))
      throw ManifestError("manifest " + path.string() + ": entry " +
                          std::to_string(index) +
                          " needs 'gt' and 'est' paths");
    ManifestEntry entry;
    entry.frame_id = e.value("frame_id", std::to_string(index));
    entry.gt = resolve(base, e["gt"].get<std::string>());
    entry.est = resolve(base, e["est"].get<std::string>());
    if (e.contains("image"))
      entry.image = resolve(base, e["image"].get<std::string>());
    if (e.contains("region")) {
      const auto& r = e["region"];
      if (!r.is_array() || r.size() != 4)
        throw ManifestError("manifest " + path.string() + ": entry " +
                            std::to_string(index) +
                            " region must be [top,left,height,width]");
      entry.region = Rect{r[0].get<int>(), r[1].get<int>(), r[2].get<int>(),
                          r[3].get<int>()};
    }
    m.entries.push_back(std::move(entry));
    ++index;
  }
  return m;
}

AggregateReport run_batch(const Manifest& manifest,
                          const BatchOptions& options) {
  AggregateReport rep;
  rep.dataset = manifest.dataset;
  rep.with_er = options.with_er;

  for (const auto& entry : manifest.entries) {
    FrameResult fr;
    fr.frame_id = entry.frame_id;
    fr.gt_path = entry.gt.string();
    fr.est_path = entry.est.string();
    try {
      FlowField gt, est;
      try {
        gt = read_flow_file(entry.gt);
      } catch (const Error& e) {
        throw Error("gt '" + entry.gt.string() + "': " + e.what());
      }
      try {
        est = read_flow_file(entry.est);
      } catch (const Error& e) {
        throw Error("est '" + entry.est.string() + "': " + e.what());
      }
      std::optional<EvalRegion> region;
      if (entry.region) region = EvalRegion::rect(*entry.region);
      const EvalRegion* reg = region ? &*region : nullptr;

      fr.base = evaluate(gt, est, reg);
      if (options.with_er) {
        if (!entry.image)
          throw ManifestError("entry '" + entry.frame_id +
                              "' has no image path, required for ER");
        ColorImage img;
        try {
          img = read_image_file(*entry.image);
        } catch (const Error& e) {
          throw Error("image '" + entry.image->string() + "': " + e.what());
        }
        FlowField refined = edge_refine(est, img, options.er);
        fr.refined = evaluate(gt, refined, reg);
        fr.aepe_rel_improvement_pct =
            relative_improvement_pct(fr.base.aepe, fr.refined->aepe);
        fr.mesd_rel_improvement_pct =
            relative_improvement_pct(fr.base.mesd, fr.refined->mesd);
      }
      fr.ok = true;
    } catch (const std::exception& e) {
      fr.ok = false;
      fr.error = e.what();
    }
    rep.frames.push_back(std::move(fr));
  }

  // canonical accumulation order: manifest permutations must not change any
  // reported value
  std::vector<const FrameResult*> ok;
  for (const auto& fr : rep.frames)
    if (fr.ok) ok.push_back(&fr);
  std::sort(ok.begin(), ok.end(), [](const FrameResult* a,
                                     const FrameResult* b) {
    return std::tie(a->frame_id, a->gt_path, a->est_path) <
           std::tie(b->frame_id, b->gt_path, b->est_path);
  });

  BatchSummary& s = rep.summary;
  s.frames_ok = int(ok.size());
  s.frames_failed = int(rep.frames.size() - ok.size());
  if (!ok.empty()) {
    auto accumulate = [&](auto pick) {
      MetricReport mean;
      for (const FrameResult* fr : ok) {
        const MetricReport& r = pick(*fr);
        mean.aepe += r.aepe;
        mean.mesd += r.mesd;
        mean.ess_ux += r.ess_ux;
        mean.ess_uy += r.ess_uy;
        mean.ess_vx += r.ess_vx;
        mean.ess_vy += r.ess_vy;
        mean.n_flow += r.n_flow;
        mean.n_grad_ux += r.n_grad_ux;
        mean.n_grad_uy += r.n_grad_uy;
        mean.n_grad_vx += r.n_grad_vx;
        mean.n_grad_vy += r.n_grad_vy;
      }
      const double n = double(ok.size());
      mean.aepe /= n;
      mean.mesd /= n;
      mean.ess_ux /= n;
      mean.ess_uy /= n;
      mean.ess_vx /= n;
      mean.ess_vy /= n;
      return mean;
    };
    s.mean_base = accumulate(
        [](const FrameResult& fr) -> const MetricReport& { return fr.base; });
    if (options.with_er) {
      s.mean_refined = accumulate([](const FrameResult& fr)
                                      -> const MetricReport& {
        return *fr.refined;
      });
      s.aepe_rel_improvement_pct =
          relative_improvement_pct(s.mean_base.aepe, s.mean_refined->aepe);
      s.mesd_rel_improvement_pct =
          relative_improvement_pct(s.mean_base.mesd, s.mean_refined->mesd);
    }
  }
  return rep;
}

std::string report_csv(const AggregateReport& report) {
  std::ostringstream out;
  std::vector<std::string> header = {
      "frame_id", "status",    "aepe",      "mesd",      "ess_ux",
      "ess_uy",   "ess_vx",    "ess_vy",    "n_flow",    "n_grad_ux",
      "n_grad_uy", "n_grad_vx", "n_grad_vy"};
  if (report.with_er) {
    for (const char* name :
         {"er_aepe", "er_mesd", "er_ess_ux", "er_ess_uy", "er_ess_vx",
          "er_ess_vy", "er_n_flow", "er_n_grad_ux", "er_n_grad_uy",
          "er_n_grad_vx", "er_n_grad_vy", "aepe_rel_improvement_pct",
          "mesd_rel_improvement_pct"})
      header.push_back(name);
  }
  header.push_back("frames_ok");
  header.push_back("frames_failed");

  auto write_row = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << csv_escape(cells[i]);
    }
    out << '\n';
  };
  write_row(header);

  const std::size_t width = header.size();
  for (const auto& fr : report.frames) {
    std::vector<std::string> cells;
    cells.push_back(fr.frame_id);
    if (!fr.ok) {
      cells.push_back("error: " + fr.error);
      cells.resize(width);
      write_row(cells);
      continue;
    }
    cells.push_back("ok");
    append_report_cells(cells, fr.base);
    if (report.with_er) {
      append_report_cells(cells, *fr.refined);
      cells.push_back(format_double(fr.aepe_rel_improvement_pct));
      cells.push_back(format_double(fr.mesd_rel_improvement_pct));
    }
    cells.resize(width);
    write_row(cells);
  }

  // summary row: metric columns hold means, count columns hold sums
  std::vector<std::string> cells;
  cells.push_back("mean");
  cells.push_back("ok");
  if (report.summary.frames_ok > 0) {
    append_report_cells(cells, report.summary.mean_base);
    if (report.with_er) {
      append_report_cells(cells, *report.summary.mean_refined);
      cells.push_back(format_double(report.summary.aepe_rel_improvement_pct));
      cells.push_back(format_double(report.summary.mesd_rel_improvement_pct));
    }
  }
  cells.resize(width - 2);
  cells.push_back(std::to_string(report.summary.frames_ok));
  cells.push_back(std::to_string(report.summary.frames_failed));
  write_row(cells);
  return out.str();
}

std::string report_json(const AggregateReport& report) {
  json frames = json::array();
  for (const auto& fr : report.frames) {
    json f = {{"frame_id", fr.frame_id}};
    if (!fr.ok) {
      f["status"] = "error";
      f["error"] = fr.error;
    } else {
      f["status"] = "ok";
      f["metrics"] = report_to_json(fr.base);
      if (fr.refined) {
        f["er_metrics"] = report_to_json(*fr.refined);
        f["aepe_rel_improvement_pct"] = fr.aepe_rel_improvement_pct;
        f["mesd_rel_improvement_pct"] = fr.mesd_rel_improvement_pct;
      }
    }
    frames.push_back(std::move(f));
  }
  json summary = {{"frames_ok", report.summary.frames_ok},
                  {"frames_failed", report.summary.frames_failed}};
  if (report.summary.frames_ok > 0) {
    summary["mean"] = report_to_json(report.summary.mean_base);
    if (report.summary.mean_refined) {
      summary["er_mean"] = report_to_json(*report.summary.mean_refined);
      summary["aepe_rel_improvement_pct"] =
          report.summary.aepe_rel_improvement_pct;
      summary["mesd_rel_improvement_pct"] =
          report.summary.mesd_rel_improvement_pct;
    }
  }
  json doc = {{"dataset", report.dataset},
              {"with_er", report.with_er},
              {"frames", std::move(frames)},
              {"summary", std::move(summary)}};
  return doc.dump(2) + "\n";
}

}  // namespace floweval
