#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "floweval/edge_refine.hpp"
#include "floweval/metrics.hpp"
#include "floweval/types.hpp"

namespace floweval {

/// One frame pair of a batch run. Paths are resolved relative to the
/// manifest file's directory.
struct ManifestEntry {
  std::string frame_id;
  std::filesystem::path gt;
  std::filesystem::path est;
  std::optional<std::filesystem::path> image;  // first frame, needed for ER
  std::optional<Rect> region;
};

struct Manifest {
  std::string dataset;
  std::filesystem::path output_dir;
  std::vector<ManifestEntry> entries;
};

/// Load a JSON manifest (see README for the schema). Throws ManifestError.
Manifest load_manifest(const std::filesystem::path& path);

struct FrameResult {
  std::string frame_id;
  std::string gt_path;
  std::string est_path;
  bool ok = false;
  std::string error;  // set when !ok
  MetricReport base;
  std::optional<MetricReport> refined;
  double aepe_rel_improvement_pct = 0.0;
  double mesd_rel_improvement_pct = 0.0;
};

/// Dataset summary. Metric means are unweighted arithmetic means over the
/// successfully evaluated frames, accumulated in a canonical order (sorted
/// by frame_id, gt, est) so that permuting the manifest never changes any
/// value. The n_* fields of the mean reports hold sums.
struct BatchSummary {
  int frames_ok = 0;
  int frames_failed = 0;
  MetricReport mean_base;
  std::optional<MetricReport> mean_refined;
  double aepe_rel_improvement_pct = 0.0;
  double mesd_rel_improvement_pct = 0.0;
};

struct AggregateReport {
  std::string dataset;
  bool with_er = false;
  std::vector<FrameResult> frames;  // manifest order
  BatchSummary summary;
};

struct BatchOptions {
  bool with_er = false;
  ErConfig er;
};

/// Evaluate every manifest entry. Frames that fail to load or evaluate are
/// recorded with their error and skipped; they never abort the batch.
AggregateReport run_batch(const Manifest& manifest,
                          const BatchOptions& options = {});

/// Relative improvement in percent, (before - after) / before * 100.
/// Defined as 0 when both values are 0 and NaN when only before is.
double relative_improvement_pct(double before, double after);

/// CSV with a fixed header: one row per frame in manifest order, then a
/// summary row with frame_id "mean". Doubles use shortest round-trip form.
std::string report_csv(const AggregateReport& report);

/// JSON document mirroring the report fields.
std::string report_json(const AggregateReport& report);

/// Shortest round-trip decimal form of a double (as used in the CSV).
std::string format_double(double value);

/// Serializations of a single MetricReport, as emitted by the `metric`
/// subcommand.
std::string metric_report_json(const MetricReport& report);
std::string metric_report_csv(const MetricReport& report);

}  // namespace floweval
