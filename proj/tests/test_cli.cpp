// Exercises the installed CLI binary (path in FLOWEVAL_CLI) and checks that
// its results are bit-identical to direct library calls.

#include <doctest.h>
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <string>

#include <json.hpp>

#include "floweval/edge_refine.hpp"
#include "floweval/flow_io.hpp"
#include "floweval/harness.hpp"
#include "floweval/metrics.hpp"
#include "test_util.hpp"

using namespace floweval;

namespace {

std::string cli_path() {
  const char* p = std::getenv("FLOWEVAL_CLI");
  REQUIRE_MESSAGE(p != nullptr, "FLOWEVAL_CLI must point at the binary");
  return p;
}

struct RunResult {
  int code = -1;
  std::string out;
};

RunResult run(const std::string& args) {
  const std::string cmd = "'" + cli_path() + "' " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) out.append(buf, n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string q(const std::filesystem::path& p) {
  return "'" + p.string() + "'";
}

}  // namespace

TEST_CASE("metric on identical files reports zero error") {
  testutil::TempDir tmp("cli-metric");
  std::mt19937 rng(1);
  FlowField f = testutil::random_masked_flow(rng, 12, 10);
  const auto path = tmp.path() / "f.flo";
  write_flow_file(path, f);

  RunResult res = run("metric " + q(path) + " " + q(path));
  REQUIRE(res.code == 0);
  auto j = nlohmann::json::parse(res.out);
  CHECK(j["aepe"].get<double>() == 0.0);
  CHECK(std::abs(j["mesd"].get<double>()) <= 1e-7);
}

TEST_CASE("metric matches the library bit for bit, with and without region") {
  testutil::TempDir tmp("cli-region");
  std::mt19937 rng(2);
  FlowField gt = testutil::random_masked_flow(rng, 20, 16);
  FlowField est = testutil::random_masked_flow(rng, 20, 16);
  write_flow_file(tmp.path() / "gt.flo", gt);
  write_flow_file(tmp.path() / "est.flo", est);

  RunResult plain =
      run("metric " + q(tmp.path() / "gt.flo") + " " + q(tmp.path() / "est.flo"));
  REQUIRE(plain.code == 0);
  auto j = nlohmann::json::parse(plain.out);
  MetricReport want = evaluate(gt, est);
  CHECK(j["aepe"].get<double>() == want.aepe);
  CHECK(j["mesd"].get<double>() == want.mesd);
  CHECK(j["ess_ux"].get<double>() == want.ess_ux);
  CHECK(j["n_flow"].get<long long>() == want.n_flow);

  RunResult boxed = run("metric " + q(tmp.path() / "gt.flo") + " " +
                        q(tmp.path() / "est.flo") + " --region 2,3,10,12");
  REQUIRE(boxed.code == 0);
  auto jb = nlohmann::json::parse(boxed.out);
  EvalRegion region = EvalRegion::rect({2, 3, 10, 12});
  MetricReport wantb = evaluate(gt, est, &region);
  CHECK(jb["aepe"].get<double>() == wantb.aepe);
  CHECK(jb["mesd"].get<double>() == wantb.mesd);
  CHECK(jb["n_flow"].get<long long>() == wantb.n_flow);

  // csv form carries the same values
  RunResult csv = run("metric " + q(tmp.path() / "gt.flo") + " " +
                      q(tmp.path() / "est.flo") + " --format csv");
  REQUIRE(csv.code == 0);
  CHECK(csv.out.find("aepe,mesd,") == 0);
  CHECK(csv.out.find(format_double(want.aepe)) != std::string::npos);
}

TEST_CASE("metric surfaces input errors with context and exit code 1") {
  testutil::TempDir tmp("cli-err");
  FlowField a = FlowField::make(4, 4);
  FlowField b = FlowField::make(5, 4);
  write_flow_file(tmp.path() / "a.flo", a);
  write_flow_file(tmp.path() / "b.flo", b);

  RunResult mismatch =
      run("metric " + q(tmp.path() / "a.flo") + " " + q(tmp.path() / "b.flo"));
  CHECK(mismatch.code == 1);
  CHECK(mismatch.out.find("dimension mismatch") != std::string::npos);

  RunResult missing =
      run("metric " + q(tmp.path() / "none.flo") + " " + q(tmp.path() / "a.flo"));
  CHECK(missing.code == 1);
  CHECK(missing.out.find("none.flo") != std::string::npos);

  RunResult unknown = run("nonsense");
  CHECK(unknown.code == 1);
}

TEST_CASE("refine keeps constant flow and equals the library pipeline") {
  testutil::TempDir tmp("cli-refine");
  std::mt19937 rng(3);

  FlowField constant = FlowField::make(10, 8, 2.0f, -1.0f);
  ColorImage img = ColorImage::make(10, 8, 3, 200);
  write_flow_file(tmp.path() / "const.flo", constant);
  write_png_file(tmp.path() / "frame.png", img);

  RunResult res = run("refine " + q(tmp.path() / "const.flo") + " " +
                      q(tmp.path() / "frame.png") + " " +
                      q(tmp.path() / "out.flo"));
  REQUIRE(res.code == 0);
  FlowField out = read_flow_file(tmp.path() / "out.flo");
  CHECK(out.u == constant.u);
  CHECK(out.v == constant.v);

  // defaults spell radius 7, n1 7, n2 7, weighted-median
  FlowField noisy = testutil::random_flow(rng, 10, 8, 4.0, 1.0);
  write_flow_file(tmp.path() / "noisy.flo", noisy);
  RunResult def = run("refine " + q(tmp.path() / "noisy.flo") + " " +
                      q(tmp.path() / "frame.png") + " " +
                      q(tmp.path() / "def.flo"));
  RunResult expl = run("refine " + q(tmp.path() / "noisy.flo") + " " +
                       q(tmp.path() / "frame.png") + " " +
                       q(tmp.path() / "expl.flo") +
                       " --radius 7 --n1 7 --n2 7 --mode weighted-median");
  REQUIRE(def.code == 0);
  REQUIRE(expl.code == 0);
  CHECK(read_bytes(tmp.path() / "def.flo") ==
        read_bytes(tmp.path() / "expl.flo"));

  // file-level pipeline equals the library composition
  FlowField refined = edge_refine(noisy, img);
  CHECK(read_flow_file(tmp.path() / "def.flo").u == refined.u);

  RunResult wrong_ext = run("refine " + q(tmp.path() / "noisy.flo") + " " +
                            q(tmp.path() / "frame.png") + " " +
                            q(tmp.path() / "out.png"));
  CHECK(wrong_ext.code == 1);
}

TEST_CASE("viz renders the documented trivial images deterministically") {
  testutil::TempDir tmp("cli-viz");
  FlowField zero = FlowField::make(6, 5);
  write_flow_file(tmp.path() / "zero.flo", zero);
  std::mt19937 rng(4);
  FlowField f = testutil::random_flow(rng, 6, 5, 3.0, 1.0);
  write_flow_file(tmp.path() / "f.flo", f);

  RunResult color = run("viz " + q(tmp.path() / "zero.flo") + " --out-dir " +
                        q(tmp.path() / "v1") + " --kind color");
  REQUIRE(color.code == 0);
  ColorImage white = read_image_file(tmp.path() / "v1" / "color_gt.png");
  for (auto px : white.data) CHECK(px == 255);

  RunResult gd = run("viz " + q(tmp.path() / "f.flo") + " " +
                     q(tmp.path() / "f.flo") + " --out-dir " +
                     q(tmp.path() / "v2") + " --kind graddiff");
  REQUIRE(gd.code == 0);
  ColorImage diff = read_image_file(tmp.path() / "v2" / "graddiff.png");
  for (auto px : diff.data) CHECK(px == 255);

  RunResult missing = run("viz " + q(tmp.path() / "f.flo") + " --out-dir " +
                          q(tmp.path() / "v3") + " --kind graddiff");
  CHECK(missing.code == 1);

  // repeated runs emit byte-identical files
  RunResult r1 = run("viz " + q(tmp.path() / "f.flo") + " --out-dir " +
                     q(tmp.path() / "d1") + " --kind grad");
  RunResult r2 = run("viz " + q(tmp.path() / "f.flo") + " --out-dir " +
                     q(tmp.path() / "d2") + " --kind grad");
  REQUIRE(r1.code == 0);
  REQUIRE(r2.code == 0);
  CHECK(read_bytes(tmp.path() / "d1" / "grad_gt.png") ==
        read_bytes(tmp.path() / "d2" / "grad_gt.png"));

  // --region crops before rendering: same image as rendering the crop
  RunResult boxed = run("viz " + q(tmp.path() / "f.flo") + " --out-dir " +
                        q(tmp.path() / "crop") + " --kind color --norm 3" +
                        " --region 1,1,3,4");
  REQUIRE(boxed.code == 0);
  ColorImage got = read_image_file(tmp.path() / "crop" / "color_gt.png");
  ColorImage want = flow_to_color(crop(f, {1, 1, 3, 4}), 3.0);
  CHECK(got.width == 4);
  CHECK(got.height == 3);
  CHECK(got.data == want.data);
}

TEST_CASE("batch evaluates a manifest and averages per-frame rows") {
  testutil::TempDir tmp("cli-batch");
  std::mt19937 rng(5);
  nlohmann::json entries = nlohmann::json::array();
  for (int k = 0; k < 2; ++k) {
    FlowField gt = testutil::random_masked_flow(rng, 14, 11);
    FlowField est = testutil::random_masked_flow(rng, 14, 11);
    const std::string id = "f" + std::to_string(k);
    write_flow_file(tmp.path() / (id + "_gt.flo"), gt);
    write_flow_file(tmp.path() / (id + "_est.flo"), est);
    entries.push_back({{"frame_id", id},
                       {"gt", id + "_gt.flo"},
                       {"est", id + "_est.flo"}});
  }
  nlohmann::json manifest = {{"dataset", "mini"},
                             {"output_dir", "out"},
                             {"entries", entries}};
  std::ofstream mf(tmp.path() / "manifest.json");
  mf << manifest.dump();
  mf.close();

  RunResult res = run("batch " + q(tmp.path() / "manifest.json"));
  REQUIRE(res.code == 0);
  const auto csv_path = tmp.path() / "out" / "mini_metrics.csv";
  REQUIRE(std::filesystem::exists(csv_path));

  auto cell = [](const std::string& l, int idx) {
    std::size_t pos = 0;
    for (int i = 0; i < idx; ++i) pos = l.find(',', pos) + 1;
    return l.substr(pos, l.find(',', pos) - pos);
  };
  std::ifstream in(csv_path);
  std::string line;
  std::getline(in, line);  // header
  std::getline(in, line);
  const double mesd0 = std::stod(cell(line, 3));
  std::getline(in, line);
  const double mesd1 = std::stod(cell(line, 3));
  std::getline(in, line);
  REQUIRE(cell(line, 0) == "mean");
  const double mean_mesd = std::stod(cell(line, 3));
  CHECK(mean_mesd == doctest::Approx((mesd0 + mesd1) / 2).epsilon(1e-12));
}
