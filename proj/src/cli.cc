#include "posesynth/cli.h"

#include <chrono>
#include <filesystem>
#include <fstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "CLI11.hpp"
#include "posesynth/config.h"
#include "posesynth/dataset.h"
#include "posesynth/errors.h"
#include "posesynth/eval.h"
#include "posesynth/manifest.h"

namespace fs = std::filesystem;

namespace posesynth {
namespace {

struct GlobalOptions {
  int threads = 1;
  bool quiet = false;
};

class Commands {
 public:
  Commands(const GlobalOptions& global, std::ostream& out, std::ostream& err)
      : global_(global), out_(out), err_(err) {}

  int Generate(const fs::path& config_path, const std::optional<fs::path>& output_override) {
    const auto start = std::chrono::steady_clock::now();
    GenerationConfig cfg = LoadGenerationConfig(config_path);
    if (output_override) cfg.output = *output_override;
    if (!cfg.output) throw ConfigError("output", "missing (set it in the config or pass --output)");

    const PointCloud cloud = LoadScene(cfg);
    const GridSpec grid = ResolveGrid(cfg, cloud);
    GenerationParams params;
    params.intrinsics = cfg.intrinsics;
    params.grid = grid;
    params.orientation = cfg.orientation;
    params.render = cfg.render;
    params.holdout_every = cfg.holdout_every;
    params.pose_cap = cfg.max_poses;
    params.threads = global_.threads;
    params.config_echo = EchoConfig(cfg, grid);

    std::size_t last_reported = 0;
    const ProgressFn progress = [&](std::size_t done, std::size_t total) {
      if (global_.quiet) return;
      if (done == total || done - last_reported >= std::max<std::size_t>(total / 20, 1)) {
        last_reported = done;
        fmt::print(err_, "rendered {}/{}\n", done, total);
      }
    };
    const GenerationSummary summary = GenerateDataset(cloud, params, *cfg.output, progress);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    fmt::print(out_, "points: {}\nposes: {}\ntrain: {}\ntestB: {}\nelapsed_s: {:.2f}\n",
               cloud.size(), summary.total, summary.train, summary.test_b, elapsed);
    return kExitOk;
  }

  int Ingest(const fs::path& frames, const fs::path& poses, const fs::path& root, int width,
             int height, const std::string& split) {
    const IngestTarget target = split == "train" ? IngestTarget::kTrain : IngestTarget::kTestA;
    const IngestResult result = IngestRealFrames(frames, poses, width, height, root, target);
    for (const auto& w : result.warnings) Warn(w);
    fmt::print(out_, "ingested {} frames into {}\n", result.records.size(),
               split == "train" ? "train" : "testA");
    return kExitOk;
  }

  int Validate(const fs::path& root) {
    const SplitReport report = ValidateSplits(DatasetLayout{root});
    fmt::print(out_, "train: {}\ntestA: {}\ntestB: {}\n", report.train_count, report.test_a_count,
               report.test_b_count);
    for (const auto& o : report.path_overlaps) {
      fmt::print(out_, "FAIL image overlap train/{}: {}\n", SplitName(o.test_split), o.test_path);
    }
    for (const auto& m : report.missing_images) fmt::print(out_, "FAIL missing image: {}\n", m);
    for (const auto& o : report.pose_overlaps) {
      fmt::print(out_, "WARN pose overlap train/{}: {} == {}\n", SplitName(o.test_split),
                 o.train_path, o.test_path);
    }
    fmt::print(out_, "{}\n", report.ok() ? "splits OK" : "splits FAILED");
    return report.ok() ? kExitOk : kExitRuntime;
  }

  int Mean(const fs::path& manifest, const std::optional<fs::path>& out_path) {
    const auto records = ReadManifest(manifest);
    const MeanImage mean = ComputeMeanImage(records, manifest.parent_path());
    const fs::path dest = out_path ? *out_path : manifest.parent_path() / "mean.psmean";
    WriteMeanImage(mean, dest);
    fmt::print(out_, "mean of {} images ({}x{}) written to {}\n", records.size(), mean.width,
               mean.height, dest.string());
    return kExitOk;
  }

  int Baseline(const fs::path& train_path, const fs::path& query_path, const fs::path& out_path,
               const std::optional<fs::path>& mean_path, int descriptor_size) {
    const auto train = ReadManifest(train_path);
    const auto queries = ReadManifest(query_path);
    std::vector<Prediction> preds;
    if (queries.empty()) {
      Warn("query manifest is empty; writing an empty prediction file");
      WriteManifest(preds, out_path);
      return kExitOk;
    }
    std::optional<MeanImage> mean;
    if (mean_path) {
      mean = ReadMeanImage(*mean_path);
    } else if (const fs::path guess = train_path.parent_path() / "mean.psmean"; fs::exists(guess)) {
      mean = ReadMeanImage(guess);
    }
    const KnnIndex index(train, train_path.parent_path(), mean, descriptor_size, global_.threads);
    for (std::size_t i = 0; i < queries.size(); ++i) {
      const Image img = ReadImage(query_path.parent_path() / queries[i].image_path);
      preds.push_back({queries[i].image_path, index.Predict(img)});
      if (!global_.quiet && ((i + 1) % 100 == 0 || i + 1 == queries.size())) {
        fmt::print(err_, "queried {}/{}\n", i + 1, queries.size());
      }
    }
    WriteManifest(preds, out_path);
    return kExitOk;
  }

  int Eval(const fs::path& pred_path, const fs::path& gt_path, const std::string& label,
           const std::optional<fs::path>& report_path) {
    const auto preds = ReadManifest(pred_path);
    const auto gt = ReadManifest(gt_path);
    const Metrics m = Evaluate(preds, gt);
    const std::string report = FormatReport({{label, m}});
    out_ << report;
    if (report_path) {
      std::ofstream f(*report_path, std::ios::binary | std::ios::trunc);
      if (!f) throw IoError("cannot write report " + report_path->string());
      f << report;
    }
    return kExitOk;
  }

 private:
  void Warn(const std::string& msg) {
    if (!global_.quiet) fmt::print(err_, "warning: {}\n", msg);
  }

  const GlobalOptions& global_;
  std::ostream& out_;
  std::ostream& err_;
};

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pose-labeled image synthesis from point clouds, and pose-regression evaluation"};
  app.name("posesynth");
  app.require_subcommand(1);
  app.footer("Exit codes: 0 success, 1 runtime failure, 2 usage or config error.");
  GlobalOptions global;
  app.add_option("--threads", global.threads, "Worker threads (outputs do not depend on it)")
      ->check(CLI::Range(1, 1024));
  app.add_flag("--quiet", global.quiet, "Suppress progress and warnings");
  app.fallthrough();

  auto* generate = app.add_subcommand("generate", "Render a pose-labeled dataset from a config");
  generate->footer(ConfigDefaultsHelp());
  std::string config_path;
  std::string gen_output;
  generate->add_option("config", config_path, "Generation config (JSON)")->required();
  generate->add_option("--output", gen_output, "Output root (overrides the config)");

  auto* ingest = app.add_subcommand("ingest", "Add real frames with known poses to a dataset");
  std::string frames_dir, poses_path, ingest_root, ingest_split = "testA";
  int ingest_size = 224, ingest_width = 0, ingest_height = 0;
  ingest->add_option("frames", frames_dir, "Directory holding the frames")->required();
  ingest->add_option("poses", poses_path, "Manifest of frame paths (relative to frames) and poses")
      ->required();
  ingest->add_option("root", ingest_root, "Dataset root")->required();
  ingest->add_option("--size", ingest_size, "Square target size in pixels");
  ingest->add_option("--width", ingest_width, "Target width (overrides --size)");
  ingest->add_option("--height", ingest_height, "Target height (overrides --size)");
  ingest->add_option("--split", ingest_split, "testA, or train for train-frame augmentation")
      ->check(CLI::IsMember({"testA", "train"}));

  auto* validate = app.add_subcommand("validate", "Check train/test split disjointness");
  std::string validate_root;
  validate->add_option("root", validate_root, "Dataset root")->required();

  auto* mean = app.add_subcommand("mean", "Compute the per-pixel mean image of a manifest");
  std::string mean_manifest, mean_out;
  mean->add_option("manifest", mean_manifest, "Train manifest")->required();
  mean->add_option("--out", mean_out, "Output path (default: mean.psmean next to the manifest)");

  auto* baseline = app.add_subcommand("baseline", "Nearest-neighbour retrieval pose baseline");
  std::string train_manifest, query_manifest, preds_out, baseline_mean;
  int descriptor_size = 16;
  baseline->add_option("train", train_manifest, "Train manifest")->required();
  baseline->add_option("query", query_manifest, "Query manifest")->required();
  baseline->add_option("out", preds_out, "Predictions CSV to write")->required();
  baseline->add_option("--mean", baseline_mean, "Mean image (default: mean.psmean beside train)");
  baseline->add_option("--descriptor", descriptor_size, "Descriptor side length in pixels")
      ->check(CLI::Range(1, 4096));

  auto* eval = app.add_subcommand("eval", "Score predictions against ground truth");
  std::string pred_path, gt_path, label = "predictions", report_out;
  eval->add_option("predictions", pred_path, "Predictions CSV")->required();
  eval->add_option("ground_truth", gt_path, "Ground-truth manifest")->required();
  eval->add_option("--label", label, "Row label in the report");
  eval->add_option("--report", report_out, "Also write the report to this file");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitUsage;
  }

  const auto opt_path = [](const std::string& s) -> std::optional<fs::path> {
    if (s.empty()) return std::nullopt;
    return fs::path(s);
  };

  Commands commands(global, out, err);
  try {
    if (*generate) return commands.Generate(config_path, opt_path(gen_output));
    if (*ingest) {
      const int w = ingest_width > 0 ? ingest_width : ingest_size;
      const int h = ingest_height > 0 ? ingest_height : ingest_size;
      return commands.Ingest(frames_dir, poses_path, ingest_root, w, h, ingest_split);
    }
    if (*validate) return commands.Validate(validate_root);
    if (*mean) return commands.Mean(mean_manifest, opt_path(mean_out));
    if (*baseline) {
      return commands.Baseline(train_manifest, query_manifest, preds_out, opt_path(baseline_mean),
                               descriptor_size);
    }
    if (*eval) return commands.Eval(pred_path, gt_path, label, opt_path(report_out));
  } catch (const ConfigError& e) {
    fmt::print(err, "config error: {}\n", e.what());
    return kExitUsage;
  } catch (const ParseError& e) {
    fmt::print(err, "parse error: {}\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace posesynth
