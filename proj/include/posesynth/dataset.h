#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "posesynth/camera.h"
#include "posesynth/image.h"
#include "posesynth/manifest.h"
#include "posesynth/pointcloud.h"
#include "posesynth/renderer.h"
#include "posesynth/sampler.h"

namespace posesynth {

// On-disk dataset layout:
//   root/images/{train,testA,testB}/   rendered or ingested PNGs
//   root/{train,testA,testB}.csv       manifests (paths relative to root)
//   root/mean.psmean                   per-pixel training mean
//   root/config.echo.json              resolved generation config
//   root/INCOMPLETE.json               present only while/if generation fails
enum class Split { kTrain, kTestA, kTestB };

const char* SplitName(Split split);

struct DatasetLayout {
  std::filesystem::path root;

  std::filesystem::path Manifest(Split split) const;
  std::filesystem::path ImageDir(Split split) const;
  std::filesystem::path MeanImagePath() const { return root / "mean.psmean"; }
  std::filesystem::path ConfigEchoPath() const { return root / "config.echo.json"; }
  std::filesystem::path IncompleteMarkerPath() const { return root / "INCOMPLETE.json"; }
};

// Per-pixel, per-channel mean of the training images, row-major RGB.
struct MeanImage {
  int width = 0;
  int height = 0;
  std::vector<float> values;

  float at(int x, int y, int channel) const {
    return values[(static_cast<std::size_t>(y) * width + x) * 3 + channel];
  }

  friend bool operator==(const MeanImage&, const MeanImage&) = default;
};

// Exact integer accumulation of pixel sums; merging and finishing are
// independent of the order images were added.
class MeanAccumulator {
 public:
  MeanAccumulator() = default;
  MeanAccumulator(int width, int height);

  // Throws InvalidArgument on a dimension mismatch, naming `name`.
  void Add(const Image& img, const std::string& name);
  void Merge(const MeanAccumulator& other);
  std::size_t count() const { return count_; }
  MeanImage Finish() const;

 private:
  int width_ = 0;
  int height_ = 0;
  std::size_t count_ = 0;
  std::vector<std::uint64_t> sums_;
};

// PSMEAN1 format: "PSMEAN1\n", "<width> <height>\n", then width*height*3
// little-endian float32 values.
void WriteMeanImage(const MeanImage& mean, const std::filesystem::path& path);
MeanImage ReadMeanImage(const std::filesystem::path& path);

// Image paths are resolved relative to `base_dir`.
MeanImage ComputeMeanImage(const std::vector<ManifestRecord>& records,
                           const std::filesystem::path& base_dir);

struct GenerationParams {
  Intrinsics intrinsics;
  GridSpec grid;
  OrientationSpec orientation;
  RenderOptions render;
  // Every holdout_every-th pose (1-based) goes to testB; 0 disables holdout.
  int holdout_every = 0;
  std::size_t pose_cap = kDefaultPoseCap;
  int threads = 1;
  // Written verbatim to config.echo.json when nonempty.
  std::string config_echo;
};

struct GenerationSummary {
  std::size_t total = 0;
  std::size_t train = 0;
  std::size_t test_b = 0;
};

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

// True when the pose with this enumeration index is held out for testB.
bool IsHeldOut(std::size_t index, int holdout_every);

// Renders every enumerated pose, applies the shader preset and writes the
// train/testB images, manifests and the training mean. Any previous
// images/train and images/testB contents are replaced. On failure the
// INCOMPLETE.json marker is left in the root.
GenerationSummary GenerateDataset(const PointCloud& cloud, const GenerationParams& params,
                                  const std::filesystem::path& out_root,
                                  const ProgressFn& progress = {});

enum class IngestTarget { kTestA, kTrain };

struct IngestResult {
  std::vector<ManifestRecord> records;
  std::vector<std::string> warnings;
};

// Center-crops and resizes real frames listed in `poses_manifest` (a manifest
// whose image paths are relative to `frames_dir`) into the layout. kTestA
// replaces testA.csv; kTrain appends to train.csv.
IngestResult IngestRealFrames(const std::filesystem::path& frames_dir,
                              const std::filesystem::path& poses_manifest, int target_width,
                              int target_height, const std::filesystem::path& out_root,
                              IngestTarget target = IngestTarget::kTestA);

struct SplitOverlap {
  Split test_split = Split::kTestB;
  std::string train_path;
  std::string test_path;
};

struct SplitReport {
  std::size_t train_count = 0;
  std::size_t test_a_count = 0;
  std::size_t test_b_count = 0;
  // Same image path in train and a test split: a failure.
  std::vector<SplitOverlap> path_overlaps;
  // Identical pose 6-tuple under different image paths: a warning only.
  std::vector<SplitOverlap> pose_overlaps;
  // Manifest entries whose image file does not exist: a failure.
  std::vector<std::string> missing_images;

  bool ok() const { return path_overlaps.empty() && missing_images.empty(); }
};

// Reads the layout's manifests (absent test manifests count as empty; the
// train manifest must exist).
SplitReport ValidateSplits(const DatasetLayout& layout);

}  // namespace posesynth
