#include "posesynth/dataset.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <mutex>
#include <sstream>

#include <fmt/format.h>

#include "posesynth/errors.h"
#include "posesynth/parallel.h"

namespace fs = std::filesystem;

namespace posesynth {

const char* SplitName(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kTestA: return "testA";
    case Split::kTestB: return "testB";
  }
  return "?";
}

fs::path DatasetLayout::Manifest(Split split) const {
  return root / (std::string(SplitName(split)) + ".csv");
}

fs::path DatasetLayout::ImageDir(Split split) const {
  return root / "images" / SplitName(split);
}

// ---------------------------------------------------------------------------
// Mean image

MeanAccumulator::MeanAccumulator(int width, int height)
    : width_(width), height_(height), sums_(static_cast<std::size_t>(width) * height * 3, 0) {}

void MeanAccumulator::Add(const Image& img, const std::string& name) {
  if (count_ == 0 && sums_.empty()) *this = MeanAccumulator(img.width, img.height);
  if (img.width != width_ || img.height != height_) {
    throw InvalidArgument(fmt::format("image {} is {}x{}, expected {}x{}", name, img.width,
                                      img.height, width_, height_));
  }
  for (std::size_t i = 0; i < sums_.size(); ++i) sums_[i] += img.pixels[i];
  ++count_;
}

void MeanAccumulator::Merge(const MeanAccumulator& other) {
  if (other.count_ == 0) return;
  if (count_ == 0 && sums_.empty()) {
    *this = other;
    return;
  }
  if (other.width_ != width_ || other.height_ != height_) {
    throw InvalidArgument("cannot merge mean accumulators of different sizes");
  }
  for (std::size_t i = 0; i < sums_.size(); ++i) sums_[i] += other.sums_[i];
  count_ += other.count_;
}

MeanImage MeanAccumulator::Finish() const {
  if (count_ == 0) throw InvalidArgument("mean of zero images");
  MeanImage mean;
  mean.width = width_;
  mean.height = height_;
  mean.values.resize(sums_.size());
  const double n = static_cast<double>(count_);
  for (std::size_t i = 0; i < sums_.size(); ++i) {
    mean.values[i] = static_cast<float>(static_cast<double>(sums_[i]) / n);
  }
  return mean;
}

void WriteMeanImage(const MeanImage& mean, const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write mean image " + path.string());
  out << "PSMEAN1\n" << mean.width << ' ' << mean.height << '\n';
  std::vector<char> bytes(mean.values.size() * 4);
  for (std::size_t i = 0; i < mean.values.size(); ++i) {
    unsigned char b[4];
    std::memcpy(b, &mean.values[i], 4);
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + 4);
    std::memcpy(bytes.data() + 4 * i, b, 4);
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing mean image " + path.string());
}

MeanImage ReadMeanImage(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open mean image " + path.string());
  std::string magic;
  std::getline(in, magic);
  if (magic != "PSMEAN1") throw ParseError(path.string() + ": bad PSMEAN1 magic", 1, 0);
  std::string dims;
  std::getline(in, dims);
  MeanImage mean;
  std::istringstream ds(dims);
  ds.imbue(std::locale::classic());
  if (!(ds >> mean.width >> mean.height) || mean.width < 1 || mean.height < 1) {
    throw ParseError(path.string() + ": bad dimension line", 2, 8);
  }
  const std::size_t n = static_cast<std::size_t>(mean.width) * mean.height * 3;
  std::vector<char> bytes(n * 4);
  const auto offset = static_cast<std::uint64_t>(in.tellg());
  in.read(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (static_cast<std::size_t>(in.gcount()) != bytes.size()) {
    throw ParseError(path.string() + ": truncated mean image body", 0,
                     offset + static_cast<std::uint64_t>(in.gcount()));
  }
  mean.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    unsigned char b[4];
    std::memcpy(b, bytes.data() + 4 * i, 4);
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + 4);
    std::memcpy(&mean.values[i], b, 4);
  }
  return mean;
}

MeanImage ComputeMeanImage(const std::vector<ManifestRecord>& records, const fs::path& base_dir) {
  if (records.empty()) throw InvalidArgument("mean image needs at least one record");
  MeanAccumulator acc;
  for (const auto& rec : records) acc.Add(ReadImage(base_dir / rec.image_path), rec.image_path);
  return acc.Finish();
}

// ---------------------------------------------------------------------------
// Generation

bool IsHeldOut(std::size_t index, int holdout_every) {
  return holdout_every >= 2 && (index + 1) % static_cast<std::size_t>(holdout_every) == 0;
}

namespace {

void WriteTextFile(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

std::string JsonEscape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') {
      out += '\\';
      out += c;
    } else if (static_cast<unsigned char>(c) < 0x20) {
      out += fmt::format("\\u{:04x}", static_cast<unsigned>(c));
    } else {
      out += c;
    }
  }
  return out;
}

void ResetDirectory(const fs::path& dir) {
  std::error_code ec;
  fs::remove_all(dir, ec);
  if (ec) throw IoError("cannot clear " + dir.string() + ": " + ec.message());
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

std::string IndexedName(const std::string& prefix, std::size_t index, std::size_t total) {
  std::size_t digits = 6;
  for (std::size_t t = total; t >= 1000000; t /= 10) ++digits;
  return fmt::format("{}{:0{}}.png", prefix, index, digits);
}

}  // namespace

GenerationSummary GenerateDataset(const PointCloud& cloud, const GenerationParams& params,
                                  const fs::path& out_root, const ProgressFn& progress) {
  params.intrinsics.Validate();
  params.render.Validate();
  if (params.holdout_every < 0 || params.holdout_every == 1) {
    throw ConfigError("holdout_every", "must be 0 (no holdout) or >= 2");
  }
  if (cloud.empty()) throw InvalidArgument("cannot render an empty point cloud");
  const ShaderPreset& shader = GetShader(params.render.shader);
  const std::vector<Pose> poses = EnumeratePoses(params.grid, params.orientation, params.pose_cap);

  const DatasetLayout layout{out_root};
  std::error_code ec;
  fs::create_directories(out_root, ec);
  if (ec) throw IoError("cannot create output root " + out_root.string() + ": " + ec.message());
  WriteTextFile(layout.IncompleteMarkerPath(),
                fmt::format("{{\"status\": \"in_progress\", \"total\": {}}}\n", poses.size()));

  std::size_t done = 0;
  try {
    ResetDirectory(layout.ImageDir(Split::kTrain));
    ResetDirectory(layout.ImageDir(Split::kTestB));

    std::vector<ManifestRecord> records(poses.size());
    for (std::size_t i = 0; i < poses.size(); ++i) {
      const Split split = IsHeldOut(i, params.holdout_every) ? Split::kTestB : Split::kTrain;
      records[i].image_path = (fs::path("images") / SplitName(split) /
                               IndexedName("", i, poses.size())).generic_string();
      records[i].pose = poses[i];
    }

    std::mutex mutex;
    MeanAccumulator mean;
    ParallelFor(poses.size(), params.threads, [&](std::size_t begin, std::size_t end) {
      MeanAccumulator local;
      for (std::size_t i = begin; i < end; ++i) {
        const Image img = ApplyShader(
            SplatRender(cloud, params.intrinsics, poses[i], params.render, 1), shader);
        WritePng(img, out_root / records[i].image_path);
        if (!IsHeldOut(i, params.holdout_every)) local.Add(img, records[i].image_path);
        std::lock_guard lock(mutex);
        ++done;
        if (progress) progress(done, poses.size());
      }
      std::lock_guard lock(mutex);
      mean.Merge(local);
    });

    std::vector<ManifestRecord> train, test_b;
    for (std::size_t i = 0; i < poses.size(); ++i) {
      (IsHeldOut(i, params.holdout_every) ? test_b : train).push_back(records[i]);
    }
    WriteManifest(train, layout.Manifest(Split::kTrain));
    WriteManifest(test_b, layout.Manifest(Split::kTestB));
    if (mean.count() > 0) WriteMeanImage(mean.Finish(), layout.MeanImagePath());
    if (!params.config_echo.empty()) WriteTextFile(layout.ConfigEchoPath(), params.config_echo);

    fs::remove(layout.IncompleteMarkerPath(), ec);
    return GenerationSummary{poses.size(), train.size(), test_b.size()};
  } catch (const std::exception& e) {
    std::error_code ignore;
    std::ofstream marker(layout.IncompleteMarkerPath(), std::ios::trunc);
    marker << fmt::format("{{\"status\": \"failed\", \"total\": {}, \"rendered\": {}, \"error\": \"{}\"}}\n",
                          poses.size(), done, JsonEscape(e.what()));
    throw;
  }
}

// ---------------------------------------------------------------------------
// Real frames

IngestResult IngestRealFrames(const fs::path& frames_dir, const fs::path& poses_manifest,
                              int target_width, int target_height, const fs::path& out_root,
                              IngestTarget target) {
  if (target_width < 1 || target_height < 1) {
    throw InvalidArgument("ingest target size must be at least 1x1");
  }
  const std::vector<ManifestRecord> frames = ReadManifest(poses_manifest);
  IngestResult result;
  const DatasetLayout layout{out_root};
  const Split split = target == IngestTarget::kTestA ? Split::kTestA : Split::kTrain;

  std::vector<ManifestRecord> existing;
  if (target == IngestTarget::kTrain && fs::exists(layout.Manifest(Split::kTrain))) {
    existing = ReadManifest(layout.Manifest(Split::kTrain));
  }
  if (frames.empty()) {
    result.warnings.push_back(fmt::format("no frames listed in {}", poses_manifest.string()));
  }

  // Check everything before touching the layout.
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (!fs::is_regular_file(frames_dir / frames[i].image_path)) {
      throw IoError(fmt::format("frame record {} ({}): image not found", i + 1, frames[i].image_path));
    }
  }

  std::error_code ec;
  if (target == IngestTarget::kTestA) {
    ResetDirectory(layout.ImageDir(split));
  } else {
    fs::create_directories(layout.ImageDir(split), ec);
    if (ec) throw IoError("cannot create " + layout.ImageDir(split).string());
  }

  for (std::size_t i = 0; i < frames.size(); ++i) {
    const fs::path src = frames_dir / frames[i].image_path;
    Image img;
    try {
      img = ReadImage(src);
    } catch (const IoError& e) {
      throw IoError(fmt::format("frame record {} ({}): {}", i + 1, frames[i].image_path, e.what()));
    }
    const Image resized = CenterCropResize(img, target_width, target_height);
    ManifestRecord rec;
    rec.image_path = (fs::path("images") / SplitName(split) /
                      IndexedName("frame_", i, frames.size())).generic_string();
    rec.pose = frames[i].pose;
    rec.pose.orientation = NormalizeOrientation(rec.pose.orientation);
    WritePng(resized, out_root / rec.image_path);
    result.records.push_back(std::move(rec));
  }

  if (target == IngestTarget::kTestA) {
    WriteManifest(result.records, layout.Manifest(Split::kTestA));
  } else {
    std::vector<ManifestRecord> merged = existing;
    for (const auto& rec : result.records) {
      const bool clash = std::any_of(existing.begin(), existing.end(), [&](const ManifestRecord& r) {
        return r.image_path == rec.image_path;
      });
      if (!clash) merged.push_back(rec);
    }
    WriteManifest(merged, layout.Manifest(Split::kTrain));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Split validation

SplitReport ValidateSplits(const DatasetLayout& layout) {
  SplitReport report;
  const auto train = ReadManifest(layout.Manifest(Split::kTrain));
  report.train_count = train.size();

  std::map<std::string, std::size_t> train_paths;
  std::map<std::array<double, 6>, std::size_t> train_poses;
  for (std::size_t i = 0; i < train.size(); ++i) {
    train_paths.emplace(train[i].image_path, i);
    train_poses.emplace(train[i].pose.AsArray(), i);
  }

  const auto check_files = [&](const std::vector<ManifestRecord>& records) {
    for (const auto& rec : records) {
      if (!fs::is_regular_file(layout.root / rec.image_path)) {
        report.missing_images.push_back(rec.image_path);
      }
    }
  };
  check_files(train);

  for (Split split : {Split::kTestA, Split::kTestB}) {
    const fs::path path = layout.Manifest(split);
    if (!fs::exists(path)) continue;
    const auto test = ReadManifest(path);
    (split == Split::kTestA ? report.test_a_count : report.test_b_count) = test.size();
    check_files(test);
    for (const auto& rec : test) {
      if (const auto it = train_paths.find(rec.image_path); it != train_paths.end()) {
        report.path_overlaps.push_back({split, train[it->second].image_path, rec.image_path});
      } else if (const auto pit = train_poses.find(rec.pose.AsArray()); pit != train_poses.end()) {
        report.pose_overlaps.push_back({split, train[pit->second].image_path, rec.image_path});
      }
    }
  }
  return report;
}

}  // namespace posesynth
