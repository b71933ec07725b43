#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "posesynth/dataset.h"
#include "posesynth/errors.h"
#include "posesynth/manifest.h"

namespace posesynth {

// Position error in meters, orientation error (geodesic angle) in degrees.
struct Metrics {
  double median_pos_m = 0.0;
  double mean_pos_m = 0.0;
  double median_ori_deg = 0.0;
  double mean_ori_deg = 0.0;
  std::size_t count = 0;
};

struct PoseError {
  std::string image_path;
  double position_m = 0.0;
  double orientation_deg = 0.0;
};

// A prediction uses the manifest record shape: image path plus estimated pose.
using Prediction = ManifestRecord;

// Thrown when a prediction names an image that is not in the ground truth.
class UnmatchedPrediction : public Error {
 public:
  explicit UnmatchedPrediction(const std::string& path)
      : Error("prediction for unknown image: " + path), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

std::vector<PoseError> PairwiseErrors(const std::vector<Prediction>& preds,
                                      const std::vector<ManifestRecord>& gt);

// Median (mean of the two middle values for even counts) and mean of both
// error kinds. Throws InvalidArgument on empty input.
Metrics Evaluate(const std::vector<Prediction>& preds, const std::vector<ManifestRecord>& gt);

// "1.54m, 0.92°"
std::string FormatCell(double pos_m, double ori_deg);

// Fixed-width table with a median line and a mean line per row.
std::string FormatReport(const std::vector<std::pair<std::string, Metrics>>& rows);

// k = 1 nearest-neighbour retrieval over downsampled, mean-subtracted
// grayscale descriptors.
class KnnIndex {
 public:
  struct Match {
    std::size_t index = 0;
    double distance = 0.0;  // L2
  };

  // Loads every train image (paths relative to `base_dir`). The mean image,
  // when given, must match the image size.
  KnnIndex(const std::vector<ManifestRecord>& train, const std::filesystem::path& base_dir,
           std::optional<MeanImage> mean, int descriptor_size = 16, int threads = 1);

  std::vector<float> Describe(const Image& img) const;

  // Nearest train descriptor; ties go to the lowest manifest index.
  Match Query(const Image& img) const;
  Pose Predict(const Image& img) const { return train_[Query(img).index].pose; }

  std::size_t size() const { return train_.size(); }
  const std::vector<float>& descriptor(std::size_t i) const { return descriptors_[i]; }
  const ManifestRecord& record(std::size_t i) const { return train_[i]; }

 private:
  std::vector<ManifestRecord> train_;
  std::optional<MeanImage> mean_;
  int descriptor_size_;
  int threads_;
  int width_ = 0;
  int height_ = 0;
  std::vector<std::vector<float>> descriptors_;
};

}  // namespace posesynth
