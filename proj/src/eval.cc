#include "posesynth/eval.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include <fmt/format.h>

#include "posesynth/errors.h"
#include "posesynth/parallel.h"

namespace posesynth {
namespace {

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double Mean(const std::vector<double>& v) {
  // Sorted summation keeps the mean independent of input order.
  std::vector<double> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  return std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

std::vector<PoseError> PairwiseErrors(const std::vector<Prediction>& preds,
                                      const std::vector<ManifestRecord>& gt) {
  std::unordered_map<std::string, const ManifestRecord*> by_path;
  for (const auto& rec : gt) by_path.emplace(rec.image_path, &rec);
  std::vector<PoseError> errors;
  errors.reserve(preds.size());
  for (const auto& p : preds) {
    const auto it = by_path.find(p.image_path);
    if (it == by_path.end()) throw UnmatchedPrediction(p.image_path);
    const Pose& truth = it->second->pose;
    errors.push_back({p.image_path, (p.pose.position - truth.position).norm(),
                      GeodesicAngle(p.pose.orientation, truth.orientation)});
  }
  return errors;
}

Metrics Evaluate(const std::vector<Prediction>& preds, const std::vector<ManifestRecord>& gt) {
  if (preds.empty()) throw InvalidArgument("no predictions to evaluate");
  const auto errors = PairwiseErrors(preds, gt);
  std::vector<double> pos, ori;
  for (const auto& e : errors) {
    pos.push_back(e.position_m);
    ori.push_back(e.orientation_deg);
  }
  Metrics m;
  m.median_pos_m = Median(pos);
  m.mean_pos_m = Mean(pos);
  m.median_ori_deg = Median(ori);
  m.mean_ori_deg = Mean(ori);
  m.count = errors.size();
  return m;
}

std::string FormatCell(double pos_m, double ori_deg) {
  return fmt::format("{:.2f}m, {:.2f}°", pos_m, ori_deg);
}

std::string FormatReport(const std::vector<std::pair<std::string, Metrics>>& rows) {
  std::size_t label_width = 5;
  for (const auto& [label, m] : rows) label_width = std::max(label_width, label.size());
  std::string out = fmt::format("{:<{}}  {:>6}  {:<9}  {}\n", "split", label_width, "count",
                                "statistic", "position, orientation");
  for (const auto& [label, m] : rows) {
    out += fmt::format("{:<{}}  {:>6}  {:<9}  {}\n", label, label_width, m.count, "median",
                       FormatCell(m.median_pos_m, m.median_ori_deg));
    out += fmt::format("{:<{}}  {:>6}  {:<9}  {}\n", "", label_width, "", "mean",
                       FormatCell(m.mean_pos_m, m.mean_ori_deg));
  }
  return out;
}

// ---------------------------------------------------------------------------

KnnIndex::KnnIndex(const std::vector<ManifestRecord>& train, const std::filesystem::path& base_dir,
                   std::optional<MeanImage> mean, int descriptor_size, int threads)
    : train_(train), mean_(std::move(mean)), descriptor_size_(descriptor_size), threads_(threads) {
  if (train_.empty()) throw InvalidArgument("nearest-neighbour index needs a nonempty train set");
  if (descriptor_size_ < 1) throw InvalidArgument("descriptor size must be >= 1");
  const Image first = ReadImage(base_dir / train_.front().image_path);
  width_ = first.width;
  height_ = first.height;
  if (width_ < descriptor_size_ || height_ < descriptor_size_) {
    throw InvalidArgument("images are smaller than the descriptor");
  }
  if (mean_ && (mean_->width != width_ || mean_->height != height_)) {
    throw InvalidArgument(fmt::format("mean image is {}x{}, train images are {}x{}", mean_->width,
                                      mean_->height, width_, height_));
  }
  descriptors_.resize(train_.size());
  ParallelFor(train_.size(), threads_, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      descriptors_[i] = Describe(i == 0 ? first : ReadImage(base_dir / train_[i].image_path));
    }
  });
}

std::vector<float> KnnIndex::Describe(const Image& img) const {
  if (img.width != width_ || img.height != height_) {
    throw InvalidArgument(fmt::format("image is {}x{}, index expects {}x{}", img.width, img.height,
                                      width_, height_));
  }
  const int d = descriptor_size_;
  std::vector<double> sums(static_cast<std::size_t>(d) * d, 0.0);
  std::vector<int> counts(sums.size(), 0);
  for (int y = 0; y < height_; ++y) {
    const int by = static_cast<int>(static_cast<long long>(y) * d / height_);
    for (int x = 0; x < width_; ++x) {
      const int bx = static_cast<int>(static_cast<long long>(x) * d / width_);
      const std::uint8_t* p = img.at(x, y);
      double c[3] = {double(p[0]), double(p[1]), double(p[2])};
      if (mean_) {
        for (int k = 0; k < 3; ++k) c[k] -= mean_->at(x, y, k);
      }
      const std::size_t cell = static_cast<std::size_t>(by) * d + bx;
      sums[cell] += 0.299 * c[0] + 0.587 * c[1] + 0.114 * c[2];
      ++counts[cell];
    }
  }
  std::vector<float> desc(sums.size());
  for (std::size_t i = 0; i < sums.size(); ++i) {
    desc[i] = static_cast<float>(sums[i] / counts[i]);
  }
  return desc;
}

KnnIndex::Match KnnIndex::Query(const Image& img) const {
  const std::vector<float> q = Describe(img);
  std::vector<double> dist2(descriptors_.size());
  ParallelFor(descriptors_.size(), threads_, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < q.size(); ++k) {
        const double diff = static_cast<double>(descriptors_[i][k]) - q[k];
        s += diff * diff;
      }
      dist2[i] = s;
    }
  });
  Match best{0, dist2[0]};
  for (std::size_t i = 1; i < dist2.size(); ++i) {
    if (dist2[i] < best.distance) best = {i, dist2[i]};
  }
  best.distance = std::sqrt(best.distance);
  return best;
}

}  // namespace posesynth
