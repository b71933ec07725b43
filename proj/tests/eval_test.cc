#include "posesynth/eval.h"

#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "test_util.h"

namespace posesynth {
namespace {

ManifestRecord Rec(const std::string& path, Vec3 pos, Orientation o) {
  return ManifestRecord{path, Pose{pos, o}};
}

TEST(Evaluate, PerfectPredictionsAreZero) {
  const std::vector<ManifestRecord> gt{Rec("a", {1, 2, 3}, {0, 10, 0}),
                                       Rec("b", {-1, 0, 4}, {5, -170, 2})};
  const Metrics m = Evaluate(gt, gt);
  EXPECT_EQ(m.count, 2u);
  EXPECT_EQ(m.median_pos_m, 0.0);
  EXPECT_EQ(m.mean_pos_m, 0.0);
  EXPECT_NEAR(m.median_ori_deg, 0.0, 1e-9);
  EXPECT_NEAR(m.mean_ori_deg, 0.0, 1e-9);
}

TEST(Evaluate, SingleOffset) {
  const Metrics m = Evaluate({Rec("a", {1, 0, 0}, {0, 2, 0})}, {Rec("a", {0, 0, 0}, {0, 0, 0})});
  EXPECT_DOUBLE_EQ(m.median_pos_m, 1.0);
  EXPECT_NEAR(m.median_ori_deg, 2.0, 1e-9);
}

std::vector<ManifestRecord> FiveGroundTruth() {
  std::vector<ManifestRecord> gt;
  for (const char* p : {"p0", "p1", "p2", "p3", "p4"}) gt.push_back(Rec(p, {0, 0, 0}, {0, 0, 0}));
  return gt;
}

std::vector<Prediction> FivePredictions() {
  // Position errors 5, 1, 2, 10, 0 m; single-axis rotations of 10, 20, 30,
  // 40, 0 degrees.
  return {Rec("p0", {3, 4, 0}, {0, 10, 0}), Rec("p1", {1, 0, 0}, {20, 0, 0}),
          Rec("p2", {0, 2, 0}, {0, 0, 30}), Rec("p3", {0, 0, 10}, {0, -40, 0}),
          Rec("p4", {0, 0, 0}, {0, 0, 0})};
}

TEST(Evaluate, HandComputedTable) {
  const Metrics m = Evaluate(FivePredictions(), FiveGroundTruth());
  EXPECT_EQ(m.count, 5u);
  EXPECT_DOUBLE_EQ(m.median_pos_m, 2.0);
  EXPECT_DOUBLE_EQ(m.mean_pos_m, 3.6);
  EXPECT_NEAR(m.median_ori_deg, 20.0, 1e-9);
  EXPECT_NEAR(m.mean_ori_deg, 20.0, 1e-9);

  const auto errs = PairwiseErrors(FivePredictions(), FiveGroundTruth());
  ASSERT_EQ(errs.size(), 5u);
  EXPECT_EQ(errs[0].image_path, "p0");
  EXPECT_DOUBLE_EQ(errs[0].position_m, 5.0);
  EXPECT_NEAR(errs[3].orientation_deg, 40.0, 1e-9);
}

TEST(Evaluate, EvenCountMedianAveragesMiddle) {
  auto preds = FivePredictions();
  auto gt = FiveGroundTruth();
  preds.pop_back();
  gt.pop_back();
  const Metrics m = Evaluate(preds, gt);
  // Sorted position errors 1, 2, 5, 10.
  EXPECT_DOUBLE_EQ(m.median_pos_m, 3.5);
  EXPECT_NEAR(m.median_ori_deg, 25.0, 1e-9);
}

TEST(Evaluate, InvariantToPermutation) {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(-5, 5), a(-180, 180);
  std::vector<ManifestRecord> gt;
  std::vector<Prediction> preds;
  for (int i = 0; i < 101; ++i) {
    const std::string name = "img" + std::to_string(i);
    gt.push_back(Rec(name, {u(rng), u(rng), u(rng)}, {a(rng) / 2, a(rng), a(rng)}));
    preds.push_back(Rec(name, {u(rng), u(rng), u(rng)}, {a(rng) / 2, a(rng), a(rng)}));
  }
  const Metrics ref = Evaluate(preds, gt);
  for (int trial = 0; trial < 5; ++trial) {
    std::shuffle(preds.begin(), preds.end(), rng);
    std::shuffle(gt.begin(), gt.end(), rng);
    const Metrics m = Evaluate(preds, gt);
    EXPECT_EQ(m.median_pos_m, ref.median_pos_m);
    EXPECT_EQ(m.mean_pos_m, ref.mean_pos_m);
    EXPECT_EQ(m.median_ori_deg, ref.median_ori_deg);
    EXPECT_EQ(m.mean_ori_deg, ref.mean_ori_deg);
  }
}

TEST(Evaluate, Errors) {
  EXPECT_THROW(Evaluate({}, FiveGroundTruth()), InvalidArgument);
  try {
    Evaluate({Rec("zzz", {}, {})}, FiveGroundTruth());
    FAIL();
  } catch (const UnmatchedPrediction& e) {
    EXPECT_EQ(e.path(), "zzz");
  }
}

Metrics Fixture(double med_pos, double mean_pos, double med_ori, double mean_ori) {
  Metrics m;
  m.median_pos_m = med_pos;
  m.mean_pos_m = mean_pos;
  m.median_ori_deg = med_ori;
  m.mean_ori_deg = mean_ori;
  m.count = 1;
  return m;
}

TEST(FormatCell, TwoDecimalCells) {
  EXPECT_EQ(FormatCell(1.54, 0.92), "1.54m, 0.92°");
  EXPECT_EQ(FormatCell(2.25, 1.59), "2.25m, 1.59°");
  EXPECT_EQ(FormatCell(0.91, 0.39), "0.91m, 0.39°");
  EXPECT_EQ(FormatCell(1.01, 1.44), "1.01m, 1.44°");
  EXPECT_EQ(FormatCell(0.0, 0.0), "0.00m, 0.00°");
}

TEST(FormatReport, MedianAndMeanLines) {
  const std::string report =
      FormatReport({{"testA", Fixture(1.54, 2.25, 0.92, 1.59)}, {"testB", Fixture(0.91, 1.01, 0.39, 1.44)}});
  EXPECT_NE(report.find("median     1.54m, 0.92°\n"), std::string::npos) << report;
  EXPECT_NE(report.find("mean       2.25m, 1.59°\n"), std::string::npos) << report;
  EXPECT_NE(report.find("0.91m, 0.39°"), std::string::npos);
  EXPECT_NE(report.find("1.01m, 1.44°"), std::string::npos);
  EXPECT_EQ(std::count(report.begin(), report.end(), '\n'), 5);
}

class KnnTest : public ::testing::Test {
 protected:
  void SetUp() override {
    std::mt19937_64 rng(62);
    std::uniform_int_distribution<int> byte(0, 255);
    for (int i = 0; i < 40; ++i) {
      Image img(32, 32);
      for (auto& p : img.pixels) p = static_cast<std::uint8_t>(byte(rng));
      const std::string name = "t" + std::to_string(i) + ".png";
      WritePng(img, dir_ / name);
      images_.push_back(img);
      train_.push_back(Rec(name, {i * 0.5, -1.6, 1.0}, {0.0, i * 9.0 - 180.0, 0.0}));
    }
  }

  testing::TempDir dir_;
  std::vector<Image> images_;
  std::vector<ManifestRecord> train_;
};

TEST_F(KnnTest, TrainImageFindsItself) {
  const KnnIndex index(train_, dir_.path(), std::nullopt, 8);
  for (std::size_t i = 0; i < train_.size(); ++i) {
    const auto m = index.Query(images_[i]);
    EXPECT_EQ(m.index, i);
    EXPECT_EQ(m.distance, 0.0);
    EXPECT_EQ(index.Predict(images_[i]).AsArray(), train_[i].pose.AsArray());
  }
}

TEST_F(KnnTest, MatchesExhaustiveScan) {
  const MeanImage mean = ComputeMeanImage(train_, dir_.path());
  const KnnIndex index(train_, dir_.path(), mean, 4, 3);
  std::mt19937_64 rng(63);
  std::uniform_int_distribution<int> byte(0, 255);
  for (int q = 0; q < 30; ++q) {
    Image img(32, 32);
    for (auto& p : img.pixels) p = static_cast<std::uint8_t>(byte(rng));
    const std::vector<float> d = index.Describe(img);
    std::size_t best = 0;
    double best_dist = 1e300;
    for (std::size_t i = 0; i < index.size(); ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < d.size(); ++k) {
        const double diff = static_cast<double>(d[k]) - index.descriptor(i)[k];
        s += diff * diff;
      }
      if (s < best_dist) {
        best_dist = s;
        best = i;
      }
    }
    const auto m = index.Query(img);
    EXPECT_EQ(m.index, best);
    EXPECT_NEAR(m.distance, std::sqrt(best_dist), 1e-6 * (1.0 + std::sqrt(best_dist)));
    // The prediction is a verbatim train pose.
    const Pose p = index.Predict(img);
    EXPECT_TRUE(std::any_of(train_.begin(), train_.end(), [&](const ManifestRecord& r) {
      return r.pose.AsArray() == p.AsArray();
    }));
  }
}

TEST_F(KnnTest, TiesGoToLowestIndex) {
  std::vector<ManifestRecord> dup{train_[3], train_[3]};
  dup[1].image_path = "copy.png";
  WritePng(images_[3], dir_ / "copy.png");
  dup[1].pose.position.x() = 99.0;
  const KnnIndex index(dup, dir_.path(), std::nullopt);
  EXPECT_EQ(index.Query(images_[3]).index, 0u);
}

TEST_F(KnnTest, SingleTrainImage) {
  const KnnIndex index({train_[5]}, dir_.path(), std::nullopt);
  EXPECT_EQ(index.Query(images_[0]).index, 0u);
  EXPECT_EQ(index.Predict(images_[9]).AsArray(), train_[5].pose.AsArray());
}

TEST_F(KnnTest, RejectsBadInputs) {
  EXPECT_THROW(KnnIndex({}, dir_.path(), std::nullopt), InvalidArgument);
  MeanImage wrong{16, 16, std::vector<float>(16 * 16 * 3, 0.f)};
  EXPECT_THROW(KnnIndex(train_, dir_.path(), wrong), InvalidArgument);
  EXPECT_THROW(KnnIndex(train_, dir_.path(), std::nullopt, 64), InvalidArgument);
}

}  // namespace
}  // namespace posesynth
