#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "lctrack/correlation_filter.hpp"
#include "lctrack/errors.hpp"
#include "oracles.hpp"

namespace lct {
namespace {

double max_abs_diff(const cv::Mat& a, const cv::Mat& b) { return cv::norm(a, b, cv::NORM_INF); }

FeatureStack single(const FeatureMap& x, double weight = 1.0) {
  return FeatureStack{{FeatureLayer{x, 1, weight}}};
}

TEST(Label, PeakAtFlooredCentre) {
  const GaussianLabelMap y = make_label(7, 10, 0.1);
  EXPECT_EQ(y.values.at<double>(3, 5), 1.0);
  double lo, hi;
  cv::Point loc;
  cv::minMaxLoc(y.values, &lo, &hi, nullptr, &loc);
  EXPECT_EQ(loc, cv::Point(5, 3));
}

TEST(Label, SymmetricAboutPeak) {
  const GaussianLabelMap y = make_label(16, 16, 0.1);
  for (int d = 1; d < 8; ++d) {
    EXPECT_DOUBLE_EQ(y.values.at<double>(8 + d, 8), y.values.at<double>(8 - d, 8));
    EXPECT_DOUBLE_EQ(y.values.at<double>(8, 8 + d), y.values.at<double>(8 + d, 8));
  }
}

TEST(Label, BandwidthIsFactorOfGeometricMeanSide) {
  const GaussianLabelMap y = make_label(16, 16, 0.1);
  EXPECT_DOUBLE_EQ(y.sigma_eff, 1.6);
  const double expected = std::exp(-1.0 / (2.0 * 1.6 * 1.6));
  EXPECT_NEAR(y.values.at<double>(9, 8), expected, 1e-15);
  EXPECT_NEAR(y.values.at<double>(9, 8), 0.8226, 5e-5);
}

TEST(KernelCorrelation, DeltaAutocorrelation) {
  FeatureMap x(1, 4, 1);
  x.at(0, 0, 0) = 1.0;
  const cv::Mat k = kernel_correlation(x, x, KernelSpec::linear());
  EXPECT_NEAR(k.at<double>(0, 0), 1.0, 1e-15);
  for (int n = 1; n < 4; ++n) EXPECT_NEAR(k.at<double>(0, n), 0.0, 1e-15);
}

TEST(KernelCorrelation, GaussianSelfAtZeroShiftIsOne) {
  std::mt19937_64 rng(1);
  const FeatureMap x = oracle::random_map(5, 7, 3, rng);
  const cv::Mat k = kernel_correlation(x, x, KernelSpec::gaussian(0.5));
  EXPECT_NEAR(k.at<double>(0, 0), 1.0, 1e-12);
}

TEST(KernelCorrelation, MatchesBruteForceShifts) {
  std::mt19937_64 rng(2);
  const FeatureMap x = oracle::random_map(6, 6, 2, rng);
  const FeatureMap z = oracle::random_map(6, 6, 2, rng);
  for (const KernelSpec& kernel : {KernelSpec::linear(), KernelSpec::gaussian(2.0)}) {
    EXPECT_LT(max_abs_diff(kernel_correlation(x, z, kernel),
                           oracle::brute_force_correlation(x, z, kernel)),
              1e-8);
  }
}

TEST(KernelCorrelation, ShapeMismatchThrows) {
  EXPECT_THROW(kernel_correlation(FeatureMap(4, 4, 2), FeatureMap(4, 4, 3), KernelSpec::linear()),
               DimensionMismatchError);
}

TEST(TrainLayer, MatchesDenseDualSolve) {
  std::mt19937_64 rng(3);
  const GaussianLabelMap label = make_label(4, 4, 0.1);
  for (int trial = 0; trial < 5; ++trial) {
    const FeatureMap x = oracle::random_map(4, 4, 1, rng);
    const LayerModel model = train_layer(x, label, 1e-2, KernelSpec::linear());
    EXPECT_LT(max_abs_diff(oracle::inverse_real(model.alphaf),
                           oracle::dense_dual_solve(x, label.values, 1e-2, KernelSpec::linear())),
              1e-6);
  }
}

TEST(TrainLayer, LargeRegularizerShrinksCoefficients) {
  std::mt19937_64 rng(4);
  const FeatureMap x = oracle::random_map(8, 8, 2, rng);
  const GaussianLabelMap label = make_label(8, 8, 0.1);
  const double n1 = cv::norm(train_layer(x, label, 1e6, KernelSpec::linear()).alphaf);
  const double n2 = cv::norm(train_layer(x, label, 1e7, KernelSpec::linear()).alphaf);
  EXPECT_NEAR(n1 / n2, 10.0, 1e-3);
}

TEST(TrainLayer, LabelSizeMismatchThrows) {
  EXPECT_THROW(train_layer(FeatureMap(4, 4, 1, 1.0), make_label(5, 4, 0.1), 1e-4,
                           KernelSpec::linear()),
               DimensionMismatchError);
}

TEST(Detect, SelfDetectionPeaksAtCentre) {
  std::mt19937_64 rng(5);
  const FeatureMap x = prepare_for_filter(oracle::random_map(12, 16, 4, rng));
  const CorrelationModel model = train_model(single(x), {});
  const ResponseMap r = detect(model, single(x));
  EXPECT_EQ(r.peak, cv::Point(8, 6));
  EXPECT_EQ(peak_offset(r), cv::Point(0, 0));
  double hi;
  cv::minMaxLoc(r.values, nullptr, &hi);
  EXPECT_EQ(r.peak_value, hi);
  EXPECT_EQ(r.peak_value, r.values.at<double>(r.peak));
}

TEST(Detect, CircularShiftMovesPeakExactly) {
  std::mt19937_64 rng(6);
  const FeatureMap x = prepare_for_filter(oracle::random_map(16, 16, 3, rng));
  const CorrelationModel model = train_model(single(x), {});
  // z(i) = x(i - s) puts the template s cells further along.
  const ResponseMap r = detect(model, single(oracle::shifted(x, -2, -3)));
  EXPECT_EQ(peak_offset(r), cv::Point(3, 2));
}

TEST(Detect, ScalingWeightsKeepsPeak) {
  std::mt19937_64 rng(7);
  const FeatureMap a = prepare_for_filter(oracle::random_map(10, 10, 2, rng));
  const FeatureMap b = prepare_for_filter(oracle::random_map(10, 10, 3, rng));
  FeatureStack train{{FeatureLayer{a, 1, 1.0}, FeatureLayer{b, 2, 0.4}}};
  CorrelationModel model = train_model(train, {});
  const FeatureStack probe{{FeatureLayer{oracle::shifted(a, 1, 2), 1, 1.0},
                            FeatureLayer{oracle::random_map(10, 10, 3, rng), 2, 0.4}}};
  const ResponseMap r1 = detect(model, probe);
  for (double& g : model.gammas) g *= 2.0;
  const ResponseMap r2 = detect(model, probe);
  EXPECT_EQ(r1.peak, r2.peak);
  EXPECT_LT(max_abs_diff(r2.values, 2.0 * r1.values), 1e-12);
}

TEST(Detect, PerLayerResponseMatchesBruteForce) {
  std::mt19937_64 rng(8);
  const FeatureMap x = oracle::random_map(5, 6, 2, rng);
  const FeatureMap z = oracle::random_map(5, 6, 2, rng);
  const GaussianLabelMap label = make_label(5, 6, 0.1);
  for (const KernelSpec& kernel : {KernelSpec::linear(), KernelSpec::gaussian(3.0)}) {
    const LayerModel model = train_layer(x, label, 1e-3, kernel);
    const cv::Mat alpha = oracle::inverse_real(model.alphaf);
    EXPECT_LT(max_abs_diff(layer_response(model, z, kernel),
                           oracle::brute_force_response(alpha, x, z, kernel)),
              1e-8);
  }
}

TEST(Detect, ImaginaryResidueIsNegligible) {
  std::mt19937_64 rng(9);
  const FeatureMap x = prepare_for_filter(oracle::random_map(14, 18, 5, rng));
  const CorrelationModel model = train_model(single(x), {});
  const ResponseMap r = detect(model, single(prepare_for_filter(oracle::random_map(14, 18, 5, rng))));
  double lo, hi;
  cv::minMaxLoc(r.values, &lo, &hi);
  EXPECT_LT(r.max_imag_residue, 1e-9 * std::max(std::abs(lo), std::abs(hi)));
}

TEST(Detect, LayerCountMismatchThrows) {
  std::mt19937_64 rng(10);
  const FeatureMap x = oracle::random_map(6, 6, 1, rng);
  const CorrelationModel model = train_model(single(x), {});
  EXPECT_THROW(detect(model, FeatureStack{}), DimensionMismatchError);
}

TEST(Translation, CentrePeakKeepsPosition) {
  ResponseMap r;
  r.values = cv::Mat::zeros(16, 16, CV_64F);
  r.peak = {8, 8};
  const cv::Point2d p = estimate_translation(r, 4.0, {100.0, 50.0});
  EXPECT_EQ(p, cv::Point2d(100.0, 50.0));
}

TEST(Translation, OneCellRightMovesByCell) {
  ResponseMap r;
  r.values = cv::Mat::zeros(16, 16, CV_64F);
  r.peak = {9, 8};
  EXPECT_EQ(estimate_translation(r, 4.0, {100.0, 50.0}), cv::Point2d(104.0, 50.0));
}

TEST(Translation, WrapsToSignedOffsets) {
  ResponseMap r;
  r.values = cv::Mat::zeros(16, 15, CV_64F);
  for (int c = 0; c < 15; ++c) {
    r.peak = {c, 0};
    int expected = c - 7;
    if (expected >= 8) expected -= 15;
    EXPECT_EQ(peak_offset(r).x, expected) << c;
  }
  r.peak = {7, 0};
  EXPECT_EQ(peak_offset(r).y, -8);
  EXPECT_EQ(estimate_translation(r, 4.0, {0.0, 0.0}).y, -32.0);
}

class ModelUpdate : public ::testing::Test {
 protected:
  void SetUp() override {
    std::mt19937_64 rng(11);
    a_ = prepare_for_filter(oracle::random_map(8, 10, 2, rng));
    b_ = prepare_for_filter(oracle::random_map(8, 10, 2, rng));
  }
  CorrelationModel model(double eta) {
    CorrelationParams p;
    p.eta = eta;
    return train_model(single(a_), p);
  }
  FeatureMap a_;
  FeatureMap b_;
};

TEST_F(ModelUpdate, ZeroRateKeepsModel) {
  const CorrelationModel m = model(0.0);
  const CorrelationModel u = update_model(m, single(b_));
  EXPECT_EQ(max_abs_diff(u.layers[0].alphaf, m.layers[0].alphaf), 0.0);
  EXPECT_EQ(max_abs_diff(u.layers[0].xf[1], m.layers[0].xf[1]), 0.0);
}

TEST_F(ModelUpdate, UnitRateGivesFreshModel) {
  const CorrelationModel u = update_model(model(1.0), single(b_));
  const CorrelationModel fresh = model(1.0);
  const LayerModel f = train_layer(b_, fresh.label, fresh.params.lambda, fresh.params.kernel);
  EXPECT_EQ(max_abs_diff(u.layers[0].alphaf, f.alphaf), 0.0);
  EXPECT_EQ(max_abs_diff(u.layers[0].xf[0], f.xf[0]), 0.0);
}

TEST_F(ModelUpdate, RepeatedUpdatesConvergeGeometrically) {
  const double eta = 0.01;
  CorrelationModel m = model(eta);
  const cv::Mat start = m.layers[0].alphaf.clone();
  const cv::Mat target = train_layer(b_, m.label, m.params.lambda, m.params.kernel).alphaf;
  const double gap0 = cv::norm(start, target);
  for (int k = 1; k <= 50; ++k) {
    m = update_model(m, single(b_));
    EXPECT_NEAR(cv::norm(m.layers[0].alphaf, target) / gap0, std::pow(1.0 - eta, k), 1e-9);
  }
}

TEST_F(ModelUpdate, IsConvexCombination) {
  const CorrelationModel m = model(0.3);
  const CorrelationModel u = update_model(m, single(b_));
  const cv::Mat fresh = train_layer(b_, m.label, m.params.lambda, m.params.kernel).alphaf;
  for (int r = 0; r < fresh.rows; ++r) {
    for (int c = 0; c < fresh.cols; ++c) {
      for (int k = 0; k < 2; ++k) {
        const double lo = std::min(m.layers[0].alphaf.at<cv::Vec2d>(r, c)[k], fresh.at<cv::Vec2d>(r, c)[k]);
        const double hi = std::max(m.layers[0].alphaf.at<cv::Vec2d>(r, c)[k], fresh.at<cv::Vec2d>(r, c)[k]);
        const double v = u.layers[0].alphaf.at<cv::Vec2d>(r, c)[k];
        EXPECT_GE(v, lo - 1e-15);
        EXPECT_LE(v, hi + 1e-15);
      }
    }
  }
}

}  // namespace
}  // namespace lct
