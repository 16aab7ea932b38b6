#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "lctrack/errors.hpp"
#include "lctrack/gmphd.hpp"
#include "oracles.hpp"

namespace lct::phd {
namespace {

GaussianComponent component(double w, double x, double y, double vx = 0.0, double vy = 0.0) {
  GaussianComponent c;
  c.weight = w;
  c.mean << x, y, vx, vy;
  c.cov = StateCov::Identity() * 4.0;
  return c;
}

TEST(Birth, OneComponentPerMeasurementWithZeroVelocity) {
  const std::vector<Measurement> z{{10, 20}};
  const Mixture b = birth_components(z, StateCov::Identity() * 25.0, 0.1);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(b[0].mean, State(10, 20, 0, 0));
  EXPECT_EQ(b[0].weight, 0.1);
  EXPECT_EQ(b[0].cov, StateCov::Identity() * 25.0);
}

TEST(Birth, FiveProposalsGiveFiveComponents) {
  const std::vector<Measurement> z(5, Measurement(1, 2));
  EXPECT_EQ(birth_components(z, StateCov::Identity(), 0.1).size(), 5u);
  EXPECT_TRUE(birth_components({}, StateCov::Identity(), 0.1).empty());
}

TEST(Predict, IdentityDynamicsKeepSurvivors) {
  MotionModel m = MotionModel::constant_velocity();
  m.F.setIdentity();
  m.Q.setZero();
  m.p_survival = 1.0;
  const Mixture in{component(0.7, 3, 4, 1, 1)};
  const Mixture out = predict(in, m, {});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].weight, 0.7);
  EXPECT_EQ(out[0].mean, in[0].mean);
  EXPECT_EQ(out[0].cov, in[0].cov);
}

TEST(Predict, ConstantVelocityAndSurvival) {
  const MotionModel m = MotionModel::constant_velocity();
  const Mixture births{component(0.1, 50, 50)};
  const Mixture out = predict({component(1.0, 0, 0, 2, 3)}, m, births);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_DOUBLE_EQ(out[0].weight, 0.99);
  EXPECT_EQ(out[0].mean, State(2, 3, 2, 3));
  EXPECT_EQ(out[1].mean, births[0].mean);
  EXPECT_EQ(out[1].weight, 0.1);
}

TEST(Update, NoMeasurementsScalesByMissProbability) {
  const MotionModel m = MotionModel::constant_velocity();
  const Mixture in{component(0.5, 1, 1), component(0.25, 9, 9)};
  const Mixture out = update(in, {}, m, {4.0, 1e4});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].weight, 0.5 * (1.0 - m.p_detection));
  EXPECT_EQ(out[1].weight, 0.25 * (1.0 - m.p_detection));
}

TEST(Update, SingleComponentWithoutClutterIsKalman) {
  const MotionModel m = MotionModel::constant_velocity(4.0, 1.0, 9.0, 0.99, 1.0);
  const GaussianComponent c = component(0.8, 10, 12, 1, -1);
  const Measurement z(13.0, 9.5);
  const Mixture out = update({c}, std::vector<Measurement>{z}, m, {0.0, 1.0});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].weight, 0.0);
  EXPECT_NEAR(out[1].weight, 1.0, 1e-12);
  oracle::Kalman kf{c.mean, c.cov};
  kf.update(z, m);
  EXPECT_LT((out[1].mean - kf.mean).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LT((out[1].cov - kf.cov).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Update, IdenticalComponentsGetEqualWeights) {
  const MotionModel m = MotionModel::constant_velocity();
  const Mixture in{component(0.3, 5, 5), component(0.3, 5, 5)};
  const Mixture out = update(in, std::vector<Measurement>{{7, 4}}, m, {4.0, 640.0 * 480.0});
  ASSERT_EQ(out.size(), 4u);
  EXPECT_EQ(out[2].weight, out[3].weight);
}

TEST(Update, SingularInnovationNamesComponent) {
  MotionModel m = MotionModel::constant_velocity();
  m.R.setZero();
  GaussianComponent bad = component(1.0, 0, 0);
  bad.cov.setZero();
  try {
    update({component(1.0, 0, 0), bad}, std::vector<Measurement>{{0, 0}}, m, {});
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("component 1"), std::string::npos);
  }
}

TEST(Reduce, DropsWeakComponents) {
  ReductionParams p;
  const Mixture out = prune_and_merge({component(0.5, 0, 0), component(1e-6, 100, 100)}, p);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].weight, 0.5);
}

TEST(Reduce, MergesIdenticalComponents) {
  const Mixture out = prune_and_merge({component(0.3, 4, 4), component(0.3, 4, 4)}, {});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_DOUBLE_EQ(out[0].weight, 0.6);
  EXPECT_EQ(out[0].mean, State(4, 4, 0, 0));
}

TEST(Reduce, KeepsFarApartComponents) {
  const Mixture out = prune_and_merge({component(0.3, 0, 0), component(0.3, 500, 0)}, {});
  EXPECT_EQ(out.size(), 2u);
}

TEST(Reduce, CapKeepsHeaviest) {
  ReductionParams p;
  p.max_components = 2;
  const Mixture out = prune_and_merge(
      {component(0.2, 0, 0), component(0.9, 300, 0), component(0.5, 600, 0)}, p);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].weight, 0.9);
  EXPECT_EQ(out[1].weight, 0.5);
}

TEST(Reduce, ConservesWeightBeforeCap) {
  std::mt19937_64 rng(1);
  ReductionParams p;
  p.prune_threshold = 0.0;
  p.max_components = 1000;
  for (int t = 0; t < 100; ++t) {
    const Mixture in = oracle::random_mixture(12, rng);
    EXPECT_NEAR(total_weight(prune_and_merge(in, p)), total_weight(in), 1e-9);
  }
}

TEST(Estimate, PicksHeaviestLowestIndex) {
  const Mixture mix{component(0.2, 1, 1), component(0.7, 2, 2), component(0.1, 3, 3)};
  const Estimate e = max_weight_estimate(mix);
  EXPECT_EQ(e.index, 1u);
  EXPECT_EQ(e.position, Measurement(2, 2));
  Mixture scaled = mix;
  for (auto& c : scaled) c.weight *= 3.0;
  EXPECT_EQ(max_weight_estimate(scaled).index, 1u);
  EXPECT_EQ(max_weight_estimate({component(0.4, 1, 1), component(0.4, 2, 2)}).index, 0u);
  EXPECT_EQ(max_weight_estimate({component(0.4, 5, 6)}).position, Measurement(5, 6));
}

TEST(Estimate, EmptyMixtureThrows) {
  EXPECT_THROW(max_weight_estimate({}), NoEstimateError);
}

TEST(Filter, SingleTrackReducesToKalman) {
  const MotionModel m = MotionModel::constant_velocity(4.0, 1.0, 9.0, 0.99, 1.0);
  const ClutterModel clutter{0.0, 640.0 * 480.0};
  ReductionParams reduction;
  std::mt19937_64 rng(2);
  std::normal_distribution<double> noise(0.0, 3.0);

  Mixture mix{component(1.0, 100, 100, 2, 1)};
  oracle::Kalman kf{mix[0].mean, mix[0].cov};
  for (int k = 1; k <= 50; ++k) {
    const Measurement z(100 + 2 * k + noise(rng), 100 + k + noise(rng));
    mix = prune_and_merge(update(predict(mix, m, {}), std::vector<Measurement>{z}, m, clutter),
                          reduction);
    kf.predict(m);
    kf.update(z, m);
    ASSERT_EQ(mix.size(), 1u);
    EXPECT_LT((max_weight_estimate(mix).position - kf.mean.head<2>()).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Filter, WeightsAndCovariancesStayValid) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> pos(0.0, 300.0);
  std::uniform_int_distribution<int> count(0, 5);
  FilterParams params;
  params.clutter = {4.0, 300.0 * 300.0};
  Mixture mix;
  for (int k = 0; k < 1000; ++k) {
    std::vector<Measurement> z(static_cast<std::size_t>(count(rng)));
    for (auto& v : z) v = {pos(rng), pos(rng)};
    mix = cycle(mix, z, params);
    for (const auto& c : mix) {
      ASSERT_TRUE(std::isfinite(c.weight));
      ASSERT_GE(c.weight, 0.0);
      ASSERT_LT((c.cov - c.cov.transpose()).cwiseAbs().maxCoeff(), 1e-9);
      ASSERT_GT(Eigen::SelfAdjointEigenSolver<StateCov>(c.cov).eigenvalues().minCoeff(), 1e-12);
    }
  }
}

TEST(Filter, CycleSeedsOneComponentFromOneMeasurement) {
  const Mixture mix = cycle({}, std::vector<Measurement>{{40, 30}}, FilterParams{});
  ASSERT_EQ(mix.size(), 1u);
  EXPECT_EQ(max_weight_estimate(mix).position, Measurement(40, 30));
}

}  // namespace
}  // namespace lct::phd
