#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "lctrack/errors.hpp"
#include "lctrack/incremental_svm.hpp"
#include "oracles.hpp"

namespace lct::svm {
namespace {

void expect_kkt(const SvmModel& model) {
  const KktReport r = model.kkt();
  EXPECT_LE(r.max_alpha_violation, 0.0);
  EXPECT_LT(r.equality_residual, 1e-6);
  EXPECT_LT(r.max_margin_gradient, 1e-4);
  EXPECT_LT(r.max_sign_violation, 1e-4);
}

TEST(Svm, EmptyModelHasNoScore) {
  const SvmModel model;
  EXPECT_FALSE(model.trained());
  EXPECT_THROW(model.score(std::vector<double>{0.0}), NoModelError);
}

TEST(Svm, RejectsBadInput) {
  SvmModel model;
  EXPECT_THROW(model.increment(std::vector<double>{0.0}, 0), InputError);
  EXPECT_THROW(model.increment(std::vector<double>{NAN}, 1), InputError);
  model.increment(std::vector<double>{0.0, 1.0}, 1);
  EXPECT_THROW(model.increment(std::vector<double>{0.0}, -1), InputError);
  EXPECT_THROW(SvmModel(SvmParams{0.0, 0.5}), InputError);
}

TEST(Svm, TwoSymmetricPointsSplitAtZero) {
  SvmModel model;
  model.increment(std::vector<double>{1.0}, 1);
  model.increment(std::vector<double>{-1.0}, -1);
  expect_kkt(model);
  EXPECT_GT(model.score(std::vector<double>{1.0}), 0.0);
  EXPECT_LT(model.score(std::vector<double>{-1.0}), 0.0);
  EXPECT_NEAR(model.score(std::vector<double>{0.0}), 0.0, 1e-6);
  const oracle::BatchSvm batch = oracle::solve_batch_svm({{1.0}, {-1.0}}, {1, -1}, 2.0, 0.5);
  EXPECT_NEAR(batch.score(std::vector<double>{0.0}), 0.0, 1e-6);
  EXPECT_NEAR(model.score(std::vector<double>{0.7}), batch.score(std::vector<double>{0.7}), 1e-6);
}

TEST(Svm, OverlappingPairBothAtBoundMatchesBatch) {
  const std::vector<std::vector<double>> points{{0.2, -0.1}, {0.26, -0.05}};
  const std::vector<int> labels{-1, 1};
  SvmModel model;
  for (std::size_t i = 0; i < points.size(); ++i) model.increment(points[i], labels[i]);
  expect_kkt(model);
  const oracle::BatchSvm batch = oracle::solve_batch_svm(points, labels, 2.0, 0.5);
  for (const std::vector<double>& q : {std::vector<double>{0.0, 0.0}, std::vector<double>{0.23, -0.075},
                                       std::vector<double>{1.0, 1.0}}) {
    EXPECT_NEAR(model.score(q), batch.score(q), 1e-6);
  }
}

TEST(Svm, SampleOutsideMarginJoinsReserve) {
  std::mt19937_64 rng(7);
  const oracle::Dataset data = oracle::random_dataset(30, 2, rng);
  SvmModel model;
  for (std::size_t i = 0; i < data.points.size(); ++i) model.increment(data.points[i], data.labels[i]);
  std::vector<double> easy;
  int label = 0;
  for (int gx = 0; gx <= 20 && easy.empty(); ++gx) {
    for (int gy = 0; gy <= 20; ++gy) {
      const std::vector<double> p{-1.0 + gx / 10.0, -1.0 + gy / 10.0};
      const double f = model.score(p);
      if (std::abs(f) > 1.2) {
        easy = p;
        label = f > 0.0 ? 1 : -1;
        break;
      }
    }
  }
  ASSERT_FALSE(easy.empty());
  const std::vector<double> probe{0.05, -0.1};
  const double before = model.score(probe);
  const std::size_t reserve = model.count(MarginSet::kReserve);
  model.increment(easy, label);
  EXPECT_EQ(model.count(MarginSet::kReserve), reserve + 1);
  EXPECT_EQ(model.score(probe), before);
  expect_kkt(model);
}

TEST(Svm, SupportVectorsOnMarginScoreTheirLabel) {
  std::mt19937_64 rng(1);
  const oracle::Dataset data = oracle::random_dataset(30, 2, rng);
  SvmModel model;
  for (std::size_t i = 0; i < data.points.size(); ++i) model.increment(data.points[i], data.labels[i]);
  ASSERT_GT(model.count(MarginSet::kMargin), 0u);
  for (const TrainingVector& v : model.vectors()) {
    if (v.set == MarginSet::kMargin) EXPECT_NEAR(model.score(v.features), v.label, 1e-3);
  }
}

TEST(Svm, IncrementalMatchesBatchAndKeepsKkt) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 5; ++trial) {
    const oracle::Dataset data = oracle::random_dataset(30, 2, rng);
    SvmModel model;
    for (std::size_t i = 0; i < data.points.size(); ++i) {
      model.increment(data.points[i], data.labels[i]);
      expect_kkt(model);
    }
    const oracle::BatchSvm batch = oracle::solve_batch_svm(data.points, data.labels, 2.0, 0.5);
    for (int gx = 0; gx < 20; ++gx) {
      for (int gy = 0; gy < 20; ++gy) {
        const std::vector<double> p{-1.0 + gx / 9.5, -1.0 + gy / 9.5};
        EXPECT_NEAR(model.score(p), batch.score(p), 1e-3);
      }
    }
  }
}

TEST(Svm, InsertionOrderDoesNotMatter) {
  std::mt19937_64 rng(3);
  const oracle::Dataset data = oracle::random_dataset(25, 3, rng);
  SvmModel forward;
  SvmModel backward;
  for (std::size_t i = 0; i < data.points.size(); ++i) {
    forward.increment(data.points[i], data.labels[i]);
    const std::size_t j = data.points.size() - 1 - i;
    backward.increment(data.points[j], data.labels[j]);
  }
  const std::vector<double> probe{0.1, -0.2, 0.3};
  EXPECT_NEAR(forward.score(probe), backward.score(probe), 1e-6);
}

TEST(Svm, ScoreIsDeterministic) {
  std::mt19937_64 rng(4);
  const oracle::Dataset data = oracle::random_dataset(10, 2, rng);
  SvmModel model;
  for (std::size_t i = 0; i < data.points.size(); ++i) model.increment(data.points[i], data.labels[i]);
  const std::vector<double> p{0.25, 0.5};
  EXPECT_EQ(model.score(p), model.score(p));
}

TEST(Svm, BudgetKeepsSmallestMargins) {
  std::mt19937_64 rng(5);
  const oracle::Dataset data = oracle::random_dataset(40, 2, rng);
  SvmModel model;
  for (std::size_t i = 0; i < data.points.size(); ++i) model.increment(data.points[i], data.labels[i]);
  const std::size_t count = model.support_vector_count();
  ASSERT_GT(count, 4u);

  SvmModel unchanged = model;
  unchanged.maintain_budget(count);
  EXPECT_EQ(unchanged.support_vector_count(), count);

  model.maintain_budget(count - 3);
  EXPECT_EQ(model.support_vector_count(), count - 3);
  expect_kkt(model);
}

TEST(Svm, ReserveTrimLeavesSolution) {
  std::mt19937_64 rng(6);
  const oracle::Dataset data = oracle::random_dataset(40, 2, rng);
  SvmModel model;
  for (std::size_t i = 0; i < data.points.size(); ++i) model.increment(data.points[i], data.labels[i]);
  const std::vector<double> p{0.0, 0.1};
  const double before = model.score(p);
  model.trim_reserve(0);
  EXPECT_EQ(model.count(MarginSet::kReserve), 0u);
  EXPECT_NEAR(model.score(p), before, 1e-12);
}

}  // namespace
}  // namespace lct::svm
