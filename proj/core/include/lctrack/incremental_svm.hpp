#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace lct::svm {

struct SvmParams {
  double C = 2.0;
  double sigma = 0.5;  // K(a, b) = exp(-|a - b|^2 / sigma^2)
};

// Partition of the training set by the KKT conditions on g_i = dW/da_i.
enum class MarginSet {
  kMargin,   // S1: g_i = 0, 0 < a_i < C
  kError,    // S2: g_i <= 0, a_i = C
  kReserve,  // R:  g_i >= 0, a_i = 0
};

struct TrainingVector {
  std::vector<double> features;
  int label = 1;  // +1 or -1
  double alpha = 0.0;
  double gradient = 0.0;  // g_i = sum_j Q_ij a_j + y_i b - 1
  MarginSet set = MarginSet::kReserve;
  std::uint64_t serial = 0;  // insertion order
};

struct KktReport {
  double max_alpha_violation = 0.0;  // distance of any alpha outside [0, C]
  double equality_residual = 0.0;    // |sum_i a_i y_i|
  double max_margin_gradient = 0.0;  // max |g_i| over S1
  double max_sign_violation = 0.0;   // reserve g_i < 0 or error g_i > 0
};

// Incremental / decremental SVM with exact KKT maintenance on every insertion
// (adiabatic increments with margin, error and reserve bookkeeping).
class SvmModel {
 public:
  SvmModel() : SvmModel(SvmParams{}) {}
  explicit SvmModel(SvmParams params);

  // Absorbs one labelled sample. A sample already outside the margin (g > 0) is kept
  // as a reserve vector; otherwise multipliers and bias are adjusted until the KKT
  // conditions hold on every retained sample. Throws InputError on non-finite
  // features, wrong dimensionality or a label other than +1/-1.
  void increment(std::span<const double> features, int label);

  // f(x) = sum_{S1 u S2} a_i y_i K(x_i, x) + b. Throws NoModelError when empty.
  double score(std::span<const double> features) const;

  // When more than max_sv vectors carry a positive multiplier, removes the ones with the
  // largest |g_i| by decremental unlearning until max_sv remain.
  void maintain_budget(std::size_t max_sv);

  // Drops the oldest reserve vectors beyond max_reserve (no effect on the solution).
  void trim_reserve(std::size_t max_reserve);

  bool trained() const { return !vectors_.empty(); }
  std::size_t size() const { return vectors_.size(); }
  std::size_t support_vector_count() const;
  std::size_t count(MarginSet set) const;
  double bias() const { return bias_; }
  const SvmParams& params() const { return params_; }
  const std::vector<TrainingVector>& vectors() const { return vectors_; }

  double kernel(std::span<const double> a, std::span<const double> b) const;

  KktReport kkt() const;

 private:
  void adiabatic(std::size_t c, int direction);
  void add_to_margin(std::size_t k);
  void remove_from_margin(std::size_t position);
  void refresh_inverse();
  void recompute_gradients();
  // With no margin vectors the bias is only bounded by the KKT signs; it is placed
  // at the midpoint of that interval.
  void centre_free_bias();
  void erase(std::size_t index);
  double q(std::size_t i, std::size_t j) const {
    return vectors_[i].label * vectors_[j].label * kernel_cache_(static_cast<Eigen::Index>(i),
                                                                 static_cast<Eigen::Index>(j));
  }

  SvmParams params_;
  std::vector<TrainingVector> vectors_;
  Eigen::MatrixXd kernel_cache_;
  std::vector<std::size_t> margin_;  // indices of S1 members, in the order of inverse_
  Eigen::MatrixXd inverse_;          // inverse of [[0, y_S^T], [y_S, Q_SS]]
  int updates_since_refresh_ = 0;
  double bias_ = 0.0;
  std::uint64_t next_serial_ = 0;
};

}  // namespace lct::svm
