#include "lctrack/incremental_svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/LU>

#include "lctrack/errors.hpp"

namespace lct::svm {

namespace {

constexpr double kRateEps = 1e-12;
constexpr double kSingularPivot = 1e-10;
constexpr int kRefreshInterval = 64;
constexpr double kBoundTol = 1e-9;

enum class Event {
  kNone,
  kCandidateMargin,  // candidate's g reached 0
  kCandidateError,   // candidate's alpha reached C
  kCandidateGone,    // candidate's alpha reached 0 (unlearning)
  kLeaveMargin,      // a margin vector hit a bound
  kJoinMargin,       // an error/reserve vector's g reached 0
};

}  // namespace

SvmModel::SvmModel(SvmParams params) : params_(params) {
  if (!(params_.C > 0.0) || !(params_.sigma > 0.0)) {
    throw InputError("SvmModel: C and sigma must be positive");
  }
}

double SvmModel::kernel(std::span<const double> a, std::span<const double> b) const {
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    d2 += d * d;
  }
  return std::exp(-d2 / (params_.sigma * params_.sigma));
}

std::size_t SvmModel::support_vector_count() const {
  return static_cast<std::size_t>(std::count_if(
      vectors_.begin(), vectors_.end(), [](const TrainingVector& v) { return v.alpha > 0.0; }));
}

std::size_t SvmModel::count(MarginSet set) const {
  return static_cast<std::size_t>(std::count_if(
      vectors_.begin(), vectors_.end(), [set](const TrainingVector& v) { return v.set == set; }));
}

double SvmModel::score(std::span<const double> features) const {
  if (vectors_.empty()) throw NoModelError("svm score: model has no training vectors");
  if (features.size() != vectors_.front().features.size()) {
    throw InputError("svm score: feature length differs from training vectors");
  }
  double f = bias_;
  for (const TrainingVector& v : vectors_) {
    if (v.alpha > 0.0) f += v.alpha * v.label * kernel(v.features, features);
  }
  return f;
}

void SvmModel::increment(std::span<const double> features, int label) {
  if (label != 1 && label != -1) throw InputError("svm increment: label must be +1 or -1");
  if (!vectors_.empty() && features.size() != vectors_.front().features.size()) {
    throw InputError("svm increment: feature length differs from training vectors");
  }
  for (double v : features) {
    if (!std::isfinite(v)) throw InputError("svm increment: non-finite feature value");
  }

  const std::size_t c = vectors_.size();
  TrainingVector tv;
  tv.features.assign(features.begin(), features.end());
  tv.label = label;
  tv.serial = next_serial_++;
  vectors_.push_back(std::move(tv));

  const auto n = static_cast<Eigen::Index>(vectors_.size());
  kernel_cache_.conservativeResize(n, n);
  for (std::size_t i = 0; i < vectors_.size(); ++i) {
    const double k = i == c ? 1.0 : kernel(vectors_[i].features, vectors_[c].features);
    kernel_cache_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = k;
    kernel_cache_(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(i)) = k;
  }

  double g = label * bias_ - 1.0;
  for (std::size_t j = 0; j < c; ++j) {
    if (vectors_[j].alpha > 0.0) g += q(c, j) * vectors_[j].alpha;
  }
  vectors_[c].gradient = g;
  if (g > 0.0) {
    vectors_[c].set = MarginSet::kReserve;
  } else {
    adiabatic(c, +1);
    recompute_gradients();
  }
  centre_free_bias();
}

void SvmModel::centre_free_bias() {
  if (vectors_.empty()) return;
  const double tol = kBoundTol * params_.C;
  for (std::size_t m : margin_) {
    const double a = vectors_[m].alpha;
    if (a > tol && a < params_.C - tol) return;
  }
  while (!margin_.empty()) {
    TrainingVector& v = vectors_[margin_.back()];
    const bool at_upper = v.alpha > 0.5 * params_.C;
    v.alpha = at_upper ? params_.C : 0.0;
    v.set = at_upper ? MarginSet::kError : MarginSet::kReserve;
    remove_from_margin(margin_.size() - 1);
  }
  // Moving the bias by d changes g_i by y_i * d; reserve vectors need g_i >= 0 and
  // error vectors g_i <= 0.
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (const TrainingVector& v : vectors_) {
    const bool at_upper = v.set == MarginSet::kError;
    if ((v.label > 0) != at_upper) {
      lo = std::max(lo, -v.label * v.gradient);
    } else {
      hi = std::min(hi, -v.label * v.gradient);
    }
  }
  if (!std::isfinite(lo) || !std::isfinite(hi)) return;
  bias_ += 0.5 * (lo + hi);
  recompute_gradients();
}

void SvmModel::refresh_inverse() {
  updates_since_refresh_ = 0;
  if (margin_.empty()) {
    inverse_.resize(0, 0);
    return;
  }
  const auto s = static_cast<Eigen::Index>(margin_.size());
  Eigen::MatrixXd a(s + 1, s + 1);
  a(0, 0) = 0.0;
  for (Eigen::Index i = 0; i < s; ++i) {
    const std::size_t vi = margin_[static_cast<std::size_t>(i)];
    a(0, i + 1) = a(i + 1, 0) = vectors_[vi].label;
    for (Eigen::Index j = 0; j < s; ++j) a(i + 1, j + 1) = q(vi, margin_[static_cast<std::size_t>(j)]);
  }
  inverse_ = a.partialPivLu().inverse();
}

void SvmModel::add_to_margin(std::size_t k) {
  const double qkk = q(k, k);
  const double yk = vectors_[k].label;
  if (margin_.empty()) {
    inverse_.resize(2, 2);
    inverse_ << -qkk, yk, yk, 0.0;
    margin_.push_back(k);
    return;
  }
  const auto s = static_cast<Eigen::Index>(margin_.size());
  Eigen::VectorXd v(s + 1);
  v(0) = yk;
  for (Eigen::Index i = 0; i < s; ++i) v(i + 1) = q(margin_[static_cast<std::size_t>(i)], k);
  Eigen::VectorXd beta(s + 2);
  beta.head(s + 1) = -inverse_ * v;
  beta(s + 1) = 1.0;
  const double gamma = qkk + v.dot(beta.head(s + 1));
  Eigen::MatrixXd grown = Eigen::MatrixXd::Zero(s + 2, s + 2);
  grown.topLeftCorner(s + 1, s + 1) = inverse_;
  grown += beta * beta.transpose() / gamma;
  inverse_ = std::move(grown);
  margin_.push_back(k);
  ++updates_since_refresh_;
}

void SvmModel::remove_from_margin(std::size_t position) {
  margin_.erase(margin_.begin() + static_cast<std::ptrdiff_t>(position));
  if (margin_.empty()) {
    inverse_.resize(0, 0);
    return;
  }
  const auto k = static_cast<Eigen::Index>(position) + 1;
  const auto n = inverse_.rows();
  const double pivot = inverse_(k, k);
  Eigen::MatrixXd reduced = inverse_ - inverse_.col(k) * inverse_.row(k) / pivot;
  Eigen::MatrixXd out(n - 1, n - 1);
  for (Eigen::Index i = 0, oi = 0; i < n; ++i) {
    if (i == k) continue;
    for (Eigen::Index j = 0, oj = 0; j < n; ++j) {
      if (j == k) continue;
      out(oi, oj++) = reduced(i, j);
    }
    ++oi;
  }
  inverse_ = std::move(out);
  ++updates_since_refresh_;
}

// Moves alpha_c towards C (direction +1) or towards 0 (direction -1) while keeping
// g_s = 0 on the margin set and sum_i a_i y_i = 0, migrating vectors between sets
// whenever one reaches a boundary.
void SvmModel::adiabatic(std::size_t c, int direction) {
  const double C = params_.C;
  const std::size_t n = vectors_.size();
  std::vector<bool> frozen(n, false);  // joined at g = 0 but linearly dependent on S
  frozen[c] = true;

  if (updates_since_refresh_ >= kRefreshInterval) refresh_inverse();

  const std::size_t max_iterations = 20 * n + 100;
  for (std::size_t iter = 0; iter < max_iterations; ++iter) {
    TrainingVector& cand = vectors_[c];
    if (direction < 0 && cand.alpha <= 0.0) {
      cand.alpha = 0.0;
      return;
    }

    Event event = Event::kNone;
    std::size_t who = 0;
    double step = std::numeric_limits<double>::infinity();
    auto consider = [&](double t, Event e, std::size_t idx) {
      t = std::max(t, 0.0);
      if (t < step) {
        step = t;
        event = e;
        who = idx;
      }
    };

    if (margin_.empty()) {
      // Only the bias can move without breaking sum a_i y_i = 0.
      double db_dir = 0.0;
      if (direction > 0) {
        db_dir = cand.gradient < 0.0 ? static_cast<double>(cand.label) : -cand.label;
        consider(std::abs(cand.gradient), Event::kCandidateMargin, c);
      }
      for (int pass = 0; pass < (direction > 0 ? 1 : 2); ++pass) {
        const double sgn = direction > 0 ? db_dir : (pass == 0 ? 1.0 : -1.0);
        for (std::size_t i = 0; i < n; ++i) {
          if (frozen[i]) continue;
          const TrainingVector& v = vectors_[i];
          const double rate = v.label * sgn;
          if (v.set == MarginSet::kReserve && rate < 0.0) {
            const double t = v.gradient;
            if (t < step) db_dir = sgn;
            consider(t, Event::kJoinMargin, i);
          } else if (v.set == MarginSet::kError && rate > 0.0) {
            const double t = -v.gradient;
            if (t < step) db_dir = sgn;
            consider(t, Event::kJoinMargin, i);
          }
        }
      }
      if (event == Event::kNone) {
        // Unlearning with nothing left to rebalance against: alpha_c must already be 0.
        cand.alpha = 0.0;
        return;
      }
      bias_ += db_dir * step;
      for (TrainingVector& v : vectors_) v.gradient += v.label * db_dir * step;
    } else {
      const auto s = static_cast<Eigen::Index>(margin_.size());
      Eigen::VectorXd v(s + 1);
      v(0) = cand.label;
      for (Eigen::Index i = 0; i < s; ++i) v(i + 1) = q(margin_[static_cast<std::size_t>(i)], c);
      const Eigen::VectorXd beta = -inverse_ * v;

      std::vector<double> gamma(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        double gi = q(i, c) + vectors_[i].label * beta(0);
        for (Eigen::Index k = 0; k < s; ++k) gi += q(i, margin_[static_cast<std::size_t>(k)]) * beta(k + 1);
        gamma[i] = gi;
      }
      for (std::size_t m : margin_) gamma[m] = 0.0;

      if (direction > 0) {
        if (gamma[c] > kRateEps) consider(-cand.gradient / gamma[c], Event::kCandidateMargin, c);
        consider(C - cand.alpha, Event::kCandidateError, c);
      } else {
        consider(cand.alpha, Event::kCandidateGone, c);
      }
      for (Eigen::Index k = 0; k < s; ++k) {
        const std::size_t m = margin_[static_cast<std::size_t>(k)];
        const double rate = direction * beta(k + 1);
        if (rate > kRateEps) {
          consider((C - vectors_[m].alpha) / rate, Event::kLeaveMargin, static_cast<std::size_t>(k));
        } else if (rate < -kRateEps) {
          consider(vectors_[m].alpha / -rate, Event::kLeaveMargin, static_cast<std::size_t>(k));
        }
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (frozen[i] || vectors_[i].set == MarginSet::kMargin) continue;
        const double rate = direction * gamma[i];
        if (vectors_[i].set == MarginSet::kError && rate > kRateEps) {
          consider(-vectors_[i].gradient / rate, Event::kJoinMargin, i);
        } else if (vectors_[i].set == MarginSet::kReserve && rate < -kRateEps) {
          consider(vectors_[i].gradient / -rate, Event::kJoinMargin, i);
        }
      }
      if (event == Event::kNone) return;

      const double t = direction * step;
      cand.alpha += t;
      bias_ += beta(0) * t;
      for (Eigen::Index k = 0; k < s; ++k) {
        vectors_[margin_[static_cast<std::size_t>(k)]].alpha += beta(k + 1) * t;
      }
      for (std::size_t i = 0; i < n; ++i) vectors_[i].gradient += gamma[i] * t;
    }

    switch (event) {
      case Event::kCandidateMargin:
        cand.gradient = 0.0;
        cand.set = MarginSet::kMargin;
        add_to_margin(c);
        return;
      case Event::kCandidateError:
        cand.alpha = C;
        cand.set = MarginSet::kError;
        return;
      case Event::kCandidateGone:
        cand.alpha = 0.0;
        return;
      case Event::kLeaveMargin: {
        TrainingVector& leaving = vectors_[margin_[who]];
        const bool at_upper = leaving.alpha > 0.5 * C;
        leaving.alpha = at_upper ? C : 0.0;
        leaving.set = at_upper ? MarginSet::kError : MarginSet::kReserve;
        remove_from_margin(who);
        break;
      }
      case Event::kJoinMargin: {
        TrainingVector& joining = vectors_[who];
        joining.gradient = 0.0;
        // Reject candidates that would make the bordered system singular.
        bool dependent = false;
        if (!margin_.empty()) {
          const auto s = static_cast<Eigen::Index>(margin_.size());
          Eigen::VectorXd v(s + 1);
          v(0) = joining.label;
          for (Eigen::Index i = 0; i < s; ++i) v(i + 1) = q(margin_[static_cast<std::size_t>(i)], who);
          dependent = q(who, who) - v.dot(inverse_ * v) < kSingularPivot;
        }
        if (dependent) {
          frozen[who] = true;
        } else {
          joining.set = MarginSet::kMargin;
          add_to_margin(who);
        }
        break;
      }
      case Event::kNone:
        return;
    }
  }
}

void SvmModel::recompute_gradients() {
  for (std::size_t i = 0; i < vectors_.size(); ++i) {
    double g = vectors_[i].label * bias_ - 1.0;
    for (std::size_t j = 0; j < vectors_.size(); ++j) {
      if (vectors_[j].alpha > 0.0) g += q(i, j) * vectors_[j].alpha;
    }
    vectors_[i].gradient = g;
  }
}

void SvmModel::erase(std::size_t index) {
  for (std::size_t& m : margin_) {
    if (m > index) --m;
  }
  vectors_.erase(vectors_.begin() + static_cast<std::ptrdiff_t>(index));
  const auto n = kernel_cache_.rows();
  const auto k = static_cast<Eigen::Index>(index);
  Eigen::MatrixXd out(n - 1, n - 1);
  for (Eigen::Index i = 0, oi = 0; i < n; ++i) {
    if (i == k) continue;
    for (Eigen::Index j = 0, oj = 0; j < n; ++j) {
      if (j == k) continue;
      out(oi, oj++) = kernel_cache_(i, j);
    }
    ++oi;
  }
  kernel_cache_ = std::move(out);
}

void SvmModel::maintain_budget(std::size_t max_sv) {
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < vectors_.size(); ++i) {
    if (vectors_[i].alpha > 0.0) support.push_back(i);
  }
  if (support.size() <= max_sv) return;

  // Largest |g| first; older vectors first on ties.
  std::stable_sort(support.begin(), support.end(), [this](std::size_t a, std::size_t b) {
    const double ga = std::abs(vectors_[a].gradient);
    const double gb = std::abs(vectors_[b].gradient);
    if (ga != gb) return ga > gb;
    return vectors_[a].serial < vectors_[b].serial;
  });
  std::vector<std::uint64_t> doomed;
  for (std::size_t k = 0; k < support.size() - max_sv; ++k) {
    doomed.push_back(vectors_[support[k]].serial);
  }

  for (std::uint64_t serial : doomed) {
    const auto it = std::find_if(vectors_.begin(), vectors_.end(),
                                 [serial](const TrainingVector& v) { return v.serial == serial; });
    const auto idx = static_cast<std::size_t>(it - vectors_.begin());
    const auto pos = std::find(margin_.begin(), margin_.end(), idx);
    if (pos != margin_.end()) remove_from_margin(static_cast<std::size_t>(pos - margin_.begin()));
    vectors_[idx].set = MarginSet::kReserve;  // placeholder while unlearning
    if (updates_since_refresh_ >= kRefreshInterval) refresh_inverse();
    adiabatic(idx, -1);
    vectors_[idx].alpha = 0.0;
    erase(idx);
    recompute_gradients();
  }
  centre_free_bias();
}

void SvmModel::trim_reserve(std::size_t max_reserve) {
  std::vector<std::pair<std::uint64_t, std::size_t>> reserve;
  for (std::size_t i = 0; i < vectors_.size(); ++i) {
    if (vectors_[i].set == MarginSet::kReserve && vectors_[i].alpha == 0.0) {
      reserve.emplace_back(vectors_[i].serial, i);
    }
  }
  if (reserve.size() <= max_reserve) return;
  std::sort(reserve.begin(), reserve.end());
  std::vector<std::size_t> drop;
  for (std::size_t k = 0; k < reserve.size() - max_reserve; ++k) drop.push_back(reserve[k].second);
  std::sort(drop.rbegin(), drop.rend());
  for (std::size_t idx : drop) erase(idx);
}

KktReport SvmModel::kkt() const {
  KktReport r;
  double eq = 0.0;
  for (std::size_t i = 0; i < vectors_.size(); ++i) {
    const TrainingVector& v = vectors_[i];
    r.max_alpha_violation = std::max({r.max_alpha_violation, -v.alpha, v.alpha - params_.C});
    eq += v.alpha * v.label;
    switch (v.set) {
      case MarginSet::kMargin:
        r.max_margin_gradient = std::max(r.max_margin_gradient, std::abs(v.gradient));
        break;
      case MarginSet::kError:
        r.max_sign_violation = std::max(r.max_sign_violation, v.gradient);
        break;
      case MarginSet::kReserve:
        r.max_sign_violation = std::max(r.max_sign_violation, -v.gradient);
        break;
    }
  }
  r.equality_residual = std::abs(eq);
  return r;
}

}  // namespace lct::svm
