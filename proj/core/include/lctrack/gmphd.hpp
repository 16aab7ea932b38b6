#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

namespace lct::phd {

using State = Eigen::Vector4d;  // x, y, vx, vy
using StateCov = Eigen::Matrix4d;
using Measurement = Eigen::Vector2d;

struct GaussianComponent {
  double weight = 0.0;
  State mean = State::Zero();
  StateCov cov = StateCov::Identity();
};

using Mixture = std::vector<GaussianComponent>;

// Linear-Gaussian constant-velocity model.
struct MotionModel {
  Eigen::Matrix4d F;
  Eigen::Matrix4d Q;
  Eigen::Matrix<double, 2, 4> H;
  Eigen::Matrix2d R;
  double p_survival = 0.99;
  double p_detection = 0.9;

  // Unit time step, process noise diag(q_pos, q_pos, q_vel, q_vel), measurement noise r * I.
  static MotionModel constant_velocity(double q_pos = 4.0, double q_vel = 1.0, double r = 9.0,
                                       double p_survival = 0.99, double p_detection = 0.9);
};

// Uniform clutter: intensity lambda_t / area everywhere.
struct ClutterModel {
  double lambda_t = 4.0;
  double area = 1.0;

  double intensity() const { return lambda_t / area; }
};

struct ReductionParams {
  double prune_threshold = 1e-5;  // components with weight below this are dropped
  double merge_distance = 4.0;    // Mahalanobis gate for merging
  std::size_t max_components = 100;
};

// One zero-velocity component per measurement.
Mixture birth_components(std::span<const Measurement> measurements, const StateCov& birth_cov,
                         double birth_weight);

// Survivors (weight * p_s, F m, Q + F P F^T) followed by the births, unchanged.
Mixture predict(const Mixture& mixture, const MotionModel& model, const Mixture& births);

// Missed-detection copies first, then for each measurement one Kalman-updated copy of
// every predicted component. Throws NumericalError naming the component if an
// innovation covariance cannot be factorized.
Mixture update(const Mixture& predicted, std::span<const Measurement> measurements,
               const MotionModel& model, const ClutterModel& clutter);

// Prune by weight, greedy moment-matched merging around the heaviest remaining
// component, then keep at most max_components heaviest.
Mixture prune_and_merge(const Mixture& mixture, const ReductionParams& params);

struct Estimate {
  Measurement position;
  double weight = 0.0;
  std::size_t index = 0;
};

// Heaviest component (lowest index on ties). Throws NoEstimateError when empty.
Estimate max_weight_estimate(const Mixture& mixture);

double total_weight(const Mixture& mixture);

// Settings for one predict / update / reduce cycle.
struct FilterParams {
  MotionModel motion = MotionModel::constant_velocity();
  ClutterModel clutter;
  ReductionParams reduction;
  double birth_weight = 0.1;
  StateCov birth_cov = StateCov::Identity() * 25.0;
};

// Births at the measurements, predict, update with the same measurements, reduce.
Mixture cycle(const Mixture& mixture, std::span<const Measurement> measurements,
              const FilterParams& params);

}  // namespace lct::phd
