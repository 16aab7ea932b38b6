#include "lctrack/gmphd.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <Eigen/Cholesky>

#include "lctrack/errors.hpp"

namespace lct::phd {

MotionModel MotionModel::constant_velocity(double q_pos, double q_vel, double r,
                                           double p_survival, double p_detection) {
  MotionModel m;
  m.F << 1, 0, 1, 0,
         0, 1, 0, 1,
         0, 0, 1, 0,
         0, 0, 0, 1;
  m.Q = Eigen::Vector4d(q_pos, q_pos, q_vel, q_vel).asDiagonal();
  m.H << 1, 0, 0, 0,
         0, 1, 0, 0;
  m.R = Eigen::Matrix2d::Identity() * r;
  m.p_survival = p_survival;
  m.p_detection = p_detection;
  return m;
}

Mixture birth_components(std::span<const Measurement> measurements, const StateCov& birth_cov,
                         double birth_weight) {
  Mixture out;
  out.reserve(measurements.size());
  for (const Measurement& z : measurements) {
    GaussianComponent c;
    c.weight = birth_weight;
    c.mean << z.x(), z.y(), 0.0, 0.0;
    c.cov = birth_cov;
    out.push_back(c);
  }
  return out;
}

Mixture predict(const Mixture& mixture, const MotionModel& model, const Mixture& births) {
  Mixture out;
  out.reserve(mixture.size() + births.size());
  for (const GaussianComponent& c : mixture) {
    GaussianComponent p;
    p.weight = model.p_survival * c.weight;
    p.mean = model.F * c.mean;
    p.cov = model.Q + model.F * c.cov * model.F.transpose();
    p.cov = 0.5 * (p.cov + p.cov.transpose());
    out.push_back(p);
  }
  out.insert(out.end(), births.begin(), births.end());
  return out;
}

Mixture update(const Mixture& predicted, std::span<const Measurement> measurements,
               const MotionModel& model, const ClutterModel& clutter) {
  const double pd = model.p_detection;
  Mixture out;
  out.reserve(predicted.size() * (measurements.size() + 1));
  for (const GaussianComponent& c : predicted) {
    GaussianComponent missed = c;
    missed.weight = (1.0 - pd) * c.weight;
    out.push_back(missed);
  }
  if (measurements.empty()) return out;

  // Per-component Kalman quantities do not depend on the measurement.
  struct Innovation {
    Measurement predicted_z;
    Eigen::LLT<Eigen::Matrix2d> chol;
    double log_norm;
    Eigen::Matrix<double, 4, 2> gain;
    StateCov posterior_cov;
  };
  std::vector<Innovation> innov;
  innov.reserve(predicted.size());
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const GaussianComponent& c = predicted[i];
    const Eigen::Matrix2d S = model.R + model.H * c.cov * model.H.transpose();
    Eigen::LLT<Eigen::Matrix2d> chol(S);
    if (chol.info() != Eigen::Success || !(chol.matrixL()(0, 0) > 0.0) ||
        !(chol.matrixL()(1, 1) > 0.0)) {
      throw NumericalError("gmphd update: singular innovation covariance for component " +
                           std::to_string(i));
    }
    const double log_det = 2.0 * std::log(chol.matrixL()(0, 0) * chol.matrixL()(1, 1));
    const Eigen::Matrix<double, 4, 2> gain =
        chol.solve(model.H * c.cov).transpose();  // P H^T S^-1 (S symmetric)
    StateCov post = (StateCov::Identity() - gain * model.H) * c.cov;
    post = 0.5 * (post + post.transpose());
    innov.push_back({model.H * c.mean, chol, -std::log(2.0 * std::numbers::pi) - 0.5 * log_det,
                     gain, post});
  }

  const double clutter_intensity = clutter.intensity();
  std::vector<double> q(predicted.size());
  for (const Measurement& z : measurements) {
    double denom = clutter_intensity;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
      const Measurement r = z - innov[i].predicted_z;
      const double maha = r.dot(innov[i].chol.solve(r));
      q[i] = std::exp(innov[i].log_norm - 0.5 * maha);
      denom += pd * predicted[i].weight * q[i];
    }
    for (std::size_t i = 0; i < predicted.size(); ++i) {
      GaussianComponent u;
      u.weight = denom > 0.0 ? pd * predicted[i].weight * q[i] / denom : 0.0;
      u.mean = predicted[i].mean + innov[i].gain * (z - innov[i].predicted_z);
      u.cov = innov[i].posterior_cov;
      out.push_back(u);
    }
  }
  return out;
}

Mixture prune_and_merge(const Mixture& mixture, const ReductionParams& params) {
  std::vector<std::size_t> alive;
  for (std::size_t i = 0; i < mixture.size(); ++i) {
    if (mixture[i].weight >= params.prune_threshold) alive.push_back(i);
  }

  Mixture merged;
  const double gate = params.merge_distance * params.merge_distance;
  while (!alive.empty()) {
    // Heaviest remaining component, lowest index on ties.
    std::size_t lead_pos = 0;
    for (std::size_t k = 1; k < alive.size(); ++k) {
      if (mixture[alive[k]].weight > mixture[alive[lead_pos]].weight) lead_pos = k;
    }
    const GaussianComponent& lead = mixture[alive[lead_pos]];
    const Eigen::LLT<StateCov> chol(lead.cov);

    std::vector<std::size_t> cluster;
    std::vector<std::size_t> rest;
    for (std::size_t idx : alive) {
      const State d = mixture[idx].mean - lead.mean;
      const double maha = d.dot(chol.solve(d));
      (idx == alive[lead_pos] || maha <= gate ? cluster : rest).push_back(idx);
    }

    GaussianComponent m;
    m.weight = 0.0;
    m.mean.setZero();
    for (std::size_t idx : cluster) {
      m.weight += mixture[idx].weight;
      m.mean += mixture[idx].weight * mixture[idx].mean;
    }
    m.mean /= m.weight;
    m.cov.setZero();
    for (std::size_t idx : cluster) {
      const State d = mixture[idx].mean - m.mean;
      m.cov += mixture[idx].weight * (mixture[idx].cov + d * d.transpose());
    }
    m.cov /= m.weight;
    m.cov = 0.5 * (m.cov + m.cov.transpose());
    merged.push_back(m);
    alive = std::move(rest);
  }

  if (merged.size() > params.max_components) {
    std::stable_sort(merged.begin(), merged.end(),
                     [](const GaussianComponent& a, const GaussianComponent& b) {
                       return a.weight > b.weight;
                     });
    merged.resize(params.max_components);
  }
  return merged;
}

Estimate max_weight_estimate(const Mixture& mixture) {
  if (mixture.empty()) throw NoEstimateError("max_weight_estimate: empty mixture");
  std::size_t best = 0;
  for (std::size_t i = 1; i < mixture.size(); ++i) {
    if (mixture[i].weight > mixture[best].weight) best = i;
  }
  return {mixture[best].mean.head<2>(), mixture[best].weight, best};
}

double total_weight(const Mixture& mixture) {
  return std::accumulate(mixture.begin(), mixture.end(), 0.0,
                         [](double s, const GaussianComponent& c) { return s + c.weight; });
}

Mixture cycle(const Mixture& mixture, std::span<const Measurement> measurements,
              const FilterParams& params) {
  const Mixture births = birth_components(measurements, params.birth_cov, params.birth_weight);
  const Mixture predicted = predict(mixture, params.motion, births);
  const Mixture updated = update(predicted, measurements, params.motion, params.clutter);
  return prune_and_merge(updated, params.reduction);
}

}  // namespace lct::phd
