#include "lctrack/scale_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "lctrack/errors.hpp"
#include "lctrack/features.hpp"

namespace lct {

std::vector<PyramidLevel> build_pyramid(const cv::Mat& frame, cv::Point2d center, cv::Size2d size,
                                        int levels, double step, cv::Size out_size,
                                        int min_side) {
  if (levels < 1 || levels % 2 == 0) throw InputError("build_pyramid: level count must be odd");
  if (!(step > 1.0)) throw InputError("build_pyramid: scale step must exceed 1");
  const int half = (levels - 1) / 2;
  std::vector<PyramidLevel> out;
  out.reserve(static_cast<std::size_t>(levels));
  for (int n = -half; n <= half; ++n) {
    PyramidLevel level;
    level.n = n;
    level.scale = std::pow(step, n);
    const cv::Size2d extent(size.width * level.scale, size.height * level.scale);
    if (std::lround(extent.width) < min_side || std::lround(extent.height) < min_side) {
      level.skipped = true;
    } else {
      level.patch = crop_resized(frame, center.x, center.y, extent, out_size);
    }
    out.push_back(std::move(level));
  }
  return out;
}

std::vector<PyramidLevel> build_pyramid(const cv::Mat& frame, cv::Point2d center, cv::Size2d size,
                                        int levels, double step) {
  const cv::Size out(std::max(1, static_cast<int>(std::lround(size.width))),
                     std::max(1, static_cast<int>(std::lround(size.height))));
  return build_pyramid(frame, center, size, levels, step, out);
}

cv::Size scale_template_size(cv::Size2d target_size, const ScaleParams& params) {
  if (!(target_size.width > 0.0) || !(target_size.height > 0.0)) {
    throw DegenerateInputError("scale template: empty target size");
  }
  double f = 1.0;
  const double area = target_size.area();
  if (area > params.template_max_area) f = std::sqrt(params.template_max_area / area);
  const double shorter = std::min(target_size.width, target_size.height) * f;
  if (shorter < params.template_min_side) f *= params.template_min_side / shorter;
  const int cell = params.cell_size;
  auto to_cells = [cell](double v) {
    return std::max(2 * cell, static_cast<int>(std::lround(v / cell)) * cell);
  };
  return {to_cells(target_size.width * f), to_cells(target_size.height * f)};
}

namespace {

cv::Size2d with_context(cv::Size2d size, const ScaleParams& params) {
  return {size.width * params.context, size.height * params.context};
}

}  // namespace

FeatureMap scale_features(const ImagePatch& patch, int cell_size) {
  return prepare_for_filter(extract_hog(patch, cell_size));
}

ScaleModel train_scale_model(const cv::Mat& frame, cv::Point2d center, cv::Size2d target_size,
                             const ScaleParams& params) {
  ScaleModel model;
  model.params = params;
  model.current_size = target_size;
  model.template_size = scale_template_size(with_context(target_size, params), params);
  const ImagePatch patch = crop_resized(frame, center.x, center.y,
                                        with_context(target_size, params), model.template_size);
  const FeatureMap x = scale_features(patch, params.cell_size);
  const GaussianLabelMap label = make_label(x.rows(), x.cols(), params.filter.sigma_label);
  model.filter = train_layer(x, label, params.filter.lambda, params.filter.kernel);
  return model;
}

ScaleEstimate estimate_scale(const ScaleModel& model, const std::vector<PyramidLevel>& pyramid) {
  ScaleEstimate best;
  best.level_peaks.assign(pyramid.size(), std::numeric_limits<double>::quiet_NaN());
  bool found = false;
  double best_peak = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pyramid.size(); ++i) {
    const PyramidLevel& level = pyramid[i];
    if (level.skipped) continue;
    const FeatureMap z = scale_features(level.patch, model.params.cell_size);
    const cv::Mat r = layer_response(model.filter, z, model.params.filter.kernel);
    double peak = 0.0;
    cv::minMaxLoc(r, nullptr, &peak);
    best.level_peaks[i] = peak;
    const bool better =
        !found || peak > best_peak ||
        (peak == best_peak && (std::abs(level.n) < std::abs(best.n) ||
                               (std::abs(level.n) == std::abs(best.n) && level.n < best.n)));
    if (better) {
      found = true;
      best_peak = peak;
      best.n = level.n;
      best.scale = level.scale;
    }
  }
  if (!found) throw NoScaleError("estimate_scale: every pyramid level was skipped");
  return best;
}

ScaleEstimate estimate_scale(const ScaleModel& model, const cv::Mat& frame, cv::Point2d center) {
  const auto pyramid =
      build_pyramid(frame, center, with_context(model.current_size, model.params),
                    model.params.levels, model.params.step,
                    model.template_size, model.params.min_level_side);
  return estimate_scale(model, pyramid);
}

ScaleModel update_scale_model(const ScaleModel& model, const cv::Mat& frame, cv::Point2d center,
                              cv::Size2d new_size) {
  ScaleModel out = model;
  const ImagePatch patch = crop_resized(frame, center.x, center.y,
                                        with_context(new_size, model.params), model.template_size);
  const FeatureMap x = scale_features(patch, model.params.cell_size);
  const GaussianLabelMap label = make_label(x.rows(), x.cols(), model.params.filter.sigma_label);
  const LayerModel fresh = train_layer(x, label, model.params.filter.lambda, model.params.filter.kernel);
  out.filter = interpolate_layer(model.filter, fresh, model.params.filter.eta);
  out.current_size = new_size;
  return out;
}

}  // namespace lct
