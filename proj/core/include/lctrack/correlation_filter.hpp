#pragma once

#include <vector>

#include <opencv2/core.hpp>

#include "lctrack/features.hpp"

namespace lct {

enum class KernelType { kLinear, kGaussian };

struct KernelSpec {
  KernelType type = KernelType::kLinear;
  double sigma = 0.5;  // bandwidth, gaussian kernel only

  static KernelSpec linear() { return {KernelType::kLinear, 0.0}; }
  static KernelSpec gaussian(double sigma) { return {KernelType::kGaussian, sigma}; }
};

// Gaussian regression target centred on cell (rows/2, cols/2).
struct GaussianLabelMap {
  cv::Mat values;  // CV_64F, rows x cols
  double sigma_eff = 0.0;
};

// sigma_eff = sigma_factor * sqrt(rows * cols) cells.
GaussianLabelMap make_label(int rows, int cols, double sigma_factor);

// Kernel correlation over all circular shifts s:
//   linear:   k(s) = sum_i x(i) z(i + s)
//   gaussian: exp(-max(0, |x|^2 + |z|^2 - 2 k_lin(s)) / sigma^2)
// Throws DimensionMismatchError unless x and z share rows, cols and depth.
cv::Mat kernel_correlation(const FeatureMap& x, const FeatureMap& z, const KernelSpec& kernel);

// Dual coefficients and base template of one layer, both in the frequency domain.
struct LayerModel {
  cv::Mat alphaf;           // CV_64FC2, rows x cols
  std::vector<cv::Mat> xf;  // one CV_64FC2 spectrum per channel
  int layer_id = 1;

  int rows() const { return alphaf.rows; }
  int cols() const { return alphaf.cols; }
  int depth() const { return static_cast<int>(xf.size()); }
};

// Smallest regularizer used in the frequency-domain division.
inline constexpr double kMinLambda = 1e-12;

LayerModel train_layer(const FeatureMap& x, const GaussianLabelMap& label, double lambda,
                       const KernelSpec& kernel);

struct CorrelationParams {
  double lambda = 1e-4;
  double sigma_label = 0.1;
  double eta = 0.01;
  KernelSpec kernel = KernelSpec::linear();
};

struct CorrelationModel {
  std::vector<LayerModel> layers;
  std::vector<double> gammas;
  CorrelationParams params;
  GaussianLabelMap label;
};

struct ResponseMap {
  cv::Mat values;  // CV_64F
  cv::Point peak;  // x = column, y = row
  double peak_value = 0.0;
  double max_imag_residue = 0.0;  // largest |imag| discarded by the inverse transforms
};

// Trains one LayerModel per stack layer; gammas come from the layer weights.
CorrelationModel train_model(const FeatureStack& stack, const CorrelationParams& params);

// Weighted sum of per-layer responses, peak = row-major-first argmax.
ResponseMap detect(const CorrelationModel& model, const FeatureStack& stack);

// Response of a single layer model (no fusion weight applied).
cv::Mat layer_response(const LayerModel& layer, const FeatureMap& z, const KernelSpec& kernel,
                       double* max_imag_residue = nullptr);

// Signed peak offset from the map centre in cells (x = columns, y = rows), wrapped
// into [-size/2, size/2).
cv::Point peak_offset(const ResponseMap& response);

// New target centre: previous centre plus the signed peak offset times the cell
// footprint in frame pixels.
cv::Point2d estimate_translation(const ResponseMap& response, double cell_pixels,
                                 cv::Point2d previous_center);

// Linear interpolation towards a model freshly trained on `stack` with rate params.eta.
CorrelationModel update_model(const CorrelationModel& model, const FeatureStack& stack);

// Same as update_model for one layer and an explicit rate.
LayerModel interpolate_layer(const LayerModel& old_layer, const LayerModel& fresh, double eta);

}  // namespace lct
