#include "lctrack/correlation_filter.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>

#include "lctrack/errors.hpp"

namespace lct {

namespace {

cv::Mat forward(const cv::Mat& real) {
  cv::Mat spectrum;
  cv::dft(real, spectrum, cv::DFT_COMPLEX_OUTPUT);
  return spectrum;
}

// Inverse transform keeping the real part; tracks the largest discarded imaginary value.
cv::Mat inverse_real(const cv::Mat& spectrum, double* max_imag) {
  cv::Mat complex;
  cv::idft(spectrum, complex, cv::DFT_SCALE | cv::DFT_COMPLEX_OUTPUT);
  cv::Mat planes[2];
  cv::split(complex, planes);
  if (max_imag != nullptr) {
    double lo = 0.0;
    double hi = 0.0;
    cv::minMaxLoc(planes[1], &lo, &hi);
    *max_imag = std::max({*max_imag, std::abs(lo), std::abs(hi)});
  }
  return planes[0];
}

std::vector<cv::Mat> channel_spectra(const FeatureMap& x) {
  std::vector<cv::Mat> out;
  out.reserve(x.depth());
  for (int d = 0; d < x.depth(); ++d) out.push_back(forward(x.channel(d)));
  return out;
}

double spectral_energy(const std::vector<cv::Mat>& spectra) {
  double s = 0.0;
  for (const cv::Mat& f : spectra) {
    const double n = cv::norm(f, cv::NORM_L2);
    s += n * n;
  }
  if (spectra.empty()) return 0.0;
  return s / (static_cast<double>(spectra.front().rows) * spectra.front().cols);
}

// Spatial kernel correlation map from channel spectra; `xf` is the template side.
cv::Mat correlate_spectra(const std::vector<cv::Mat>& xf, const std::vector<cv::Mat>& zf,
                          const KernelSpec& kernel, double* max_imag) {
  cv::Mat acc = cv::Mat::zeros(xf.front().size(), CV_64FC2);
  cv::Mat prod;
  for (std::size_t d = 0; d < xf.size(); ++d) {
    cv::mulSpectrums(zf[d], xf[d], prod, 0, /*conjB=*/true);
    acc += prod;
  }
  cv::Mat linear = inverse_real(acc, max_imag);
  if (kernel.type == KernelType::kLinear) return linear;

  const double xx = spectral_energy(xf);
  const double zz = spectral_energy(zf);
  const double inv_sigma2 = 1.0 / (kernel.sigma * kernel.sigma);
  cv::Mat out(linear.size(), CV_64F);
  for (int m = 0; m < linear.rows; ++m) {
    for (int n = 0; n < linear.cols; ++n) {
      const double dist = std::max(0.0, xx + zz - 2.0 * linear.at<double>(m, n));
      out.at<double>(m, n) = std::exp(-dist * inv_sigma2);
    }
  }
  return out;
}

void require_same_shape(const FeatureMap& a, const FeatureMap& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.depth() != b.depth()) {
    throw DimensionMismatchError(std::string(what) + ": feature maps differ in shape");
  }
}

cv::Point argmax_row_major(const cv::Mat& values, double* peak) {
  cv::Point best(0, 0);
  double v = values.at<double>(0, 0);
  for (int m = 0; m < values.rows; ++m) {
    const auto* row = values.ptr<double>(m);
    for (int n = 0; n < values.cols; ++n) {
      if (row[n] > v) {
        v = row[n];
        best = {n, m};
      }
    }
  }
  *peak = v;
  return best;
}

}  // namespace

GaussianLabelMap make_label(int rows, int cols, double sigma_factor) {
  if (rows < 1 || cols < 1) throw DegenerateInputError("make_label: empty label map");
  if (!(sigma_factor > 0.0)) throw DegenerateInputError("make_label: sigma factor must be > 0");
  GaussianLabelMap label;
  label.sigma_eff = sigma_factor * std::sqrt(static_cast<double>(rows) * cols);
  label.values.create(rows, cols, CV_64F);
  const int cm = rows / 2;
  const int cn = cols / 2;
  const double denom = 2.0 * label.sigma_eff * label.sigma_eff;
  for (int m = 0; m < rows; ++m) {
    for (int n = 0; n < cols; ++n) {
      const double dm = m - cm;
      const double dn = n - cn;
      label.values.at<double>(m, n) = std::exp(-(dm * dm + dn * dn) / denom);
    }
  }
  return label;
}

cv::Mat kernel_correlation(const FeatureMap& x, const FeatureMap& z, const KernelSpec& kernel) {
  require_same_shape(x, z, "kernel_correlation");
  return correlate_spectra(channel_spectra(x), channel_spectra(z), kernel, nullptr);
}

LayerModel train_layer(const FeatureMap& x, const GaussianLabelMap& label, double lambda,
                       const KernelSpec& kernel) {
  if (label.values.rows != x.rows() || label.values.cols != x.cols()) {
    throw DimensionMismatchError("train_layer: label and features differ in size");
  }
  LayerModel model;
  model.xf = channel_spectra(x);
  const cv::Mat kxx = correlate_spectra(model.xf, model.xf, kernel, nullptr);
  cv::Mat kf = forward(kxx);
  const cv::Mat yf = forward(label.values);

  double reg = lambda;
  if (reg < kMinLambda) {
    static std::atomic<bool> warned{false};
    if (!warned.exchange(true)) {
      std::clog << "lctrack: regularizer " << lambda << " raised to " << kMinLambda << '\n';
    }
    reg = kMinLambda;
  }

  model.alphaf.create(kf.size(), CV_64FC2);
  for (int m = 0; m < kf.rows; ++m) {
    for (int n = 0; n < kf.cols; ++n) {
      const auto k = kf.at<cv::Vec2d>(m, n);
      const auto y = yf.at<cv::Vec2d>(m, n);
      // (a + ib) / (c + id) with d the (tiny) imaginary residue of a real symmetric kernel.
      const double c = k[0] + reg;
      const double d = k[1];
      const double den = c * c + d * d;
      if (lambda <= 0.0 && std::abs(k[0]) == 0.0 && std::abs(d) == 0.0) {
        throw NumericalError("train_layer: zero-energy input with zero regularizer");
      }
      model.alphaf.at<cv::Vec2d>(m, n) =
          cv::Vec2d((y[0] * c + y[1] * d) / den, (y[1] * c - y[0] * d) / den);
    }
  }
  if (!cv::checkRange(model.alphaf)) throw NumericalError("train_layer: non-finite coefficients");
  return model;
}

CorrelationModel train_model(const FeatureStack& stack, const CorrelationParams& params) {
  if (stack.layers.empty()) throw DegenerateInputError("train_model: empty feature stack");
  CorrelationModel model;
  model.params = params;
  const cv::Size size = stack.spatial_size();
  model.label = make_label(size.height, size.width, params.sigma_label);
  for (const FeatureLayer& layer : stack.layers) {
    if (layer.data.spatial_size() != size) {
      throw DimensionMismatchError("train_model: layers differ in spatial size");
    }
    LayerModel lm = train_layer(layer.data, model.label, params.lambda, params.kernel);
    lm.layer_id = layer.layer_id;
    model.layers.push_back(std::move(lm));
    model.gammas.push_back(layer.weight);
  }
  return model;
}

cv::Mat layer_response(const LayerModel& layer, const FeatureMap& z, const KernelSpec& kernel,
                       double* max_imag_residue) {
  if (z.rows() != layer.rows() || z.cols() != layer.cols() || z.depth() != layer.depth()) {
    throw DimensionMismatchError("detect: stack layer does not match model layer");
  }
  const cv::Mat k = correlate_spectra(layer.xf, channel_spectra(z), kernel, max_imag_residue);
  cv::Mat prod;
  cv::mulSpectrums(layer.alphaf, forward(k), prod, 0);
  return inverse_real(prod, max_imag_residue);
}

ResponseMap detect(const CorrelationModel& model, const FeatureStack& stack) {
  if (stack.layers.size() != model.layers.size()) {
    throw DimensionMismatchError("detect: stack has " + std::to_string(stack.layers.size()) +
                                 " layers, model has " + std::to_string(model.layers.size()));
  }
  ResponseMap out;
  out.values = cv::Mat::zeros(model.layers.front().rows(), model.layers.front().cols(), CV_64F);
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const cv::Mat r =
        layer_response(model.layers[l], stack.layers[l].data, model.params.kernel,
                       &out.max_imag_residue);
    cv::scaleAdd(r, model.gammas[l], out.values, out.values);
  }
  out.peak = argmax_row_major(out.values, &out.peak_value);
  return out;
}

cv::Point peak_offset(const ResponseMap& response) {
  auto wrap = [](int peak, int size) {
    int d = peak - size / 2;
    if (d >= size - size / 2) d -= size;
    if (d < -(size / 2)) d += size;
    return d;
  };
  return {wrap(response.peak.x, response.values.cols), wrap(response.peak.y, response.values.rows)};
}

cv::Point2d estimate_translation(const ResponseMap& response, double cell_pixels,
                                 cv::Point2d previous_center) {
  const cv::Point d = peak_offset(response);
  return {previous_center.x + d.x * cell_pixels, previous_center.y + d.y * cell_pixels};
}

LayerModel interpolate_layer(const LayerModel& old_layer, const LayerModel& fresh, double eta) {
  if (old_layer.rows() != fresh.rows() || old_layer.cols() != fresh.cols() ||
      old_layer.depth() != fresh.depth()) {
    throw DimensionMismatchError("update_model: layer shapes differ");
  }
  LayerModel out;
  out.layer_id = old_layer.layer_id;
  cv::addWeighted(old_layer.alphaf, 1.0 - eta, fresh.alphaf, eta, 0.0, out.alphaf);
  out.xf.resize(old_layer.xf.size());
  for (std::size_t d = 0; d < old_layer.xf.size(); ++d) {
    cv::addWeighted(old_layer.xf[d], 1.0 - eta, fresh.xf[d], eta, 0.0, out.xf[d]);
  }
  return out;
}

CorrelationModel update_model(const CorrelationModel& model, const FeatureStack& stack) {
  if (stack.layers.size() != model.layers.size()) {
    throw DimensionMismatchError("update_model: layer count differs from model");
  }
  CorrelationModel out = model;
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const LayerModel fresh =
        train_layer(stack.layers[l].data, model.label, model.params.lambda, model.params.kernel);
    out.layers[l] = interpolate_layer(model.layers[l], fresh, model.params.eta);
  }
  return out;
}

}  // namespace lct
