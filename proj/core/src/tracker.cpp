#include "lctrack/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lctrack/errors.hpp"

namespace lct {

namespace {

constexpr double kMinTargetSide = 4.0;

phd::Measurement to_measurement(cv::Point2d p) { return {p.x, p.y}; }

cv::Point2d clamp_to_frame(cv::Point2d p, cv::Size frame) {
  return {std::clamp(p.x, 0.0, static_cast<double>(frame.width)),
          std::clamp(p.y, 0.0, static_cast<double>(frame.height))};
}

}  // namespace

void TrackerConfig::validate() const {
  if (!(redetect_threshold < detector_threshold)) {
    throw InputError("config: redetect_threshold must be below detector_threshold");
  }
  if (!(redetector.negative_iou < redetector.positive_iou)) {
    throw InputError("config: negative_iou must be below positive_iou");
  }
  if (!(correlation.eta >= 0.0 && correlation.eta <= 1.0)) {
    throw InputError("config: eta must lie in [0, 1]");
  }
  if (!(correlation.lambda >= 0.0)) throw InputError("config: lambda must be non-negative");
  if (!(padding > 1.0)) throw InputError("config: padding must exceed 1");
  if (cell_size < 1) throw InputError("config: cell_size must be positive");
  if (scale.levels < 1 || scale.levels % 2 == 0) throw InputError("config: scale levels must be odd");
  if (!(scale.step > 1.0)) throw InputError("config: scale step must exceed 1");
  if (!(handcrafted_weight >= 0.0)) throw InputError("config: layer weights must be non-negative");
  for (double w : deep_weights) {
    if (!(w >= 0.0)) throw InputError("config: layer weights must be non-negative");
  }
}

cv::Size search_window(cv::Size2d target_size, double padding, int cell_size) {
  const int unit = 2 * cell_size;
  auto side = [&](double v) {
    return std::max(unit, static_cast<int>(std::lround(v * padding / unit)) * unit);
  };
  return {side(target_size.width), side(target_size.height)};
}

Tracker::Tracker(TrackerConfig config, std::shared_ptr<const ColorNameTable> table)
    : config_(std::move(config)), table_(std::move(table)), rng_(config_.seed) {
  config_.validate();
  if (!table_) table_ = std::make_shared<const ColorNameTable>(ColorNameTable::prototype());
  state_.svm = svm::SvmModel(config_.redetector.svm);
}

FeatureStack Tracker::extract_stack(const cv::Mat& frame, cv::Point2d center, cv::Size2d size,
                                    const DeepLayers& deep) const {
  const double s = window_scale(size);
  const ImagePatch patch = crop_resized(frame, center.x, center.y,
                                        cv::Size2d(window_.width * s, window_.height * s), window_);
  FeatureStack stack;
  const cv::Size map = map_size();
  int id = 1;
  for (std::size_t i = 0; i < deep.size(); ++i) {
    const double w = i < config_.deep_weights.size() ? config_.deep_weights[i] : 1.0;
    stack.layers.push_back({prepare_for_filter(resize_layer(deep[i], map)), id++, w});
  }
  const double hc_weight = deep.empty() ? 1.0 : config_.handcrafted_weight;
  stack.layers.push_back(
      {prepare_for_filter(build_handcrafted_layer(patch, *table_, config_.cell_size)), id, hc_weight});
  return stack;
}

ResponseMap Tracker::respond(const cv::Mat& frame, cv::Point2d center, const DeepLayers& deep) const {
  return detect(state_.correlation, extract_stack(frame, center, state_.size, deep));
}

FrameDiagnostics Tracker::initialize(const cv::Mat& frame, const BoundingBox& box,
                                     const DeepLayers& deep) {
  if (frame.empty() || frame.type() != CV_8UC3) throw InputError("initialize: expected an RGB frame");
  if (!box.valid() || box.x + box.w <= 0.0 || box.y + box.h <= 0.0 || box.x >= frame.cols ||
      box.y >= frame.rows) {
    throw InputError("initialize: box is empty or outside the frame");
  }
  const BoundingBox clipped = clip_to_frame(box, frame.cols, frame.rows);
  frame_size_ = frame.size();
  initial_size_ = {clipped.w, clipped.h};
  window_ = search_window(initial_size_, config_.padding, config_.cell_size);
  rng_.seed(config_.seed);

  state_ = TrackerState{};
  state_.svm = svm::SvmModel(config_.redetector.svm);
  state_.box = clipped;
  state_.center = {clipped.cx(), clipped.cy()};
  state_.size = initial_size_;
  state_.frame_index = 1;
  state_.last_response = 1.0;

  state_.correlation = train_model(extract_stack(frame, state_.center, state_.size, deep),
                                   config_.correlation);
  if (config_.enable_scale) {
    state_.scale = train_scale_model(frame, state_.center, state_.size, config_.scale);
  }
  FrameDiagnostics diag;
  if (config_.enable_redetection) {
    train_detector(state_.svm, frame, clipped, rng_, config_.redetector);
    diag.detector_updated = true;
  }
  const phd::Measurement m = to_measurement(state_.center);
  state_.phd = phd::birth_components(std::span(&m, 1), config_.phd.birth_cov, config_.phd.birth_weight);

  initialized_ = true;
  diag.frame_index = 1;
  diag.box = clipped;
  diag.response = diag.translation_response = 1.0;
  diag.phd_components = state_.phd.size();
  return diag;
}

FrameDiagnostics Tracker::step(const cv::Mat& frame, const DeepLayers& deep) {
  if (!initialized_) throw InputError("step: tracker is not initialized");
  if (frame.size() != frame_size_ || frame.type() != CV_8UC3) {
    throw InputError("step: frame size differs from the first frame");
  }
  FrameDiagnostics diag;
  diag.frame_index = ++state_.frame_index;

  phd::FilterParams phd_params = config_.phd;
  phd_params.clutter.area = static_cast<double>(frame.cols) * frame.rows;
  const double cell_pixels = config_.cell_size * window_scale(state_.size);

  // Translation.
  const ResponseMap response = respond(frame, state_.center, deep);
  cv::Point2d center =
      clamp_to_frame(estimate_translation(response, cell_pixels, state_.center), frame_size_);
  double peak = response.peak_value;
  diag.translation_response = peak;
  diag.max_imag_residue = response.max_imag_residue;

  // Mixture bookkeeping with the translation estimate as the only measurement.
  const phd::Measurement tracked = to_measurement(center);
  state_.phd = phd::cycle(state_.phd, std::span(&tracked, 1), phd_params);

  // Re-detection.
  if (config_.enable_redetection && peak < config_.redetect_threshold) {
    diag.redetected = true;
    const auto proposals =
        propose(state_.svm, frame, state_.center, state_.size,
                static_cast<std::size_t>(config_.redetector.proposals), config_.redetector);
    diag.proposals = proposals.size();
    if (!proposals.empty()) {
      std::vector<phd::Measurement> measurements;
      for (const Proposal& p : proposals) measurements.emplace_back(p.box.cx(), p.box.cy());
      state_.phd = phd::cycle(state_.phd, measurements, phd_params);
      const phd::Estimate best = phd::max_weight_estimate(state_.phd);
      const cv::Point2d candidate(best.position.x(), best.position.y());
      const ResponseMap again = respond(frame, candidate, deep);
      if (again.peak_value > config_.redetect_threshold) {
        center = clamp_to_frame(estimate_translation(again, cell_pixels, candidate), frame_size_);
        peak = again.peak_value;
        diag.redetection_accepted = true;
      }
    }
  }

  // Scale.
  cv::Size2d size = state_.size;
  const bool confident = peak >= config_.redetect_threshold;
  if (config_.enable_scale && (confident || !config_.scale_requires_confidence)) {
    try {
      const ScaleEstimate est = estimate_scale(state_.scale, frame, center);
      diag.scale = est.scale;
      const double factor = config_.scale.damping * est.scale + (1.0 - config_.scale.damping);
      size = {size.width * factor, size.height * factor};
      const double shrink = std::min({1.0, frame.cols / size.width, frame.rows / size.height});
      const double grow = std::max(1.0, kMinTargetSide / std::min(size.width, size.height));
      size = {size.width * shrink * grow, size.height * shrink * grow};
    } catch (const NoScaleError&) {
      diag.scale = 1.0;
    }
  }

  // Model updates at the final position.
  state_.center = center;
  state_.size = size;
  state_.correlation = update_model(state_.correlation, extract_stack(frame, center, size, deep));
  if (config_.enable_scale) {
    state_.scale = update_scale_model(state_.scale, frame, center, size);
  }
  state_.box = clip_to_frame(BoundingBox::from_center(center.x, center.y, size.width, size.height),
                             frame.cols, frame.rows);
  state_.last_response = peak;

  if (config_.enable_redetection && peak >= config_.detector_threshold) {
    try {
      train_detector(state_.svm, frame, state_.box, rng_, config_.redetector);
      diag.detector_updated = true;
    } catch (const DegenerateInputError&) {
      diag.detector_updated = false;
    }
  }

  diag.box = state_.box;
  diag.response = peak;
  diag.phd_components = state_.phd.size();
  return diag;
}

std::vector<FrameDiagnostics> run_sequence(std::span<const cv::Mat> frames,
                                           const BoundingBox& init_box,
                                           const TrackerConfig& config,
                                           std::shared_ptr<const ColorNameTable> table,
                                           const DeepLayerSource& deep) {
  if (frames.empty()) throw InputError("run_sequence: no frames");
  Tracker tracker(config, std::move(table));
  std::vector<FrameDiagnostics> out;
  out.reserve(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const int index = static_cast<int>(i) + 1;
    try {
      const DeepLayers layers = deep ? deep(index) : DeepLayers{};
      out.push_back(i == 0 ? tracker.initialize(frames[i], init_box, layers)
                           : tracker.step(frames[i], layers));
    } catch (const InputError& e) {
      throw InputError("frame " + std::to_string(index) + ": " + e.what());
    } catch (const Error& e) {
      throw Error("frame " + std::to_string(index) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace lct
