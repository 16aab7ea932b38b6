#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include <opencv2/core.hpp>

#include "lctrack/color_names.hpp"
#include "lctrack/correlation_filter.hpp"
#include "lctrack/features.hpp"
#include "lctrack/gmphd.hpp"
#include "lctrack/image.hpp"
#include "lctrack/incremental_svm.hpp"
#include "lctrack/redetector.hpp"
#include "lctrack/scale_estimator.hpp"

namespace lct {

struct TrackerConfig {
  CorrelationParams correlation;
  double padding = 2.8;  // search window = padding * target size
  int cell_size = 4;
  double redetect_threshold = 0.15;
  double detector_threshold = 0.40;
  // Fusion weights: hand-crafted layer, then deep layers in file order.
  double handcrafted_weight = 0.1;
  std::vector<double> deep_weights = {0.02, 0.4, 1.0};
  RedetectorParams redetector;
  ScaleParams scale;
  phd::FilterParams phd;
  bool enable_redetection = true;
  bool enable_scale = true;
  // Skip scale estimation on frames whose final response is below redetect_threshold.
  bool scale_requires_confidence = true;
  std::uint64_t seed = 42;

  // Throws InputError when thresholds or rates are out of range.
  void validate() const;
};

struct TrackerState {
  BoundingBox box;
  cv::Point2d center;
  cv::Size2d size;
  CorrelationModel correlation;
  ScaleModel scale;
  svm::SvmModel svm;
  phd::Mixture phd;
  double last_response = 0.0;
  int frame_index = 0;
};

struct FrameDiagnostics {
  int frame_index = 0;
  BoundingBox box;
  double response = 0.0;          // peak used for the threshold decisions
  double translation_response = 0.0;
  bool redetected = false;        // re-detection was activated on this frame
  bool redetection_accepted = false;
  bool detector_updated = false;
  double scale = 1.0;             // chosen pyramid scale (1 when not estimated)
  std::size_t proposals = 0;
  std::size_t phd_components = 0;
  double max_imag_residue = 0.0;
};

// Raw per-frame deep layers (any spatial size, file order); empty for hand-crafted only.
using DeepLayers = std::vector<FeatureMap>;

class Tracker {
 public:
  // An empty table pointer selects the built-in prototype table.
  explicit Tracker(TrackerConfig config, std::shared_ptr<const ColorNameTable> table = nullptr);

  // Trains the translation, scale and detector models on the first frame and seeds
  // the mixture with one birth at the box centre. Throws InputError when the box
  // is not inside the frame.
  FrameDiagnostics initialize(const cv::Mat& frame, const BoundingBox& box,
                              const DeepLayers& deep = {});

  // One frame: translation, mixture bookkeeping, conditional re-detection, scale,
  // model updates, conditional detector update. Throws InputError when the frame
  // size differs from the first frame.
  FrameDiagnostics step(const cv::Mat& frame, const DeepLayers& deep = {});

  bool initialized() const { return initialized_; }
  const TrackerState& state() const { return state_; }
  const TrackerConfig& config() const { return config_; }
  // Search-window size in pixels at the initial scale.
  cv::Size window_size() const { return window_; }
  // Feature-map size M x N (rows x cols as width x height).
  cv::Size map_size() const { return {window_.width / config_.cell_size, window_.height / config_.cell_size}; }

  // Feature stack of the search window centred at `center` with target size `size`.
  FeatureStack extract_stack(const cv::Mat& frame, cv::Point2d center, cv::Size2d size,
                             const DeepLayers& deep) const;

 private:
  double window_scale(cv::Size2d size) const { return size.width / initial_size_.width; }
  ResponseMap respond(const cv::Mat& frame, cv::Point2d center, const DeepLayers& deep) const;

  TrackerConfig config_;
  std::shared_ptr<const ColorNameTable> table_;
  TrackerState state_;
  cv::Size window_;
  cv::Size frame_size_;
  cv::Size2d initial_size_;
  std::mt19937_64 rng_;
  bool initialized_ = false;
};

// Search window for a target: padding * size, each side rounded to a multiple of
// 2 * cell_size (at least 2 cells).
cv::Size search_window(cv::Size2d target_size, double padding, int cell_size);

// Provides the deep layers for a 1-based frame index; may return an empty list.
using DeepLayerSource = std::function<DeepLayers(int frame_index)>;

// Initialises on frames[0] and steps through the rest. Errors are rethrown with the
// 1-based frame index in the message.
std::vector<FrameDiagnostics> run_sequence(std::span<const cv::Mat> frames,
                                           const BoundingBox& init_box,
                                           const TrackerConfig& config,
                                           std::shared_ptr<const ColorNameTable> table = nullptr,
                                           const DeepLayerSource& deep = {});

}  // namespace lct
