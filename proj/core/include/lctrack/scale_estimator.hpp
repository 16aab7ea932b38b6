#pragma once

#include <vector>

#include <opencv2/core.hpp>

#include "lctrack/correlation_filter.hpp"
#include "lctrack/image.hpp"

namespace lct {

struct ScaleParams {
  int levels = 31;  // odd
  double step = 1.04;
  int cell_size = 4;
  int min_level_side = 8;   // levels whose crop is smaller than this are skipped
  double damping = 0.6;     // size *= damping * s + (1 - damping)
  double context = 2.0;     // crop extent relative to the target at every level
  int template_min_side = 32;
  int template_max_area = 64 * 64;
  CorrelationParams filter;
};

struct ScaleModel {
  LayerModel filter;
  ScaleParams params;
  cv::Size2d current_size;  // target size in frame pixels
  cv::Size template_size;   // every level is resampled to this before feature extraction
};

struct PyramidLevel {
  int n = 0;           // exponent: crop extent is step^n times the target size
  double scale = 1.0;
  bool skipped = false;
  ImagePatch patch;    // empty when skipped
};

// Levels n = -(S-1)/2 .. (S-1)/2, each a crop of step^n * size centred at `center`
// resampled to `out_size`. Levels whose crop would be under min_side pixels are
// flagged as skipped. Throws InputError for an even or non-positive level count.
std::vector<PyramidLevel> build_pyramid(const cv::Mat& frame, cv::Point2d center, cv::Size2d size,
                                        int levels, double step, cv::Size out_size,
                                        int min_side = 8);

// Same, resampling every level to the rounded target size itself.
std::vector<PyramidLevel> build_pyramid(const cv::Mat& frame, cv::Point2d center, cv::Size2d size,
                                        int levels, double step);

struct ScaleEstimate {
  double scale = 1.0;
  int n = 0;
  std::vector<double> level_peaks;  // NaN for skipped levels
};

// Template resolution for a target: the target size rescaled so the area does not
// exceed template_max_area while the shorter side is at least template_min_side,
// rounded to whole cells.
cv::Size scale_template_size(cv::Size2d target_size, const ScaleParams& params);

// Features of one resampled patch as fed to the scale filter.
FeatureMap scale_features(const ImagePatch& patch, int cell_size);

ScaleModel train_scale_model(const cv::Mat& frame, cv::Point2d center, cv::Size2d target_size,
                             const ScaleParams& params = {});

// Peak response of the scale filter on every non-skipped level; the best level wins,
// ties go to the level nearest n = 0 and then to the lower n. Throws NoScaleError
// when every level was skipped.
ScaleEstimate estimate_scale(const ScaleModel& model, const std::vector<PyramidLevel>& pyramid);

// Builds the pyramid for the model's current size and scores it.
ScaleEstimate estimate_scale(const ScaleModel& model, const cv::Mat& frame, cv::Point2d center);

// Trains on the patch at new_size, interpolates with the filter rate and adopts new_size.
ScaleModel update_scale_model(const ScaleModel& model, const cv::Mat& frame, cv::Point2d center,
                              cv::Size2d new_size);

}  // namespace lct
