#pragma once

#include <ostream>
#include <span>
#include <vector>

#include "lctrack/image.hpp"

namespace lct {

double center_error(const BoundingBox& pred, const BoundingBox& gt);

struct PrecisionCurve {
  std::vector<double> thresholds;  // 0, 1, ..., 50 px
  std::vector<double> values;      // fraction of frames with error <= threshold
  double score = 0.0;              // value at 20 px
  std::size_t frames = 0;          // frames counted
  std::size_t skipped = 0;         // frames without ground truth
};

struct SuccessCurve {
  std::vector<double> thresholds;  // 0, 0.05, ..., 1
  std::vector<double> values;      // fraction of frames with IOU > threshold
  double auc = 0.0;                // mean of values
  std::size_t frames = 0;
  std::size_t skipped = 0;
};

inline constexpr int kPrecisionMaxThreshold = 50;
inline constexpr int kPrecisionScoreThreshold = 20;
inline constexpr int kSuccessSteps = 21;

// Ground-truth boxes with all four fields zero mark absent annotations and are
// skipped. Throws InputError on length mismatch.
PrecisionCurve precision_curve(std::span<const BoundingBox> preds, std::span<const BoundingBox> gts);
SuccessCurve success_curve(std::span<const BoundingBox> preds, std::span<const BoundingBox> gts);

// Rows "threshold,value" preceded by a header line.
void write_curve_csv(std::ostream& out, std::span<const double> thresholds,
                     std::span<const double> values);
// One row "precision@20,auc,frames,skipped" preceded by a header line.
void write_summary_csv(std::ostream& out, const PrecisionCurve& precision,
                       const SuccessCurve& success);

}  // namespace lct
