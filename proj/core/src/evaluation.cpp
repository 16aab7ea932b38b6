#include "lctrack/evaluation.hpp"

#include <cmath>
#include <iomanip>
#include <string>

#include "lctrack/errors.hpp"

namespace lct {

namespace {

bool absent(const BoundingBox& b) { return b.x == 0.0 && b.y == 0.0 && b.w == 0.0 && b.h == 0.0; }

void check_lengths(std::size_t preds, std::size_t gts) {
  if (preds != gts) {
    throw InputError("evaluation: " + std::to_string(preds) + " predictions vs " +
                     std::to_string(gts) + " ground-truth rows");
  }
}

}  // namespace

double center_error(const BoundingBox& pred, const BoundingBox& gt) {
  return std::hypot(pred.cx() - gt.cx(), pred.cy() - gt.cy());
}

PrecisionCurve precision_curve(std::span<const BoundingBox> preds, std::span<const BoundingBox> gts) {
  check_lengths(preds.size(), gts.size());
  PrecisionCurve curve;
  std::vector<double> errors;
  for (std::size_t i = 0; i < gts.size(); ++i) {
    if (absent(gts[i])) {
      ++curve.skipped;
      continue;
    }
    errors.push_back(center_error(preds[i], gts[i]));
  }
  curve.frames = errors.size();
  for (int t = 0; t <= kPrecisionMaxThreshold; ++t) {
    std::size_t hits = 0;
    for (double e : errors) hits += e <= t ? 1 : 0;
    curve.thresholds.push_back(t);
    curve.values.push_back(errors.empty() ? 0.0 : static_cast<double>(hits) / errors.size());
  }
  curve.score = curve.values[kPrecisionScoreThreshold];
  return curve;
}

SuccessCurve success_curve(std::span<const BoundingBox> preds, std::span<const BoundingBox> gts) {
  check_lengths(preds.size(), gts.size());
  SuccessCurve curve;
  std::vector<double> overlaps;
  for (std::size_t i = 0; i < gts.size(); ++i) {
    if (absent(gts[i])) {
      ++curve.skipped;
      continue;
    }
    overlaps.push_back(iou(preds[i], gts[i]));
  }
  curve.frames = overlaps.size();
  double sum = 0.0;
  for (int k = 0; k < kSuccessSteps; ++k) {
    const double t = k / static_cast<double>(kSuccessSteps - 1);
    std::size_t hits = 0;
    for (double o : overlaps) hits += o > t ? 1 : 0;
    const double v = overlaps.empty() ? 0.0 : static_cast<double>(hits) / overlaps.size();
    curve.thresholds.push_back(t);
    curve.values.push_back(v);
    sum += v;
  }
  curve.auc = sum / kSuccessSteps;
  return curve;
}

void write_curve_csv(std::ostream& out, std::span<const double> thresholds,
                     std::span<const double> values) {
  out << "threshold,value\n" << std::setprecision(10);
  for (std::size_t i = 0; i < thresholds.size(); ++i) out << thresholds[i] << ',' << values[i] << '\n';
}

void write_summary_csv(std::ostream& out, const PrecisionCurve& precision,
                       const SuccessCurve& success) {
  out << "precision@20,auc,frames,skipped\n"
      << std::setprecision(10) << precision.score << ',' << success.auc << ',' << precision.frames
      << ',' << precision.skipped << '\n';
}

}  // namespace lct
