#include "lctrack/redetector.hpp"

#include <algorithm>
#include <cmath>

#include "lctrack/errors.hpp"
#include "lctrack/features.hpp"

namespace lct {

namespace {

constexpr int kPlacementAttempts = 2000;

ImagePatch patch_under(const cv::Mat& frame, const BoundingBox& box) {
  const cv::Point origin(static_cast<int>(std::lround(box.x)), static_cast<int>(std::lround(box.y)));
  const cv::Size size(std::max(1, static_cast<int>(std::lround(box.w))),
                      std::max(1, static_cast<int>(std::lround(box.h))));
  return crop_patch(frame, origin, size);
}

void normalize(std::vector<double>& v) {
  double n2 = 0.0;
  for (double x : v) n2 += x * x;
  if (n2 <= 0.0) return;
  const double inv = 1.0 / std::sqrt(n2);
  for (double& x : v) x *= inv;
}

}  // namespace

std::vector<LabeledBox> label_boxes(std::span<const BoundingBox> candidates,
                                    const BoundingBox& target, double positive_iou,
                                    double negative_iou) {
  if (!(negative_iou < positive_iou)) {
    throw InputError("label_boxes: negative threshold must be below the positive threshold");
  }
  std::vector<LabeledBox> out;
  for (const BoundingBox& c : candidates) {
    const double o = iou(c, target);
    if (o >= positive_iou) {
      out.push_back({c, +1});
    } else if (o < negative_iou) {
      out.push_back({c, -1});
    }
  }
  return out;
}

std::vector<BoundingBox> generate_training_boxes(const BoundingBox& target, cv::Size frame_size,
                                                 std::mt19937_64& rng,
                                                 const RedetectorParams& params) {
  if (!target.valid() || target.w > frame_size.width || target.h > frame_size.height) {
    throw DegenerateInputError("generate_training_boxes: target does not fit in the frame");
  }
  const BoundingBox anchor = clip_to_frame(target, frame_size.width, frame_size.height);
  std::vector<BoundingBox> boxes;
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      BoundingBox b = anchor;
      b.x += dx * params.jitter_px;
      b.y += dy * params.jitter_px;
      boxes.push_back(clip_to_frame(b, frame_size.width, frame_size.height));
    }
  }
  // Target first, then the 8 shifted copies.
  std::rotate(boxes.begin(), boxes.begin() + 4, boxes.begin() + 5);

  const std::size_t negatives = boxes.size() * static_cast<std::size_t>(params.negative_ratio);
  const double max_x = frame_size.width - anchor.w;
  const double max_y = frame_size.height - anchor.h;
  const double half_w = 0.5 * params.sample_region * anchor.w;
  const double half_h = 0.5 * params.sample_region * anchor.h;
  // Range of top-left corners that keep the box inside both the region and the frame.
  const double lo_x = std::clamp(anchor.cx() - half_w, 0.0, max_x);
  const double hi_x = std::clamp(anchor.cx() + half_w - anchor.w, 0.0, max_x);
  const double lo_y = std::clamp(anchor.cy() - half_h, 0.0, max_y);
  const double hi_y = std::clamp(anchor.cy() + half_h - anchor.h, 0.0, max_y);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t k = 0; k < negatives; ++k) {
    bool placed = false;
    for (int attempt = 0; attempt < kPlacementAttempts && !placed; ++attempt) {
      // Fall back to the whole frame when the region is too cramped.
      const bool wide = attempt >= kPlacementAttempts / 2;
      const double x0 = wide ? 0.0 : lo_x, x1 = wide ? max_x : hi_x;
      const double y0 = wide ? 0.0 : lo_y, y1 = wide ? max_y : hi_y;
      const BoundingBox b{std::round(x0 + unit(rng) * (x1 - x0)),
                          std::round(y0 + unit(rng) * (y1 - y0)), anchor.w, anchor.h};
      if (iou(b, anchor) < params.negative_iou) {
        boxes.push_back(clip_to_frame(b, frame_size.width, frame_size.height));
        placed = true;
      }
    }
    if (!placed) {
      throw DegenerateInputError("generate_training_boxes: no room for negative samples");
    }
  }
  return boxes;
}

std::vector<double> detector_descriptor(const cv::Mat& frame, const BoundingBox& box) {
  std::vector<double> f = extract_detector_features(patch_under(frame, box));
  normalize(f);
  return f;
}

std::vector<LabeledSample> make_samples(const cv::Mat& frame, std::span<const LabeledBox> boxes) {
  std::vector<LabeledSample> out;
  out.reserve(boxes.size());
  for (const LabeledBox& b : boxes) {
    out.push_back({detector_descriptor(frame, b.box), b.label, b.box});
  }
  return out;
}

void train_detector(svm::SvmModel& model, const cv::Mat& frame, const BoundingBox& target,
                    std::mt19937_64& rng, const RedetectorParams& params) {
  const auto boxes = generate_training_boxes(target, frame.size(), rng, params);
  const auto labeled = label_boxes(boxes, target, params.positive_iou, params.negative_iou);
  for (const LabeledSample& s : make_samples(frame, labeled)) {
    model.increment(s.features, s.label);
  }
  model.maintain_budget(params.max_support_vectors);
  model.trim_reserve(params.max_reserve);
}

std::vector<Proposal> non_max_suppression(std::vector<Proposal> candidates, double iou_threshold,
                                          std::size_t limit) {
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Proposal& a, const Proposal& b) { return a.score > b.score; });
  std::vector<Proposal> kept;
  for (const Proposal& c : candidates) {
    if (kept.size() >= limit) break;
    const bool overlaps = std::any_of(kept.begin(), kept.end(), [&](const Proposal& k) {
      return iou(k.box, c.box) > iou_threshold;
    });
    if (!overlaps) kept.push_back(c);
  }
  return kept;
}

std::vector<Proposal> propose(const svm::SvmModel& model, const cv::Mat& frame,
                              cv::Point2d center, cv::Size2d target_size, std::size_t limit,
                              const RedetectorParams& params) {
  if (!model.trained()) throw NoModelError("propose: detector has not been trained");
  const int w = std::clamp(static_cast<int>(std::lround(target_size.width)), 1, frame.cols);
  const int h = std::clamp(static_cast<int>(std::lround(target_size.height)), 1, frame.rows);
  const int stride = std::max(2, w / 10);

  const double rw = params.search_region * target_size.width;
  const double rh = params.search_region * target_size.height;
  const int x0 = std::clamp(static_cast<int>(std::floor(center.x - 0.5 * rw)), 0, frame.cols - w);
  const int y0 = std::clamp(static_cast<int>(std::floor(center.y - 0.5 * rh)), 0, frame.rows - h);
  const int x1 = std::clamp(static_cast<int>(std::ceil(center.x + 0.5 * rw)) - w, x0, frame.cols - w);
  const int y1 = std::clamp(static_cast<int>(std::ceil(center.y + 0.5 * rh)) - h, y0, frame.rows - h);

  std::vector<Proposal> scored;
  for (int y = y0; y <= y1; y += stride) {
    for (int x = x0; x <= x1; x += stride) {
      const BoundingBox box{static_cast<double>(x), static_cast<double>(y),
                            static_cast<double>(w), static_cast<double>(h)};
      scored.push_back({box, model.score(detector_descriptor(frame, box))});
    }
  }
  return non_max_suppression(std::move(scored), params.nms_iou, limit);
}

}  // namespace lct
