#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <opencv2/core.hpp>

#include "lctrack/image.hpp"
#include "lctrack/incremental_svm.hpp"

namespace lct {

struct RedetectorParams {
  double positive_iou = 0.9;  // IOU >= this -> +1
  double negative_iou = 0.3;  // IOU < this -> -1
  int jitter_px = 2;
  int negative_ratio = 3;
  double sample_region = 4.0;  // negatives are drawn inside this multiple of the target size
  double search_region = 6.0;  // proposals are scanned inside this multiple
  double nms_iou = 0.5;
  int proposals = 5;
  std::size_t max_support_vectors = 200;
  std::size_t max_reserve = 200;
  svm::SvmParams svm;
};

struct LabeledBox {
  BoundingBox box;
  int label = 1;
};

struct LabeledSample {
  std::vector<double> features;
  int label = 1;
  BoundingBox source_box;
};

struct Proposal {
  BoundingBox box;
  double score = 0.0;
};

// +1 for IOU >= positive_iou, -1 for IOU < negative_iou; anything in between is dropped.
std::vector<LabeledBox> label_boxes(std::span<const BoundingBox> candidates,
                                    const BoundingBox& target, double positive_iou,
                                    double negative_iou);

// The target, its 8 neighbours at +-jitter_px, then negative_ratio times as many
// same-size boxes drawn uniformly from the sample region with IOU < negative_iou.
// Every box lies inside the frame. Throws DegenerateInputError if the target does
// not fit in the frame or negatives cannot be placed.
std::vector<BoundingBox> generate_training_boxes(const BoundingBox& target, cv::Size frame_size,
                                                 std::mt19937_64& rng,
                                                 const RedetectorParams& params = {});

// Detector features of the frame region under `box`, scaled to unit L2 norm.
std::vector<double> detector_descriptor(const cv::Mat& frame, const BoundingBox& box);

std::vector<LabeledSample> make_samples(const cv::Mat& frame, std::span<const LabeledBox> boxes);

// Samples around the target, labels them and feeds them to the SVM one by one, then
// enforces the support-vector budget and the reserve cap.
void train_detector(svm::SvmModel& model, const cv::Mat& frame, const BoundingBox& target,
                    std::mt19937_64& rng, const RedetectorParams& params = {});

// Greedy suppression in score order; keeps at most `limit` boxes whose pairwise IOU
// does not exceed `iou_threshold`.
std::vector<Proposal> non_max_suppression(std::vector<Proposal> candidates, double iou_threshold,
                                          std::size_t limit);

// Sliding-window scan with the target size over the search region centred at `center`
// (clipped to the frame). Stride is max(2, w / 10). Returns up to `limit` proposals
// after suppression, best first. Throws NoModelError on an untrained model.
std::vector<Proposal> propose(const svm::SvmModel& model, const cv::Mat& frame,
                              cv::Point2d center, cv::Size2d target_size, std::size_t limit,
                              const RedetectorParams& params = {});

}  // namespace lct
