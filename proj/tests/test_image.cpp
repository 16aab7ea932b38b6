#include <gtest/gtest.h>

#include "lctrack/errors.hpp"
#include "lctrack/image.hpp"

namespace lct {
namespace {

TEST(Iou, IdenticalBoxesIsOne) {
  const BoundingBox a{3, 4, 10, 20};
  EXPECT_DOUBLE_EQ(iou(a, a), 1.0);
}

TEST(Iou, DisjointBoxesIsZero) {
  EXPECT_DOUBLE_EQ(iou({0, 0, 10, 10}, {20, 20, 5, 5}), 0.0);
}

TEST(Iou, HalfShiftedSquareIsOneThird) {
  EXPECT_DOUBLE_EQ(iou({0, 0, 10, 10}, {5, 0, 10, 10}), 50.0 / 150.0);
}

TEST(Iou, Symmetric) {
  const BoundingBox a{1.5, 2, 7, 9};
  const BoundingBox b{4, 0.5, 11, 6};
  EXPECT_DOUBLE_EQ(iou(a, b), iou(b, a));
}

TEST(ClipToFrame, ShiftsBoxInside) {
  const BoundingBox c = clip_to_frame({-5, 95, 20, 20}, 100, 100);
  EXPECT_DOUBLE_EQ(c.x, 0.0);
  EXPECT_DOUBLE_EQ(c.y, 80.0);
  EXPECT_DOUBLE_EQ(c.w, 20.0);
}

TEST(ClipToFrame, ShrinksOversizedBox) {
  const BoundingBox c = clip_to_frame({0, 0, 300, 50}, 100, 100);
  EXPECT_DOUBLE_EQ(c.w, 100.0);
  EXPECT_DOUBLE_EQ(c.x, 0.0);
}

TEST(CropPatch, InsideIsExactCopy) {
  cv::Mat frame(20, 30, CV_8UC3);
  cv::randu(frame, 0, 255);
  const ImagePatch p = crop_patch(frame, {5, 6}, {8, 4});
  EXPECT_EQ(p.origin, cv::Point(5, 6));
  EXPECT_EQ(cv::norm(p.pixels, frame(cv::Rect(5, 6, 8, 4)), cv::NORM_INF), 0.0);
}

TEST(CropPatch, OutsideReplicatesEdge) {
  cv::Mat frame(10, 10, CV_8UC3);
  cv::randu(frame, 0, 255);
  const ImagePatch p = crop_patch(frame, {-3, 0}, {5, 2});
  for (int x = 0; x < 3; ++x) {
    EXPECT_EQ(p.pixels.at<cv::Vec3b>(0, x), frame.at<cv::Vec3b>(0, 0));
    EXPECT_EQ(p.pixels.at<cv::Vec3b>(1, x), frame.at<cv::Vec3b>(1, 0));
  }
  EXPECT_EQ(p.pixels.at<cv::Vec3b>(0, 4), frame.at<cv::Vec3b>(0, 1));
}

TEST(CropPatch, EntirelyOutsideUsesNearestPixel) {
  cv::Mat frame(10, 10, CV_8UC3, cv::Scalar(1, 2, 3));
  frame.at<cv::Vec3b>(9, 9) = {200, 100, 50};
  const ImagePatch p = crop_patch(frame, {40, 40}, {3, 3});
  EXPECT_EQ(p.pixels.at<cv::Vec3b>(2, 2), cv::Vec3b(200, 100, 50));
}

TEST(CropPatch, EmptySizeThrows) {
  cv::Mat frame(10, 10, CV_8UC3);
  EXPECT_THROW(crop_patch(frame, {0, 0}, {0, 3}), DegenerateInputError);
}

TEST(CropResized, OutputHasRequestedSize) {
  cv::Mat frame(50, 60, CV_8UC3, cv::Scalar(9, 9, 9));
  const ImagePatch p = crop_resized(frame, 30.0, 25.0, {17.3, 11.8}, {32, 24});
  EXPECT_EQ(p.pixels.size(), cv::Size(32, 24));
}

}  // namespace
}  // namespace lct
