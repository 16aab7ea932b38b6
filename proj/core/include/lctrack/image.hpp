#pragma once

#include <opencv2/core.hpp>

namespace lct {

// Axis-aligned box in frame pixel coordinates; (x, y) is the top-left corner.
struct BoundingBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double cx() const { return x + 0.5 * w; }
  double cy() const { return y + 0.5 * h; }
  double area() const { return w * h; }
  bool valid() const { return w > 0.0 && h > 0.0; }

  static BoundingBox from_center(double cx, double cy, double w, double h) {
    return {cx - 0.5 * w, cy - 0.5 * h, w, h};
  }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

// Intersection over union; 0 for disjoint or degenerate boxes.
double iou(const BoundingBox& a, const BoundingBox& b);

// Shift (and if needed shrink) a box so that it lies inside a width x height frame.
BoundingBox clip_to_frame(const BoundingBox& box, int width, int height);

// RGB image patch cut from a frame. Pixels are CV_8UC3 in R, G, B order.
struct ImagePatch {
  cv::Mat pixels;
  cv::Point origin;

  int width() const { return pixels.cols; }
  int height() const { return pixels.rows; }
};

// Crops `size` pixels whose top-left corner sits at `origin`. Regions outside
// the frame are filled by replicating the nearest edge pixel.
ImagePatch crop_patch(const cv::Mat& frame, cv::Point origin, cv::Size size);

// Crops a window of (possibly fractional) size `extent` centred at (cx, cy) and
// resamples it bilinearly to `out_size`.
ImagePatch crop_resized(const cv::Mat& frame, double cx, double cy, cv::Size2d extent,
                        cv::Size out_size);

// Bilinear resize of an RGB patch; an identical size returns a deep copy.
cv::Mat resize_bilinear(const cv::Mat& image, cv::Size out_size);

// Reads an image from disk and returns it in RGB order.
cv::Mat load_rgb(const std::string& path);

// Writes an RGB image to disk (format from the extension).
void save_rgb(const std::string& path, const cv::Mat& rgb);

}  // namespace lct
