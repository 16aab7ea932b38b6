#include "lctrack/image.hpp"

#include <algorithm>
#include <cmath>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "lctrack/errors.hpp"

namespace lct {

double iou(const BoundingBox& a, const BoundingBox& b) {
  if (!a.valid() || !b.valid()) return 0.0;
  const double ix = std::max(0.0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
  const double iy = std::max(0.0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
  const double inter = ix * iy;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

BoundingBox clip_to_frame(const BoundingBox& box, int width, int height) {
  BoundingBox out = box;
  out.w = std::clamp(out.w, 1.0, static_cast<double>(width));
  out.h = std::clamp(out.h, 1.0, static_cast<double>(height));
  out.x = std::clamp(out.x, 0.0, width - out.w);
  out.y = std::clamp(out.y, 0.0, height - out.h);
  return out;
}

ImagePatch crop_patch(const cv::Mat& frame, cv::Point origin, cv::Size size) {
  if (frame.empty() || size.width < 1 || size.height < 1) {
    throw DegenerateInputError("crop_patch: empty frame or non-positive patch size");
  }
  const cv::Rect wanted(origin, size);
  const cv::Rect inside = wanted & cv::Rect(0, 0, frame.cols, frame.rows);

  ImagePatch patch;
  patch.origin = origin;
  if (inside == wanted) {
    patch.pixels = frame(wanted).clone();
    return patch;
  }
  if (inside.empty()) {
    // Entirely outside: replicate the closest frame pixel.
    const int px = std::clamp(origin.x, 0, frame.cols - 1);
    const int py = std::clamp(origin.y, 0, frame.rows - 1);
    const cv::Rect nearest(px, py, 1, 1);
    cv::copyMakeBorder(frame(nearest), patch.pixels, 0, size.height - 1, 0, size.width - 1,
                       cv::BORDER_REPLICATE);
    return patch;
  }
  const int top = inside.y - wanted.y;
  const int left = inside.x - wanted.x;
  const int bottom = wanted.br().y - inside.br().y;
  const int right = wanted.br().x - inside.br().x;
  cv::copyMakeBorder(frame(inside), patch.pixels, top, bottom, left, right, cv::BORDER_REPLICATE);
  return patch;
}

ImagePatch crop_resized(const cv::Mat& frame, double cx, double cy, cv::Size2d extent,
                        cv::Size out_size) {
  const int w = std::max(1, static_cast<int>(std::lround(extent.width)));
  const int h = std::max(1, static_cast<int>(std::lround(extent.height)));
  const cv::Point origin(static_cast<int>(std::floor(cx - 0.5 * w + 0.5)),
                         static_cast<int>(std::floor(cy - 0.5 * h + 0.5)));
  ImagePatch patch = crop_patch(frame, origin, {w, h});
  patch.pixels = resize_bilinear(patch.pixels, out_size);
  return patch;
}

cv::Mat resize_bilinear(const cv::Mat& image, cv::Size out_size) {
  if (image.size() == out_size) return image.clone();
  cv::Mat out;
  // Area averaging when shrinking keeps HOG gradients from aliasing.
  const bool shrinking = out_size.width < image.cols && out_size.height < image.rows;
  cv::resize(image, out, out_size, 0, 0, shrinking ? cv::INTER_AREA : cv::INTER_LINEAR);
  return out;
}

cv::Mat load_rgb(const std::string& path) {
  cv::Mat bgr = cv::imread(path, cv::IMREAD_COLOR);
  if (bgr.empty()) throw ResourceError("cannot read image: " + path);
  cv::Mat rgb;
  cv::cvtColor(bgr, rgb, cv::COLOR_BGR2RGB);
  return rgb;
}

void save_rgb(const std::string& path, const cv::Mat& rgb) {
  cv::Mat bgr;
  cv::cvtColor(rgb, bgr, cv::COLOR_RGB2BGR);
  if (!cv::imwrite(path, bgr)) throw ResourceError("cannot write image: " + path);
}

}  // namespace lct
