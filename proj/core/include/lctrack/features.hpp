#pragma once

#include <span>
#include <vector>

#include <opencv2/core.hpp>

#include "lctrack/color_names.hpp"
#include "lctrack/image.hpp"

namespace lct {

// Dense rows x cols x depth real-valued feature map. Storage is channel-planar:
// channel d occupies one contiguous rows*cols block in row-major order.
class FeatureMap {
 public:
  FeatureMap() = default;
  FeatureMap(int rows, int cols, int depth, double fill = 0.0);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int depth() const { return depth_; }
  cv::Size spatial_size() const { return {cols_, rows_}; }
  bool empty() const { return values_.empty(); }

  double& at(int m, int n, int d) { return values_[index(m, n, d)]; }
  double at(int m, int n, int d) const { return values_[index(m, n, d)]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  // CV_64F views over one channel; no copy is made.
  cv::Mat channel(int d);
  cv::Mat channel(int d) const;

  double squared_norm() const;

  friend bool operator==(const FeatureMap&, const FeatureMap&) = default;

 private:
  std::size_t index(int m, int n, int d) const {
    return (static_cast<std::size_t>(d) * rows_ + m) * cols_ + n;
  }

  int rows_ = 0;
  int cols_ = 0;
  int depth_ = 0;
  std::vector<double> values_;
};

struct FeatureLayer {
  FeatureMap data;
  int layer_id = 1;
  double weight = 1.0;  // fusion weight of this layer's response
};

struct FeatureStack {
  std::vector<FeatureLayer> layers;

  cv::Size spatial_size() const {
    return layers.empty() ? cv::Size() : layers.front().data.spatial_size();
  }
};

inline constexpr int kHogChannels = 31;
inline constexpr int kHandcraftedChannels = kHogChannels + ColorNameTable::kNames;
inline constexpr int kDetectorWindow = 32;
inline constexpr int kDetectorCell = 4;
inline constexpr double kHogTruncation = 0.2;

// Felzenszwalb HOG with 9 orientations. Output is floor(H/cell) x floor(W/cell) x 31:
// 18 contrast-sensitive orientations, 9 contrast-insensitive orientations, then
// 4 texture (gradient energy) channels, one per normalization block.
FeatureMap extract_hog(const ImagePatch& patch, int cell_size);

// Per-pixel 11-way color-name probabilities averaged over cell_size x cell_size cells.
FeatureMap extract_color_names(const ImagePatch& patch, const ColorNameTable& table,
                               int cell_size);

// HOG (31) followed by color names (11): 42 channels.
FeatureMap build_handcrafted_layer(const ImagePatch& patch, const ColorNameTable& table,
                                   int cell_size);

// Detector descriptor of a patch resized to the 32x32 canonical window with 4 px cells.
// Layout: 31 HOG channels, 3 mean-LUV channels, 1 mean normalized-gradient-magnitude
// channel; each channel is an 8x8 row-major block, channels in that order (2240 values).
std::vector<double> extract_detector_features(const ImagePatch& patch);
inline constexpr std::size_t kDetectorFeatureLength =
    static_cast<std::size_t>(kDetectorWindow / kDetectorCell) *
    (kDetectorWindow / kDetectorCell) * (kHogChannels + 3 + 1);

// 1-D Hann window of length n (n >= 2); endpoints are 0.
std::vector<double> hann_window(int n);

// Multiplies every channel by the outer product of Hann windows over rows and cols.
FeatureMap apply_cosine_window(const FeatureMap& layer);

// Bilinear resampling per channel with pixel-centre alignment.
FeatureMap resize_layer(const FeatureMap& layer, cv::Size target);

// Zero-mean per channel, cosine window, then scale to unit Frobenius norm.
// An all-zero result is returned unchanged.
FeatureMap prepare_for_filter(const FeatureMap& layer);

}  // namespace lct
