#include "lctrack/features.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <opencv2/imgproc.hpp>

#include "lctrack/errors.hpp"

namespace lct {

FeatureMap::FeatureMap(int rows, int cols, int depth, double fill)
    : rows_(rows), cols_(cols), depth_(depth),
      values_(static_cast<std::size_t>(rows) * cols * depth, fill) {
  if (rows < 0 || cols < 0 || depth < 0) {
    throw DimensionMismatchError("FeatureMap: negative dimension");
  }
}

cv::Mat FeatureMap::channel(int d) {
  return cv::Mat(rows_, cols_, CV_64F, values_.data() + index(0, 0, d));
}

cv::Mat FeatureMap::channel(int d) const {
  // OpenCV headers are not const-aware; callers of the const overload must not write.
  return cv::Mat(rows_, cols_, CV_64F, const_cast<double*>(values_.data() + index(0, 0, d)));
}

double FeatureMap::squared_norm() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return s;
}

namespace {

constexpr int kOrientations = 9;
constexpr double kNormEps = 1e-4;

// Per-pixel gradient of the RGB channel with the largest magnitude.
// Central differences inside, one-sided differences on the border.
void dominant_gradient(const cv::Mat& rgb, int rows, int cols, std::vector<double>& gx,
                       std::vector<double>& gy) {
  gx.assign(static_cast<std::size_t>(rows) * cols, 0.0);
  gy.assign(static_cast<std::size_t>(rows) * cols, 0.0);
  for (int y = 0; y < rows; ++y) {
    const int y0 = std::max(0, y - 1);
    const int y1 = std::min(rgb.rows - 1, y + 1);
    const auto* up = rgb.ptr<cv::Vec3b>(y0);
    const auto* mid = rgb.ptr<cv::Vec3b>(y);
    const auto* down = rgb.ptr<cv::Vec3b>(y1);
    const double sy = (y1 - y0) == 2 ? 0.5 : 1.0;
    for (int x = 0; x < cols; ++x) {
      const int x0 = std::max(0, x - 1);
      const int x1 = std::min(rgb.cols - 1, x + 1);
      const double sx = (x1 - x0) == 2 ? 0.5 : 1.0;
      double best = -1.0;
      double bx = 0.0;
      double by = 0.0;
      for (int c = 0; c < 3; ++c) {
        const double dx = (static_cast<double>(mid[x1][c]) - mid[x0][c]) * sx;
        const double dy = (static_cast<double>(down[x][c]) - up[x][c]) * sy;
        const double m = dx * dx + dy * dy;
        if (m > best) {
          best = m;
          bx = dx;
          by = dy;
        }
      }
      gx[static_cast<std::size_t>(y) * cols + x] = bx;
      gy[static_cast<std::size_t>(y) * cols + x] = by;
    }
  }
}

void require_cells(const ImagePatch& patch, int cell_size, const char* what) {
  if (cell_size < 1) throw DegenerateInputError(std::string(what) + ": cell size must be >= 1");
  if (patch.pixels.type() != CV_8UC3) {
    throw DegenerateInputError(std::string(what) + ": patch must be 8-bit RGB");
  }
  if (patch.height() < cell_size || patch.width() < cell_size) {
    throw DegenerateInputError(std::string(what) + ": patch smaller than one cell");
  }
}

}  // namespace

FeatureMap extract_hog(const ImagePatch& patch, int cell_size) {
  require_cells(patch, cell_size, "extract_hog");
  const int cell_rows = patch.height() / cell_size;
  const int cell_cols = patch.width() / cell_size;
  const int rows = cell_rows * cell_size;
  const int cols = cell_cols * cell_size;

  std::vector<double> gx;
  std::vector<double> gy;
  dominant_gradient(patch.pixels, rows, cols, gx, gy);

  std::array<double, kOrientations> ux{};
  std::array<double, kOrientations> uy{};
  for (int o = 0; o < kOrientations; ++o) {
    ux[o] = std::cos(o * std::numbers::pi / kOrientations);
    uy[o] = std::sin(o * std::numbers::pi / kOrientations);
  }

  // 18-bin contrast-sensitive histogram per cell, bilinear in space.
  const std::size_t ncells = static_cast<std::size_t>(cell_rows) * cell_cols;
  std::vector<double> hist(ncells * 2 * kOrientations, 0.0);
  auto bin = [&](int cy, int cx, int o) -> double& {
    return hist[(static_cast<std::size_t>(cy) * cell_cols + cx) * 2 * kOrientations + o];
  };
  for (int y = 0; y < rows; ++y) {
    const double yp = (y + 0.5) / cell_size - 0.5;
    const int iy = static_cast<int>(std::floor(yp));
    const double vy0 = yp - iy;
    const double vy1 = 1.0 - vy0;
    for (int x = 0; x < cols; ++x) {
      const double dx = gx[static_cast<std::size_t>(y) * cols + x];
      const double dy = gy[static_cast<std::size_t>(y) * cols + x];
      const double mag = std::sqrt(dx * dx + dy * dy);
      if (mag == 0.0) continue;

      double best_dot = 0.0;
      int best_o = 0;
      for (int o = 0; o < kOrientations; ++o) {
        const double dot = ux[o] * dx + uy[o] * dy;
        if (dot > best_dot) {
          best_dot = dot;
          best_o = o;
        } else if (-dot > best_dot) {
          best_dot = -dot;
          best_o = o + kOrientations;
        }
      }

      const double xp = (x + 0.5) / cell_size - 0.5;
      const int ix = static_cast<int>(std::floor(xp));
      const double vx0 = xp - ix;
      const double vx1 = 1.0 - vx0;
      if (iy >= 0 && ix >= 0) bin(iy, ix, best_o) += vy1 * vx1 * mag;
      if (iy >= 0 && ix + 1 < cell_cols) bin(iy, ix + 1, best_o) += vy1 * vx0 * mag;
      if (iy + 1 < cell_rows && ix >= 0) bin(iy + 1, ix, best_o) += vy0 * vx1 * mag;
      if (iy + 1 < cell_rows && ix + 1 < cell_cols) bin(iy + 1, ix + 1, best_o) += vy0 * vx0 * mag;
    }
  }

  // Contrast-insensitive energy per cell.
  std::vector<double> energy(ncells, 0.0);
  for (int cy = 0; cy < cell_rows; ++cy) {
    for (int cx = 0; cx < cell_cols; ++cx) {
      double e = 0.0;
      for (int o = 0; o < kOrientations; ++o) {
        const double s = bin(cy, cx, o) + bin(cy, cx, o + kOrientations);
        e += s * s;
      }
      energy[static_cast<std::size_t>(cy) * cell_cols + cx] = e;
    }
  }
  auto energy_at = [&](int cy, int cx) {
    cy = std::clamp(cy, 0, cell_rows - 1);
    cx = std::clamp(cx, 0, cell_cols - 1);
    return energy[static_cast<std::size_t>(cy) * cell_cols + cx];
  };

  FeatureMap out(cell_rows, cell_cols, kHogChannels);
  for (int cy = 0; cy < cell_rows; ++cy) {
    for (int cx = 0; cx < cell_cols; ++cx) {
      // Four 2x2 blocks containing this cell; out-of-range neighbours are clamped.
      std::array<double, 4> norms{};
      int k = 0;
      for (int oy : {-1, 0}) {
        for (int ox : {-1, 0}) {
          const double e = energy_at(cy + oy, cx + ox) + energy_at(cy + oy, cx + ox + 1) +
                           energy_at(cy + oy + 1, cx + ox) + energy_at(cy + oy + 1, cx + ox + 1);
          norms[k++] = 1.0 / std::sqrt(e + kNormEps);
        }
      }

      std::array<double, 4> texture{};
      for (int o = 0; o < 2 * kOrientations; ++o) {
        const double h = bin(cy, cx, o);
        double sum = 0.0;
        for (int b = 0; b < 4; ++b) {
          const double v = std::min(h * norms[b], kHogTruncation);
          sum += v;
          texture[b] += v;
        }
        out.at(cy, cx, o) = 0.5 * sum;
      }
      for (int o = 0; o < kOrientations; ++o) {
        const double h = bin(cy, cx, o) + bin(cy, cx, o + kOrientations);
        double sum = 0.0;
        for (int b = 0; b < 4; ++b) sum += std::min(h * norms[b], kHogTruncation);
        out.at(cy, cx, 2 * kOrientations + o) = 0.5 * sum;
      }
      for (int b = 0; b < 4; ++b) {
        out.at(cy, cx, 3 * kOrientations + b) = 0.2357 * texture[b];
      }
    }
  }
  return out;
}

FeatureMap extract_color_names(const ImagePatch& patch, const ColorNameTable& table,
                               int cell_size) {
  require_cells(patch, cell_size, "extract_color_names");
  const int cell_rows = patch.height() / cell_size;
  const int cell_cols = patch.width() / cell_size;
  FeatureMap out(cell_rows, cell_cols, ColorNameTable::kNames);
  const double inv_area = 1.0 / (static_cast<double>(cell_size) * cell_size);
  for (int y = 0; y < cell_rows * cell_size; ++y) {
    const auto* px = patch.pixels.ptr<cv::Vec3b>(y);
    const int cy = y / cell_size;
    for (int x = 0; x < cell_cols * cell_size; ++x) {
      const auto probs = table.lookup(px[x][0], px[x][1], px[x][2]);
      const int cx = x / cell_size;
      for (int k = 0; k < ColorNameTable::kNames; ++k) out.at(cy, cx, k) += probs[k];
    }
  }
  for (double& v : out.values()) v *= inv_area;
  return out;
}

FeatureMap build_handcrafted_layer(const ImagePatch& patch, const ColorNameTable& table,
                                   int cell_size) {
  const FeatureMap hog = extract_hog(patch, cell_size);
  const FeatureMap cn = extract_color_names(patch, table, cell_size);
  FeatureMap out(hog.rows(), hog.cols(), kHandcraftedChannels);
  auto dst = out.values();
  const auto h = hog.values();
  const auto c = cn.values();
  std::copy(h.begin(), h.end(), dst.begin());
  std::copy(c.begin(), c.end(), dst.begin() + static_cast<std::ptrdiff_t>(h.size()));
  return out;
}

std::vector<double> extract_detector_features(const ImagePatch& patch) {
  if (patch.pixels.empty() || patch.pixels.type() != CV_8UC3) {
    throw DegenerateInputError("extract_detector_features: empty or non-RGB patch");
  }
  ImagePatch window{resize_bilinear(patch.pixels, {kDetectorWindow, kDetectorWindow}),
                    patch.origin};
  constexpr int cells = kDetectorWindow / kDetectorCell;
  constexpr double inv_area = 1.0 / (kDetectorCell * kDetectorCell);

  std::vector<double> out;
  out.reserve(kDetectorFeatureLength);
  const FeatureMap hog = extract_hog(window, kDetectorCell);
  out.insert(out.end(), hog.values().begin(), hog.values().end());

  // LUV scaled to roughly [0, 1] per channel.
  cv::Mat rgbf;
  window.pixels.convertTo(rgbf, CV_32FC3, 1.0 / 255.0);
  cv::Mat luv;
  cv::cvtColor(rgbf, luv, cv::COLOR_RGB2Luv);
  const std::array<double, 3> offset{0.0, 134.0, 140.0};
  const std::array<double, 3> scale{1.0 / 100.0, 1.0 / 354.0, 1.0 / 262.0};
  for (int c = 0; c < 3; ++c) {
    for (int cy = 0; cy < cells; ++cy) {
      for (int cx = 0; cx < cells; ++cx) {
        double sum = 0.0;
        for (int y = cy * kDetectorCell; y < (cy + 1) * kDetectorCell; ++y) {
          for (int x = cx * kDetectorCell; x < (cx + 1) * kDetectorCell; ++x) {
            sum += luv.at<cv::Vec3f>(y, x)[c];
          }
        }
        out.push_back((sum * inv_area + offset[c]) * scale[c]);
      }
    }
  }

  // Gradient magnitude of the gray image, normalized by its local 5x5 mean.
  cv::Mat gray(kDetectorWindow, kDetectorWindow, CV_64F);
  for (int y = 0; y < kDetectorWindow; ++y) {
    for (int x = 0; x < kDetectorWindow; ++x) {
      const cv::Vec3b p = window.pixels.at<cv::Vec3b>(y, x);
      gray.at<double>(y, x) = (p[0] + p[1] + p[2]) / (3.0 * 255.0);
    }
  }
  cv::Mat mag(kDetectorWindow, kDetectorWindow, CV_64F);
  for (int y = 0; y < kDetectorWindow; ++y) {
    const int y0 = std::max(0, y - 1);
    const int y1 = std::min(kDetectorWindow - 1, y + 1);
    for (int x = 0; x < kDetectorWindow; ++x) {
      const int x0 = std::max(0, x - 1);
      const int x1 = std::min(kDetectorWindow - 1, x + 1);
      const double dx = (gray.at<double>(y, x1) - gray.at<double>(y, x0)) / (x1 - x0);
      const double dy = (gray.at<double>(y1, x) - gray.at<double>(y0, x)) / (y1 - y0);
      mag.at<double>(y, x) = std::sqrt(dx * dx + dy * dy);
    }
  }
  cv::Mat local;
  cv::boxFilter(mag, local, CV_64F, {5, 5}, {-1, -1}, true, cv::BORDER_REPLICATE);
  for (int cy = 0; cy < cells; ++cy) {
    for (int cx = 0; cx < cells; ++cx) {
      double sum = 0.0;
      for (int y = cy * kDetectorCell; y < (cy + 1) * kDetectorCell; ++y) {
        for (int x = cx * kDetectorCell; x < (cx + 1) * kDetectorCell; ++x) {
          sum += mag.at<double>(y, x) / (local.at<double>(y, x) + 0.005);
        }
      }
      out.push_back(sum * inv_area);
    }
  }
  return out;
}

std::vector<double> hann_window(int n) {
  if (n < 2) return std::vector<double>(std::max(n, 0), 1.0);
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) {
    w[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * i / (n - 1)));
  }
  // Exact symmetry regardless of cos rounding.
  for (int i = 0; i < n / 2; ++i) w[n - 1 - i] = w[i];
  return w;
}

FeatureMap apply_cosine_window(const FeatureMap& layer) {
  const auto wr = hann_window(layer.rows());
  const auto wc = hann_window(layer.cols());
  FeatureMap out = layer;
  for (int d = 0; d < layer.depth(); ++d) {
    for (int m = 0; m < layer.rows(); ++m) {
      for (int n = 0; n < layer.cols(); ++n) out.at(m, n, d) *= wr[m] * wc[n];
    }
  }
  return out;
}

FeatureMap resize_layer(const FeatureMap& layer, cv::Size target) {
  if (target.width < 1 || target.height < 1) {
    throw DegenerateInputError("resize_layer: target must be at least 1x1");
  }
  if (layer.spatial_size() == target) return layer;
  FeatureMap out(target.height, target.width, layer.depth());
  const double sy = static_cast<double>(layer.rows()) / target.height;
  const double sx = static_cast<double>(layer.cols()) / target.width;

  struct Tap {
    int i0, i1;
    double w0, w1;
  };
  auto taps = [](int out_len, int in_len, double scale) {
    std::vector<Tap> t(out_len);
    for (int i = 0; i < out_len; ++i) {
      double src = (i + 0.5) * scale - 0.5;
      src = std::clamp(src, 0.0, static_cast<double>(in_len - 1));
      const int i0 = static_cast<int>(std::floor(src));
      const int i1 = std::min(i0 + 1, in_len - 1);
      const double f = src - i0;
      t[i] = {i0, i1, 1.0 - f, f};
    }
    return t;
  };
  const auto ty = taps(target.height, layer.rows(), sy);
  const auto tx = taps(target.width, layer.cols(), sx);
  for (int d = 0; d < layer.depth(); ++d) {
    for (int m = 0; m < target.height; ++m) {
      const Tap& a = ty[m];
      for (int n = 0; n < target.width; ++n) {
        const Tap& b = tx[n];
        const double top = a.w0 * layer.at(a.i0, b.i0, d) * b.w0 +
                           a.w0 * layer.at(a.i0, b.i1, d) * b.w1;
        const double bottom = a.w1 * layer.at(a.i1, b.i0, d) * b.w0 +
                              a.w1 * layer.at(a.i1, b.i1, d) * b.w1;
        out.at(m, n, d) = top + bottom;
      }
    }
  }
  return out;
}

FeatureMap prepare_for_filter(const FeatureMap& layer) {
  FeatureMap centred = layer;
  const double count = static_cast<double>(layer.rows()) * layer.cols();
  for (int d = 0; d < layer.depth(); ++d) {
    cv::Mat ch = centred.channel(d);
    const double mean = cv::sum(ch)[0] / count;
    ch -= mean;
  }
  FeatureMap out = apply_cosine_window(centred);
  const double norm = std::sqrt(out.squared_norm());
  if (norm > 0.0) {
    for (double& v : out.values()) v /= norm;
  }
  return out;
}

}  // namespace lct
