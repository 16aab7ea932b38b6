#include "lctrack/color_names.hpp"

#include <bit>
#include <cmath>
#include <fstream>

#include <opencv2/imgproc.hpp>

#include "lctrack/errors.hpp"

namespace lct {

static_assert(std::endian::native == std::endian::little,
              "color-name tables are stored little-endian");

namespace {

constexpr double kRowSumTolerance = 1e-3;

struct Prototype {
  unsigned char r, g, b;
};

// Focal sRGB colors, same order as names().
constexpr std::array<Prototype, ColorNameTable::kNames> kPrototypes{{
    {0, 0, 0},        // black
    {30, 60, 220},    // blue
    {130, 80, 40},    // brown
    {128, 128, 128},  // grey
    {40, 160, 50},    // green
    {255, 140, 0},    // orange
    {255, 150, 190},  // pink
    {130, 50, 160},   // purple
    {220, 20, 30},    // red
    {255, 255, 255},  // white
    {250, 230, 40},   // yellow
}};

// Softmax temperature in CIELAB units.
constexpr double kLabBandwidth = 20.0;

void validate_rows(const std::vector<float>& entries, const std::string& origin) {
  for (int r = 0; r < ColorNameTable::kRows; ++r) {
    double sum = 0.0;
    for (int k = 0; k < ColorNameTable::kNames; ++k) {
      const float v = entries[static_cast<std::size_t>(r) * ColorNameTable::kNames + k];
      if (!std::isfinite(v) || v < 0.0f) {
        throw ResourceError("corrupt color-name table (" + origin + "): bad value in row " +
                            std::to_string(r));
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      throw ResourceError("corrupt color-name table (" + origin + "): row " + std::to_string(r) +
                          " does not sum to 1");
    }
  }
}

}  // namespace

const std::array<const char*, ColorNameTable::kNames>& ColorNameTable::names() {
  static const std::array<const char*, kNames> kNamesList{
      "black", "blue", "brown", "grey", "green", "orange",
      "pink",  "purple", "red", "white", "yellow"};
  return kNamesList;
}

ColorNameTable ColorNameTable::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ResourceError("cannot open color-name table: " + path);
  in.seekg(0, std::ios::end);
  const auto bytes = static_cast<std::size_t>(in.tellg());
  const std::size_t expected = static_cast<std::size_t>(kRows) * kNames * sizeof(float);
  if (bytes != expected) {
    throw ResourceError("color-name table " + path + " has " + std::to_string(bytes) +
                        " bytes, expected " + std::to_string(expected));
  }
  in.seekg(0);
  std::vector<float> entries(static_cast<std::size_t>(kRows) * kNames);
  in.read(reinterpret_cast<char*>(entries.data()), static_cast<std::streamsize>(expected));
  if (!in) throw ResourceError("short read on color-name table: " + path);
  validate_rows(entries, path);
  return ColorNameTable(std::move(entries));
}

ColorNameTable ColorNameTable::prototype() {
  // Bin centres and prototypes converted to CIELAB in one pass.
  cv::Mat rgb(1, kRows + kNames, CV_32FC3);
  for (int r = 0; r < 32; ++r) {
    for (int g = 0; g < 32; ++g) {
      for (int b = 0; b < 32; ++b) {
        rgb.at<cv::Vec3f>(0, r * 1024 + g * 32 + b) =
            cv::Vec3f((r * 8 + 4) / 255.0f, (g * 8 + 4) / 255.0f, (b * 8 + 4) / 255.0f);
      }
    }
  }
  for (int k = 0; k < kNames; ++k) {
    rgb.at<cv::Vec3f>(0, kRows + k) = cv::Vec3f(kPrototypes[k].r / 255.0f,
                                                kPrototypes[k].g / 255.0f,
                                                kPrototypes[k].b / 255.0f);
  }
  cv::Mat lab;
  cv::cvtColor(rgb, lab, cv::COLOR_RGB2Lab);

  std::vector<float> entries(static_cast<std::size_t>(kRows) * kNames);
  std::array<double, kNames> logits{};
  for (int i = 0; i < kRows; ++i) {
    const cv::Vec3f c = lab.at<cv::Vec3f>(0, i);
    double best = -1e300;
    for (int k = 0; k < kNames; ++k) {
      const cv::Vec3f p = lab.at<cv::Vec3f>(0, kRows + k);
      const double d2 = (c[0] - p[0]) * (c[0] - p[0]) + (c[1] - p[1]) * (c[1] - p[1]) +
                        (c[2] - p[2]) * (c[2] - p[2]);
      logits[k] = -d2 / (2.0 * kLabBandwidth * kLabBandwidth);
      best = std::max(best, logits[k]);
    }
    double sum = 0.0;
    for (double& l : logits) {
      l = std::exp(l - best);
      sum += l;
    }
    for (int k = 0; k < kNames; ++k) {
      entries[static_cast<std::size_t>(i) * kNames + k] = static_cast<float>(logits[k] / sum);
    }
  }
  return ColorNameTable(std::move(entries));
}

void ColorNameTable::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ResourceError("cannot write color-name table: " + path);
  out.write(reinterpret_cast<const char*>(entries_.data()),
            static_cast<std::streamsize>(entries_.size() * sizeof(float)));
  if (!out) throw ResourceError("short write on color-name table: " + path);
}

}  // namespace lct
