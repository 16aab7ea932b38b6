#include "lctrack/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include <opencv2/imgproc.hpp>

#include "lctrack/errors.hpp"
#include "lctrack/sequence_io.hpp"

namespace lct {

namespace {

constexpr int kTextureSide = 256;
constexpr int kTextureBlock = 32;
constexpr int kOcclusionFirst = 40;
constexpr int kOcclusionLast = 60;

cv::Mat uniform_noise(cv::Size size, std::mt19937_64& rng, int lo, int hi) {
  std::uniform_int_distribution<int> dist(lo, hi);
  cv::Mat out(size, CV_8UC3);
  for (int y = 0; y < size.height; ++y) {
    auto* row = out.ptr<cv::Vec3b>(y);
    for (int x = 0; x < size.width; ++x) {
      row[x] = cv::Vec3b(static_cast<uchar>(dist(rng)), static_cast<uchar>(dist(rng)),
                         static_cast<uchar>(dist(rng)));
    }
  }
  return out;
}

// Low-contrast smooth clutter.
cv::Mat background(cv::Size size, std::mt19937_64& rng) {
  cv::Mat noise = uniform_noise(size, rng, 60, 180);
  cv::GaussianBlur(noise, noise, cv::Size(0, 0), 3.0);
  return noise;
}

// Saturated random color blocks with a dark border.
cv::Mat target_texture(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dist(0, 255);
  cv::Mat tex(kTextureSide, kTextureSide, CV_8UC3);
  for (int by = 0; by < kTextureSide; by += kTextureBlock) {
    for (int bx = 0; bx < kTextureSide; bx += kTextureBlock) {
      const cv::Scalar color(dist(rng), dist(rng), dist(rng));
      cv::rectangle(tex, cv::Rect(bx, by, kTextureBlock, kTextureBlock), color, cv::FILLED);
    }
  }
  cv::rectangle(tex, cv::Rect(0, 0, kTextureSide, kTextureSide), cv::Scalar(10, 10, 10),
                kTextureSide / 16);
  return tex;
}

// Pastes the texture, resampled to the box size, with sub-pixel placement.
void paste(cv::Mat& frame, const cv::Mat& texture, const BoundingBox& box) {
  const cv::Size coarse(std::max(1, static_cast<int>(std::lround(box.w))),
                        std::max(1, static_cast<int>(std::lround(box.h))));
  cv::Mat resized;
  cv::resize(texture, resized, coarse, 0.0, 0.0, cv::INTER_AREA);
  const double sx = box.w / coarse.width;
  const double sy = box.h / coarse.height;
  const cv::Mat affine = (cv::Mat_<double>(2, 3) << sx, 0.0, box.x + 0.5 * sx - 0.5, 0.0, sy,
                          box.y + 0.5 * sy - 0.5);
  cv::Mat warped, mask;
  cv::warpAffine(resized, warped, affine, frame.size(), cv::INTER_LINEAR, cv::BORDER_CONSTANT);
  const cv::Mat ones(coarse, CV_8U, cv::Scalar(255));
  cv::warpAffine(ones, mask, affine, frame.size(), cv::INTER_NEAREST, cv::BORDER_CONSTANT);
  warped.copyTo(frame, mask);
}

}  // namespace

Scenario parse_scenario(const std::string& name) {
  if (name == "translate") return Scenario::kTranslate;
  if (name == "zoom") return Scenario::kZoom;
  if (name == "occlude") return Scenario::kOcclude;
  throw InputError("unknown scenario '" + name + "' (expected translate, zoom or occlude)");
}

const char* scenario_name(Scenario scenario) {
  switch (scenario) {
    case Scenario::kTranslate: return "translate";
    case Scenario::kZoom: return "zoom";
    case Scenario::kOcclude: return "occlude";
  }
  return "unknown";
}

int default_frame_count(Scenario scenario) {
  switch (scenario) {
    case Scenario::kTranslate: return 100;
    case Scenario::kZoom: return 31;
    case Scenario::kOcclude: return 100;
  }
  return 100;
}

SyntheticSequence make_synthetic(const SyntheticParams& params) {
  const int frames = params.frames > 0 ? params.frames : default_frame_count(params.scenario);
  if (frames < 1) throw InputError("synthetic: frame count must be positive");
  std::mt19937_64 rng(params.seed);

  cv::Size frame_size;
  BoundingBox start;
  double dx = 0.0;
  double growth = 1.0;
  switch (params.scenario) {
    case Scenario::kTranslate:
      frame_size = {400, 240};
      start = {30, 104, 32, 32};
      dx = 3.0;
      break;
    case Scenario::kZoom:
      frame_size = {320, 240};
      start = BoundingBox::from_center(160, 120, 40, 40);
      growth = 1.02;
      break;
    case Scenario::kOcclude:
      frame_size = {320, 240};
      start = {60, 104, 32, 32};
      dx = 1.5;
      break;
  }
  // Keep the whole path inside the frame for long custom runs.
  const double max_x = frame_size.width - start.w;

  const cv::Mat bg = background(frame_size, rng);
  const cv::Mat texture = target_texture(rng);

  SyntheticSequence seq;
  if (params.scenario == Scenario::kOcclude) {
    seq.occlusion_first = kOcclusionFirst;
    seq.occlusion_last = kOcclusionLast;
  }

  for (int k = 0; k < frames; ++k) {
    BoundingBox box = start;
    box.x = std::min(start.x + dx * k, max_x);
    if (growth != 1.0) {
      const double s = std::pow(growth, k);
      box = BoundingBox::from_center(start.cx(), start.cy(), start.w * s, start.h * s);
    }
    cv::Mat frame = bg.clone();
    paste(frame, texture, box);
    const int index = k + 1;
    if (seq.occlusion_first > 0 && index >= seq.occlusion_first && index <= seq.occlusion_last) {
      frame = uniform_noise(frame_size, rng, 0, 255);
    }
    seq.frames.push_back(std::move(frame));
    seq.ground_truth.push_back(box);
  }
  return seq;
}

void save_sequence(const std::string& directory, const SyntheticSequence& sequence) {
  namespace fs = std::filesystem;
  const fs::path img = fs::path(directory) / "img";
  fs::create_directories(img);
  for (std::size_t i = 0; i < sequence.frames.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "%04zu.png", i + 1);
    save_rgb((img / name).string(), sequence.frames[i]);
  }
  write_boxes((fs::path(directory) / "groundtruth_rect.txt").string(), sequence.ground_truth);
}

}  // namespace lct
