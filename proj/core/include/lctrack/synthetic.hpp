#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <opencv2/core.hpp>

#include "lctrack/image.hpp"

namespace lct {

enum class Scenario { kTranslate, kZoom, kOcclude };

// "translate", "zoom" or "occlude"; anything else raises InputError.
Scenario parse_scenario(const std::string& name);
const char* scenario_name(Scenario scenario);

// Textured square over a static smooth-noise background.
//   translate: 32x32 target moving 3 px/frame to the right, 100 frames by default.
//   zoom:      target grows 1.02x per frame about a fixed centre, 31 frames by default
//              (30 zoom steps).
//   occlude:   target moving 1.5 px/frame; during frames 40-60 (1-based) the whole
//              frame is replaced by fresh per-frame noise.
struct SyntheticParams {
  Scenario scenario = Scenario::kTranslate;
  int frames = 0;  // 0 selects the scenario default
  std::uint64_t seed = 42;
};

struct SyntheticSequence {
  std::vector<cv::Mat> frames;  // RGB, CV_8UC3
  std::vector<BoundingBox> ground_truth;
  int occlusion_first = 0;  // 1-based, 0 when there is no occlusion
  int occlusion_last = 0;
};

int default_frame_count(Scenario scenario);
SyntheticSequence make_synthetic(const SyntheticParams& params);

// Writes img/0001.png ... and groundtruth_rect.txt under `directory`.
void save_sequence(const std::string& directory, const SyntheticSequence& sequence);

}  // namespace lct
