#pragma once

#include <string>
#include <vector>

#include <opencv2/core.hpp>

#include "lctrack/features.hpp"

namespace lct {

// Per-frame deep-feature interchange file (.mlhf), little-endian:
//   "MLHF" | u32 version = 1 | u32 layer count L |
//   L x ( u32 M | u32 N | u32 D | M*N*D float32 in (m, n, d) order, d fastest )
inline constexpr std::uint32_t kMlhfVersion = 1;

std::vector<FeatureMap> read_mlhf(const std::string& path);
void write_mlhf(const std::string& path, const std::vector<FeatureMap>& layers);

// `<frame_index:08d>.mlhf` inside `directory`.
std::string mlhf_path(const std::string& directory, int frame_index);

// Parses a file and bilinearly resizes every layer to `expected_spatial`.
// Layer ids are assigned 1..L in file order with unit weight.
std::vector<FeatureLayer> load_deep_layers(const std::string& path, cv::Size expected_spatial);

}  // namespace lct
