#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "lctrack/image.hpp"
#include "lctrack/tracker.hpp"

namespace lct {

// Benchmark-style sequence directory: img/0001.jpg (or .png), ... plus an optional
// groundtruth_rect.txt with one x,y,w,h row per frame.
struct Sequence {
  std::string directory;
  std::vector<std::string> frames;        // sorted by frame number
  std::vector<BoundingBox> ground_truth;  // empty when the file is absent
};

// Throws ResourceError when img/ is missing or holds no frames.
Sequence open_sequence(const std::string& directory);

// "x,y,w,h" with comma, tab or space separators. Throws InputError.
BoundingBox parse_box(const std::string& text);

// One box per non-empty line. Throws ResourceError / FormatError.
std::vector<BoundingBox> read_boxes(const std::string& path);
void write_boxes(const std::string& path, std::span<const BoundingBox> boxes);

// results.csv: header `frame,x,y,w,h,response,redetected,scale` then one row per frame.
void write_results_csv(std::ostream& out, std::span<const FrameDiagnostics> rows);
// Boxes from a results.csv, or from a plain box file when there is no header.
std::vector<BoundingBox> read_result_boxes(const std::string& path);

}  // namespace lct
