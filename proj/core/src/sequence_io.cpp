#include "lctrack/sequence_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "lctrack/errors.hpp"

namespace lct {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',' || ch == '\t' || ch == ' ' || ch == ';' || ch == '\r') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

bool parse_number(const std::string& s, double& out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

Sequence open_sequence(const std::string& directory) {
  const fs::path img = fs::path(directory) / "img";
  if (!fs::is_directory(img)) throw ResourceError("missing image directory " + img.string());
  std::vector<std::pair<long, std::string>> numbered;
  for (const auto& entry : fs::directory_iterator(img)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext != ".jpg" && ext != ".jpeg" && ext != ".png") continue;
    const std::string stem = entry.path().stem().string();
    long index = 0;
    const auto [ptr, ec] = std::from_chars(stem.data(), stem.data() + stem.size(), index);
    if (ec != std::errc() || ptr != stem.data() + stem.size()) continue;
    numbered.emplace_back(index, entry.path().string());
  }
  if (numbered.empty()) throw ResourceError("no numbered frames in " + img.string());
  std::sort(numbered.begin(), numbered.end());

  Sequence seq;
  seq.directory = directory;
  for (auto& [_, path] : numbered) seq.frames.push_back(std::move(path));
  const fs::path gt = fs::path(directory) / "groundtruth_rect.txt";
  if (fs::exists(gt)) seq.ground_truth = read_boxes(gt.string());
  return seq;
}

BoundingBox parse_box(const std::string& text) {
  const auto fields = split_fields(text);
  double v[4];
  if (fields.size() != 4) throw InputError("box '" + text + "' must have four fields x,y,w,h");
  for (int i = 0; i < 4; ++i) {
    if (!parse_number(fields[i], v[i])) throw InputError("box '" + text + "' has a non-numeric field");
  }
  return {v[0], v[1], v[2], v[3]};
}

std::vector<BoundingBox> read_boxes(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ResourceError("cannot open " + path);
  std::vector<BoundingBox> boxes;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (blank(line)) continue;
    try {
      boxes.push_back(parse_box(line));
    } catch (const InputError& e) {
      throw FormatError(path + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  return boxes;
}

void write_boxes(const std::string& path, std::span<const BoundingBox> boxes) {
  std::ofstream out(path);
  if (!out) throw ResourceError("cannot write " + path);
  out << std::setprecision(10);
  for (const BoundingBox& b : boxes) out << b.x << ',' << b.y << ',' << b.w << ',' << b.h << '\n';
}

void write_results_csv(std::ostream& out, std::span<const FrameDiagnostics> rows) {
  out << "frame,x,y,w,h,response,redetected,scale\n";
  out << std::fixed << std::setprecision(6);
  for (const FrameDiagnostics& d : rows) {
    out << d.frame_index << ',' << d.box.x << ',' << d.box.y << ',' << d.box.w << ',' << d.box.h
        << ',' << d.response << ',' << (d.redetected ? 1 : 0) << ',' << d.scale << '\n';
  }
}

std::vector<BoundingBox> read_result_boxes(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ResourceError("cannot open " + path);
  std::string line;
  std::vector<BoundingBox> boxes;
  bool table = false;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (blank(line)) continue;
    if (number == 1 && line.rfind("frame", 0) == 0) {
      table = true;
      continue;
    }
    if (!table) {
      try {
        boxes.push_back(parse_box(line));
      } catch (const InputError& e) {
        throw FormatError(path + ":" + std::to_string(number) + ": " + e.what());
      }
      continue;
    }
    const auto fields = split_fields(line);
    double v[4];
    bool ok = fields.size() >= 5;
    for (int i = 0; ok && i < 4; ++i) ok = parse_number(fields[i + 1], v[i]);
    if (!ok) throw FormatError(path + ":" + std::to_string(number) + ": malformed results row");
    boxes.push_back({v[0], v[1], v[2], v[3]});
  }
  return boxes;
}

}  // namespace lct
