#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "lctrack/errors.hpp"
#include "lctrack/sequence_io.hpp"

namespace lct {
namespace {

namespace fs = std::filesystem;

fs::path fresh_dir(const char* name) {
  const fs::path p = fs::path(::testing::TempDir()) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

TEST(ParseBox, AcceptsCommonSeparators) {
  const BoundingBox expected{120, 80, 32, 48};
  EXPECT_EQ(parse_box("120,80,32,48"), expected);
  EXPECT_EQ(parse_box("120\t80\t32\t48"), expected);
  EXPECT_EQ(parse_box("120 80 32 48"), expected);
  EXPECT_EQ(parse_box("120, 80, 32, 48\r"), expected);
  EXPECT_EQ(parse_box("1.5,2.25,3,4"), (BoundingBox{1.5, 2.25, 3, 4}));
}

TEST(ParseBox, RejectsMalformed) {
  EXPECT_THROW(parse_box("1,2,3"), InputError);
  EXPECT_THROW(parse_box("1,2,three,4"), InputError);
  EXPECT_THROW(parse_box(""), InputError);
}

TEST(Boxes, WriteReadRoundTrip) {
  const fs::path dir = fresh_dir("boxes");
  const std::vector<BoundingBox> boxes{{1, 2, 3, 4}, {10.5, 20.25, 30, 40}};
  write_boxes((dir / "gt.txt").string(), boxes);
  EXPECT_EQ(read_boxes((dir / "gt.txt").string()), boxes);
  EXPECT_EQ(read_result_boxes((dir / "gt.txt").string()), boxes);
  EXPECT_THROW(read_boxes((dir / "missing.txt").string()), ResourceError);
  std::ofstream(dir / "bad.txt") << "1,2,3,4\nx,y\n";
  EXPECT_THROW(read_boxes((dir / "bad.txt").string()), FormatError);
}

TEST(Results, CsvHasHeaderAndRows) {
  std::vector<FrameDiagnostics> rows(2);
  rows[0].frame_index = 1;
  rows[0].box = {1, 2, 3, 4};
  rows[0].response = 1.0;
  rows[1].frame_index = 2;
  rows[1].box = {5, 6, 7, 8};
  rows[1].response = 0.125;
  rows[1].redetected = true;
  rows[1].scale = 1.04;
  std::ostringstream out;
  write_results_csv(out, rows);
  EXPECT_EQ(out.str(),
            "frame,x,y,w,h,response,redetected,scale\n"
            "1,1.000000,2.000000,3.000000,4.000000,1.000000,0,1.000000\n"
            "2,5.000000,6.000000,7.000000,8.000000,0.125000,1,1.040000\n");

  const fs::path dir = fresh_dir("results");
  std::ofstream((dir / "results.csv").string()) << out.str();
  const auto boxes = read_result_boxes((dir / "results.csv").string());
  ASSERT_EQ(boxes.size(), 2u);
  EXPECT_EQ(boxes[1], (BoundingBox{5, 6, 7, 8}));
}

TEST(OpenSequence, SortsFramesNumerically) {
  const fs::path dir = fresh_dir("seq");
  fs::create_directories(dir / "img");
  for (const char* name : {"0010.png", "0002.png", "0001.jpg", "notes.txt"}) {
    std::ofstream(dir / "img" / name) << "x";
  }
  std::ofstream(dir / "groundtruth_rect.txt") << "1,2,3,4\n5\t6\t7\t8\n";
  const Sequence seq = open_sequence(dir.string());
  ASSERT_EQ(seq.frames.size(), 3u);
  EXPECT_EQ(fs::path(seq.frames[0]).filename(), "0001.jpg");
  EXPECT_EQ(fs::path(seq.frames[2]).filename(), "0010.png");
  ASSERT_EQ(seq.ground_truth.size(), 2u);
}

TEST(OpenSequence, MissingImageDirectoryIsResourceError) {
  const fs::path dir = fresh_dir("noimg");
  EXPECT_THROW(open_sequence(dir.string()), ResourceError);
  fs::create_directories(dir / "img");
  EXPECT_THROW(open_sequence(dir.string()), ResourceError);
}

}  // namespace
}  // namespace lct
