#include <sstream>

#include <gtest/gtest.h>

#include "lctrack/config.hpp"
#include "lctrack/errors.hpp"

namespace lct {
namespace {

TEST(Config, DefaultsMatchPublishedSettings) {
  const TrackerConfig c;
  EXPECT_EQ(c.correlation.lambda, 1e-4);
  EXPECT_EQ(c.correlation.sigma_label, 0.1);
  EXPECT_EQ(c.correlation.eta, 0.01);
  EXPECT_EQ(c.redetector.svm.C, 2.0);
  EXPECT_EQ(c.redetect_threshold, 0.15);
  EXPECT_EQ(c.detector_threshold, 0.40);
  EXPECT_EQ(c.redetector.positive_iou, 0.9);
  EXPECT_EQ(c.redetector.negative_iou, 0.3);
  EXPECT_EQ(c.scale.levels, 31);
  EXPECT_EQ(c.scale.step, 1.04);
  EXPECT_EQ(c.phd.clutter.lambda_t, 4.0);
  EXPECT_EQ(c.phd.reduction.merge_distance, 4.0);
  EXPECT_EQ(c.phd.reduction.prune_threshold, 1e-5);
  EXPECT_EQ(c.padding, 2.8);
  EXPECT_EQ(c.seed, 42u);
}

TEST(Config, ParsesValuesAndComments) {
  std::istringstream in(
      "# tuning\n"
      "lambda = 0.001\n"
      "\n"
      "redetect_threshold=0.2   # inline\n"
      "enable_scale = false\n"
      "kernel = gaussian\n"
      "seed = 7\n"
      "deep_weights = 0.5, 0.25, 1\n");
  const TrackerConfig c = parse_config(in);
  EXPECT_EQ(c.correlation.lambda, 0.001);
  EXPECT_EQ(c.redetect_threshold, 0.2);
  EXPECT_FALSE(c.enable_scale);
  EXPECT_EQ(c.correlation.kernel.type, KernelType::kGaussian);
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.deep_weights, (std::vector<double>{0.5, 0.25, 1.0}));
}

TEST(Config, WriteThenParseRoundTrips) {
  TrackerConfig c;
  c.correlation.lambda = 3.25e-5;
  c.scale.damping = 0.45;
  c.redetector.proposals = 7;
  c.enable_redetection = false;
  std::stringstream buf;
  write_config(buf, c);
  const TrackerConfig back = parse_config(buf);
  EXPECT_EQ(back.correlation.lambda, c.correlation.lambda);
  EXPECT_EQ(back.scale.damping, c.scale.damping);
  EXPECT_EQ(back.redetector.proposals, 7);
  EXPECT_FALSE(back.enable_redetection);
  std::stringstream again;
  write_config(again, back);
  EXPECT_EQ(again.str(), buf.str());
}

TEST(Config, EveryKeyIsWritten) {
  std::stringstream buf;
  write_config(buf, TrackerConfig{});
  const std::string text = buf.str();
  for (const std::string& k : config_keys()) {
    EXPECT_NE(text.find(k + " = "), std::string::npos) << k;
  }
}

TEST(Config, ErrorsNameTheLine) {
  std::istringstream unknown("lambda = 1e-4\nbogus = 1\n");
  try {
    parse_config(unknown);
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("bogus"), std::string::npos);
  }
  std::istringstream bad_number("eta = fast\n");
  EXPECT_THROW(parse_config(bad_number), InputError);
  std::istringstream no_equals("eta 0.1\n");
  EXPECT_THROW(parse_config(no_equals), InputError);
  EXPECT_THROW(load_config("/nonexistent/lct.cfg"), ResourceError);
}

}  // namespace
}  // namespace lct
