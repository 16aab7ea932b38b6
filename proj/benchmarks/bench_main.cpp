#include <random>

#include <benchmark/benchmark.h>

#include "lctrack/correlation_filter.hpp"
#include "lctrack/features.hpp"
#include "lctrack/incremental_svm.hpp"
#include "lctrack/redetector.hpp"
#include "lctrack/scale_estimator.hpp"
#include "lctrack/synthetic.hpp"
#include "lctrack/tracker.hpp"

namespace {

using namespace lct;

ImagePatch noise_patch(int side) {
  cv::Mat px(side, side, CV_8UC3);
  cv::RNG rng(1);
  rng.fill(px, cv::RNG::UNIFORM, 0, 256);
  return {px, {0, 0}};
}

void BM_Hog(benchmark::State& state) {
  const ImagePatch p = noise_patch(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(extract_hog(p, 4));
}
BENCHMARK(BM_Hog)->Arg(64)->Arg(128)->Arg(256);

void BM_HandcraftedLayer(benchmark::State& state) {
  const ColorNameTable table = ColorNameTable::prototype();
  const ImagePatch p = noise_patch(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_handcrafted_layer(p, table, 4));
}
BENCHMARK(BM_HandcraftedLayer)->Arg(88)->Arg(176);

void BM_Detect(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const ColorNameTable table = ColorNameTable::prototype();
  const FeatureMap x = prepare_for_filter(build_handcrafted_layer(noise_patch(side * 4), table, 4));
  const FeatureStack stack{{FeatureLayer{x, 1, 1.0}}};
  const CorrelationModel model = train_model(stack, {});
  for (auto _ : state) benchmark::DoNotOptimize(detect(model, stack));
}
BENCHMARK(BM_Detect)->Arg(22)->Arg(44);

void BM_TrainAndUpdate(benchmark::State& state) {
  const ColorNameTable table = ColorNameTable::prototype();
  const FeatureMap x = prepare_for_filter(build_handcrafted_layer(noise_patch(88), table, 4));
  const FeatureStack stack{{FeatureLayer{x, 1, 1.0}}};
  const CorrelationModel model = train_model(stack, {});
  for (auto _ : state) benchmark::DoNotOptimize(update_model(model, stack));
}
BENCHMARK(BM_TrainAndUpdate);

void BM_SvmScore(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> normal;
  svm::SvmModel model;
  std::vector<double> v(kDetectorFeatureLength);
  for (int i = 0; i < state.range(0); ++i) {
    for (double& x : v) x = normal(rng) / 40.0;
    model.increment(v, i % 2 == 0 ? 1 : -1);
  }
  for (double& x : v) x = normal(rng) / 40.0;
  for (auto _ : state) benchmark::DoNotOptimize(model.score(v));
}
BENCHMARK(BM_SvmScore)->Arg(36)->Arg(200);

void BM_Propose(benchmark::State& state) {
  const SyntheticSequence seq = make_synthetic({Scenario::kTranslate, 2, 3});
  svm::SvmModel model;
  std::mt19937_64 rng(4);
  train_detector(model, seq.frames[0], seq.ground_truth[0], rng);
  const BoundingBox& b = seq.ground_truth[1];
  for (auto _ : state) {
    benchmark::DoNotOptimize(propose(model, seq.frames[1], {b.cx(), b.cy()}, {b.w, b.h}, 5));
  }
}
BENCHMARK(BM_Propose)->Unit(benchmark::kMillisecond);

void BM_ScaleEstimate(benchmark::State& state) {
  const SyntheticSequence seq = make_synthetic({Scenario::kZoom, 2, 5});
  const BoundingBox& b = seq.ground_truth[0];
  const ScaleModel model = train_scale_model(seq.frames[0], {b.cx(), b.cy()}, {b.w, b.h});
  for (auto _ : state) benchmark::DoNotOptimize(estimate_scale(model, seq.frames[1], {b.cx(), b.cy()}));
}
BENCHMARK(BM_ScaleEstimate)->Unit(benchmark::kMillisecond);

void BM_TrackerStep(benchmark::State& state) {
  const SyntheticSequence seq = make_synthetic({Scenario::kTranslate, 2, 6});
  for (auto _ : state) {
    state.PauseTiming();
    Tracker tracker(TrackerConfig{});
    tracker.initialize(seq.frames[0], seq.ground_truth[0]);
    state.ResumeTiming();
    benchmark::DoNotOptimize(tracker.step(seq.frames[1]));
  }
}
BENCHMARK(BM_TrackerStep)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
