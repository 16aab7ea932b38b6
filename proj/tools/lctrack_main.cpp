// lctrack command-line front end: track, eval, synth, color-table.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "lctrack/color_names.hpp"
#include "lctrack/config.hpp"
#include "lctrack/deep_features.hpp"
#include "lctrack/errors.hpp"
#include "lctrack/evaluation.hpp"
#include "lctrack/sequence_io.hpp"
#include "lctrack/synthetic.hpp"
#include "lctrack/tracker.hpp"

namespace fs = std::filesystem;

namespace {

enum ExitCode { kOk = 0, kInternal = 1, kInputError = 2, kEvalMismatch = 3 };

// Thrown when results and ground truth disagree in length.
struct EvalMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TrackArgs {
  std::string seq;
  std::string init;
  std::string out;
  std::string config;
  std::vector<std::string> settings;
  std::optional<std::uint64_t> seed;
  std::string deep_dir;
  std::string color_table;
  bool no_redetect = false;
  bool no_scale = false;
  bool quiet = false;
};

struct EvalArgs {
  std::string results;
  std::string gt;
  std::string out_dir;
};

struct SynthArgs {
  std::string scenario;
  std::string out;
  int frames = 0;
  std::uint64_t seed = 42;
};

std::shared_ptr<const lct::ColorNameTable> open_color_table(const std::string& requested) {
  if (!requested.empty()) {
    return std::make_shared<const lct::ColorNameTable>(lct::ColorNameTable::load(requested));
  }
  for (const char* candidate : {LCT_SOURCE_COLOR_TABLE, LCT_INSTALLED_COLOR_TABLE}) {
    if (fs::exists(candidate)) {
      return std::make_shared<const lct::ColorNameTable>(lct::ColorNameTable::load(candidate));
    }
  }
  return nullptr;  // tracker falls back to the built-in table
}

int run_track(const TrackArgs& args) {
  const lct::Sequence seq = lct::open_sequence(args.seq);

  lct::TrackerConfig config;
  if (!args.config.empty()) config = lct::load_config(args.config, config);
  for (const std::string& kv : args.settings) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw lct::InputError("--set expects key=value, got '" + kv + "'");
    lct::apply_setting(config, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (args.seed) config.seed = *args.seed;
  if (args.no_redetect) config.enable_redetection = false;
  if (args.no_scale) config.enable_scale = false;

  lct::BoundingBox init;
  if (!args.init.empty()) {
    init = lct::parse_box(args.init);
  } else if (!seq.ground_truth.empty()) {
    init = seq.ground_truth.front();
  } else {
    throw lct::InputError("no --init box and no groundtruth_rect.txt in " + args.seq);
  }
  if (!init.valid()) throw lct::InputError("initial box must have positive width and height");

  lct::Tracker tracker(config, open_color_table(args.color_table));
  std::vector<lct::FrameDiagnostics> rows;
  rows.reserve(seq.frames.size());
  for (std::size_t i = 0; i < seq.frames.size(); ++i) {
    const int index = static_cast<int>(i) + 1;
    const cv::Mat frame = lct::load_rgb(seq.frames[i]);
    lct::DeepLayers deep;
    if (!args.deep_dir.empty()) deep = lct::read_mlhf(lct::mlhf_path(args.deep_dir, index));
    try {
      rows.push_back(i == 0 ? tracker.initialize(frame, init, deep) : tracker.step(frame, deep));
    } catch (const lct::InputError& e) {
      throw lct::InputError("frame " + std::to_string(index) + ": " + e.what());
    }
    if (!args.quiet) {
      const auto& d = rows.back();
      std::fprintf(stderr, "\rframe %d/%zu response %.3f%s", index, seq.frames.size(), d.response,
                   d.redetected ? " [redetect]" : "");
    }
  }
  if (!args.quiet) std::fputc('\n', stderr);

  const std::string out = args.out.empty() ? (fs::path(args.seq) / "results.csv").string() : args.out;
  std::ofstream file(out);
  if (!file) throw lct::ResourceError("cannot write " + out);
  lct::write_results_csv(file, rows);
  std::cout << "wrote " << rows.size() << " rows to " << out << '\n';
  return kOk;
}

int run_eval(const EvalArgs& args) {
  const auto preds = lct::read_result_boxes(args.results);
  const auto gts = lct::read_boxes(args.gt);
  if (preds.size() != gts.size()) {
    throw EvalMismatch("results have " + std::to_string(preds.size()) + " rows but ground truth has " +
                       std::to_string(gts.size()));
  }
  const auto precision = lct::precision_curve(preds, gts);
  const auto success = lct::success_curve(preds, gts);

  const fs::path dir = args.out_dir.empty() ? fs::path(args.results).parent_path() : fs::path(args.out_dir);
  if (!dir.empty()) fs::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream f(dir / name);
    if (!f) throw lct::ResourceError("cannot write " + (dir / name).string());
    return f;
  };
  {
    auto f = open("precision.csv");
    lct::write_curve_csv(f, precision.thresholds, precision.values);
  }
  {
    auto f = open("success.csv");
    lct::write_curve_csv(f, success.thresholds, success.values);
  }
  {
    auto f = open("summary.csv");
    lct::write_summary_csv(f, precision, success);
  }
  if (precision.skipped > 0) {
    std::fprintf(stderr, "skipped %zu frames without ground truth\n", precision.skipped);
  }
  std::printf("precision@20=%.3f auc=%.3f\n", precision.score, success.auc);
  return kOk;
}

int run_synth(const SynthArgs& args) {
  lct::SyntheticParams params;
  params.scenario = lct::parse_scenario(args.scenario);
  params.frames = args.frames;
  params.seed = args.seed;
  const auto seq = lct::make_synthetic(params);
  lct::save_sequence(args.out, seq);
  std::cout << "wrote " << seq.frames.size() << " frames (" << lct::scenario_name(params.scenario)
            << ") to " << args.out << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Long-term correlation-filter tracker"};
  app.require_subcommand(1);

  TrackArgs track;
  auto* track_cmd = app.add_subcommand("track", "Track a target through an image sequence");
  track_cmd->add_option("--seq", track.seq, "Sequence directory containing img/")->required();
  track_cmd->add_option("--init", track.init, "Initial box x,y,w,h (default: first ground-truth row)");
  track_cmd->add_option("--out", track.out, "Output CSV (default: <seq>/results.csv)");
  track_cmd->add_option("--config", track.config, "key = value configuration file");
  track_cmd->add_option("--set", track.settings, "Override one setting, key=value");
  track_cmd->add_option("--seed", track.seed, "Sampling seed");
  track_cmd->add_option("--deep-features", track.deep_dir, "Directory of per-frame .mlhf files");
  track_cmd->add_option("--color-table", track.color_table, "Color-name table file");
  track_cmd->add_flag("--no-redetect", track.no_redetect, "Disable re-detection");
  track_cmd->add_flag("--no-scale", track.no_scale, "Disable scale estimation");
  track_cmd->add_flag("-q,--quiet", track.quiet, "No progress output");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Precision and success curves against ground truth");
  eval_cmd->add_option("--results", eval.results, "results.csv or a plain box file")->required();
  eval_cmd->add_option("--gt", eval.gt, "Ground-truth box file")->required();
  eval_cmd->add_option("--out-dir", eval.out_dir, "Directory for the curve CSVs (default: beside results)");

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic test sequence");
  synth_cmd->add_option("--scenario", synth.scenario, "translate, zoom or occlude")->required();
  synth_cmd->add_option("--out", synth.out, "Output sequence directory")->required();
  synth_cmd->add_option("--frames", synth.frames, "Frame count (default depends on scenario)");
  synth_cmd->add_option("--seed", synth.seed, "Generator seed");

  std::string table_out;
  auto* table_cmd = app.add_subcommand("color-table", "Write the built-in color-name table");
  table_cmd->add_option("--out", table_out, "Output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (*track_cmd) return run_track(track);
    if (*eval_cmd) return run_eval(eval);
    if (*synth_cmd) return run_synth(synth);
    if (*table_cmd) {
      lct::ColorNameTable::prototype().save(table_out);
      return kOk;
    }
  } catch (const EvalMismatch& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kEvalMismatch;
  } catch (const lct::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const lct::ResourceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const lct::FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const lct::DegenerateInputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kInternal;
}
