#include "lctrack/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>

#include "lctrack/errors.hpp"

namespace lct {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw InputError("config: '" + key + "' expects a number, got '" + v + "'");
  }
  return out;
}

long long to_integer(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw InputError("config: '" + key + "' expects an integer, got '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "off" || v == "no") return false;
  throw InputError("config: '" + key + "' expects a boolean, got '" + v + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
  return out;
}

struct Field {
  std::function<void(TrackerConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const TrackerConfig&)> get;
};

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

#define LCT_REAL(name, expr)                                                               \
  {                                                                                        \
    name, {                                                                                \
      [](TrackerConfig& c, const std::string& k, const std::string& v) { expr = to_double(k, v); }, \
          [](const TrackerConfig& c) { return num(expr); }                                \
    }                                                                                      \
  }
#define LCT_INT(name, expr, type)                                                          \
  {                                                                                        \
    name, {                                                                                \
      [](TrackerConfig& c, const std::string& k, const std::string& v) {                   \
        expr = static_cast<type>(to_integer(k, v));                                        \
      },                                                                                   \
          [](const TrackerConfig& c) { return std::to_string(expr); }                     \
    }                                                                                      \
  }
#define LCT_BOOL(name, expr)                                                               \
  {                                                                                        \
    name, {                                                                                \
      [](TrackerConfig& c, const std::string& k, const std::string& v) { expr = to_bool(k, v); }, \
          [](const TrackerConfig& c) { return std::string(expr ? "true" : "false"); }     \
    }                                                                                      \
  }

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = {
      // Translation and scale filters share the regression settings.
      {"lambda",
       {[](TrackerConfig& c, const std::string& k, const std::string& v) {
          c.correlation.lambda = c.scale.filter.lambda = to_double(k, v);
        },
        [](const TrackerConfig& c) { return num(c.correlation.lambda); }}},
      {"sigma_label",
       {[](TrackerConfig& c, const std::string& k, const std::string& v) {
          c.correlation.sigma_label = c.scale.filter.sigma_label = to_double(k, v);
        },
        [](const TrackerConfig& c) { return num(c.correlation.sigma_label); }}},
      {"eta",
       {[](TrackerConfig& c, const std::string& k, const std::string& v) {
          c.correlation.eta = c.scale.filter.eta = to_double(k, v);
        },
        [](const TrackerConfig& c) { return num(c.correlation.eta); }}},
      {"kernel",
       {[](TrackerConfig& c, const std::string& k, const std::string& v) {
          KernelType t;
          if (v == "linear") {
            t = KernelType::kLinear;
          } else if (v == "gaussian") {
            t = KernelType::kGaussian;
          } else {
            throw InputError("config: '" + k + "' must be linear or gaussian");
          }
          c.correlation.kernel.type = c.scale.filter.kernel.type = t;
        },
        [](const TrackerConfig& c) {
          return std::string(c.correlation.kernel.type == KernelType::kLinear ? "linear" : "gaussian");
        }}},
      {"kernel_sigma",
       {[](TrackerConfig& c, const std::string& k, const std::string& v) {
          c.correlation.kernel.sigma = c.scale.filter.kernel.sigma = to_double(k, v);
        },
        [](const TrackerConfig& c) { return num(c.correlation.kernel.sigma); }}},
      {"deep_weights",
       {[](TrackerConfig& c, const std::string& k, const std::string& v) {
          c.deep_weights = to_list(k, v);
        },
        [](const TrackerConfig& c) {
          std::string out;
          for (std::size_t i = 0; i < c.deep_weights.size(); ++i) {
            out += (i ? "," : "") + num(c.deep_weights[i]);
          }
          return out;
        }}},
      LCT_REAL("padding", c.padding),
      LCT_INT("cell_size", c.cell_size, int),
      LCT_REAL("redetect_threshold", c.redetect_threshold),
      LCT_REAL("detector_threshold", c.detector_threshold),
      LCT_REAL("handcrafted_weight", c.handcrafted_weight),
      LCT_REAL("positive_iou", c.redetector.positive_iou),
      LCT_REAL("negative_iou", c.redetector.negative_iou),
      LCT_INT("jitter_px", c.redetector.jitter_px, int),
      LCT_INT("negative_ratio", c.redetector.negative_ratio, int),
      LCT_REAL("sample_region", c.redetector.sample_region),
      LCT_REAL("search_region", c.redetector.search_region),
      LCT_REAL("nms_iou", c.redetector.nms_iou),
      LCT_INT("proposals", c.redetector.proposals, int),
      LCT_INT("max_support_vectors", c.redetector.max_support_vectors, std::size_t),
      LCT_INT("max_reserve", c.redetector.max_reserve, std::size_t),
      LCT_REAL("svm_c", c.redetector.svm.C),
      LCT_REAL("svm_sigma", c.redetector.svm.sigma),
      LCT_INT("scale_levels", c.scale.levels, int),
      LCT_REAL("scale_step", c.scale.step),
      LCT_REAL("scale_damping", c.scale.damping),
      LCT_INT("scale_cell_size", c.scale.cell_size, int),
      LCT_BOOL("scale_requires_confidence", c.scale_requires_confidence),
      LCT_INT("scale_min_side", c.scale.min_level_side, int),
      LCT_INT("scale_template_min_side", c.scale.template_min_side, int),
      LCT_INT("scale_template_max_area", c.scale.template_max_area, int),
      LCT_REAL("scale_context", c.scale.context),
      LCT_REAL("clutter_rate", c.phd.clutter.lambda_t),
      LCT_REAL("merge_distance", c.phd.reduction.merge_distance),
      LCT_REAL("prune_threshold", c.phd.reduction.prune_threshold),
      LCT_INT("max_components", c.phd.reduction.max_components, std::size_t),
      LCT_REAL("birth_weight", c.phd.birth_weight),
      LCT_REAL("p_survival", c.phd.motion.p_survival),
      LCT_REAL("p_detection", c.phd.motion.p_detection),
      {"birth_variance",
       {[](TrackerConfig& c, const std::string& k, const std::string& v) {
          c.phd.birth_cov = phd::StateCov::Identity() * to_double(k, v);
        },
        [](const TrackerConfig& c) { return num(c.phd.birth_cov(0, 0)); }}},
      {"process_noise_position",
       {[](TrackerConfig& c, const std::string& k, const std::string& v) {
          c.phd.motion.Q(0, 0) = c.phd.motion.Q(1, 1) = to_double(k, v);
        },
        [](const TrackerConfig& c) { return num(c.phd.motion.Q(0, 0)); }}},
      {"process_noise_velocity",
       {[](TrackerConfig& c, const std::string& k, const std::string& v) {
          c.phd.motion.Q(2, 2) = c.phd.motion.Q(3, 3) = to_double(k, v);
        },
        [](const TrackerConfig& c) { return num(c.phd.motion.Q(2, 2)); }}},
      {"measurement_noise",
       {[](TrackerConfig& c, const std::string& k, const std::string& v) {
          c.phd.motion.R = Eigen::Matrix2d::Identity() * to_double(k, v);
        },
        [](const TrackerConfig& c) { return num(c.phd.motion.R(0, 0)); }}},
      LCT_BOOL("enable_redetection", c.enable_redetection),
      LCT_BOOL("enable_scale", c.enable_scale),
      LCT_INT("seed", c.seed, std::uint64_t),
  };
  return table;
}

#undef LCT_REAL
#undef LCT_INT
#undef LCT_BOOL

}  // namespace

void apply_setting(TrackerConfig& config, const std::string& key, const std::string& value) {
  const auto it = fields().find(key);
  if (it == fields().end()) throw InputError("config: unknown key '" + key + "'");
  it->second.set(config, key, value);
}

TrackerConfig parse_config(std::istream& in, TrackerConfig base) {
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InputError("config line " + std::to_string(number) + ": expected key = value");
    }
    try {
      apply_setting(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const InputError& e) {
      throw InputError("config line " + std::to_string(number) + ": " + e.what());
    }
  }
  return base;
}

TrackerConfig load_config(const std::string& path, TrackerConfig base) {
  std::ifstream in(path);
  if (!in) throw ResourceError("cannot open config file " + path);
  return parse_config(in, std::move(base));
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, _] : fields()) keys.push_back(k);
  return keys;
}

void write_config(std::ostream& out, const TrackerConfig& config) {
  for (const auto& [k, f] : fields()) out << k << " = " << f.get(config) << '\n';
}

}  // namespace lct
