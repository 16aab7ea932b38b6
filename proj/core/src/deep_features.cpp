#include "lctrack/deep_features.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>

#include "lctrack/errors.hpp"

namespace lct {

static_assert(std::endian::native == std::endian::little,
              "the .mlhf reader assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'M', 'L', 'H', 'F'};

class Reader {
 public:
  Reader(const std::vector<char>& bytes, const std::string& path) : bytes_(bytes), path_(path) {}

  template <typename T>
  T take() {
    if (pos_ + sizeof(T) > bytes_.size()) throw FormatError("truncated .mlhf file: " + path_);
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  const std::vector<char>& bytes_;
  const std::string& path_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<FeatureMap> read_mlhf(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ResourceError("cannot open deep-feature file: " + path);
  const std::vector<char> bytes((std::istreambuf_iterator<char>(in)), {});

  Reader r(bytes, path);
  if (bytes.size() < sizeof(kMagic) || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw FormatError("bad magic in .mlhf file: " + path);
  }
  r.take<std::uint32_t>();  // magic
  const auto version = r.take<std::uint32_t>();
  if (version != kMlhfVersion) {
    throw FormatError("unsupported .mlhf version " + std::to_string(version) + ": " + path);
  }
  const auto count = r.take<std::uint32_t>();
  if (count == 0) throw FormatError("no layers in .mlhf file: " + path);

  std::vector<FeatureMap> layers;
  layers.reserve(count);
  for (std::uint32_t l = 0; l < count; ++l) {
    const auto m = r.take<std::uint32_t>();
    const auto n = r.take<std::uint32_t>();
    const auto d = r.take<std::uint32_t>();
    if (m == 0 || n == 0 || d == 0) {
      throw FormatError("zero-sized layer " + std::to_string(l) + " in " + path);
    }
    const std::size_t values = static_cast<std::size_t>(m) * n * d;
    if (values > r.remaining() / sizeof(float)) {
      throw FormatError("truncated layer " + std::to_string(l) + " in " + path);
    }
    FeatureMap layer(static_cast<int>(m), static_cast<int>(n), static_cast<int>(d));
    for (std::uint32_t i = 0; i < m; ++i) {
      for (std::uint32_t j = 0; j < n; ++j) {
        for (std::uint32_t k = 0; k < d; ++k) {
          const float v = r.take<float>();
          if (!std::isfinite(v)) {
            throw FormatError("non-finite value in layer " + std::to_string(l) + " of " + path);
          }
          layer.at(static_cast<int>(i), static_cast<int>(j), static_cast<int>(k)) = v;
        }
      }
    }
    layers.push_back(std::move(layer));
  }
  if (r.remaining() != 0) throw FormatError("trailing bytes in .mlhf file: " + path);
  return layers;
}

void write_mlhf(const std::string& path, const std::vector<FeatureMap>& layers) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ResourceError("cannot write deep-feature file: " + path);
  auto put = [&out](const auto& v) { out.write(reinterpret_cast<const char*>(&v), sizeof(v)); };
  out.write(kMagic, sizeof(kMagic));
  put(kMlhfVersion);
  put(static_cast<std::uint32_t>(layers.size()));
  for (const FeatureMap& layer : layers) {
    put(static_cast<std::uint32_t>(layer.rows()));
    put(static_cast<std::uint32_t>(layer.cols()));
    put(static_cast<std::uint32_t>(layer.depth()));
    for (int m = 0; m < layer.rows(); ++m) {
      for (int n = 0; n < layer.cols(); ++n) {
        for (int d = 0; d < layer.depth(); ++d) put(static_cast<float>(layer.at(m, n, d)));
      }
    }
  }
  if (!out) throw ResourceError("short write on deep-feature file: " + path);
}

std::string mlhf_path(const std::string& directory, int frame_index) {
  char name[32];
  std::snprintf(name, sizeof(name), "%08d.mlhf", frame_index);
  return directory + "/" + name;
}

std::vector<FeatureLayer> load_deep_layers(const std::string& path, cv::Size expected_spatial) {
  std::vector<FeatureLayer> out;
  int id = 1;
  for (FeatureMap& raw : read_mlhf(path)) {
    out.push_back({resize_layer(raw, expected_spatial), id++, 1.0});
  }
  return out;
}

}  // namespace lct
