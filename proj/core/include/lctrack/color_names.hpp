#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

namespace lct {

// RGB -> 11 color-name probability lookup, quantized at 5 bits per channel.
// Names, in column order: black, blue, brown, grey, green, orange, pink,
// purple, red, white, yellow.
//
// File layout: 32768 rows x 11 little-endian float32, row-major, row index
// (R >> 3) * 1024 + (G >> 3) * 32 + (B >> 3).
class ColorNameTable {
 public:
  static constexpr int kRows = 32 * 32 * 32;
  static constexpr int kNames = 11;

  static ColorNameTable load(const std::string& path);

  // Table built from 11 color prototypes in CIELAB: each bin centre receives a
  // softmax over negative squared distances to the prototypes.
  static ColorNameTable prototype();

  void save(const std::string& path) const;

  static int index(int r, int g, int b) { return (r >> 3) * 1024 + (g >> 3) * 32 + (b >> 3); }

  std::span<const float, kNames> row(int index) const {
    return std::span<const float, kNames>(entries_.data() + static_cast<std::size_t>(index) * kNames,
                                          kNames);
  }
  std::span<const float, kNames> lookup(int r, int g, int b) const { return row(index(r, g, b)); }

  static const std::array<const char*, kNames>& names();

 private:
  explicit ColorNameTable(std::vector<float> entries) : entries_(std::move(entries)) {}

  std::vector<float> entries_;
};

}  // namespace lct
