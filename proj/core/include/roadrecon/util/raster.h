#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace roadrecon {

// Row-major 2D grid. (col, row) addressing; row 0 is the first row stored.
template <typename T>
class Raster {
 public:
  Raster() = default;
  Raster(int width, int height, T fill = T{})
      : width_(width), height_(height), data_(static_cast<size_t>(width) * height, fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return data_.empty(); }
  bool Contains(int col, int row) const {
    return col >= 0 && row >= 0 && col < width_ && row < height_;
  }

  T& at(int col, int row) { return data_[static_cast<size_t>(row) * width_ + col]; }
  const T& at(int col, int row) const {
    return data_[static_cast<size_t>(row) * width_ + col];
  }
  // Out-of-range reads return `fallback`.
  T get(int col, int row, T fallback = T{}) const {
    return Contains(col, row) ? at(col, row) : fallback;
  }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  bool operator==(const Raster&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using GrayImage = Raster<uint8_t>;
using RgbImage = Raster<std::array<uint8_t, 3>>;
using PixelSet = std::vector<std::pair<int, int>>;  // (col, row), sorted

// Zhang-Suen iterative thinning of a binary mask (non-zero = foreground).
// Returns a mask whose foreground is 8-connected and one pixel wide.
GrayImage ZhangSuenThin(const GrayImage& mask);

// Foreground pixels of a mask in (row, col) scan order as (col, row) pairs.
PixelSet ForegroundPixels(const GrayImage& mask);

// Binary PGM (P5) / PPM (P6) with max value 255. Throw IoError / ParseError.
void WritePgm(const std::string& path, const GrayImage& image);
GrayImage ReadPgm(const std::string& path);
void WritePpm(const std::string& path, const RgbImage& image);
RgbImage ReadPpm(const std::string& path);

}  // namespace roadrecon
