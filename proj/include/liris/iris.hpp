#pragma once

#include "liris/pointcloud_io.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace liris {

struct IrisConfig {
  int radial_bins = 80;
  int angular_bins = 360;
  double max_range = 80.0;  // meters
  SensorProfile profile = SensorProfile::hdl64();

  void validate() const;
};

/// Polar bird's-eye image of 8-bit height-occupancy codes.
/// Row i is the radius band [i, i+1) * max_range / rows, column j the
/// azimuth band [j, j+1) * 360° / cols measured counter-clockwise from +x.
class IrisImage {
 public:
  IrisImage() = default;
  IrisImage(int rows, int cols);
  IrisImage(int rows, int cols, std::vector<std::uint8_t> pixels);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::uint8_t at(int r, int c) const { return pixels_[index(r, c)]; }
  std::uint8_t& at(int r, int c) { return pixels_[index(r, c)]; }
  std::span<const std::uint8_t> pixels() const { return pixels_; }
  std::span<std::uint8_t> pixels() { return pixels_; }
  std::span<const std::uint8_t> row(int r) const {
    return std::span<const std::uint8_t>(pixels_).subspan(index(r, 0), cols_);
  }

  /// out(r, c) = in(r, c - m), cyclic in c. Positive m is a
  /// counter-clockwise rotation of the scene by m angular bins.
  IrisImage shifted_columns(int m) const;

  friend bool operator==(const IrisImage&, const IrisImage&) = default;

 private:
  std::size_t index(int r, int c) const {
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) +
           static_cast<std::size_t>(c);
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::uint8_t> pixels_;
};

/// 8-bit code of one bin: bit m set iff some height falls into sub-bin m of
/// [y_low, y_high] split in 8 (bit 0 = lowest). Heights are clamped.
std::uint8_t encode_bin(std::span<const double> heights, const SensorProfile& profile);

/// Sub-bin index in [0, 7] of a single height.
int height_sub_bin(double height, const SensorProfile& profile);

IrisImage generate_iris(const PointCloud& cloud, const IrisConfig& config);

/// Binary PGM (P5, maxval 255).
void write_pgm(const std::filesystem::path& path, const IrisImage& image);
IrisImage read_pgm(const std::filesystem::path& path);

}  // namespace liris
