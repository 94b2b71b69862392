#pragma once

#include "liris/iris.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace liris {

struct GaborConfig {
  int num_filters = 4;
  double base_wavelength = 18.0;       // pixels, wavelength of filter 0
  double wavelength_multiplier = 2.0;  // wavelength ratio between consecutive filters
  double sigma_on_f = 0.5;             // σ / f₀, held constant across the bank

  void validate() const;
  friend bool operator==(const GaborConfig&, const GaborConfig&) = default;
};

/// Frequency responses of the 1-D log-Gabor filters, sampled at f_k = k / cols.
class LoGGaborBank {
 public:
  LoGGaborBank(GaborConfig config, int cols, std::vector<std::vector<double>> responses);

  const GaborConfig& config() const { return config_; }
  int cols() const { return cols_; }
  int size() const { return static_cast<int>(responses_.size()); }
  std::span<const double> response(int n) const { return responses_[static_cast<std::size_t>(n)]; }

  /// f₀ of filter n, cycles per pixel.
  double center_frequency(int n) const;
  /// Index k of the sample f_k = k / cols nearest to f₀ of filter n.
  int nearest_sample(int n) const;

 private:
  GaborConfig config_;
  int cols_;
  std::vector<std::vector<double>> responses_;
};

/// G(f) = exp(-(log(f/f₀))² / (2 (log(σ/f₀))²)), with G(0) = 0.
LoGGaborBank build_filter_bank(const GaborConfig& config, int cols);

/// Shared immutable bank for (config, cols), built on first request.
const LoGGaborBank& cached_filter_bank(const GaborConfig& config, int cols);

struct QuadratureResponse {
  std::vector<double> real;
  std::vector<double> imag;
};

/// Circular filtering of one row by a one-sided (analytic) response:
/// positive-frequency bins are weighted by 2·G, DC and Nyquist by G, negative
/// bins dropped. Entries of `response` above cols/2 are ignored.
QuadratureResponse filter_row(std::span<const double> row, std::span<const double> response);

enum class Plane { Real = 0, Imag = 1 };

/// Bit-packed signature, indexed [filter][plane][row][col]. Each (filter,
/// plane, row) lane occupies whole 64-bit words; padding bits stay zero.
class BinaryFeatureMap {
 public:
  BinaryFeatureMap() = default;
  BinaryFeatureMap(int num_filters, int rows, int cols);

  int num_filters() const { return num_filters_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int lane_count() const { return num_filters_ * 2 * rows_; }
  int words_per_lane() const { return words_per_lane_; }
  std::size_t total_bits() const {
    return static_cast<std::size_t>(lane_count()) * static_cast<std::size_t>(cols_);
  }
  bool same_shape(const BinaryFeatureMap& o) const {
    return num_filters_ == o.num_filters_ && rows_ == o.rows_ && cols_ == o.cols_;
  }

  bool bit(int filter, Plane plane, int row, int col) const;
  void set_bit(int filter, Plane plane, int row, int col, bool value);

  std::span<const std::uint64_t> words() const { return words_; }
  std::span<std::uint64_t> words() { return words_; }
  std::span<const std::uint64_t> lane(int index) const {
    return words().subspan(static_cast<std::size_t>(index) * words_per_lane_, words_per_lane_);
  }
  std::span<std::uint64_t> lane(int index) {
    return words().subspan(static_cast<std::size_t>(index) * words_per_lane_, words_per_lane_);
  }
  int lane_index(int filter, Plane plane, int row) const {
    return (filter * 2 + static_cast<int>(plane)) * rows_ + row;
  }

  /// out(.., c) = in(.., c - m), cyclic, matching IrisImage::shifted_columns.
  BinaryFeatureMap shifted_columns(int m) const;

  /// Number of bits set.
  std::size_t popcount() const;

  friend bool operator==(const BinaryFeatureMap&, const BinaryFeatureMap&) = default;

 private:
  int num_filters_ = 0;
  int rows_ = 0;
  int cols_ = 0;
  int words_per_lane_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Writes `in` rotated so that out bit c = in bit (c + s) mod n, for an
/// n-bit lane stored LSB-first in ceil(n/64) words.
void rotate_lane(std::span<const std::uint64_t> in, std::span<std::uint64_t> out, int n, int s);

/// Bit (f, plane, r, c) is set iff the plane's response at (r, c) is > 0,
/// with responses below 1e-10 · Σ|row| treated as zero.
BinaryFeatureMap extract_binary_features(const IrisImage& iris, const LoGGaborBank& bank);

}  // namespace liris
