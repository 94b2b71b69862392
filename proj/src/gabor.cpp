#include "liris/gabor.hpp"

#include "liris/error.hpp"
#include "liris/fft.hpp"
#include "liris/simd/kernels.hpp"

#include <bit>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>

namespace liris {
namespace {

constexpr double kResponseFloor = 1e-10;

// Weight applied to half-spectrum bin k to form the analytic signal.
double analytic_weight(int k, int cols) {
  if (k == 0) return 1.0;
  if (cols % 2 == 0 && k == cols / 2) return 1.0;
  return 2.0;
}

}  // namespace

void GaborConfig::validate() const {
  if (num_filters < 1) throw ContractError("num_filters must be >= 1");
  if (!(base_wavelength >= 2.0)) throw ContractError("base_wavelength must be >= 2");
  if (!(wavelength_multiplier > 1.0)) throw ContractError("wavelength_multiplier must be > 1");
  if (!(sigma_on_f > 0.0 && sigma_on_f < 1.0))
    throw ContractError("sigma_on_f must lie in (0, 1)");
}

LoGGaborBank::LoGGaborBank(GaborConfig config, int cols,
                           std::vector<std::vector<double>> responses)
    : config_(config), cols_(cols), responses_(std::move(responses)) {}

double LoGGaborBank::center_frequency(int n) const {
  return 1.0 / (config_.base_wavelength * std::pow(config_.wavelength_multiplier, n));
}

int LoGGaborBank::nearest_sample(int n) const {
  return static_cast<int>(std::lround(center_frequency(n) * cols_));
}

LoGGaborBank build_filter_bank(const GaborConfig& config, int cols) {
  config.validate();
  if (cols < 2.0 * config.base_wavelength) {
    throw ContractError("filter bank needs cols >= 2 * base_wavelength (cols=" +
                        std::to_string(cols) + ")");
  }
  const double log_sigma = std::log(config.sigma_on_f);
  const double denom = 2.0 * log_sigma * log_sigma;
  std::vector<std::vector<double>> responses;
  double wavelength = config.base_wavelength;
  for (int n = 0; n < config.num_filters; ++n) {
    const double f0 = 1.0 / wavelength;
    std::vector<double> g(static_cast<std::size_t>(cols));
    g[0] = 0.0;
    for (int k = 1; k < cols; ++k) {
      const double l = std::log((static_cast<double>(k) / cols) / f0);
      g[static_cast<std::size_t>(k)] = std::exp(-(l * l) / denom);
    }
    responses.push_back(std::move(g));
    wavelength *= config.wavelength_multiplier;
  }
  return LoGGaborBank(config, cols, std::move(responses));
}

const LoGGaborBank& cached_filter_bank(const GaborConfig& config, int cols) {
  using Key = std::tuple<int, double, double, double, int>;
  static std::mutex mutex;
  static std::map<Key, std::unique_ptr<LoGGaborBank>> cache;
  const Key key{config.num_filters, config.base_wavelength, config.wavelength_multiplier,
                config.sigma_on_f, cols};
  std::lock_guard lock(mutex);
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, std::make_unique<LoGGaborBank>(build_filter_bank(config, cols)))
             .first;
  }
  return *it->second;
}

QuadratureResponse filter_row(std::span<const double> row, std::span<const double> response) {
  if (row.size() != response.size())
    throw ContractError("filter_row: row and response lengths differ");
  const int cols = static_cast<int>(row.size());
  QuadratureResponse out{std::vector<double>(row.size()), std::vector<double>(row.size())};
  if (cols == 0) return out;
  const int half = fft::half_cols(cols);
  std::vector<std::complex<double>> spectrum(static_cast<std::size_t>(half));
  fft::forward_rows(row, 1, cols, spectrum);
  std::vector<std::complex<double>> analytic(row.size());
  for (int k = 0; k < half; ++k) {
    analytic[static_cast<std::size_t>(k)] =
        spectrum[static_cast<std::size_t>(k)] *
        (analytic_weight(k, cols) * response[static_cast<std::size_t>(k)]);
  }
  fft::inverse_rows(analytic, 1, cols);
  for (std::size_t i = 0; i < row.size(); ++i) {
    out.real[i] = analytic[i].real();
    out.imag[i] = analytic[i].imag();
  }
  return out;
}

BinaryFeatureMap::BinaryFeatureMap(int num_filters, int rows, int cols)
    : num_filters_(num_filters), rows_(rows), cols_(cols), words_per_lane_((cols + 63) / 64) {
  if (num_filters < 0 || rows < 0 || cols < 0)
    throw ContractError("BinaryFeatureMap: negative dimensions");
  words_.assign(static_cast<std::size_t>(lane_count()) * words_per_lane_, 0);
}

bool BinaryFeatureMap::bit(int filter, Plane plane, int row, int col) const {
  const auto l = lane(lane_index(filter, plane, row));
  return (l[static_cast<std::size_t>(col / 64)] >> (col % 64)) & 1u;
}

void BinaryFeatureMap::set_bit(int filter, Plane plane, int row, int col, bool value) {
  auto l = lane(lane_index(filter, plane, row));
  const std::uint64_t mask = std::uint64_t{1} << (col % 64);
  auto& w = l[static_cast<std::size_t>(col / 64)];
  w = value ? (w | mask) : (w & ~mask);
}

std::size_t BinaryFeatureMap::popcount() const {
  std::size_t n = 0;
  for (std::uint64_t w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

namespace {

// `len` (<= 64) bits starting at bit `pos` of an LSB-first word array,
// with pos + len <= bit length of the array.
std::uint64_t extract_bits(std::span<const std::uint64_t> words, int pos, int len) {
  if (len == 0) return 0;
  const auto w = static_cast<std::size_t>(pos / 64);
  const int off = pos % 64;
  std::uint64_t v = words[w] >> off;
  if (off != 0 && off + len > 64) v |= words[w + 1] << (64 - off);
  return len == 64 ? v : v & ((std::uint64_t{1} << len) - 1);
}

}  // namespace

void rotate_lane(std::span<const std::uint64_t> in, std::span<std::uint64_t> out, int n, int s) {
  if (n <= 0) return;
  s = ((s % n) + n) % n;
  const int words = (n + 63) / 64;
  for (int w = 0; w < words; ++w) {
    const int len = std::min(64, n - w * 64);
    const int start = (w * 64 + s) % n;
    const int first = std::min(len, n - start);
    std::uint64_t v = extract_bits(in, start, first);
    if (first < len) v |= extract_bits(in, 0, len - first) << first;
    out[static_cast<std::size_t>(w)] = v;
  }
}

BinaryFeatureMap BinaryFeatureMap::shifted_columns(int m) const {
  BinaryFeatureMap out(num_filters_, rows_, cols_);
  for (int l = 0; l < lane_count(); ++l) rotate_lane(lane(l), out.lane(l), cols_, -m);
  return out;
}

BinaryFeatureMap extract_binary_features(const IrisImage& iris, const LoGGaborBank& bank) {
  if (iris.cols() != bank.cols()) {
    throw ContractError("extract_binary_features: iris has " + std::to_string(iris.cols()) +
                        " columns, filter bank expects " + std::to_string(bank.cols()));
  }
  const int rows = iris.rows();
  const int cols = iris.cols();
  BinaryFeatureMap features(bank.size(), rows, cols);
  if (rows == 0 || cols == 0) return features;

  const int half = fft::half_cols(cols);
  const auto px = iris.pixels();
  const std::vector<double> real(px.begin(), px.end());
  std::vector<std::complex<double>> spectra(static_cast<std::size_t>(rows) * half);
  fft::forward_rows(real, rows, cols, spectra);

  std::vector<double> weights(static_cast<std::size_t>(half));
  for (int k = 0; k < half; ++k) weights[static_cast<std::size_t>(k)] = analytic_weight(k, cols);

  std::vector<std::complex<double>> analytic(static_cast<std::size_t>(rows) * cols);
  // Responses that are zero in exact arithmetic (constant rows, empty rows)
  // come out of the FFT as ~1e-14 * Σ|x| noise. The floor below keeps their
  // bits at 0 and independent of column shift; it is far under any genuine
  // response of an 8-bit row.
  std::vector<double> floor(static_cast<std::size_t>(rows));
  for (int r = 0; r < rows; ++r) {
    double sum = 0.0;
    for (std::uint8_t v : iris.row(r)) sum += v;
    floor[static_cast<std::size_t>(r)] = kResponseFloor * sum;
  }

  const auto& pack = simd::kernels().pack_quadrature_signs;
  for (int f = 0; f < bank.size(); ++f) {
    const auto g = bank.response(f);
    std::fill(analytic.begin(), analytic.end(), std::complex<double>{});
    for (int r = 0; r < rows; ++r) {
      const auto* src = spectra.data() + static_cast<std::size_t>(r) * half;
      auto* dst = analytic.data() + static_cast<std::size_t>(r) * cols;
      for (int k = 0; k < half; ++k) {
        dst[k] = src[k] * (weights[static_cast<std::size_t>(k)] * g[static_cast<std::size_t>(k)]);
      }
    }
    fft::inverse_rows(analytic, rows, cols);
    for (int r = 0; r < rows; ++r) {
      pack(analytic.data() + static_cast<std::size_t>(r) * cols, static_cast<std::size_t>(cols),
           floor[static_cast<std::size_t>(r)],
           features.lane(features.lane_index(f, Plane::Real, r)).data(),
           features.lane(features.lane_index(f, Plane::Imag, r)).data());
    }
  }
  return features;
}

}  // namespace liris
