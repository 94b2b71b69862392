#include "liris/spectral_align.hpp"

#include "liris/error.hpp"
#include "liris/fft.hpp"
#include "liris/simd/kernels.hpp"

#include <cmath>
#include <string>

namespace liris {
namespace {

// Relative cutoff below which a cross-spectrum bin counts as zero. Exact
// zeros in theory (e.g. any non-DC bin of a constant image) come out of the
// FFT at ~1e-16 relative; normalising them would inject unit-magnitude noise.
constexpr double kZeroMagnitudeRatio = 1e-10;

}  // namespace

IrisSpectrum::IrisSpectrum(const IrisImage& image) : rows_(image.rows()), cols_(image.cols()) {
  if (rows_ <= 0 || cols_ <= 0) throw ContractError("IrisSpectrum: empty image");
  const auto px = image.pixels();
  std::vector<double> real(px.begin(), px.end());
  bins_.resize(static_cast<std::size_t>(rows_) * fft::half_cols(cols_));
  fft::forward_2d(real, rows_, cols_, bins_);
  for (const auto& v : bins_) max_magnitude_ = std::max(max_magnitude_, std::abs(v));
}

std::vector<double> phase_correlation_surface(const IrisSpectrum& a, const IrisSpectrum& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ContractError("phase_correlate: dimension mismatch " + std::to_string(a.rows()) + "x" +
                        std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                        std::to_string(b.cols()));
  }
  std::vector<std::complex<double>> cross(a.bins().size());
  const double threshold = kZeroMagnitudeRatio * a.max_magnitude() * b.max_magnitude();
  simd::kernels().cross_power(a.bins().data(), b.bins().data(), cross.data(), cross.size(),
                              threshold);
  std::vector<double> surface(static_cast<std::size_t>(a.rows()) * a.cols());
  fft::inverse_2d(cross, a.rows(), a.cols(), surface);
  return surface;
}

ShiftEstimate phase_correlate(const IrisSpectrum& a, const IrisSpectrum& b) {
  const std::vector<double> surface = phase_correlation_surface(a, b);
  std::size_t best = 0;
  for (std::size_t i = 1; i < surface.size(); ++i) {
    if (surface[i] > surface[best]) best = i;
  }
  const auto cols = static_cast<std::size_t>(a.cols());
  return {static_cast<int>(best % cols), static_cast<int>(best / cols), surface[best]};
}

ShiftEstimate phase_correlate(const IrisImage& a, const IrisImage& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ContractError("phase_correlate: dimension mismatch");
  return phase_correlate(IrisSpectrum(a), IrisSpectrum(b));
}

}  // namespace liris
