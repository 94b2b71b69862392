#pragma once

#include "liris/iris.hpp"

#include <complex>
#include <vector>

namespace liris {

/// Cyclic translation of b relative to a: b(r, c) ≈ a(r - dy, c - dx).
struct ShiftEstimate {
  int dx = 0;  // columns, [0, cols)
  int dy = 0;  // rows, [0, rows)
  double peak = 0.0;
};

/// Forward 2-D spectrum of an IrisImage, kept so repeated alignments against
/// the same frame skip the forward transform.
class IrisSpectrum {
 public:
  IrisSpectrum() = default;
  explicit IrisSpectrum(const IrisImage& image);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const std::vector<std::complex<double>>& bins() const { return bins_; }
  /// Largest bin magnitude; scales the zero-magnitude cutoff.
  double max_magnitude() const { return max_magnitude_; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::complex<double>> bins_;  // rows × (cols/2 + 1)
  double max_magnitude_ = 0.0;
};

/// Inverse transform of the unit-magnitude cross power spectrum, row-major
/// rows × cols. Cross-spectrum entries whose magnitude is negligible relative
/// to the two spectra are zeroed instead of normalised.
std::vector<double> phase_correlation_surface(const IrisSpectrum& a, const IrisSpectrum& b);

/// Argmax of the phase-correlation surface; ties go to the lowest row, then
/// the lowest column. Throws ContractError on dimension mismatch.
ShiftEstimate phase_correlate(const IrisSpectrum& a, const IrisSpectrum& b);
ShiftEstimate phase_correlate(const IrisImage& a, const IrisImage& b);

}  // namespace liris
