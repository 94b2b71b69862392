#pragma once

#include <complex>
#include <span>

namespace liris::fft {

/// Half-spectrum length of a real transform along `cols`.
constexpr int half_cols(int cols) { return cols / 2 + 1; }

/// 2-D real-to-complex DFT of a rows×cols row-major array.
/// `out` has rows × half_cols(cols) entries (unnormalised).
void forward_2d(std::span<const double> in, int rows, int cols,
                std::span<std::complex<double>> out);

/// Inverse of forward_2d, scaled by 1/(rows·cols). `in` is a Hermitian
/// half-spectrum; only its real inverse is produced.
void inverse_2d(std::span<const std::complex<double>> in, int rows, int cols,
                std::span<double> out);

/// Row-wise 1-D real-to-complex DFT; `out` has rows × half_cols(cols) entries.
void forward_rows(std::span<const double> in, int rows, int cols,
                  std::span<std::complex<double>> out);

/// Row-wise 1-D complex inverse DFT in place, scaled by 1/cols.
void inverse_rows(std::span<std::complex<double>> data, int rows, int cols);

}  // namespace liris::fft
