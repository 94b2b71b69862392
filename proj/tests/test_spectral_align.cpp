#include "liris/error.hpp"
#include "liris/fft.hpp"
#include "liris/spectral_align.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace liris;

TEST(PhaseCorrelate, IdentityGivesZeroShiftAtSurfaceMax) {
  std::mt19937_64 rng(1);
  const IrisImage a = oracle::random_iris(rng);
  const ShiftEstimate s = phase_correlate(a, a);
  EXPECT_EQ(s.dx, 0);
  EXPECT_EQ(s.dy, 0);
  const auto surface = phase_correlation_surface(IrisSpectrum(a), IrisSpectrum(a));
  EXPECT_EQ(s.peak, *std::max_element(surface.begin(), surface.end()));
  EXPECT_NEAR(s.peak, 1.0, 1e-9);
}

TEST(PhaseCorrelate, ColumnShift37AgreesWithBruteForce) {
  std::mt19937_64 rng(2);
  const IrisImage a = oracle::random_iris(rng);
  const IrisImage b = oracle::cyclic_shift(a, 0, 37);
  const ShiftEstimate s = phase_correlate(a, b);
  EXPECT_EQ(s.dx, 37);
  EXPECT_EQ(s.dy, 0);
  const oracle::Peak p = oracle::circular_xcorr_argmax(a, b);
  EXPECT_EQ(p.dx, 37);
  EXPECT_EQ(p.dy, 0);
}

TEST(PhaseCorrelate, RandomShiftsMatchBruteForceOnSmallImages) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 40; ++t) {
    const int rows = 3 + t % 9, cols = 5 + (t * 7) % 40;
    const IrisImage a = oracle::random_iris(rng, rows, cols);
    std::uniform_int_distribution<int> dy(0, rows - 1), dx(0, cols - 1);
    const int sy = dy(rng), sx = dx(rng);
    const IrisImage b = oracle::cyclic_shift(a, sy, sx);
    const ShiftEstimate s = phase_correlate(a, b);
    const oracle::Peak p = oracle::circular_xcorr_argmax(a, b);
    EXPECT_EQ(s.dx, p.dx) << rows << "x" << cols;
    EXPECT_EQ(s.dy, p.dy) << rows << "x" << cols;
    EXPECT_EQ(s.dx, sx);
    EXPECT_EQ(s.dy, sy);
  }
}

TEST(PhaseCorrelate, Antisymmetry) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 10; ++t) {
    const IrisImage a = oracle::random_iris(rng);
    const IrisImage b = oracle::cyclic_shift(a, 0, 11 * t + 5);
    EXPECT_EQ((phase_correlate(a, b).dx + phase_correlate(b, a).dx) % 360, 0);
  }
}

TEST(PhaseCorrelate, IndependentImagesPeakBelowSelfMatch) {
  std::mt19937_64 rng(5);
  int below = 0;
  for (int t = 0; t < 100; ++t) {
    const IrisImage a = oracle::random_iris(rng, 20, 60);
    const IrisImage b = oracle::random_iris(rng, 20, 60);
    below += phase_correlate(a, b).peak < phase_correlate(a, a).peak;
  }
  EXPECT_EQ(below, 100);
}

TEST(PhaseCorrelate, ConstantImagesResolveToOrigin) {
  const IrisImage a(80, 360, std::vector<std::uint8_t>(80 * 360, 9));
  const IrisImage b(80, 360, std::vector<std::uint8_t>(80 * 360, 200));
  const ShiftEstimate s = phase_correlate(a, b);
  EXPECT_EQ(s.dx, 0);
  EXPECT_EQ(s.dy, 0);
  const IrisImage zero(80, 360);
  EXPECT_EQ(phase_correlate(zero, zero).dx, 0);
}

TEST(PhaseCorrelate, DimensionMismatchThrows) {
  EXPECT_THROW(phase_correlate(IrisImage(80, 360), IrisImage(80, 180)), ContractError);
  EXPECT_THROW(phase_correlate(IrisSpectrum(IrisImage(4, 8)), IrisSpectrum(IrisImage(8, 4))),
               ContractError);
}

TEST(Fft, RoundTripWithinTolerance) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-1000.0, 1000.0);
  for (auto [rows, cols] : {std::pair{80, 360}, {7, 13}, {1, 2}, {16, 64}}) {
    std::vector<double> x(static_cast<std::size_t>(rows) * cols), y(x.size());
    for (auto& v : x) v = u(rng);
    std::vector<std::complex<double>> spec(static_cast<std::size_t>(rows) * fft::half_cols(cols));
    fft::forward_2d(x, rows, cols, spec);
    fft::inverse_2d(spec, rows, cols, y);
    double err = 0, mag = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      err = std::max(err, std::abs(x[i] - y[i]));
      mag = std::max(mag, std::abs(x[i]));
    }
    EXPECT_LE(err / mag, 1e-9) << rows << "x" << cols;
  }
}

TEST(Fft, ForwardRowsMatchesNaiveDft) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int rows = 3, cols = 45;
  std::vector<double> x(rows * cols);
  for (auto& v : x) v = u(rng);
  std::vector<std::complex<double>> spec(rows * fft::half_cols(cols));
  fft::forward_rows(x, rows, cols, spec);
  for (int r = 0; r < rows; ++r) {
    std::vector<std::complex<double>> row(x.begin() + r * cols, x.begin() + (r + 1) * cols);
    const auto ref = oracle::naive_dft(row, false);
    for (int k = 0; k < fft::half_cols(cols); ++k)
      EXPECT_LT(std::abs(spec[r * fft::half_cols(cols) + k] - ref[k]), 1e-10);
  }
}
