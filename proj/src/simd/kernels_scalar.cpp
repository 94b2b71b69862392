#include "liris/simd/kernels.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace liris::simd::scalar {

std::uint64_t xor_popcount(const std::uint64_t* a, const std::uint64_t* b, std::size_t n) {
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < n; ++i) total += std::popcount(a[i] ^ b[i]);
  return total;
}

void cross_power(const std::complex<double>* a, const std::complex<double>* b,
                 std::complex<double>* out, std::size_t n, double zero_threshold) {
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double br = b[i].real(), bi = b[i].imag();
    const double pr = br * ar + bi * ai;
    const double pi = bi * ar - br * ai;
    const double mag = std::sqrt(pr * pr + pi * pi);
    out[i] = mag > zero_threshold ? std::complex<double>(pr / mag, pi / mag)
                                  : std::complex<double>(0.0, 0.0);
  }
}

void pack_quadrature_signs(const std::complex<double>* z, std::size_t n, double threshold,
                           std::uint64_t* real_bits, std::uint64_t* imag_bits) {
  const std::size_t words = (n + 63) / 64;
  for (std::size_t w = 0; w < words; ++w) {
    std::uint64_t re = 0, im = 0;
    const std::size_t end = std::min<std::size_t>(64, n - w * 64);
    for (std::size_t j = 0; j < end; ++j) {
      const auto& v = z[w * 64 + j];
      re |= static_cast<std::uint64_t>(v.real() > threshold) << j;
      im |= static_cast<std::uint64_t>(v.imag() > threshold) << j;
    }
    real_bits[w] = re;
    imag_bits[w] = im;
  }
}

}  // namespace liris::simd::scalar
