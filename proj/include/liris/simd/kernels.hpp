#pragma once

// Data-parallel inner loops behind a runtime-selected table.
//
// Every entry has a scalar reference in `liris::simd::scalar`; the vector
// variants must match it exactly (integer kernels) or bit-for-bit on the
// same IEEE operations (floating-point kernels, no FMA contraction).

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string_view>

namespace liris::simd {

enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa);

struct KernelTable {
  Isa isa;

  /// Σ popcount(a[i] ^ b[i]) over n words.
  std::uint64_t (*xor_popcount)(const std::uint64_t* a, const std::uint64_t* b,
                                std::size_t n);

  /// out[i] = b[i]·conj(a[i]) / |b[i]·conj(a[i])|, or 0 where that magnitude
  /// is <= zero_threshold.
  void (*cross_power)(const std::complex<double>* a, const std::complex<double>* b,
                      std::complex<double>* out, std::size_t n, double zero_threshold);

  /// Bit i of real_bits (imag_bits) is set iff z[i].real() > threshold
  /// (imag() > threshold).
  /// Writes ceil(n / 64) words to each output; unused high bits are zero.
  void (*pack_quadrature_signs)(const std::complex<double>* z, std::size_t n,
                                double threshold, std::uint64_t* real_bits,
                                std::uint64_t* imag_bits);
};

namespace scalar {
std::uint64_t xor_popcount(const std::uint64_t* a, const std::uint64_t* b, std::size_t n);
void cross_power(const std::complex<double>* a, const std::complex<double>* b,
                 std::complex<double>* out, std::size_t n, double zero_threshold);
void pack_quadrature_signs(const std::complex<double>* z, std::size_t n, double threshold,
                           std::uint64_t* real_bits, std::uint64_t* imag_bits);
}  // namespace scalar

bool isa_supported(Isa isa);

/// Table for `isa`, or nullptr when this binary or CPU cannot run it.
const KernelTable* kernels_for(Isa isa);

/// Active table. Chosen on first use: the best supported ISA, unless the
/// LIRIS_SIMD environment variable names one (scalar, avx2, neon).
const KernelTable& kernels();

/// Overrides the active table. Throws ContractError if unsupported.
void force_isa(Isa isa);

}  // namespace liris::simd
