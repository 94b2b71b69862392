#include "liris/simd/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cstring>

#define LIRIS_AVX2 __attribute__((target("avx2,popcnt")))

namespace liris::simd::avx2 {
namespace {

// Nibble lookup popcount (Mula, Kurz, Lemire); per-64-bit-lane sums via SAD.
LIRIS_AVX2 inline __m256i popcount_epi64(__m256i v) {
  const __m256i lut = _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4,
                                       0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4);
  const __m256i low_mask = _mm256_set1_epi8(0x0f);
  const __m256i lo = _mm256_and_si256(v, low_mask);
  const __m256i hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), low_mask);
  const __m256i counts =
      _mm256_add_epi8(_mm256_shuffle_epi8(lut, lo), _mm256_shuffle_epi8(lut, hi));
  return _mm256_sad_epu8(counts, _mm256_setzero_si256());
}

}  // namespace

LIRIS_AVX2 std::uint64_t xor_popcount(const std::uint64_t* a, const std::uint64_t* b,
                                      std::size_t n) {
  __m256i acc = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
    acc = _mm256_add_epi64(acc, popcount_epi64(_mm256_xor_si256(va, vb)));
  }
  alignas(32) std::uint64_t lanes[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
  std::uint64_t total = lanes[0] + lanes[1] + lanes[2] + lanes[3];
  for (; i < n; ++i) total += static_cast<std::uint64_t>(_mm_popcnt_u64(a[i] ^ b[i]));
  return total;
}

LIRIS_AVX2 void cross_power(const std::complex<double>* a, const std::complex<double>* b,
                            std::complex<double>* out, std::size_t n,
                            double zero_threshold) {
  const double* ap = reinterpret_cast<const double*>(a);
  const double* bp = reinterpret_cast<const double*>(b);
  double* op = reinterpret_cast<double*>(out);
  const __m256d thr = _mm256_set1_pd(zero_threshold);
  std::size_t i = 0;
  // Two complex values per register: [re0, im0, re1, im1].
  for (; i + 2 <= n; i += 2) {
    const __m256d va = _mm256_loadu_pd(ap + 2 * i);
    const __m256d vb = _mm256_loadu_pd(bp + 2 * i);
    const __m256d ar = _mm256_movedup_pd(va);            // [ar0, ar0, ar1, ar1]
    const __m256d ai = _mm256_permute_pd(va, 0b1111);    // [ai0, ai0, ai1, ai1]
    const __m256d bswap = _mm256_permute_pd(vb, 0b0101); // [bi0, br0, bi1, br1]
    // re: br*ar + bi*ai ; im: bi*ar - br*ai
    const __m256d t1 = _mm256_mul_pd(vb, ar);     // [br*ar, bi*ar]
    const __m256d t2 = _mm256_mul_pd(bswap, ai);  // [bi*ai, br*ai]
    const __m256d sum = _mm256_add_pd(t1, t2);
    const __m256d diff = _mm256_sub_pd(t1, t2);
    const __m256d p = _mm256_blend_pd(sum, diff, 0b1010);  // [pr, pi]
    const __m256d sq = _mm256_mul_pd(p, p);
    const __m256d sq_swap = _mm256_permute_pd(sq, 0b0101);
    // pr*pr + pi*pi in both slots, same operand order as the scalar path.
    const __m256d norm2 = _mm256_blend_pd(_mm256_add_pd(sq, sq_swap),
                                          _mm256_add_pd(sq_swap, sq), 0b1010);
    const __m256d mag = _mm256_sqrt_pd(norm2);
    const __m256d keep = _mm256_cmp_pd(mag, thr, _CMP_GT_OQ);
    const __m256d q = _mm256_div_pd(p, mag);
    _mm256_storeu_pd(op + 2 * i, _mm256_and_pd(q, keep));
  }
  if (i < n) scalar::cross_power(a + i, b + i, out + i, n - i, zero_threshold);
}

LIRIS_AVX2 void pack_quadrature_signs(const std::complex<double>* z, std::size_t n, double threshold,
                                      std::uint64_t* real_bits,
                                      std::uint64_t* imag_bits) {
  const double* zp = reinterpret_cast<const double*>(z);
  const __m256d zero = _mm256_set1_pd(threshold);
  const std::size_t words = (n + 63) / 64;
  std::size_t i = 0;
  for (std::size_t w = 0; w < words; ++w) {
    std::uint64_t re = 0, im = 0;
    const std::size_t end = (w + 1) * 64 < n ? (w + 1) * 64 : n;
    // Four complex values per step: two movemasks of [r, i, r, i].
    for (; i + 4 <= end; i += 4) {
      const int m0 = _mm256_movemask_pd(_mm256_cmp_pd(_mm256_loadu_pd(zp + 2 * i), zero, _CMP_GT_OQ));
      const int m1 = _mm256_movemask_pd(_mm256_cmp_pd(_mm256_loadu_pd(zp + 2 * i + 4), zero, _CMP_GT_OQ));
      const unsigned m = static_cast<unsigned>(m0) | (static_cast<unsigned>(m1) << 4);
      // m bits: r0 i0 r1 i1 r2 i2 r3 i3
      const std::uint64_t r4 = (m & 1u) | ((m >> 1) & 2u) | ((m >> 2) & 4u) | ((m >> 3) & 8u);
      const std::uint64_t i4 =
          ((m >> 1) & 1u) | ((m >> 2) & 2u) | ((m >> 3) & 4u) | ((m >> 4) & 8u);
      const unsigned shift = static_cast<unsigned>(i - w * 64);
      re |= r4 << shift;
      im |= i4 << shift;
    }
    for (; i < end; ++i) {
      const unsigned shift = static_cast<unsigned>(i - w * 64);
      re |= static_cast<std::uint64_t>(zp[2 * i] > threshold) << shift;
      im |= static_cast<std::uint64_t>(zp[2 * i + 1] > threshold) << shift;
    }
    real_bits[w] = re;
    imag_bits[w] = im;
  }
}

}  // namespace liris::simd::avx2

#endif
