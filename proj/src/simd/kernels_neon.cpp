#include "liris/simd/kernels.hpp"

#if defined(__aarch64__) && defined(__ARM_NEON)

#include <arm_neon.h>

namespace liris::simd::neon {

std::uint64_t xor_popcount(const std::uint64_t* a, const std::uint64_t* b, std::size_t n) {
  uint64x2_t acc = vdupq_n_u64(0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const uint8x16_t x = veorq_u8(vld1q_u8(reinterpret_cast<const std::uint8_t*>(a + i)),
                                  vld1q_u8(reinterpret_cast<const std::uint8_t*>(b + i)));
    acc = vaddq_u64(acc, vpaddlq_u32(vpaddlq_u16(vpaddlq_u8(vcntq_u8(x)))));
  }
  std::uint64_t total = vgetq_lane_u64(acc, 0) + vgetq_lane_u64(acc, 1);
  for (; i < n; ++i) total += static_cast<std::uint64_t>(__builtin_popcountll(a[i] ^ b[i]));
  return total;
}

void cross_power(const std::complex<double>* a, const std::complex<double>* b,
                 std::complex<double>* out, std::size_t n, double zero_threshold) {
  const double* ap = reinterpret_cast<const double*>(a);
  const double* bp = reinterpret_cast<const double*>(b);
  double* op = reinterpret_cast<double*>(out);
  const float64x2_t thr = vdupq_n_f64(zero_threshold);
  for (std::size_t i = 0; i < n; ++i) {
    const float64x2_t va = vld1q_f64(ap + 2 * i);  // [ar, ai]
    const float64x2_t vb = vld1q_f64(bp + 2 * i);  // [br, bi]
    const float64x2_t ar = vdupq_laneq_f64(va, 0);
    const float64x2_t ai = vdupq_laneq_f64(va, 1);
    const float64x2_t bswap = vextq_f64(vb, vb, 1);  // [bi, br]
    const float64x2_t t1 = vmulq_f64(vb, ar);        // [br*ar, bi*ar]
    const float64x2_t t2 = vmulq_f64(bswap, ai);     // [bi*ai, br*ai]
    const float64x2_t sum = vaddq_f64(t1, t2);
    const float64x2_t diff = vsubq_f64(t1, t2);
    const float64x2_t p = vcombine_f64(vget_low_f64(sum), vget_high_f64(diff));
    const float64x2_t sq = vmulq_f64(p, p);
    const float64x2_t norm2 = vdupq_n_f64(vgetq_lane_f64(sq, 0) + vgetq_lane_f64(sq, 1));
    const float64x2_t mag = vsqrtq_f64(norm2);
    const uint64x2_t keep = vcgtq_f64(mag, thr);
    const float64x2_t q = vdivq_f64(p, mag);
    vst1q_f64(op + 2 * i,
              vreinterpretq_f64_u64(vandq_u64(vreinterpretq_u64_f64(q), keep)));
  }
}

void pack_quadrature_signs(const std::complex<double>* z, std::size_t n, double threshold,
                           std::uint64_t* real_bits, std::uint64_t* imag_bits) {
  const double* zp = reinterpret_cast<const double*>(z);
  const float64x2_t zero = vdupq_n_f64(threshold);
  const std::size_t words = (n + 63) / 64;
  for (std::size_t w = 0; w < words; ++w) {
    std::uint64_t re = 0, im = 0;
    const std::size_t end = (w + 1) * 64 < n ? (w + 1) * 64 : n;
    for (std::size_t i = w * 64; i < end; ++i) {
      const uint64x2_t gt = vcgtq_f64(vld1q_f64(zp + 2 * i), zero);
      const unsigned shift = static_cast<unsigned>(i - w * 64);
      re |= (vgetq_lane_u64(gt, 0) & 1u) << shift;
      im |= (vgetq_lane_u64(gt, 1) & 1u) << shift;
    }
    real_bits[w] = re;
    imag_bits[w] = im;
  }
}

}  // namespace liris::simd::neon

#endif
