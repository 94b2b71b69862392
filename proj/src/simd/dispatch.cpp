#include "liris/error.hpp"
#include "liris/simd/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace liris::simd {

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
std::uint64_t xor_popcount(const std::uint64_t*, const std::uint64_t*, std::size_t);
void cross_power(const std::complex<double>*, const std::complex<double>*,
                 std::complex<double>*, std::size_t, double);
void pack_quadrature_signs(const std::complex<double>*, std::size_t, double,
                           std::uint64_t*, std::uint64_t*);
}  // namespace avx2
#endif

#if defined(__aarch64__) && defined(__ARM_NEON)
namespace neon {
std::uint64_t xor_popcount(const std::uint64_t*, const std::uint64_t*, std::size_t);
void cross_power(const std::complex<double>*, const std::complex<double>*,
                 std::complex<double>*, std::size_t, double);
void pack_quadrature_signs(const std::complex<double>*, std::size_t, double,
                           std::uint64_t*, std::uint64_t*);
}  // namespace neon
#endif

namespace {

constexpr KernelTable kScalar{Isa::Scalar, &scalar::xor_popcount, &scalar::cross_power,
                              &scalar::pack_quadrature_signs};
#if defined(__x86_64__) || defined(_M_X64)
constexpr KernelTable kAvx2{Isa::Avx2, &avx2::xor_popcount, &avx2::cross_power,
                            &avx2::pack_quadrature_signs};
#endif
#if defined(__aarch64__) && defined(__ARM_NEON)
constexpr KernelTable kNeon{Isa::Neon, &neon::xor_popcount, &neon::cross_power,
                            &neon::pack_quadrature_signs};
#endif

const KernelTable* best_supported() {
  if (const auto* t = kernels_for(Isa::Avx2)) return t;
  if (const auto* t = kernels_for(Isa::Neon)) return t;
  return &kScalar;
}

const KernelTable* initial_table() {
  if (const char* env = std::getenv("LIRIS_SIMD")) {
    const std::string v(env);
    if (v == "scalar") return &kScalar;
    if (v == "avx2" && kernels_for(Isa::Avx2)) return kernels_for(Isa::Avx2);
    if (v == "neon" && kernels_for(Isa::Neon)) return kernels_for(Isa::Neon);
  }
  return best_supported();
}

std::atomic<const KernelTable*>& active() {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

bool isa_supported(Isa isa) { return kernels_for(isa) != nullptr; }

const KernelTable* kernels_for(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return &kScalar;
    case Isa::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
      if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("popcnt")) return &kAvx2;
#endif
      return nullptr;
    case Isa::Neon:
#if defined(__aarch64__) && defined(__ARM_NEON)
      return &kNeon;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

const KernelTable& kernels() { return *active().load(std::memory_order_acquire); }

void force_isa(Isa isa) {
  const KernelTable* t = kernels_for(isa);
  if (t == nullptr)
    throw ContractError("SIMD level not supported here: " + std::string(isa_name(isa)));
  active().store(t, std::memory_order_release);
}

}  // namespace liris::simd
