#include "liris/error.hpp"
#include "liris/simd/kernels.hpp"
#include "support/oracles.hpp"
#include "support/scenes.hpp"

#include <gtest/gtest.h>

#include <bit>
#include <cstring>
#include <random>
#include <vector>

using namespace liris;
using namespace liris::simd;

namespace {

std::vector<const KernelTable*> vector_tables() {
  std::vector<const KernelTable*> out;
  for (Isa isa : {Isa::Avx2, Isa::Neon})
    if (const KernelTable* t = kernels_for(isa)) out.push_back(t);
  return out;
}

bool same_bits(std::complex<double> a, std::complex<double> b) {
  return std::memcmp(&a, &b, sizeof a) == 0;
}

// Restores the startup table after a test that forces one.
struct IsaGuard {
  Isa saved = kernels().isa;
  ~IsaGuard() { force_isa(saved); }
};

}  // namespace

TEST(Kernels, ScalarAlwaysAvailable) {
  ASSERT_NE(kernels_for(Isa::Scalar), nullptr);
  EXPECT_TRUE(isa_supported(Isa::Scalar));
  EXPECT_EQ(isa_name(Isa::Avx2), "avx2");
  if (!isa_supported(Isa::Neon)) EXPECT_THROW(force_isa(Isa::Neon), ContractError);
  std::printf("active kernels: %s\n", std::string(isa_name(kernels().isa)).c_str());
}

TEST(Kernels, ScalarXorPopcountMatchesStd) {
  std::mt19937_64 rng(1);
  std::vector<std::uint64_t> a(37), b(37);
  for (auto& w : a) w = rng();
  for (auto& w : b) w = rng();
  std::uint64_t ref = 0;
  for (int i = 0; i < 37; ++i) ref += std::popcount(a[i] ^ b[i]);
  EXPECT_EQ(scalar::xor_popcount(a.data(), b.data(), 37), ref);
}

TEST(Kernels, ScalarPackMatchesDefinition) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  std::vector<std::complex<double>> z(130);
  for (auto& v : z) v = {g(rng), g(rng)};
  z[5] = {0.0, -0.0};
  z[6] = {0.25, 0.25};
  std::vector<std::uint64_t> re(3, ~0ull), im(3, ~0ull);
  scalar::pack_quadrature_signs(z.data(), z.size(), 0.25, re.data(), im.data());
  for (std::size_t i = 0; i < 192; ++i) {
    const bool r = i < 130 && z[i].real() > 0.25, m = i < 130 && z[i].imag() > 0.25;
    EXPECT_EQ(((re[i / 64] >> (i % 64)) & 1) != 0, r) << i;
    EXPECT_EQ(((im[i / 64] >> (i % 64)) & 1) != 0, m) << i;
  }
}

TEST(Kernels, ScalarCrossPowerMatchesDefinition) {
  const std::complex<double> a[3] = {{1, 2}, {0, 0}, {3, -1}};
  const std::complex<double> b[3] = {{-2, 1}, {5, 5}, {1e-20, 0}};
  std::complex<double> out[3];
  scalar::cross_power(a, b, out, 3, 1e-12);
  const std::complex<double> p = b[0] * std::conj(a[0]);
  EXPECT_NEAR(std::abs(out[0] - p / std::abs(p)), 0.0, 1e-15);
  EXPECT_EQ(out[1], std::complex<double>(0, 0));
  EXPECT_EQ(out[2], std::complex<double>(0, 0));
}

TEST(Kernels, VectorXorPopcountEqualsScalar) {
  std::mt19937_64 rng(3);
  for (const KernelTable* t : vector_tables()) {
    for (std::size_t n = 0; n <= 70; ++n) {
      std::vector<std::uint64_t> a(n), b(n);
      for (auto& w : a) w = rng();
      for (auto& w : b) w = (n % 3 == 0) ? ~std::uint64_t{0} : rng();
      EXPECT_EQ(t->xor_popcount(a.data(), b.data(), n), scalar::xor_popcount(a.data(), b.data(), n))
          << isa_name(t->isa) << " n=" << n;
    }
  }
}

TEST(Kernels, VectorCrossPowerBitIdentical) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(0.0, 1e3);
  for (const KernelTable* t : vector_tables()) {
    for (std::size_t n : {0u, 1u, 2u, 3u, 7u, 181u, 14480u}) {
      std::vector<std::complex<double>> a(n), b(n), x(n), y(n);
      for (std::size_t i = 0; i < n; ++i) {
        a[i] = {g(rng), g(rng)};
        b[i] = {g(rng), g(rng)};
        if (i % 11 == 0) a[i] *= 1e-12;  // some entries under the cutoff
        if (i % 13 == 0) b[i] = 0.0;
      }
      t->cross_power(a.data(), b.data(), x.data(), n, 1e-3);
      scalar::cross_power(a.data(), b.data(), y.data(), n, 1e-3);
      for (std::size_t i = 0; i < n; ++i)
        ASSERT_TRUE(same_bits(x[i], y[i])) << isa_name(t->isa) << " n=" << n << " i=" << i;
    }
  }
}

TEST(Kernels, VectorPackEqualsScalar) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (const KernelTable* t : vector_tables()) {
    for (std::size_t n : {0u, 1u, 3u, 4u, 63u, 64u, 65u, 200u, 360u}) {
      std::vector<std::complex<double>> z(n);
      for (auto& v : z) v = {g(rng), g(rng)};
      for (std::size_t i = 0; i < n; i += 9) z[i] = {0.1, -0.0};
      const std::size_t w = (n + 63) / 64;
      std::vector<std::uint64_t> r1(w, 7), i1(w, 7), r2(w, 9), i2(w, 9);
      t->pack_quadrature_signs(z.data(), n, 0.1, r1.data(), i1.data());
      scalar::pack_quadrature_signs(z.data(), n, 0.1, r2.data(), i2.data());
      EXPECT_EQ(r1, r2) << isa_name(t->isa) << " n=" << n;
      EXPECT_EQ(i1, i2) << isa_name(t->isa) << " n=" << n;
    }
  }
}

TEST(Kernels, PipelineIdenticalAcrossIsas) {
  if (vector_tables().empty()) GTEST_SKIP() << "no vector kernels on this machine";
  IsaGuard guard;
  const auto& w = scenes::world();
  const Pose pa = scenes::road_pose(w, 5, 0.2), pb = scenes::road_pose(w, 6, 2.0);
  force_isa(Isa::Scalar);
  const auto sa = scenes::scan_descriptor(0, w, pa), sb = scenes::scan_descriptor(1, w, pb);
  const MatchResult sm = match_pair(sa, sb);
  for (const KernelTable* t : vector_tables()) {
    force_isa(t->isa);
    const auto va = scenes::scan_descriptor(0, w, pa), vb = scenes::scan_descriptor(1, w, pb);
    EXPECT_EQ(va.features, sa.features);
    EXPECT_EQ(vb.features, sb.features);
    const MatchResult vm = match_pair(va, vb);
    EXPECT_EQ(vm.distance, sm.distance);
    EXPECT_EQ(vm.shift, sm.shift);
  }
}
