#include "liris/fft.hpp"

#include "liris/error.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>

namespace liris::fft {
namespace {

// FFTW planning is not thread-safe; execution with the new-array interface
// is. Plans are created once per shape under a lock, on 16-byte aligned
// scratch, and always executed on fftw_malloc'd buffers of the same shape.
enum class Kind { Forward2d, Inverse2d, ForwardRows, InverseRows };

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};
using PlanPtr = std::unique_ptr<fftw_plan_s, PlanDeleter>;

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <typename T>
FftwBuffer<T> allocate(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * (n == 0 ? 1 : n)));
  if (p == nullptr) throw std::bad_alloc();
  return FftwBuffer<T>(p);
}

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_plan get_plan(Kind kind, int rows, int cols) {
  static std::map<std::tuple<Kind, int, int>, PlanPtr> cache;
  std::lock_guard lock(planner_mutex());
  auto key = std::make_tuple(kind, rows, cols);
  if (auto it = cache.find(key); it != cache.end()) return it->second.get();

  const std::size_t real_n = static_cast<std::size_t>(rows) * cols;
  auto real_buf = allocate<double>(real_n);
  auto cplx_buf = allocate<fftw_complex>(real_n);
  fftw_plan plan = nullptr;
  const unsigned flags = FFTW_ESTIMATE;
  switch (kind) {
    case Kind::Forward2d:
      plan = fftw_plan_dft_r2c_2d(rows, cols, real_buf.get(), cplx_buf.get(), flags);
      break;
    case Kind::Inverse2d:
      plan = fftw_plan_dft_c2r_2d(rows, cols, cplx_buf.get(), real_buf.get(), flags);
      break;
    case Kind::ForwardRows: {
      int n[] = {cols};
      plan = fftw_plan_many_dft_r2c(1, n, rows, real_buf.get(), nullptr, 1, cols,
                                    cplx_buf.get(), nullptr, 1, half_cols(cols), flags);
      break;
    }
    case Kind::InverseRows: {
      int n[] = {cols};
      plan = fftw_plan_many_dft(1, n, rows, cplx_buf.get(), nullptr, 1, cols, cplx_buf.get(),
                                nullptr, 1, cols, FFTW_BACKWARD, flags);
      break;
    }
  }
  if (plan == nullptr) throw ContractError("FFTW could not plan transform");
  return cache.emplace(key, PlanPtr(plan)).first->second.get();
}

void check_shape(int rows, int cols, std::size_t in_size, std::size_t expected_in,
                 std::size_t out_size, std::size_t expected_out) {
  if (rows <= 0 || cols <= 0) throw ContractError("fft: non-positive dimensions");
  if (in_size != expected_in || out_size != expected_out)
    throw ContractError("fft: buffer size does not match " + std::to_string(rows) + "x" +
                        std::to_string(cols));
}

}  // namespace

void forward_2d(std::span<const double> in, int rows, int cols,
                std::span<std::complex<double>> out) {
  const std::size_t n = static_cast<std::size_t>(rows) * cols;
  const std::size_t h = static_cast<std::size_t>(rows) * half_cols(cols);
  check_shape(rows, cols, in.size(), n, out.size(), h);
  fftw_plan plan = get_plan(Kind::Forward2d, rows, cols);
  auto src = allocate<double>(n);
  auto dst = allocate<fftw_complex>(h);
  std::copy(in.begin(), in.end(), src.get());
  fftw_execute_dft_r2c(plan, src.get(), dst.get());
  for (std::size_t i = 0; i < h; ++i) out[i] = {dst[i][0], dst[i][1]};
}

void inverse_2d(std::span<const std::complex<double>> in, int rows, int cols,
                std::span<double> out) {
  const std::size_t n = static_cast<std::size_t>(rows) * cols;
  const std::size_t h = static_cast<std::size_t>(rows) * half_cols(cols);
  check_shape(rows, cols, in.size(), h, out.size(), n);
  fftw_plan plan = get_plan(Kind::Inverse2d, rows, cols);
  auto src = allocate<fftw_complex>(h);
  auto dst = allocate<double>(n);
  for (std::size_t i = 0; i < h; ++i) {
    src[i][0] = in[i].real();
    src[i][1] = in[i].imag();
  }
  fftw_execute_dft_c2r(plan, src.get(), dst.get());
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = dst[i] * scale;
}

void forward_rows(std::span<const double> in, int rows, int cols,
                  std::span<std::complex<double>> out) {
  const std::size_t n = static_cast<std::size_t>(rows) * cols;
  const std::size_t h = static_cast<std::size_t>(rows) * half_cols(cols);
  check_shape(rows, cols, in.size(), n, out.size(), h);
  fftw_plan plan = get_plan(Kind::ForwardRows, rows, cols);
  auto src = allocate<double>(n);
  auto dst = allocate<fftw_complex>(h);
  std::copy(in.begin(), in.end(), src.get());
  fftw_execute_dft_r2c(plan, src.get(), dst.get());
  for (std::size_t i = 0; i < h; ++i) out[i] = {dst[i][0], dst[i][1]};
}

void inverse_rows(std::span<std::complex<double>> data, int rows, int cols) {
  const std::size_t n = static_cast<std::size_t>(rows) * cols;
  check_shape(rows, cols, data.size(), n, data.size(), n);
  fftw_plan plan = get_plan(Kind::InverseRows, rows, cols);
  auto buf = allocate<fftw_complex>(n);
  for (std::size_t i = 0; i < n; ++i) {
    buf[i][0] = data[i].real();
    buf[i][1] = data[i].imag();
  }
  fftw_execute_dft(plan, buf.get(), buf.get());
  const double scale = 1.0 / static_cast<double>(cols);
  for (std::size_t i = 0; i < n; ++i) data[i] = {buf[i][0] * scale, buf[i][1] * scale};
}

}  // namespace liris::fft
