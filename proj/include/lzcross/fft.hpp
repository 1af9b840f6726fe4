#pragma once

#include <complex>
#include <mutex>
#include <span>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

namespace lzcross::fft {

enum class Direction { forward, backward };

namespace detail {
// FFTW planning is not thread-safe; execution of distinct plans is.
inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

/// In-place unnormalized multi-dimensional DFT over a row-major array.
/// forward: X_k = sum_x f_x e^{-2 pi i k.x/N}; backward uses e^{+...}.
/// FFTW_ESTIMATE plans are deterministic, so repeated calls are bit-identical.
inline void transform(std::span<std::complex<double>> data, std::span<const std::size_t> shape, Direction dir) {
  std::vector<int> dims;
  std::size_t total = 1;
  for (auto n : shape) {
    dims.push_back(static_cast<int>(n));
    total *= n;
  }
  if (total != data.size()) throw std::invalid_argument("fft::transform: data size does not match shape");
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard lock(detail::planner_mutex());
    plan = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), buf, buf,
                         dir == Direction::forward ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw std::runtime_error("fft::transform: FFTW planning failed");
  fftw_execute(plan);
  std::lock_guard lock(detail::planner_mutex());
  fftw_destroy_plan(plan);
}

}  // namespace lzcross::fft
