// fnls: periodic grid, wavenumber table and FFT plans.
#pragma once

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "fnls/error.hpp"

namespace fnls {

using cplx = std::complex<double>;

namespace detail {

struct FftPlans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

// FFTW's planner is not thread safe, so plan creation is serialized here.
// Plans are created in-place with FFTW_UNALIGNED and executed through the
// new-array interface, which is safe to call concurrently on distinct arrays.
// Plans live for the lifetime of the process.
inline FftPlans plans_for(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, FftPlans> cache;
  std::lock_guard lock(mutex);
  if (auto it = cache.find(n); it != cache.end()) return it->second;
  std::vector<cplx> scratch(n);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  const int len = static_cast<int>(n);
  FftPlans plans;
  plans.forward = fftw_plan_dft_1d(len, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  plans.backward = fftw_plan_dft_1d(len, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  cache.emplace(n, plans);
  return plans;
}

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace detail

/// Uniform periodic mesh on [a, b) with N points, x_j = a + j h.
///
/// Wavenumbers are stored in FFT-native order: k_m = 2 pi m / (b - a) for
/// m = 0, 1, ..., N/2 - 1, -N/2, ..., -1. The grid is immutable after
/// construction and may be shared freely between threads; the transforms
/// below only touch caller-owned buffers.
class Grid {
 public:
  Grid(double a, double b, std::size_t n) : a_(a), b_(b), n_(n) {
    if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) {
      throw Error(ErrorCode::DegenerateInterval,
                  "interval [" + std::to_string(a) + ", " + std::to_string(b) + "] is empty");
    }
    if (n % 2 != 0 || n < 8) {
      throw Error(ErrorCode::NonEvenN, "N = " + std::to_string(n) + " must be even and >= 8");
    }
    if (!detail::is_power_of_two(n)) {
      throw Error(ErrorCode::NonEvenN, "N = " + std::to_string(n) + " must be a power of two");
    }
    const double length = b - a;
    h_ = length / static_cast<double>(n);
    x_.resize(n);
    k_.resize(n);
    index_.resize(n);
    phase_.resize(n);
    const auto half = static_cast<long>(n / 2);
    for (std::size_t j = 0; j < n; ++j) {
      x_[j] = a + static_cast<double>(j) * h_;
      const long m = static_cast<long>(j) < half ? static_cast<long>(j) : static_cast<long>(j) - 2 * half;
      index_[j] = m;
      k_[j] = 2.0 * std::numbers::pi * static_cast<double>(m) / length;
      // exp(-i k_m a); the argument is reduced in m so it stays exact for
      // the common symmetric case a = -L/2.
      const double turns = std::remainder(static_cast<double>(m) * a / length, 1.0);
      phase_[j] = std::polar(1.0, -2.0 * std::numbers::pi * turns);
    }
    plans_ = detail::plans_for(n);
  }

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  double length() const noexcept { return b_ - a_; }
  std::size_t size() const noexcept { return n_; }
  double h() const noexcept { return h_; }
  const std::vector<double>& x() const noexcept { return x_; }
  const std::vector<double>& k() const noexcept { return k_; }
  /// Integer mode index m of entry j (k_j = 2 pi m / L).
  const std::vector<long>& mode_index() const noexcept { return index_; }
  /// Largest |k| on the grid (the Nyquist wavenumber).
  double k_max() const noexcept { return std::numbers::pi / h_; }

  /// Index of the grid point closest to x = 0 (clamped to the grid).
  std::size_t index_nearest_origin() const {
    std::size_t best = 0;
    for (std::size_t j = 1; j < n_; ++j) {
      if (std::abs(x_[j]) < std::abs(x_[best])) best = j;
    }
    return best;
  }

  /// coeffs_m = (1/N) sum_j values_j exp(-i k_m x_j), in place.
  void forward_inplace(std::span<cplx> data) const {
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plans_.forward, buf, buf);
    const double scale = 1.0 / static_cast<double>(n_);
    for (std::size_t m = 0; m < n_; ++m) data[m] *= phase_[m] * scale;
  }

  /// values_j = sum_m coeffs_m exp(i k_m x_j), in place.
  void inverse_inplace(std::span<cplx> data) const {
    for (std::size_t m = 0; m < n_; ++m) data[m] *= std::conj(phase_[m]);
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plans_.backward, buf, buf);
  }

 private:
  double a_;
  double b_;
  std::size_t n_;
  double h_ = 0.0;
  std::vector<double> x_;
  std::vector<double> k_;
  std::vector<long> index_;
  std::vector<cplx> phase_;
  detail::FftPlans plans_;
};

using GridPtr = std::shared_ptr<const Grid>;

inline GridPtr make_grid(double a, double b, std::size_t n) {
  return std::make_shared<const Grid>(a, b, n);
}

}  // namespace fnls
