// fnls: complex fields on a periodic grid and their Fourier coefficients.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "fnls/error.hpp"
#include "fnls/grid.hpp"

namespace fnls {

inline bool all_finite(std::span<const cplx> values) {
  return std::all_of(values.begin(), values.end(),
                     [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

/// Physical-space samples u_j of a complex field on a grid.
class ComplexField {
 public:
  ComplexField() = default;
  explicit ComplexField(GridPtr grid) : grid_(std::move(grid)), values_(grid_->size()) {}
  ComplexField(GridPtr grid, std::vector<cplx> values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_->size()) {
      throw Error(ErrorCode::InvalidArgument, "field length does not match grid size");
    }
  }

  /// Samples f(x_j) of a complex-valued function.
  template <class F>
  static ComplexField sample(GridPtr grid, F&& f) {
    ComplexField out(grid);
    const auto& x = grid->x();
    for (std::size_t j = 0; j < x.size(); ++j) out.values_[j] = cplx(f(x[j]));
    return out;
  }

  const GridPtr& grid_ptr() const noexcept { return grid_; }
  const Grid& grid() const noexcept { return *grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::vector<cplx>& values() noexcept { return values_; }
  const std::vector<cplx>& values() const noexcept { return values_; }
  cplx& operator[](std::size_t j) { return values_[j]; }
  const cplx& operator[](std::size_t j) const { return values_[j]; }

  bool finite() const { return all_finite(values_); }

  ComplexField& operator+=(const ComplexField& other) {
    require_same_grid(other);
    for (std::size_t j = 0; j < values_.size(); ++j) values_[j] += other.values_[j];
    return *this;
  }
  ComplexField& operator-=(const ComplexField& other) {
    require_same_grid(other);
    for (std::size_t j = 0; j < values_.size(); ++j) values_[j] -= other.values_[j];
    return *this;
  }
  ComplexField& operator*=(cplx s) {
    for (auto& v : values_) v *= s;
    return *this;
  }

  friend ComplexField operator+(ComplexField lhs, const ComplexField& rhs) { return lhs += rhs; }
  friend ComplexField operator-(ComplexField lhs, const ComplexField& rhs) { return lhs -= rhs; }
  friend ComplexField operator*(cplx s, ComplexField f) { return f *= s; }
  friend ComplexField operator*(ComplexField f, cplx s) { return f *= s; }

  void require_same_grid(const ComplexField& other) const {
    if (!same_grid(*grid_, *other.grid_)) {
      throw Error(ErrorCode::MismatchedGrids, "fields live on different grids");
    }
  }

  static bool same_grid(const Grid& g1, const Grid& g2) {
    return &g1 == &g2 || (g1.size() == g2.size() && g1.a() == g2.a() && g1.b() == g2.b());
  }

 private:
  GridPtr grid_;
  std::vector<cplx> values_;
};

/// Fourier coefficients normalized as coeffs_m = (1/N) sum_j u_j exp(-i k_m x_j),
/// stored in the grid's FFT-native mode order.
class SpectralField {
 public:
  SpectralField() = default;
  explicit SpectralField(GridPtr grid) : grid_(std::move(grid)), coeffs_(grid_->size()) {}
  SpectralField(GridPtr grid, std::vector<cplx> coeffs) : grid_(std::move(grid)), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != grid_->size()) {
      throw Error(ErrorCode::InvalidArgument, "coefficient length does not match grid size");
    }
  }

  const GridPtr& grid_ptr() const noexcept { return grid_; }
  const Grid& grid() const noexcept { return *grid_; }
  std::size_t size() const noexcept { return coeffs_.size(); }
  std::vector<cplx>& coeffs() noexcept { return coeffs_; }
  const std::vector<cplx>& coeffs() const noexcept { return coeffs_; }
  cplx& operator[](std::size_t m) { return coeffs_[m]; }
  const cplx& operator[](std::size_t m) const { return coeffs_[m]; }

 private:
  GridPtr grid_;
  std::vector<cplx> coeffs_;
};

inline SpectralField forward(const ComplexField& f) {
  if (!f.finite()) throw Error(ErrorCode::NonFiniteInput, "forward transform of a non-finite field");
  SpectralField out(f.grid_ptr(), f.values());
  f.grid().forward_inplace(out.coeffs());
  return out;
}

inline ComplexField inverse(const SpectralField& F) {
  if (!all_finite(F.coeffs())) throw Error(ErrorCode::NonFiniteInput, "inverse transform of non-finite coefficients");
  ComplexField out(F.grid_ptr(), F.coeffs());
  F.grid().inverse_inplace(out.values());
  return out;
}

inline double max_abs(std::span<const cplx> values) {
  double m = 0.0;
  for (const auto& v : values) m = std::max(m, std::abs(v));
  return m;
}

inline double linf(const ComplexField& f) { return max_abs(f.values()); }

inline double linf_distance(const ComplexField& f, const ComplexField& g) {
  f.require_same_grid(g);
  double m = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) m = std::max(m, std::abs(f[j] - g[j]));
  return m;
}

/// h * sum_j |u_j|^p, the rectangle (periodic trapezoidal) rule for the L^p norm to the p-th power.
inline double lp_norm_pow(const ComplexField& f, double p) {
  double s = 0.0;
  for (const auto& v : f.values()) s += std::pow(std::abs(v), p);
  return s * f.grid().h();
}

/// Circular shift by `shift` samples: out_j = in_{j - shift}.
inline ComplexField circular_shift(const ComplexField& f, long shift) {
  const auto n = static_cast<long>(f.size());
  ComplexField out(f.grid_ptr());
  for (long j = 0; j < n; ++j) {
    long src = (j - shift) % n;
    if (src < 0) src += n;
    out[static_cast<std::size_t>(j)] = f[static_cast<std::size_t>(src)];
  }
  return out;
}

}  // namespace fnls
