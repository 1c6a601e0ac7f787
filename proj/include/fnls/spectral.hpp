// fnls: Fourier multipliers (fractional derivatives, d/dx, dealiasing).
#pragma once

#include <cmath>
#include <vector>

#include "fnls/error.hpp"
#include "fnls/field.hpp"

namespace fnls {

/// Symbol |k|^gamma of D^gamma on the grid, in FFT-native order.
///
/// The k = 0 entry is 0 for every gamma != 0 (D^gamma annihilates the mean
/// mode; for gamma < 0 this is the usual regularization of the singular
/// symbol) and 1 for gamma == 0, so D^0 is exactly the identity.
inline std::vector<double> fractional_multiplier(const Grid& g, double gamma) {
  if (!std::isfinite(gamma)) throw Error(ErrorCode::InvalidArgument, "fractional order must be finite");
  const auto& k = g.k();
  std::vector<double> out(k.size());
  for (std::size_t m = 0; m < k.size(); ++m) {
    if (k[m] == 0.0) {
      out[m] = gamma == 0.0 ? 1.0 : 0.0;
    } else {
      out[m] = gamma == 0.0 ? 1.0 : std::pow(std::abs(k[m]), gamma);
    }
  }
  return out;
}

inline ComplexField apply_multiplier(const ComplexField& f, const std::vector<double>& symbol) {
  auto F = forward(f);
  for (std::size_t m = 0; m < symbol.size(); ++m) F[m] *= symbol[m];
  return inverse(F);
}

/// D^gamma f, computed spectrally with fractional_multiplier.
inline ComplexField apply_D(const ComplexField& f, double gamma) {
  return apply_multiplier(f, fractional_multiplier(f.grid(), gamma));
}

/// Symbol i k of d/dx with the Nyquist mode zeroed, so real fields have real derivatives.
inline std::vector<cplx> derivative_symbol(const Grid& g) {
  const auto& k = g.k();
  const auto nyquist = g.size() / 2;
  std::vector<cplx> out(k.size());
  for (std::size_t m = 0; m < k.size(); ++m) out[m] = m == nyquist ? cplx(0.0) : cplx(0.0, k[m]);
  return out;
}

inline ComplexField spatial_derivative(const ComplexField& f) {
  auto F = forward(f);
  const auto symbol = derivative_symbol(f.grid());
  for (std::size_t m = 0; m < symbol.size(); ++m) F[m] *= symbol[m];
  return inverse(F);
}

/// 2/3-rule mask: 1 for |m| < N/3, 0 otherwise. Off by default everywhere.
inline std::vector<double> dealias_mask(const Grid& g) {
  const auto& idx = g.mode_index();
  const double cutoff = static_cast<double>(g.size()) / 3.0;
  std::vector<double> out(idx.size());
  for (std::size_t m = 0; m < idx.size(); ++m) out[m] = std::abs(static_cast<double>(idx[m])) < cutoff ? 1.0 : 0.0;
  return out;
}

}  // namespace fnls
