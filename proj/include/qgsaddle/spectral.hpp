#pragma once

// Periodic discrete Fourier machinery on [0, 2π)^d.
//
// Normalization: the forward transform is unscaled, c_k = Σ_j v_j e^{-i k·x_j};
// the inverse divides by the point count N. Parseval then reads
//   mean_j |v_j|² = (1/N²) Σ_k |c_k|²
// with the sum over the full (not half) spectrum; parseval_mean_square()
// evaluates the right-hand side from the stored half-spectrum.

#include <utility>
#include <vector>

#include "qgsaddle/grid.hpp"

namespace qgsaddle {

/// Fourier multiplier tags.
struct Symbol {
  enum class Kind { frac_laplacian, ddx1, ddx2, inv_frac_laplacian, dealias_two_thirds, hilbert_1d };

  Kind kind;
  double exponent = 0.0;  // s for the (inverse) fractional Laplacian |k|^{±s}

  static Symbol frac_laplacian(double s) { return {Kind::frac_laplacian, s}; }
  static Symbol inv_frac_laplacian(double s) { return {Kind::inv_frac_laplacian, s}; }
  static Symbol ddx1() { return {Kind::ddx1}; }
  static Symbol ddx2() { return {Kind::ddx2}; }
  static Symbol dealias_two_thirds() { return {Kind::dealias_two_thirds}; }
  /// Multiplier −i·sign(k), k = 0 ↦ 0.
  static Symbol hilbert_1d() { return {Kind::hilbert_1d}; }
};

/// Per-mode multiplier in half-spectrum layout; the mode is multiplied by
/// `values[i]` or, when `imaginary`, by i·values[i].
struct Multiplier {
  std::vector<double> values;
  bool imaginary = false;
};

Multiplier make_multiplier(const Grid2D& grid, const Symbol& symbol);
Multiplier make_multiplier_1d(int n, const Symbol& symbol);

/// True when |k1| > n/3 or |k2| > n/3 would be removed by the 2/3 rule.
inline bool outside_two_thirds(int k, int n) { return 3 * (k < 0 ? -k : k) > n; }

Spectrum2D to_spectral(const Field2D& field);
Field2D to_physical(const Spectrum2D& spectrum);
Spectrum1D to_spectral(const Field1D& field);
Field1D to_physical(const Spectrum1D& spectrum);

double parseval_mean_square(const Spectrum2D& spectrum);
double parseval_mean_square(const Spectrum1D& spectrum);

void apply_multiplier(Spectrum2D& spectrum, const Multiplier& m);
void apply_multiplier(Spectrum1D& spectrum, const Multiplier& m);

void apply_symbol(Spectrum2D& spectrum, const Symbol& symbol);
void apply_symbol(Spectrum1D& spectrum, const Symbol& symbol);
Field2D apply_symbol(const Field2D& field, const Symbol& symbol);
Field1D apply_symbol(const Field1D& field, const Symbol& symbol);

/// ∇⊥θ = (−∂θ/∂x₂, ∂θ/∂x₁), differentiated spectrally.
std::pair<Field2D, Field2D> perp_grad(const Field2D& theta);

/// Spectrally evaluated pointwise divergence ∂₁v₁ + ∂₂v₂.
Field2D divergence(const Field2D& v1, const Field2D& v2);

/// exp(−c (|k|/k_max)^p) with k_max = n/2.
Multiplier exponential_filter(const Grid2D& grid, double strength, double order);
Multiplier exponential_filter_1d(int n, double strength, double order);

/// Frequently used multipliers, built once per grid size and shared.
struct SpectralOps {
  Multiplier ddx1, ddx2, inv_abs_k, inv_k2, dealias;

  static const SpectralOps& get(int n);
};

struct SpectralOps1D {
  Multiplier ddx, hilbert, dealias;

  static const SpectralOps1D& get(int n);
};

}  // namespace qgsaddle
