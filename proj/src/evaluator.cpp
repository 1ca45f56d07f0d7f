#include "qgsaddle/evaluator.hpp"

#include <algorithm>
#include <cmath>

#include "qgsaddle/spectral.hpp"

namespace qgsaddle {

SpectralEvaluator::SpectralEvaluator(const Field2D& field, double prune) : n_(field.n()) {
  const auto hat = to_spectral(field);
  const int cols = field.grid().spectral_cols();
  double peak = 0.0;
  for (const auto& c : hat.modes) peak = std::max(peak, std::abs(c));
  const double cutoff = prune * peak;
  const double norm = 1.0 / static_cast<double>(field.grid().size());

  for (int i1 = 0; i1 < n_; ++i1) {
    if (i1 == n_ / 2) continue;
    for (int j2 = 0; j2 < cols - 1; ++j2) {
      const Complex c = hat.at(i1, j2);
      if (std::abs(c) <= cutoff || c == Complex{}) continue;
      k1_.push_back(field.grid().wavenumber(i1));
      k2_.push_back(j2);
      coef_.push_back(c * (j2 == 0 ? norm : 2.0 * norm));
    }
  }
}

LocalJet SpectralEvaluator::jet(double x1, double x2) const {
  LocalJet out;
  const std::size_t count = coef_.size();

  // Few modes: direct phases. Many modes: separable phase tables.
  std::vector<Complex> e1, e2;
  const bool tables = count > static_cast<std::size_t>(2 * n_);
  if (tables) {
    e1.resize(static_cast<std::size_t>(n_ + 1));
    e2.resize(static_cast<std::size_t>(n_ / 2 + 1));
    for (int k = -n_ / 2; k <= n_ / 2; ++k) e1[static_cast<std::size_t>(k + n_ / 2)] = std::polar(1.0, k * x1);
    for (int k = 0; k <= n_ / 2; ++k) e2[static_cast<std::size_t>(k)] = std::polar(1.0, k * x2);
  }

  for (std::size_t m = 0; m < count; ++m) {
    const double a = k1_[m], b = k2_[m];
    const Complex phase = tables ? e1[static_cast<std::size_t>(k1_[m] + n_ / 2)] * e2[static_cast<std::size_t>(k2_[m])]
                                 : std::polar(1.0, a * x1 + b * x2);
    const Complex z = coef_[m] * phase;
    const double re = z.real(), im = z.imag();
    out.value += re;
    out.d1 -= a * im;
    out.d2 -= b * im;
    out.d11 -= a * a * re;
    out.d12 -= a * b * re;
    out.d22 -= b * b * re;
  }
  return out;
}

}  // namespace qgsaddle
