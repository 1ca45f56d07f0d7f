#pragma once

#include <vector>

#include "qgsaddle/grid.hpp"

namespace qgsaddle {

/// Value and derivatives up to second order at a point.
struct LocalJet {
  double value = 0.0;
  double d1 = 0.0, d2 = 0.0;
  double d11 = 0.0, d12 = 0.0, d22 = 0.0;
};

/// Evaluates the trigonometric interpolant of a Field2D at arbitrary points.
///
/// Modes with |c| ≤ prune·max|c| are dropped, so fields with few active modes
/// (single shells, shears) evaluate in a handful of operations. Nyquist modes
/// are ignored: their interpolant is not unique and dealiased states carry none.
class SpectralEvaluator {
public:
  explicit SpectralEvaluator(const Field2D& field, double prune = 1e-13);

  LocalJet jet(double x1, double x2) const;
  double value(double x1, double x2) const { return jet(x1, x2).value; }
  std::size_t mode_count() const { return k1_.size(); }

private:
  int n_;
  std::vector<int> k1_, k2_;
  std::vector<Complex> coef_;  // weighted and normalized coefficients
};

}  // namespace qgsaddle
