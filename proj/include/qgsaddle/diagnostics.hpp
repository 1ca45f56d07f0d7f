#pragma once

#include <optional>
#include <span>
#include <vector>

#include "qgsaddle/grid.hpp"
#include "qgsaddle/models.hpp"

namespace qgsaddle {

/// Per-snapshot scalars. For clm1d states `sup_grad` holds max|ω| (the
/// quantity whose time integral controls breakdown there) and the velocity,
/// energy and ξ entries are zero.
struct DiagRow {
  double t = 0.0;
  double sup_grad = 0.0;             // sup |∇⊥θ|
  double max_u = 0.0;                // max |u|
  double l2_theta = 0.0;             // ‖θ‖_{L²} over the box
  double energy = 0.0;               // ½ ∫ |u|²
  double bkm_accum = 0.0;            // ∫₀ᵗ sup|∇⊥θ| ds (trapezoid over rows)
  double sup_grad_xi_outside = 0.0;  // sup |∇ξ| outside the saddle disc
  double xi_coverage = 0.0;          // fraction of grid points where ξ is defined

  bool operator==(const DiagRow&) const = default;
};

/// Periodic disc used to exclude the tracked saddle neighbourhood.
struct Disc {
  double x1 = 0.0;
  double x2 = 0.0;
  double radius = 0.0;
};

/// Points where |∇⊥θ| < kXiMaskFraction · sup|∇⊥θ| have no direction field.
inline constexpr double kXiMaskFraction = 1e-6;

/// Distance on the 2π-periodic torus.
double periodic_distance(double ax1, double ax2, double bx1, double bx2);

DiagRow snapshot_diagnostics(ModelTag model, const Field2D& state, std::optional<Disc> saddle_disc = {},
                             double t = 0.0);
DiagRow snapshot_diagnostics(const Field1D& omega, double t = 0.0);

/// Trapezoid accumulation of sup_grad over time-ordered rows; 0 for fewer than two rows.
double bkm_integral(std::span<const DiagRow> rows);

/// Spectral first and second derivatives of a scalar.
struct ScalarDerivatives {
  Field2D d1, d2, d11, d12, d22;
};
ScalarDerivatives scalar_derivatives(const Field2D& theta);

/// Velocity gradient ∂_j u_i.
struct VelocityGradient {
  Field2D du1_dx1, du1_dx2, du2_dx1, du2_dx2;
};
VelocityGradient velocity_gradient(ModelTag model, const Field2D& scalar);

/// Stretching factor α = ½(∇u + ∇ᵀu)ξ·ξ. `alpha` is zero where `valid` is 0.
struct MaskedField {
  Field2D alpha;
  std::vector<unsigned char> valid;
  double sup_grad = 0.0;
};
MaskedField stretching_alpha(const Field2D& theta, ModelTag model = ModelTag::sqg);

struct TimedField {
  double t;
  Field2D theta;
};

struct ConsistencyStats {
  double median_rel_dev = 0.0;
  double max_rel_dev = 0.0;
  std::size_t points = 0;
};

/// Compares α at the middle snapshot against the material derivative of
/// log|∇⊥θ| (central difference in time plus spectral advection) on the
/// mask |∇⊥θ| ≥ ½ sup|∇⊥θ|. Throws on non-uniform spacing or an empty mask.
ConsistencyStats alpha_consistency_check(const TimedField& before, const TimedField& middle,
                                         const TimedField& after, ModelTag model = ModelTag::sqg);

}  // namespace qgsaddle
