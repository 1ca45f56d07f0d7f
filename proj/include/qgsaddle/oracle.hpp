#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "qgsaddle/grid.hpp"
#include "qgsaddle/models.hpp"

namespace qgsaddle {

enum class KernelTag { sqg, euler };

/// sqg: y ↦ 1/|y|; euler: y ↦ (1/2π) log|y|.
double kernel_value(KernelTag kernel, double r);

/// θ(x) = profile(ρ(y)) · bump(|y|/R) with y the saddle-frame coordinates of x
/// and ρ(y) = (βy₁ + y₂)(δy₁ − y₂).
///
/// The profile is tanh(ρ/ε), or sign(ρ) for ε = 0. On the two ρ < 0 sectors
/// it is scaled by amp_top (above both separatrices) and amp_bottom (below
/// both), which breaks the mirror symmetry of a pure profile(ρ) field while
/// keeping θ constant along every level curve of ρ inside each sector.
/// bump(s) = exp(1 − 1/(1 − s²)) for s < 1 and 0 otherwise.
struct SyntheticSaddleField {
  double beta = 0.1;
  double delta = 0.2;
  double epsilon = 0.05;
  double radius = 1.0;
  double center1 = 0.0, center2 = 0.0;
  double rotation = 0.0;  // saddle frame turned counter-clockwise by this angle
  double amp_top = 1.0;
  double amp_bottom = 1.0;

  /// Saddle-frame coordinates of a plane point.
  void to_frame(double x1, double x2, double& y1, double& y2) const;
  double rho(double y1, double y2) const { return (beta * y1 + y2) * (delta * y1 - y2); }
  double profile(double y1, double y2) const;
  /// Exact evaluation on the plane (no periodic images).
  double operator()(double x1, double x2) const;
  /// Directions (in the plane) of the two separatrices, each in [0, π).
  std::pair<double, double> separatrix_angles() const;
};

/// Validated constructor: β + δ ≥ 0 and R > 0.
SyntheticSaddleField synth_field(double beta, double delta, double epsilon, double radius);

/// Samples the field on the periodic grid, using the image of each grid point
/// nearest the centre. The support must fit inside the box.
Field2D rasterize(const SyntheticSaddleField& field, const Grid2D& grid);

struct QuadratureResult {
  double value = 0.0;
  double last_change = 0.0;  // relative change of the final doubling
  int resolution = 0;        // angular panels used
  bool converged = false;
  bool flagged = false;  // unresolved separation or unconverged
};

struct QuadratureOptions {
  int min_resolution = 64;
  int max_resolution = 8192;
  double rel_change = 0.01;
  double radial_tol = 1e-10;
};

/// I = ∫ θ(y) (K(y − p) − K(y − q)) dy over the support, in polar coordinates
/// about p and about q on a shared angular grid (split at the separatrix
/// directions, panels clustered toward the splits, 8-point Gauss–Legendre per
/// panel) with adaptive Gauss–Kronrod in the radius, split at separatrix
/// crossings and the support boundary. The panel count starts at the larger
/// of min_resolution and the value that puts |p − q| ≥ 4h, h = 2R/resolution,
/// and doubles until the relative change is below rel_change.
QuadratureResult psi_difference(const SyntheticSaddleField& field, double p1, double p2, double q1, double q2,
                                KernelTag kernel, const QuadratureOptions& options = {});

struct LemmaSweepOptions {
  double y1 = 0.5;  // fixed abscissa of p and q (R/2)
  double radius = 1.0;
  double epsilon = 0.0;
  double amp_top = 1.0;
  double amp_bottom = 0.3;
  QuadratureOptions quadrature;
};

struct LemmaRow {
  double gamma = 0.0;
  double beta = 0.0, delta = 0.0;  // tan(γ/3), tan(2γ/3)
  double value = 0.0;              // I
  double ratio = 0.0;              // |I|/(γ log(1/γ)) for sqg, |I|/γ for euler
  double ratio_linear = 0.0;       // |I|/γ
  QuadratureResult quadrature;
};

/// p = (y₁, −βy₁) and q = (y₁, δy₁) on the two separatrices at fixed y₁.
std::vector<LemmaRow> lemma1_sweep(const std::vector<double>& gammas, KernelTag kernel,
                                   const LemmaSweepOptions& options = {});

enum class Branch { p, q };

/// K = ∫₀^{y₁} s / D(s, m·s) ds along the branch (m = −β for p, δ for q).
double k_integral(Branch branch, double y1, double beta, double delta,
                  const std::function<double(double, double)>& D = {}, double floor = 1e-12);

struct PvOptions {
  double cutoff = 8.0 * 3.14159265358979323846;  // outer radius L of the smooth window
  double panel_width = 0.25;                     // radial Gauss–Legendre panel size
  int angles = 256;                              // midpoint nodes on [0, π)
};

/// α(x) = −(1/2π) P.V.∫ (ŷ·ξ(x)) (ξ(x+y)·ξ(x)) |∇⊥θ|(x+y) |y|⁻² dy evaluated with
/// antipodal pairing of polar rays about x and a smooth window χ(|y|/L)
/// (χ = 1 up to L/2, 0 from L). Throws std::domain_error where ξ(x) is undefined.
double alpha_pv_point(const Field2D& theta, double x1, double x2, const PvOptions& options = {});

/// Local strain form ½(∇u + ∇ᵀu)ξ·ξ at an arbitrary point, from the spectral
/// interpolants of θ and of the SQG stream function.
double alpha_local_point(const Field2D& theta, double x1, double x2);

}  // namespace qgsaddle
