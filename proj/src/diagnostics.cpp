#include "qgsaddle/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qgsaddle/kernels.hpp"
#include "qgsaddle/spectral.hpp"

namespace qgsaddle {

namespace {

Field2D derivative(const Spectrum2D& hat, const Multiplier& a) {
  auto s = hat;
  apply_multiplier(s, a);
  return to_physical(s);
}

Field2D derivative(const Spectrum2D& hat, const Multiplier& a, const Multiplier& b) {
  auto s = hat;
  apply_multiplier(s, a);
  apply_multiplier(s, b);
  return to_physical(s);
}

double wrap_delta(double d) {
  d = std::fmod(d, kTwoPi);
  if (d < 0) d += kTwoPi;
  return std::min(d, kTwoPi - d);
}

double median_of(std::vector<double> v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

}  // namespace

double periodic_distance(double ax1, double ax2, double bx1, double bx2) {
  return std::hypot(wrap_delta(ax1 - bx1), wrap_delta(ax2 - bx2));
}

ScalarDerivatives scalar_derivatives(const Field2D& theta) {
  const auto& ops = SpectralOps::get(theta.n());
  const auto hat = to_spectral(theta);
  return {derivative(hat, ops.ddx1), derivative(hat, ops.ddx2), derivative(hat, ops.ddx1, ops.ddx1),
          derivative(hat, ops.ddx1, ops.ddx2), derivative(hat, ops.ddx2, ops.ddx2)};
}

VelocityGradient velocity_gradient(ModelTag model, const Field2D& scalar) {
  const auto& ops = SpectralOps::get(scalar.n());
  auto psi = to_spectral(stream_function(model, scalar));
  // u1 = −∂₂ψ, u2 = ∂₁ψ
  auto neg = [](Field2D f) {
    for (double& v : f.values()) v = -v;
    return f;
  };
  return {neg(derivative(psi, ops.ddx1, ops.ddx2)), neg(derivative(psi, ops.ddx2, ops.ddx2)),
          derivative(psi, ops.ddx1, ops.ddx1), derivative(psi, ops.ddx1, ops.ddx2)};
}

DiagRow snapshot_diagnostics(ModelTag model, const Field2D& state, std::optional<Disc> saddle_disc,
                             double t) {
  namespace k = kernels::parallel;
  const auto& grid = state.grid();
  const double area = kTwoPi * kTwoPi;
  const double points = static_cast<double>(grid.size());

  DiagRow row;
  row.t = t;

  const auto der = scalar_derivatives(state);
  // |∇⊥θ| = |∇θ|
  row.sup_grad = k::max_hypot(der.d1.values(), der.d2.values());

  const auto [u1, u2] = velocity(model, state);
  row.max_u = k::max_hypot(u1.values(), u2.values());
  row.l2_theta = std::sqrt(area * k::dot(state.values(), state.values()) / points);
  row.energy = 0.5 * area * (k::dot(u1.values(), u1.values()) + k::dot(u2.values(), u2.values())) / points;

  // ∂_j ξ = (∂_j w − ξ (ξ·∂_j w)) / |w| with w = ∇⊥θ = (−θ₂, θ₁).
  const double threshold = kXiMaskFraction * row.sup_grad;
  const int n = grid.n();
  const auto d1 = der.d1.values(), d2 = der.d2.values();
  const auto d11 = der.d11.values(), d12 = der.d12.values(), d22 = der.d22.values();
  double sup_xi = 0.0;
  std::ptrdiff_t covered = 0;
#pragma omp parallel for schedule(static) reduction(max : sup_xi) reduction(+ : covered)
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const std::size_t idx = static_cast<std::size_t>(i) * n + j;
      const double w1 = -d2[idx], w2 = d1[idx];
      const double mag = std::hypot(w1, w2);
      if (row.sup_grad == 0.0 || mag < threshold) continue;
      ++covered;
      if (saddle_disc &&
          periodic_distance(grid.coord(i), grid.coord(j), saddle_disc->x1, saddle_disc->x2) <=
              saddle_disc->radius)
        continue;
      const double x1 = w1 / mag, x2 = w2 / mag;
      // columns: ∂₁w, ∂₂w
      const double a1 = -d12[idx], a2 = d11[idx];
      const double b1 = -d22[idx], b2 = d12[idx];
      const double pa = x1 * a1 + x2 * a2;
      const double pb = x1 * b1 + x2 * b2;
      const double e11 = (a1 - x1 * pa) / mag, e21 = (a2 - x2 * pa) / mag;
      const double e12 = (b1 - x1 * pb) / mag, e22 = (b2 - x2 * pb) / mag;
      sup_xi = std::max(sup_xi, std::sqrt(e11 * e11 + e21 * e21 + e12 * e12 + e22 * e22));
    }
  }
  row.sup_grad_xi_outside = sup_xi;
  row.xi_coverage = static_cast<double>(covered) / points;
  return row;
}

DiagRow snapshot_diagnostics(const Field1D& omega, double t) {
  DiagRow row;
  row.t = t;
  row.sup_grad = kernels::parallel::max_abs(omega.values());
  row.l2_theta = std::sqrt(kTwoPi * kernels::parallel::dot(omega.values(), omega.values()) / omega.n());
  return row;
}

double bkm_integral(std::span<const DiagRow> rows) {
  double total = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i)
    total += 0.5 * (rows[i].t - rows[i - 1].t) * (rows[i].sup_grad + rows[i - 1].sup_grad);
  return total;
}

MaskedField stretching_alpha(const Field2D& theta, ModelTag model) {
  const auto der = scalar_derivatives(theta);
  const auto grad_u = velocity_gradient(model, theta);
  const auto d1 = der.d1.values(), d2 = der.d2.values();

  MaskedField out{Field2D(theta.grid()), std::vector<unsigned char>(theta.grid().size(), 0), 0.0};
  out.sup_grad = kernels::parallel::max_hypot(d1, d2);
  const double threshold = kXiMaskFraction * out.sup_grad;

  const auto a11 = grad_u.du1_dx1.values(), a12 = grad_u.du1_dx2.values();
  const auto a21 = grad_u.du2_dx1.values(), a22 = grad_u.du2_dx2.values();
  auto alpha = out.alpha.values();
  const auto size = static_cast<std::ptrdiff_t>(theta.grid().size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < size; ++i) {
    const double w1 = -d2[i], w2 = d1[i];
    const double mag = std::hypot(w1, w2);
    if (out.sup_grad == 0.0 || mag < threshold) continue;
    const double x1 = w1 / mag, x2 = w2 / mag;
    alpha[i] = x1 * x1 * a11[i] + x1 * x2 * (a12[i] + a21[i]) + x2 * x2 * a22[i];
    out.valid[static_cast<std::size_t>(i)] = 1;
  }
  return out;
}

ConsistencyStats alpha_consistency_check(const TimedField& before, const TimedField& middle,
                                         const TimedField& after, ModelTag model) {
  const double h1 = middle.t - before.t;
  const double h2 = after.t - middle.t;
  if (!(h1 > 0) || !(h2 > 0) || std::abs(h1 - h2) > 1e-9 * std::max(h1, h2))
    throw std::invalid_argument("alpha_consistency_check: snapshots must be uniformly spaced in time");

  const auto [pb1, pb2] = perp_grad(before.theta);
  const auto [pa1, pa2] = perp_grad(after.theta);
  const auto der = scalar_derivatives(middle.theta);
  const auto [u1, u2] = velocity(model, middle.theta);
  const auto alpha = stretching_alpha(middle.theta, model);
  const auto grad_u = velocity_gradient(model, middle.theta);

  const std::size_t size = middle.theta.grid().size();
  const double cutoff = 0.5 * alpha.sup_grad;

  std::vector<double> lhs, rhs;
  for (std::size_t i = 0; i < size; ++i) {
    const double w1 = -der.d2.values()[i], w2 = der.d1.values()[i];
    const double mag = std::hypot(w1, w2);
    if (mag < cutoff || !alpha.valid[i]) continue;
    const double gb = std::hypot(pb1.values()[i], pb2.values()[i]);
    const double ga = std::hypot(pa1.values()[i], pa2.values()[i]);
    if (gb <= 0.0 || ga <= 0.0) continue;
    const double x1 = w1 / mag, x2 = w2 / mag;
    // ∂_j|w| = ξ·∂_j w
    const double dmag1 = x1 * (-der.d12.values()[i]) + x2 * der.d11.values()[i];
    const double dmag2 = x1 * (-der.d22.values()[i]) + x2 * der.d12.values()[i];
    const double advect = (u1.values()[i] * dmag1 + u2.values()[i] * dmag2) / mag;
    lhs.push_back((std::log(ga) - std::log(gb)) / (h1 + h2) + advect);
    rhs.push_back(alpha.alpha.values()[i]);
  }
  if (lhs.empty()) throw std::runtime_error("alpha_consistency_check: empty high-gradient mask");

  double rms = 0.0;
  for (double a : rhs) rms += a * a;
  rms = std::sqrt(rms / static_cast<double>(rhs.size()));
  double strain_scale = 0.0;
  for (const auto* f : {&grad_u.du1_dx1, &grad_u.du1_dx2, &grad_u.du2_dx1, &grad_u.du2_dx2})
    strain_scale = std::max(strain_scale, kernels::parallel::max_abs(f->values()));
  const double floor = std::max({1e-3 * rms, 1e-3 * strain_scale, 1e-300});

  std::vector<double> dev(lhs.size());
  ConsistencyStats stats;
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    dev[i] = std::abs(lhs[i] - rhs[i]) / std::max(std::abs(rhs[i]), floor);
    stats.max_rel_dev = std::max(stats.max_rel_dev, dev[i]);
  }
  stats.points = dev.size();
  stats.median_rel_dev = median_of(std::move(dev));
  return stats;
}

}  // namespace qgsaddle
