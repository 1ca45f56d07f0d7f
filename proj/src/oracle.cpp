#include "qgsaddle/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qgsaddle/diagnostics.hpp"
#include "qgsaddle/evaluator.hpp"
#include "qgsaddle/kernels.hpp"
#include "qgsaddle/spectral.hpp"

namespace qgsaddle {

namespace {

constexpr double kPi = std::numbers::pi;
using GL8 = boost::math::quadrature::gauss<double, 8>;
using GK15 = boost::math::quadrature::gauss_kronrod<double, 15>;

double bump(double s) { return s < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s * s)) : 0.0; }

double wrap_2pi(double a) {
  a = std::fmod(a, kTwoPi);
  return a < 0 ? a + kTwoPi : a;
}

double wrap_centered(double d) {
  d = std::fmod(d + kPi, kTwoPi);
  if (d < 0) d += kTwoPi;
  return d - kPi;
}

// Radial weight of the kernel in polar coordinates: r·K(r).
double radial_weight(KernelTag kernel, double r) {
  if (kernel == KernelTag::sqg) return 1.0;
  return r > 0.0 ? r * std::log(r) / kTwoPi : 0.0;
}

// ∫₀^∞ θ(p + r e) r K(r) dr, split where the ray crosses a separatrix line or the support boundary.
double radial_integral(const SyntheticSaddleField& f, double p1, double p2, double phi, KernelTag kernel,
                       double tol) {
  double a1, a2;
  f.to_frame(p1, p2, a1, a2);
  const double e1 = std::cos(phi - f.rotation), e2 = std::sin(phi - f.rotation);

  // |a + r e| = R
  const double b = a1 * e1 + a2 * e2;
  const double disc_b = b * b - (a1 * a1 + a2 * a2 - f.radius * f.radius);
  if (disc_b <= 0.0) return 0.0;
  const double r_end = -b + std::sqrt(disc_b);
  if (r_end <= 0.0) return 0.0;

  // Each separatrix factor is linear along the ray: l(a + r e) = l(a) + r l(e).
  std::vector<double> cuts{0.0};
  auto add_root = [&](double la, double le) {
    if (le == 0.0) return;
    const double r = -la / le;
    if (r > 0.0 && r < r_end) cuts.push_back(r);
  };
  add_root(f.beta * a1 + a2, f.beta * e1 + e2);
  add_root(f.delta * a1 - a2, f.delta * e1 - e2);
  cuts.push_back(r_end);
  std::sort(cuts.begin(), cuts.end());

  auto integrand = [&](double r) {
    const double y1 = a1 + r * e1, y2 = a2 + r * e2;
    return f.profile(y1, y2) * bump(std::hypot(y1, y2) / f.radius) * radial_weight(kernel, r);
  };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    if (cuts[i + 1] > cuts[i]) total += GK15::integrate(integrand, cuts[i], cuts[i + 1], 15, tol);
  return total;
}

std::vector<std::pair<double, double>> angular_panels(const SyntheticSaddleField& f, int resolution) {
  const auto [s1, s2] = f.separatrix_angles();
  std::vector<double> splits{wrap_2pi(s1), wrap_2pi(s1 + kPi), wrap_2pi(s2), wrap_2pi(s2 + kPi)};
  std::sort(splits.begin(), splits.end());
  splits.erase(std::unique(splits.begin(), splits.end()), splits.end());
  splits.push_back(splits.front() + kTwoPi);

  std::vector<std::pair<double, double>> panels;
  for (std::size_t s = 0; s + 1 < splits.size(); ++s) {
    const double a = splits[s], c = splits[s + 1];
    const int m = std::max(4, static_cast<int>(std::ceil(resolution * (c - a) / kTwoPi)));
    // Sine grading clusters panels toward both split angles.
    auto edge = [&](int k) {
      const double u = -1.0 + 2.0 * k / m;
      return a + (c - a) * 0.5 * (std::sin(0.5 * kPi * u) + 1.0);
    };
    for (int k = 0; k < m; ++k) panels.emplace_back(edge(k), edge(k + 1));
  }
  return panels;
}

double difference_at(const SyntheticSaddleField& f, double p1, double p2, double q1, double q2, KernelTag kernel,
                     int resolution, double tol) {
  const auto panels = angular_panels(f, resolution);
  std::vector<double> partial(panels.size());
  const auto count = static_cast<std::ptrdiff_t>(panels.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto [lo, hi] = panels[static_cast<std::size_t>(i)];
    partial[static_cast<std::size_t>(i)] = GL8::integrate(
        [&](double phi) {
          return radial_integral(f, p1, p2, phi, kernel, tol) - radial_integral(f, q1, q2, phi, kernel, tol);
        },
        lo, hi);
  }
  double total = 0.0;
  for (double v : partial) total += v;
  return total;
}

double smooth_window(double s) {
  if (s <= 0.5) return 1.0;
  if (s >= 1.0) return 0.0;
  auto g = [](double z) { return z > 0.0 ? std::exp(-1.0 / z) : 0.0; };
  const double t = (s - 0.5) / 0.5;
  return g(1.0 - t) / (g(1.0 - t) + g(t));
}

}  // namespace

double kernel_value(KernelTag kernel, double r) {
  return kernel == KernelTag::sqg ? 1.0 / r : std::log(r) / kTwoPi;
}

void SyntheticSaddleField::to_frame(double x1, double x2, double& y1, double& y2) const {
  const double d1 = x1 - center1, d2 = x2 - center2;
  const double c = std::cos(rotation), s = std::sin(rotation);
  y1 = c * d1 + s * d2;
  y2 = -s * d1 + c * d2;
}

double SyntheticSaddleField::profile(double y1, double y2) const {
  const double r = rho(y1, y2);
  double v = epsilon > 0.0 ? std::tanh(r / epsilon) : (r > 0.0) - (r < 0.0);
  if (r < 0.0) v *= (y2 > delta * y1) ? amp_top : amp_bottom;
  return v;
}

double SyntheticSaddleField::operator()(double x1, double x2) const {
  double y1, y2;
  to_frame(x1, x2, y1, y2);
  const double s = std::hypot(y1, y2) / radius;
  if (s >= 1.0) return 0.0;
  return profile(y1, y2) * bump(s);
}

std::pair<double, double> SyntheticSaddleField::separatrix_angles() const {
  auto fold = [](double a) {
    a = std::fmod(a, kPi);
    return a < 0 ? a + kPi : a;
  };
  return {fold(rotation - std::atan(beta)), fold(rotation + std::atan(delta))};
}

SyntheticSaddleField synth_field(double beta, double delta, double epsilon, double radius) {
  if (!(beta + delta >= 0.0)) throw std::invalid_argument("synth_field: slopes need beta + delta >= 0");
  if (!(radius > 0.0)) throw std::invalid_argument("synth_field: radius must be > 0");
  if (!(epsilon >= 0.0)) throw std::invalid_argument("synth_field: epsilon must be >= 0");
  SyntheticSaddleField f;
  f.beta = beta;
  f.delta = delta;
  f.epsilon = epsilon;
  f.radius = radius;
  return f;
}

Field2D rasterize(const SyntheticSaddleField& field, const Grid2D& grid) {
  if (field.radius >= kPi) throw std::invalid_argument("rasterize: support does not fit in the periodic box");
  return Field2D::from_function(grid, [&](double x1, double x2) {
    return field(field.center1 + wrap_centered(x1 - field.center1), field.center2 + wrap_centered(x2 - field.center2));
  });
}

QuadratureResult psi_difference(const SyntheticSaddleField& field, double p1, double p2, double q1, double q2,
                                KernelTag kernel, const QuadratureOptions& options) {
  QuadratureResult out;
  const double sep = std::hypot(p1 - q1, p2 - q2);
  if (sep == 0.0) {
    out.converged = true;
    return out;
  }

  int res = options.min_resolution;
  const double needed = 8.0 * field.radius / sep;  // |p − q| ≥ 4h
  while (res < needed && res < options.max_resolution) res *= 2;
  out.resolution = res;
  out.value = difference_at(field, p1, p2, q1, q2, kernel, res, options.radial_tol);
  if (res < needed) {
    out.flagged = true;
    return out;
  }

  while (2 * res <= options.max_resolution) {
    res *= 2;
    const double next = difference_at(field, p1, p2, q1, q2, kernel, res, options.radial_tol);
    out.last_change = std::abs(next - out.value) / std::max(std::abs(next), 1e-300);
    out.value = next;
    out.resolution = res;
    if (out.last_change < options.rel_change) {
      out.converged = true;
      return out;
    }
  }
  out.flagged = true;
  return out;
}

std::vector<LemmaRow> lemma1_sweep(const std::vector<double>& gammas, KernelTag kernel,
                                   const LemmaSweepOptions& options) {
  std::vector<LemmaRow> rows;
  for (double gamma : gammas) {
    if (!(gamma > 0.0 && gamma < 0.5)) throw std::invalid_argument("lemma1_sweep: gamma must lie in (0, 0.5)");
    LemmaRow row;
    row.gamma = gamma;
    row.beta = std::tan(gamma / 3.0);
    row.delta = std::tan(2.0 * gamma / 3.0);
    auto field = synth_field(row.beta, row.delta, options.epsilon, options.radius);
    field.amp_top = options.amp_top;
    field.amp_bottom = options.amp_bottom;
    const double y1 = options.y1;
    row.quadrature = psi_difference(field, y1, -row.beta * y1, y1, row.delta * y1, kernel, options.quadrature);
    row.value = row.quadrature.value;
    row.ratio_linear = std::abs(row.value) / gamma;
    row.ratio = kernel == KernelTag::sqg ? std::abs(row.value) / (gamma * std::log(1.0 / gamma)) : row.ratio_linear;
    rows.push_back(row);
  }
  return rows;
}

double k_integral(Branch branch, double y1, double beta, double delta, const std::function<double(double, double)>& D,
                  double floor) {
  if (!(y1 > 0.0)) throw std::invalid_argument("k_integral: y1 must be > 0");
  const double slope = branch == Branch::p ? -beta : delta;
  if (!D) return 0.5 * y1 * y1;
  auto integrand = [&](double s) {
    const double d = D(s, slope * s);
    if (!(d >= floor)) throw std::domain_error("k_integral: D below the positivity floor on the branch");
    return s / d;
  };
  return GK15::integrate(integrand, 0.0, y1, 15, 1e-14);
}

double alpha_pv_point(const Field2D& theta, double x1, double x2, const PvOptions& options) {
  const auto [w1, w2] = perp_grad(theta);
  const double sup = kernels::parallel::max_hypot(w1.values(), w2.values());
  const SpectralEvaluator eval(theta);
  const auto here = eval.jet(x1, x2);
  const double mag = std::hypot(here.d1, here.d2);
  if (sup == 0.0 || mag < kXiMaskFraction * sup) throw std::domain_error("alpha_pv_point: xi undefined at x");
  const double xi1 = -here.d2 / mag, xi2 = here.d1 / mag;

  const double L = options.cutoff;
  const int panels = std::max(1, static_cast<int>(std::ceil(L / options.panel_width)));
  const double width = L / panels;
  const int m = options.angles;
  std::vector<double> per_angle(static_cast<std::size_t>(m));

#pragma omp parallel for schedule(static)
  for (int a = 0; a < m; ++a) {
    const double phi = (a + 0.5) * kPi / m;
    const double e1 = std::cos(phi), e2 = std::sin(phi);
    const double proj = e1 * xi1 + e2 * xi2;
    // w(x+y)·ξ(x) = (ξ(x+y)·ξ(x)) |∇⊥θ|(x+y); pairing y and −y removes the 1/r singularity.
    auto radial = [&](double r) {
      const auto fwd = eval.jet(x1 + r * e1, x2 + r * e2);
      const auto bwd = eval.jet(x1 - r * e1, x2 - r * e2);
      const double pf = -fwd.d2 * xi1 + fwd.d1 * xi2;
      const double pb = -bwd.d2 * xi1 + bwd.d1 * xi2;
      return proj * (pf - pb) / r * smooth_window(r / L);
    };
    double sum = 0.0;
    for (int k = 0; k < panels; ++k) sum += GL8::integrate(radial, k * width, (k + 1) * width);
    per_angle[static_cast<std::size_t>(a)] = sum * (kPi / m);
  }
  double total = 0.0;
  for (double v : per_angle) total += v;
  return -total / kTwoPi;
}

double alpha_local_point(const Field2D& theta, double x1, double x2) {
  const auto t = SpectralEvaluator(theta).jet(x1, x2);
  const double mag = std::hypot(t.d1, t.d2);
  if (mag == 0.0) throw std::domain_error("alpha_local_point: xi undefined at x");
  const double xi1 = -t.d2 / mag, xi2 = t.d1 / mag;
  // u = (−∂₂ψ, ∂₁ψ): ∂₁u₁ = −ψ₁₂, ∂₂u₁ = −ψ₂₂, ∂₁u₂ = ψ₁₁, ∂₂u₂ = ψ₁₂
  const auto s = SpectralEvaluator(stream_function(ModelTag::sqg, theta)).jet(x1, x2);
  return xi1 * xi1 * (-s.d12) + xi1 * xi2 * (s.d11 - s.d22) + xi2 * xi2 * s.d12;
}

}  // namespace qgsaddle
