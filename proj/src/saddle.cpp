#include "qgsaddle/saddle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>

#include "qgsaddle/diagnostics.hpp"
#include "qgsaddle/evaluator.hpp"
#include "qgsaddle/spectral.hpp"

namespace qgsaddle {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_2pi(double x) {
  x = std::fmod(x, kTwoPi);
  return x < 0 ? x + kTwoPi : x;
}

// Wrap into [−π/2, π/2).
double wrap_half_pi(double a) {
  a = std::fmod(a + kPi / 2, kPi);
  if (a < 0) a += kPi;
  return a - kPi / 2;
}

double wrap_pi(double a) {
  a = std::fmod(a, kPi);
  return a < 0 ? a + kPi : a;
}

double frob2(const CriticalPoint& cp) {
  return cp.h11 * cp.h11 + 2.0 * cp.h12 * cp.h12 + cp.h22 * cp.h22;
}

bool is_degenerate(const CriticalPoint& cp, double tol) {
  const double f = frob2(cp);
  return f == 0.0 || std::abs(cp.det()) <= tol * f;
}

struct Eigen2 {
  double lambda_plus, lambda_minus;
  double angle_plus;  // direction of the λ₊ eigenvector
};

Eigen2 eigen(double h11, double h12, double h22) {
  const double mean = 0.5 * (h11 + h22);
  const double rad = std::hypot(0.5 * (h11 - h22), h12);
  return {mean + rad, mean - rad, 0.5 * std::atan2(2.0 * h12, h11 - h22)};
}

std::optional<CriticalPoint> refine(const SpectralEvaluator& eval, double x1, double x2, double dx,
                                    const DetectOptions& opt) {
  const double seed1 = x1, seed2 = x2;
  CriticalPoint cp;
  for (int it = 0; it <= opt.newton_max_iter; ++it) {
    const auto j = eval.jet(x1, x2);
    cp.x1 = x1;
    cp.x2 = x2;
    cp.value = j.value;
    cp.h11 = j.d11;
    cp.h12 = j.d12;
    cp.h22 = j.d22;
    cp.grad_norm = std::hypot(j.d1, j.d2);
    if (cp.grad_norm < opt.newton_tol) {
      cp.converged = true;
      break;
    }
    if (it == opt.newton_max_iter || is_degenerate(cp, opt.degenerate_tol)) break;
    const double det = cp.det();
    double s1 = -(cp.h22 * j.d1 - cp.h12 * j.d2) / det;
    double s2 = -(-cp.h12 * j.d1 + cp.h11 * j.d2) / det;
    const double len = std::hypot(s1, s2);
    if (len > dx) {
      s1 *= dx / len;
      s2 *= dx / len;
    }
    x1 += s1;
    x2 += s2;
    // Wandered out of the seed cell's neighbourhood: another seed owns that point.
    if (std::hypot(x1 - seed1, x2 - seed2) > 2.0 * dx) return std::nullopt;
  }
  cp.degenerate = is_degenerate(cp, opt.degenerate_tol);
  if (!cp.converged && !cp.degenerate) return std::nullopt;
  cp.x1 = wrap_2pi(cp.x1);
  cp.x2 = wrap_2pi(cp.x2);
  return cp;
}

bool straddles(double a, double b, double c, double d) {
  const double lo = std::min({a, b, c, d});
  const double hi = std::max({a, b, c, d});
  return lo <= 0.0 && hi >= 0.0;
}

double quality_of(const SpectralEvaluator& eval, const CriticalPoint& cp, double r) {
  double sum = 0.0;
  constexpr int kSamples = 8;
  for (int m = 0; m < kSamples; ++m) {
    const double a = kTwoPi * m / kSamples;
    const double y1 = r * std::cos(a), y2 = r * std::sin(a);
    const double model = cp.value + 0.5 * (cp.h11 * y1 * y1 + 2.0 * cp.h12 * y1 * y2 + cp.h22 * y2 * y2);
    const double res = eval.value(cp.x1 + y1, cp.x2 + y2) - model;
    sum += res * res;
  }
  const double scale = 0.5 * std::sqrt(frob2(cp)) * r * r;
  return scale > 0.0 ? std::sqrt(sum / kSamples) / scale : 0.0;
}

// Solves the 3×3 system a·c = b by Gaussian elimination with partial pivoting.
std::array<double, 3> solve3(std::array<std::array<double, 3>, 3> a, std::array<double, 3> b) {
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    std::swap(a[col], a[piv]);
    std::swap(b[col], b[piv]);
    for (int r = col + 1; r < 3; ++r) {
      const double f = a[r][col] / a[col][col];
      for (int c = col; c < 3; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::array<double, 3> x{};
  for (int r = 2; r >= 0; --r) {
    double s = b[r];
    for (int c = r + 1; c < 3; ++c) s -= a[r][c] * x[c];
    x[r] = s / a[r][r];
  }
  return x;
}

}  // namespace

Region Region::around(double x1, double x2, double half_width) {
  return {x1 - half_width, x1 + half_width, x2 - half_width, x2 + half_width};
}

bool Region::contains(double x1, double x2) const {
  const double w1 = x1_min + wrap_2pi(x1 - x1_min);
  const double w2 = x2_min + wrap_2pi(x2 - x2_min);
  return w1 <= x1_max && w2 <= x2_max;
}

std::vector<CriticalPoint> find_critical_points(const Field2D& theta, const Region& region,
                                                const DetectOptions& options) {
  const auto& grid = theta.grid();
  const int n = grid.n();
  const double dx = grid.dx();
  const auto& ops = SpectralOps::get(n);
  const auto hat = to_spectral(theta);
  auto g1 = hat, g2 = hat;
  apply_multiplier(g1, ops.ddx1);
  apply_multiplier(g2, ops.ddx2);
  const Field2D d1 = to_physical(g1), d2 = to_physical(g2);

  std::vector<std::pair<double, double>> seeds;
  for (int i = 0; i < n; ++i) {
    const int ip = (i + 1) % n;
    for (int j = 0; j < n; ++j) {
      const int jp = (j + 1) % n;
      const double c1 = (i + 0.5) * dx, c2 = (j + 0.5) * dx;
      if (!region.contains(c1, c2)) continue;
      if (straddles(d1.at(i, j), d1.at(ip, j), d1.at(i, jp), d1.at(ip, jp)) &&
          straddles(d2.at(i, j), d2.at(ip, j), d2.at(i, jp), d2.at(ip, jp)))
        seeds.emplace_back(c1, c2);
    }
  }

  const SpectralEvaluator eval(theta);
  std::vector<std::optional<CriticalPoint>> refined(seeds.size());
  const auto count = static_cast<std::ptrdiff_t>(seeds.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t s = 0; s < count; ++s)
    refined[static_cast<std::size_t>(s)] = refine(eval, seeds[s].first, seeds[s].second, dx, options);

  std::vector<CriticalPoint> out;
  for (const auto& cp : refined) {
    if (!cp || !region.contains(cp->x1, cp->x2)) continue;
    const bool duplicate = std::any_of(out.begin(), out.end(), [&](const CriticalPoint& o) {
      return periodic_distance(o.x1, o.x2, cp->x1, cp->x2) < 1e-6;
    });
    if (!duplicate) out.push_back(*cp);
  }
  return out;
}

SaddleRecord measure_saddle(const CriticalPoint& cp, const DetectOptions& options) {
  SaddleRecord rec;
  rec.t = options.time;
  rec.x1 = cp.x1;
  rec.x2 = cp.x2;
  rec.degenerate = cp.degenerate || cp.det() >= 0.0;
  if (rec.degenerate) return rec;

  // Separatrices uᵀHu = 0 sit at ±atan(√(λ₊/|λ₋|)) about the λ₊ axis.
  const auto e = eigen(cp.h11, cp.h12, cp.h22);
  const double half = std::atan(std::sqrt(e.lambda_plus / -e.lambda_minus));
  double gamma = 2.0 * half;
  double bisector = e.angle_plus;
  if (gamma > kPi / 2) {
    gamma = kPi - gamma;
    bisector += kPi / 2;
  }
  rec.frame_angle = wrap_pi(bisector);

  double off = wrap_half_pi(bisector - options.reference_angle);
  if (std::abs(off) + 0.5 * gamma >= kPi / 2) off = 0.0;  // reference axis outside the sector: use the bisector
  rec.beta = std::tan(0.5 * gamma - off);
  rec.delta = std::tan(off + 0.5 * gamma);
  rec.gamma = gamma;
  rec.out_of_model = rec.beta + rec.delta < 0.0 || std::max(std::abs(rec.beta), std::abs(rec.delta)) > options.slope_cap;
  return rec;
}

std::vector<SaddleRecord> detect_saddles(const Field2D& theta, const Region& region, const DetectOptions& options) {
  const auto points = find_critical_points(theta, region, options);
  std::optional<SpectralEvaluator> eval;
  std::vector<SaddleRecord> out;
  for (const auto& cp : points) {
    if (!cp.degenerate && cp.det() > 0.0) continue;
    auto rec = measure_saddle(cp, options);
    if (!rec.degenerate) {
      if (!eval) eval.emplace(theta);
      rec.quality = quality_of(*eval, cp, theta.grid().dx());
    }
    out.push_back(rec);
  }
  return out;
}

std::string to_string(SaddleTrack::Termination reason) {
  switch (reason) {
    case SaddleTrack::Termination::none: return "none";
    case SaddleTrack::Termination::lost: return "lost";
    case SaddleTrack::Termination::merged: return "merged";
    case SaddleTrack::Termination::left_region: return "left-region";
  }
  return "unknown";
}

SaddleTracker::SaddleTracker(SaddleRecord seed, TrackOptions options) : options_(options), last_(seed) {}

bool SaddleTracker::update(double t, const Field2D& theta) {
  if (!active()) return false;
  const double rc = options_.continuity_radius > 0.0 ? options_.continuity_radius : 10.0 * theta.grid().dx();
  auto detect = options_.detect;
  detect.time = t;
  const auto found = detect_saddles(theta, Region::around(last_.x1, last_.x2, rc), detect);

  const SaddleRecord* best = nullptr;
  double best_dist = rc;
  bool degenerate_near = false;
  for (const auto& rec : found) {
    const double d = periodic_distance(rec.x1, rec.x2, last_.x1, last_.x2);
    if (d > rc) continue;
    if (rec.degenerate) {
      degenerate_near = true;
      continue;
    }
    if (d <= best_dist) {
      best_dist = d;
      best = &rec;
    }
  }

  auto stop = [&](SaddleTrack::Termination reason) {
    track_.terminated = reason;
    track_.terminated_at = t;
    return false;
  };
  if (!best) return stop(degenerate_near ? SaddleTrack::Termination::merged : SaddleTrack::Termination::lost);
  if (!options_.region.contains(best->x1, best->x2)) return stop(SaddleTrack::Termination::left_region);
  if (!track_.records.empty() && t <= track_.records.back().t)
    throw std::invalid_argument("SaddleTracker: snapshot times must increase");
  last_ = *best;
  track_.records.push_back(*best);
  return true;
}

SaddleTrack track_saddle(const std::vector<std::pair<double, Field2D>>& snapshots, const SaddleRecord& seed,
                         const TrackOptions& options) {
  SaddleTracker tracker(seed, options);
  for (const auto& [t, theta] : snapshots)
    if (!tracker.update(t, theta)) break;
  return tracker.track();
}

std::vector<std::pair<double, double>> gamma_ode_ratio(const SaddleTrack& track) {
  const auto& r = track.records;
  if (r.size() < 5) throw std::invalid_argument("gamma_ode_ratio: track too short (need at least 5 records)");
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 2; i + 2 < r.size(); ++i) {
    double h = 0.0;
    for (std::size_t j = i - 2; j <= i + 2; ++j) h = std::max(h, std::abs(r[j].t - r[i].t));
    // Fit γ − γ_i = c0 + c1 s + c2 s² with s = (t − t_i)/h.
    std::array<std::array<double, 3>, 3> a{};
    std::array<double, 3> b{};
    for (std::size_t j = i - 2; j <= i + 2; ++j) {
      const double s = (r[j].t - r[i].t) / h;
      const std::array<double, 3> phi{1.0, s, s * s};
      const double y = r[j].gamma - r[i].gamma;
      for (int p = 0; p < 3; ++p) {
        b[p] += phi[p] * y;
        for (int q = 0; q < 3; ++q) a[p][q] += phi[p] * phi[q];
      }
    }
    const auto c = solve3(a, b);
    const double gamma = r[i].gamma + c[0];
    const double rate = c[1] / h;
    out.emplace_back(r[i].t, std::abs(rate) / (gamma * (1.0 + std::abs(std::log(gamma)))));
  }
  return out;
}

std::vector<double> double_exp_envelope(double C, double gamma0, const std::vector<double>& ts,
                                        EnvelopeMethod method) {
  if (!(gamma0 > 0.0 && gamma0 < 1.0)) throw std::invalid_argument("double_exp_envelope: gamma0 must lie in (0, 1)");
  if (!(C > 0.0)) throw std::invalid_argument("double_exp_envelope: C must be > 0");
  double prev = 0.0;
  double min_gap = 0.0;
  for (double t : ts) {
    if (t < prev) throw std::invalid_argument("double_exp_envelope: times must be nondecreasing and >= 0");
    if (t > prev) min_gap = min_gap == 0.0 ? t - prev : std::min(min_gap, t - prev);
    prev = t;
  }

  std::vector<double> out;
  out.reserve(ts.size());
  const double log_inv = std::log(1.0 / gamma0);
  if (method == EnvelopeMethod::closed_form) {
    for (double t : ts) out.push_back(std::exp(-std::exp(C * t) * log_inv));
    return out;
  }

  auto f = [C](double g) { return C * g * std::log(g); };  // = −Cγ log(1/γ)
  const double dt = min_gap / 100.0;
  double g = gamma0, t = 0.0;
  for (double target : ts) {
    if (target > t) {
      const auto steps = static_cast<long long>(std::ceil((target - t) / dt - 1e-9));
      const double h = (target - t) / static_cast<double>(steps);
      for (long long s = 0; s < steps; ++s) {
        const double k1 = f(g);
        const double k2 = f(g + 0.5 * h * k1);
        const double k3 = f(g + 0.5 * h * k2);
        const double k4 = f(g + h * k3);
        g += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
      t = target;
    }
    out.push_back(g);
  }
  return out;
}

EllipseFit fit_ellipse(const Field2D& theta, const Region& region, double t) {
  const auto points = find_critical_points(theta, region);
  const CriticalPoint* best = nullptr;
  for (const auto& cp : points) {
    if (cp.degenerate || cp.det() <= 0.0) continue;
    if (!best || std::abs(cp.value) > std::abs(best->value)) best = &cp;
  }
  if (!best) throw NotEllipticError();

  const auto e = eigen(best->h11, best->h12, best->h22);
  EllipseFit fit;
  fit.t = t;
  fit.x1 = best->x1;
  fit.x2 = best->x2;
  const double p = std::abs(e.lambda_plus), m = std::abs(e.lambda_minus);
  fit.a = 0.5 * std::min(p, m);
  fit.b = 0.5 * std::max(p, m);
  fit.aspect = fit.b / fit.a;
  fit.axis_angle = wrap_pi(p <= m ? e.angle_plus : e.angle_plus + kPi / 2);
  return fit;
}

}  // namespace qgsaddle
