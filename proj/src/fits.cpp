#include "qgsaddle/fits.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qgsaddle {

namespace {

constexpr double kSearchSpan = 20.0;
constexpr std::size_t kMinPoints = 6;

struct Window {
  std::vector<double> t, g;
};

Window select(const Series& s, double t0, double t1) {
  if (s.t.size() != s.g.size()) throw std::invalid_argument("series columns differ in length");
  if (!(t1 > t0)) throw std::invalid_argument("fit window needs t1 > t0");
  Window w;
  for (std::size_t i = 0; i < s.t.size(); ++i)
    if (s.t[i] >= t0 && s.t[i] <= t1) {
      w.t.push_back(s.t[i]);
      w.g.push_back(s.g[i]);
    }
  if (w.t.size() < kMinPoints)
    throw std::invalid_argument("fit window holds " + std::to_string(w.t.size()) + " points, need at least 6");
  return w;
}

struct Line {
  double slope = 0.0, intercept = 0.0, rss = 0.0;
};

Line least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  Line l;
  l.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  l.intercept = my - l.slope * mx;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (l.intercept + l.slope * x[i]);
    l.rss += r * r;
  }
  return l;
}

// log g = log A + p·(−log(T* − t))
Line power_law_at(const Window& w, const std::vector<double>& log_g, double t_star) {
  std::vector<double> x(w.t.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = -std::log(t_star - w.t[i]);
  return least_squares(x, log_g);
}

}  // namespace

std::string to_string(FitResult::Model model) {
  return model == FitResult::Model::power_law ? "power_law" : "double_exp";
}

std::string to_string(ModelComparison::Preferred preferred) {
  switch (preferred) {
    case ModelComparison::Preferred::power_law: return "power_law";
    case ModelComparison::Preferred::double_exp: return "double_exp";
    case ModelComparison::Preferred::inconclusive: return "inconclusive";
  }
  return "unknown";
}

FitResult fit_power_law(const Series& series, double t0, double t1) {
  const auto w = select(series, t0, t1);
  std::vector<double> log_g(w.g.size());
  for (std::size_t i = 0; i < w.g.size(); ++i) {
    if (!(w.g[i] > 0.0)) throw std::invalid_argument("power-law fit needs positive data");
    log_g[i] = std::log(w.g[i]);
  }
  const double t_last = *std::max_element(w.t.begin(), w.t.end());

  // Coarse scan over offsets T* − t_last spaced logarithmically in [1e-6, 20].
  constexpr int kScan = 400;
  const double lo_off = 1e-6;
  auto offset = [&](int k) { return lo_off * std::pow(kSearchSpan / lo_off, static_cast<double>(k) / kScan); };
  int best = 0;
  double best_rss = INFINITY;
  for (int k = 0; k <= kScan; ++k) {
    const double rss = power_law_at(w, log_g, t_last + offset(k)).rss;
    if (rss < best_rss) {
      best_rss = rss;
      best = k;
    }
  }

  double a = t_last + offset(std::max(0, best - 1));
  double b = t_last + offset(std::min(kScan, best + 1));
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = power_law_at(w, log_g, c).rss, fd = power_law_at(w, log_g, d).rss;
  const double tol = 1e-12 * std::max(1.0, std::abs(t_last));
  int iterations = 0;
  while (b - a > tol && iterations < 400) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = power_law_at(w, log_g, c).rss;
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = power_law_at(w, log_g, d).rss;
    }
    ++iterations;
  }

  FitResult r;
  r.model = FitResult::Model::power_law;
  r.window_t0 = t0;
  r.window_t1 = t1;
  r.points = w.t.size();
  r.t_star = 0.5 * (a + b);
  const auto line = power_law_at(w, log_g, r.t_star);
  r.p = line.slope;
  r.amplitude = std::exp(line.intercept);
  r.rms_log_residual = std::sqrt(line.rss / static_cast<double>(w.t.size()));

  const bool bracket_closed = b - a <= 1e-4;
  const bool at_bound = best == 0 || best == kScan;
  r.converged = bracket_closed && r.p > 0.0 && !at_bound;
  if (!bracket_closed) r.diagnostic = "golden-section bracket did not close";
  else if (r.p <= 0.0) r.diagnostic = "non-positive exponent: series is not growing toward a singularity";
  else if (at_bound) r.diagnostic = "T* at the edge of the search interval";
  return r;
}

FitResult fit_double_exp(const Series& series, double t0, double t1) {
  const auto w = select(series, t0, t1);
  std::vector<double> y(w.g.size());
  for (std::size_t i = 0; i < w.g.size(); ++i) {
    if (!(w.g[i] > std::numbers::e))
      throw std::invalid_argument("double-exponential fit needs g > e on the window (g=" + std::to_string(w.g[i]) +
                                  " at t=" + std::to_string(w.t[i]) + ")");
    y[i] = std::log(std::log(w.g[i]));
  }
  const auto line = least_squares(w.t, y);

  FitResult r;
  r.model = FitResult::Model::double_exp;
  r.window_t0 = t0;
  r.window_t1 = t1;
  r.points = w.t.size();
  r.a = line.slope;
  r.b = line.intercept;
  r.amplitude = 1.0;
  double ss = 0.0;
  for (std::size_t i = 0; i < w.t.size(); ++i) {
    const double res = std::log(w.g[i]) - std::exp(r.a * w.t[i] + r.b);
    ss += res * res;
  }
  r.rms_log_residual = std::sqrt(ss / static_cast<double>(w.t.size()));
  r.converged = true;
  return r;
}

std::optional<std::pair<double, double>> double_exp_subwindow(const Series& series, double t0, double t1) {
  const auto w = select(series, t0, t1);
  std::vector<std::size_t> order(w.t.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return w.t[a] < w.t[b]; });
  std::size_t count = 0;
  double start = t1;
  for (auto it = order.rbegin(); it != order.rend() && w.g[*it] > std::numbers::e; ++it) {
    ++count;
    start = w.t[*it];
  }
  if (count < kMinPoints) return std::nullopt;
  return std::make_pair(start, t1);
}

ModelComparison compare_models(const Series& series, double t0, double t1) {
  ModelComparison c;
  c.power_law = fit_power_law(series, t0, t1);
  c.double_exp = fit_double_exp(series, t0, t1);
  const double r1 = c.power_law.rms_log_residual, r2 = c.double_exp.rms_log_residual;
  const double top = std::max(r1, r2);
  c.relative_gap = top > 0.0 ? std::abs(r1 - r2) / top : 0.0;
  if (c.relative_gap > 0.2)
    c.preferred = r1 < r2 ? ModelComparison::Preferred::power_law : ModelComparison::Preferred::double_exp;
  return c;
}

}  // namespace qgsaddle
