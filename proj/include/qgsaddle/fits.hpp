#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace qgsaddle {

/// Time series g(t), e.g. sup|∇⊥θ| per snapshot.
struct Series {
  std::vector<double> t;
  std::vector<double> g;
};

struct FitResult {
  enum class Model { power_law, double_exp };

  Model model = Model::power_law;
  // power law: g = A (T* − t)^(−p)
  double t_star = 0.0;
  double p = 0.0;
  double amplitude = 0.0;
  // double exponential: g = exp(exp(a t + b))
  double a = 0.0;
  double b = 0.0;

  double rms_log_residual = 0.0;  // rms of log g − log ĝ over the window
  double window_t0 = 0.0, window_t1 = 0.0;
  std::size_t points = 0;
  bool converged = false;
  std::string diagnostic;
};

std::string to_string(FitResult::Model model);

/// Golden-section search for T* in (t_last, t_last + 20] after a coarse
/// logarithmic scan, with (log A, p) from linear least squares at each T*.
/// `converged` requires a closed bracket, p > 0 and T* away from the search
/// bounds. Throws on non-positive data or fewer than 6 points in the window.
FitResult fit_power_law(const Series& series, double t0, double t1);

/// Linear least squares on log log g = a t + b. Throws unless g > e on the
/// whole window and at least 6 points fall in it.
FitResult fit_double_exp(const Series& series, double t0, double t1);

/// Largest trailing part [t_a, t1] of the window on which g > e holds, when
/// it contains at least 6 points; the double-exponential fit is defined there.
std::optional<std::pair<double, double>> double_exp_subwindow(const Series& series, double t0, double t1);

struct ModelComparison {
  enum class Preferred { power_law, double_exp, inconclusive };

  Preferred preferred = Preferred::inconclusive;
  FitResult power_law;
  FitResult double_exp;
  double relative_gap = 0.0;  // |r₁ − r₂| / max(r₁, r₂)
};

std::string to_string(ModelComparison::Preferred preferred);

/// Prefers the lower rms_log_residual when the relative gap exceeds 20%.
ModelComparison compare_models(const Series& series, double t0, double t1);

}  // namespace qgsaddle
