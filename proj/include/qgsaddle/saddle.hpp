#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qgsaddle/grid.hpp"

namespace qgsaddle {

/// Axis-aligned rectangle on the torus; the default covers the whole domain.
/// Coordinates are compared after wrapping into [x_min, x_min + 2π).
struct Region {
  double x1_min = 0.0, x1_max = kTwoPi;
  double x2_min = 0.0, x2_max = kTwoPi;

  static Region around(double x1, double x2, double half_width);
  bool contains(double x1, double x2) const;
};

/// A critical point of θ refined to sub-pixel accuracy.
struct CriticalPoint {
  double x1 = 0.0, x2 = 0.0;
  double value = 0.0;
  double h11 = 0.0, h12 = 0.0, h22 = 0.0;
  double grad_norm = 0.0;  // |∇θ| after refinement
  bool degenerate = false;
  bool converged = false;

  double det() const { return h11 * h22 - h12 * h12; }
};

struct SaddleRecord {
  double t = 0.0;
  double x1 = 0.0, x2 = 0.0;
  double beta = 0.0;
  double delta = 0.0;
  double gamma = 0.0;        // atan β + atan δ, the smaller angle between separatrices
  double quality = 0.0;      // rms residual of the local quadratic model, relative
  double frame_angle = 0.0;  // direction of the bisector of the γ sector, in [0, π)
  bool degenerate = false;
  bool out_of_model = false;  // β+δ < 0 or max(|β|,|δ|) above the slope cap
};

struct DetectOptions {
  double newton_tol = 1e-10;  // on |∇θ|
  int newton_max_iter = 50;
  double degenerate_tol = 1e-8;  // on |det H| / ‖H‖²_F
  double reference_angle = 0.0;  // β and δ are slopes relative to this axis
  double slope_cap = 1e3;
  double time = 0.0;
};

/// All sub-pixel critical points in `region`, seeded from grid cells where
/// both gradient components change sign and refined by Newton iteration on the
/// spectral interpolant. Duplicates closer than 1e-6 are merged.
std::vector<CriticalPoint> find_critical_points(const Field2D& theta, const Region& region = {},
                                                const DetectOptions& options = {});

/// Saddle measurement from a critical point with det H < 0 (γ, β, δ, frame).
SaddleRecord measure_saddle(const CriticalPoint& cp, const DetectOptions& options = {});

/// Saddles (det H < 0) in `region`; degenerate candidates are kept with the flag set.
std::vector<SaddleRecord> detect_saddles(const Field2D& theta, const Region& region = {},
                                         const DetectOptions& options = {});

struct SaddleTrack {
  enum class Termination { none, lost, merged, left_region };

  std::vector<SaddleRecord> records;
  Termination terminated = Termination::none;
  double terminated_at = 0.0;
};

std::string to_string(SaddleTrack::Termination reason);

struct TrackOptions {
  double continuity_radius = 0.0;  // 0 selects 10·dx
  Region region;                   // the track ends with left_region outside it
  DetectOptions detect;
};

/// Incremental tracker; `track_saddle` folds it over a snapshot list.
class SaddleTracker {
public:
  SaddleTracker(SaddleRecord seed, TrackOptions options);

  /// Processes the snapshot at time t; returns false once the track has ended.
  bool update(double t, const Field2D& theta);
  const SaddleTrack& track() const { return track_; }
  bool active() const { return track_.terminated == SaddleTrack::Termination::none; }
  /// Last accepted record, the seed before the first update.
  const SaddleRecord& current() const { return last_; }

private:
  TrackOptions options_;
  SaddleRecord last_;
  SaddleTrack track_;
};

SaddleTrack track_saddle(const std::vector<std::pair<double, Field2D>>& snapshots, const SaddleRecord& seed,
                         const TrackOptions& options = {});

/// r(t) = |dγ/dt| / (γ (1 + |log γ|)) with dγ/dt from a least-squares quadratic
/// over a centred 5-point window. Returns one entry per interior record.
std::vector<std::pair<double, double>> gamma_ode_ratio(const SaddleTrack& track);

enum class EnvelopeMethod { closed_form, numeric };

/// γ(t) solving dγ/dt = −Cγ log(1/γ), γ(0) = γ₀. The numeric method uses RK4
/// with dt = (smallest positive gap among 0 and the sample times)/100.
std::vector<double> double_exp_envelope(double C, double gamma0, const std::vector<double>& ts,
                                        EnvelopeMethod method = EnvelopeMethod::closed_form);

class NotEllipticError : public std::runtime_error {
public:
  NotEllipticError() : std::runtime_error("not elliptic: no nondegenerate extremum in region") {}
};

/// Π(x) = a·x₁² + b·x₂² in the principal frame of the Hessian at the extremum.
struct EllipseFit {
  double t = 0.0;
  double x1 = 0.0, x2 = 0.0;
  double a = 0.0, b = 0.0;  // a ≤ b, both half the Hessian eigenvalue magnitudes
  double aspect = 0.0;      // b / a
  double axis_angle = 0.0;  // direction of the a-axis, in [0, π)
};

/// Fits the extremum of largest |θ| in `region`; throws NotEllipticError when
/// the region holds only saddles or degenerate points.
EllipseFit fit_ellipse(const Field2D& theta, const Region& region = {}, double t = 0.0);

}  // namespace qgsaddle
