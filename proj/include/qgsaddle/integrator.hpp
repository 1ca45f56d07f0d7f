#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qgsaddle/diagnostics.hpp"
#include "qgsaddle/models.hpp"
#include "qgsaddle/spectral.hpp"

namespace qgsaddle {

/// Step-size policy. In cfl mode dt = min(dt_max, cfl·dx / max(1e-12, max|u|))
/// is recomputed every step; for clm1d, which has no advecting velocity, the
/// rate max|ω| replaces max|u|/dx.
struct StepPolicy {
  enum class Mode { fixed, cfl };

  Mode mode = Mode::cfl;
  double dt = 1e-3;
  double cfl = 0.5;
  double dt_max = 1e-2;
  double t_end = 1.0;
  double snapshot_interval = 0.1;

  static StepPolicy fixed(double dt, double t_end, double interval);
  static StepPolicy adaptive(double cfl, double dt_max, double t_end, double interval);

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct FilterSettings {
  bool enabled = false;
  double strength = 36.0;
  double order = 36.0;
};

/// Thrown when a step produces a non-finite value.
class InstabilityError : public std::runtime_error {
public:
  explicit InstabilityError(double t);
  double time() const { return t_; }

private:
  double t_;
};

struct Snapshot {
  double t = 0.0;
  State state;
};

struct Trajectory {
  ModelTag model = ModelTag::sqg;
  std::vector<Snapshot> snapshots;  // filled only when RunSpec::store_states is set
  std::vector<DiagRow> rows;        // one per snapshot time
  std::size_t steps = 0;
  double dt_min = 0.0;  // smallest step taken, 0 when no step was taken
  double dt_max = 0.0;
};

/// One classical RK4 step; the filter, when given, is applied after the update.
Field2D rk4_step(ModelTag model, const Field2D& state, double dt, const Multiplier* filter = nullptr);
Field1D rk4_step(ModelTag model, const Field1D& state, double dt, const Multiplier* filter = nullptr);
State rk4_step(ModelTag model, const State& state, double dt, const Multiplier* filter = nullptr);

/// Step size the policy selects for `state` (before clipping to t_end).
double select_dt(ModelTag model, const State& state, const StepPolicy& policy);

struct RunSpec {
  ModelTag model = ModelTag::sqg;
  State initial = Field2D(Grid2D(8));
  double t0 = 0.0;
  double bkm0 = 0.0;  // BKM accumulator carried over on resume
  StepPolicy step;
  FilterSettings filter;
  bool store_states = true;
  /// Excluded disc for sup|∇ξ| at a snapshot; called before the row is computed.
  std::function<std::optional<Disc>(double t, const State&)> disc_provider;
  /// Called for every snapshot after its row is computed.
  std::function<void(double t, const State&, const DiagRow&)> on_snapshot;
};

/// Advances `initial` from t0 to t_end. A snapshot is taken at t0, at the
/// first step reaching each multiple of snapshot_interval, and at t_end.
/// In fixed mode step k ends at k·dt; the final step is clipped to t_end.
Trajectory run(const RunSpec& spec);

}  // namespace qgsaddle
