#include "qgsaddle/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qgsaddle/kernels.hpp"

namespace qgsaddle {

StepPolicy StepPolicy::fixed(double dt, double t_end, double interval) {
  StepPolicy p;
  p.mode = Mode::fixed;
  p.dt = dt;
  p.t_end = t_end;
  p.snapshot_interval = interval;
  return p;
}

StepPolicy StepPolicy::adaptive(double cfl, double dt_max, double t_end, double interval) {
  StepPolicy p;
  p.mode = Mode::cfl;
  p.cfl = cfl;
  p.dt_max = dt_max;
  p.t_end = t_end;
  p.snapshot_interval = interval;
  return p;
}

void StepPolicy::validate() const {
  if (mode == Mode::fixed && !(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (mode == Mode::cfl) {
    if (!(cfl > 0.0 && cfl <= 1.0)) throw std::invalid_argument("cfl must lie in (0, 1]");
    if (!(dt_max > 0.0)) throw std::invalid_argument("dt_max must be > 0");
  }
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("t_end must be finite and >= 0");
  if (!(snapshot_interval > 0.0)) throw std::invalid_argument("snapshot_interval must be > 0");
}

InstabilityError::InstabilityError(double t)
    : std::runtime_error("blow-up/instability detected at t=" + std::to_string(t)), t_(t) {}

namespace {

template <class F>
F axpy(const F& x, double a, const F& y) {
  F out = x;
  kernels::parallel::lincomb(out.values(), x.values(), a, y.values());
  return out;
}

Field2D filtered(const Field2D& f, const Multiplier& m) {
  auto hat = to_spectral(f);
  apply_multiplier(hat, m);
  return to_physical(hat);
}

Field1D filtered(const Field1D& f, const Multiplier& m) {
  auto hat = to_spectral(f);
  apply_multiplier(hat, m);
  return to_physical(hat);
}

template <class F>
F rk4(ModelTag model, const F& y, double dt, const Multiplier* filter) {
  const F k1 = tendency(model, y);
  const F k2 = tendency(model, axpy(y, 0.5 * dt, k1));
  const F k3 = tendency(model, axpy(y, 0.5 * dt, k2));
  const F k4 = tendency(model, axpy(y, dt, k3));

  F out = y;
  auto o = out.values();
  const auto a = k1.values(), b = k2.values(), c = k3.values(), d = k4.values();
  const double w = dt / 6.0;
  const auto size = static_cast<std::ptrdiff_t>(o.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < size; ++i) o[i] += w * (a[i] + 2.0 * b[i] + 2.0 * c[i] + d[i]);

  return filter ? filtered(out, *filter) : out;
}

bool all_finite(std::span<const double> v) {
  const auto size = static_cast<std::ptrdiff_t>(v.size());
  int bad = 0;
#pragma omp parallel for schedule(static) reduction(| : bad)
  for (std::ptrdiff_t i = 0; i < size; ++i) bad |= !std::isfinite(v[i]);
  return bad == 0;
}

std::span<const double> values_of(const State& s) {
  return std::visit([](const auto& f) { return f.values(); }, s);
}

DiagRow row_for(ModelTag model, const State& s, std::optional<Disc> disc, double t) {
  if (const auto* f2 = std::get_if<Field2D>(&s)) return snapshot_diagnostics(model, *f2, disc, t);
  return snapshot_diagnostics(std::get<Field1D>(s), t);
}

void check_state(ModelTag model, const State& s) {
  const bool is_1d = std::holds_alternative<Field1D>(s);
  if (is_1d != (model == ModelTag::clm1d))
    throw DimensionError("state dimension does not match model " + std::string(to_string(model)));
}

// Smallest multiple of `interval` strictly beyond t, with a relative slack so
// that a step landing on a multiple up to rounding counts as reaching it.
double next_target(double t, double interval) {
  const double m = std::floor(t / interval * (1.0 + 1e-12) + 1e-12);
  return (m + 1.0) * interval;
}

}  // namespace

Field2D rk4_step(ModelTag model, const Field2D& state, double dt, const Multiplier* filter) {
  if (!(dt > 0.0)) throw std::invalid_argument("rk4_step: dt must be > 0");
  return rk4(model, state, dt, filter);
}

Field1D rk4_step(ModelTag model, const Field1D& state, double dt, const Multiplier* filter) {
  if (!(dt > 0.0)) throw std::invalid_argument("rk4_step: dt must be > 0");
  return rk4(model, state, dt, filter);
}

State rk4_step(ModelTag model, const State& state, double dt, const Multiplier* filter) {
  return std::visit([&](const auto& s) -> State { return rk4_step(model, s, dt, filter); }, state);
}

double select_dt(ModelTag model, const State& state, const StepPolicy& policy) {
  if (policy.mode == StepPolicy::Mode::fixed) return policy.dt;
  double rate = 0.0;
  if (const auto* f2 = std::get_if<Field2D>(&state)) {
    const auto [u1, u2] = velocity(model, *f2);
    rate = kernels::parallel::max_hypot(u1.values(), u2.values()) / f2->grid().dx();
  } else {
    rate = kernels::parallel::max_abs(std::get<Field1D>(state).values());
  }
  return std::min(policy.dt_max, policy.cfl / std::max(1e-12, rate));
}

Trajectory run(const RunSpec& spec) {
  spec.step.validate();
  check_state(spec.model, spec.initial);
  if (spec.t0 > spec.step.t_end) throw std::invalid_argument("t0 lies beyond t_end");

  const auto& policy = spec.step;
  std::optional<Multiplier> filter;
  if (spec.filter.enabled) {
    if (const auto* f2 = std::get_if<Field2D>(&spec.initial))
      filter = exponential_filter(f2->grid(), spec.filter.strength, spec.filter.order);
    else
      filter = exponential_filter_1d(std::get<Field1D>(spec.initial).n(), spec.filter.strength,
                                     spec.filter.order);
  }

  Trajectory traj;
  traj.model = spec.model;
  State state = spec.initial;
  double t = spec.t0;
  double bkm = spec.bkm0;

  auto record = [&](double time) {
    std::optional<Disc> disc;
    if (spec.disc_provider) disc = spec.disc_provider(time, state);
    DiagRow row = row_for(spec.model, state, disc, time);
    if (!traj.rows.empty()) {
      const auto& prev = traj.rows.back();
      bkm += 0.5 * (time - prev.t) * (row.sup_grad + prev.sup_grad);
    }
    row.bkm_accum = bkm;
    if (spec.on_snapshot) spec.on_snapshot(time, state, row);
    traj.rows.push_back(row);
    if (spec.store_states) traj.snapshots.push_back(Snapshot{time, state});
  };

  record(t);
  double target = next_target(t, policy.snapshot_interval);
  const bool fixed = policy.mode == StepPolicy::Mode::fixed;
  long long k = fixed ? std::llround(t / policy.dt) : 0;
  const double end_slack = 1e-12 * std::max(1.0, policy.t_end);

  while (t < policy.t_end - end_slack) {
    double t_next, h;
    if (fixed) {
      t_next = static_cast<double>(k + 1) * policy.dt;
      if (t_next >= policy.t_end - end_slack) t_next = policy.t_end;
      h = t_next - t;
    } else {
      // h itself is the selected step so it never exceeds dt_max, even by rounding
      h = select_dt(spec.model, state, policy);
      t_next = t + h;
      if (t_next >= policy.t_end - end_slack) {
        t_next = policy.t_end;
        h = std::min(h, t_next - t);
      }
    }
    state = rk4_step(spec.model, state, h, filter ? &*filter : nullptr);
    ++k;
    ++traj.steps;
    traj.dt_min = traj.steps == 1 ? h : std::min(traj.dt_min, h);
    traj.dt_max = std::max(traj.dt_max, h);
    t = t_next;
    if (!all_finite(values_of(state))) throw InstabilityError(t);

    const bool at_end = t >= policy.t_end - end_slack;
    if (t >= target * (1.0 - 1e-12) || at_end) {
      record(t);
      target = next_target(t, policy.snapshot_interval);
    }
  }
  return traj;
}

}  // namespace qgsaddle
