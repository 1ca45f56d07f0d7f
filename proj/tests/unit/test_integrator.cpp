#include <doctest.h>

#include <cmath>
#include <limits>

#include "qgsaddle/integrator.hpp"
#include "qgsaddle/spectral.hpp"

using namespace qgsaddle;

namespace {

Field2D cmt(int n) {
  return Field2D::from_function(Grid2D(n), [](double x1, double x2) { return std::sin(x1) * std::sin(x2) + std::cos(x2); });
}

// Closed-form CLM solution for ω₀ = cos x (Hω₀ = sin x).
double clm_exact(double x, double t) {
  const double w = std::cos(x), h = std::sin(x);
  return 4.0 * w / ((2.0 - t * h) * (2.0 - t * h) + t * t * w * w);
}

double clm_error(int n, double dt, double t_end) {
  Field1D w = Field1D::from_function(n, [](double x) { return std::cos(x); });
  const int steps = static_cast<int>(std::llround(t_end / dt));
  for (int s = 0; s < steps; ++s) w = rk4_step(ModelTag::clm1d, w, dt);
  double err = 0.0;
  for (int i = 0; i < n; ++i) err = std::max(err, std::abs(w[i] - clm_exact(w.coord(i), t_end)));
  return err;
}

}  // namespace

TEST_CASE("policy validation") {
  CHECK_THROWS(StepPolicy::fixed(0.0, 1.0, 0.1).validate());
  CHECK_THROWS(StepPolicy::fixed(1e-3, 1.0, 0.0).validate());
  CHECK_THROWS(StepPolicy::adaptive(1.5, 1e-2, 1.0, 0.1).validate());
  CHECK_THROWS(StepPolicy::adaptive(0.5, -1.0, 1.0, 0.1).validate());
  CHECK_THROWS(StepPolicy::fixed(1e-3, -1.0, 0.1).validate());
  CHECK_NOTHROW(StepPolicy::adaptive(1.0, 1e-2, 0.0, 0.1).validate());
}

TEST_CASE("rk4 leaves the steady shear unchanged") {
  const auto c2 = Field2D::from_function(Grid2D(32), [](double, double x2) { return std::cos(x2); });
  const auto next = rk4_step(ModelTag::sqg, c2, 1e-2);
  for (std::size_t i = 0; i < c2.values().size(); ++i) CHECK(std::abs(next.values()[i] - c2.values()[i]) <= 1e-13);
  CHECK_THROWS(rk4_step(ModelTag::sqg, c2, 0.0));
}

TEST_CASE("CLM matches its closed form at t=1") {
  CHECK(clm_error(256, 1e-3, 1.0) <= 1e-6);
}

TEST_CASE("CLM error is fourth order in dt") {
  // Coarse steps keep the temporal error far above the spatial one.
  const double e1 = clm_error(128, 0.1, 1.0), e2 = clm_error(128, 0.05, 1.0);
  MESSAGE("dt-halving ratio " << e1 / e2);
  CHECK(e1 / e2 >= 12.0);
  CHECK(e1 / e2 <= 20.0);
}

TEST_CASE("t_end = 0 gives a single snapshot") {
  RunSpec spec;
  spec.initial = cmt(16);
  spec.step = StepPolicy::fixed(1e-2, 0.0, 0.1);
  const auto traj = run(spec);
  CHECK(traj.steps == 0);
  REQUIRE(traj.rows.size() == 1);
  CHECK(traj.rows[0].t == 0.0);
  CHECK(traj.snapshots.size() == 1);
}

TEST_CASE("steady run keeps every snapshot equal to the initial state") {
  RunSpec spec;
  spec.initial = Field2D::from_function(Grid2D(32), [](double, double x2) { return std::cos(x2); });
  spec.step = StepPolicy::adaptive(0.5, 1e-2, 1.0, 0.25);
  const auto traj = run(spec);
  REQUIRE(traj.snapshots.size() == 5);
  const auto& f0 = std::get<Field2D>(spec.initial);
  for (const auto& s : traj.snapshots) {
    const auto& f = std::get<Field2D>(s.state);
    for (std::size_t i = 0; i < f.values().size(); ++i) CHECK(std::abs(f.values()[i] - f0.values()[i]) <= 1e-10);
  }
  CHECK(traj.rows.back().t == 1.0);
  CHECK(traj.rows.back().bkm_accum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("snapshot schedule and CFL ceiling") {
  RunSpec spec;
  spec.initial = cmt(32);
  spec.step = StepPolicy::adaptive(0.9, 0.03, 0.5, 0.1);
  spec.store_states = false;
  const auto traj = run(spec);
  CHECK(traj.dt_max <= 0.03);
  CHECK(traj.snapshots.empty());
  REQUIRE(traj.rows.size() == 6);
  for (std::size_t i = 1; i < traj.rows.size(); ++i) {
    CHECK(traj.rows[i].t > traj.rows[i - 1].t);
    // nearest step at or after the scheduled time
    CHECK(traj.rows[i].t >= 0.1 * static_cast<double>(i) - 1e-12);
    CHECK(traj.rows[i].t < 0.1 * static_cast<double>(i) + 0.03 + 1e-12);
    CHECK(traj.rows[i].bkm_accum >= traj.rows[i - 1].bkm_accum);
  }
  CHECK(traj.rows.back().t == 0.5);
}

TEST_CASE("fixed steps land on multiples of dt") {
  RunSpec spec;
  spec.initial = cmt(16);
  spec.step = StepPolicy::fixed(0.01, 0.2, 0.05);
  const auto traj = run(spec);
  CHECK(traj.steps == 20);
  REQUIRE(traj.rows.size() == 5);
  CHECK(traj.rows[2].t == 10 * 0.01 + 0.0);
}

TEST_CASE("runs are deterministic and resume bitwise") {
  RunSpec spec;
  spec.initial = cmt(32);
  spec.step = StepPolicy::adaptive(0.5, 0.02, 0.6, 0.2);
  spec.filter.enabled = true;
  const auto a = run(spec), b = run(spec);
  REQUIRE(a.snapshots.size() == b.snapshots.size());
  CHECK(std::get<Field2D>(a.snapshots.back().state) == std::get<Field2D>(b.snapshots.back().state));
  CHECK(a.rows == b.rows);

  RunSpec resume = spec;
  resume.initial = a.snapshots[1].state;
  resume.t0 = a.snapshots[1].t;
  resume.bkm0 = a.rows[1].bkm_accum;
  const auto c = run(resume);
  CHECK(std::get<Field2D>(c.snapshots.back().state) == std::get<Field2D>(a.snapshots.back().state));
  CHECK(c.rows.back() == a.rows.back());

  RunSpec fixed = spec;
  fixed.step = StepPolicy::fixed(0.01, 0.3, 0.1);
  const auto f = run(fixed);
  RunSpec fixed_resume = fixed;
  fixed_resume.initial = f.snapshots[1].state;
  fixed_resume.t0 = f.snapshots[1].t;
  fixed_resume.bkm0 = f.rows[1].bkm_accum;
  const auto g = run(fixed_resume);
  CHECK(std::get<Field2D>(g.snapshots.back().state) == std::get<Field2D>(f.snapshots.back().state));
}

TEST_CASE("non-finite state aborts the run") {
  auto f = cmt(16);
  f.at(3, 4) = std::numeric_limits<double>::quiet_NaN();
  RunSpec spec;
  spec.initial = f;
  spec.step = StepPolicy::fixed(1e-2, 0.1, 0.05);
  try {
    run(spec);
    FAIL("expected an instability");
  } catch (const InstabilityError& e) {
    CHECK(std::string(e.what()).find("blow-up/instability detected at t=") == 0);
    CHECK(e.time() == doctest::Approx(0.01));
  }
}

TEST_CASE("model and state dimensions must agree") {
  RunSpec spec;
  spec.model = ModelTag::clm1d;
  spec.initial = cmt(16);
  CHECK_THROWS_AS(run(spec), DimensionError);
}

TEST_CASE("clm cfl step uses max|omega|") {
  const State w = Field1D::from_function(64, [](double x) { return 2.0 * std::cos(x); });
  CHECK(select_dt(ModelTag::clm1d, w, StepPolicy::adaptive(0.5, 1.0, 1.0, 0.1)) == doctest::Approx(0.25));
  CHECK(select_dt(ModelTag::clm1d, w, StepPolicy::adaptive(0.5, 0.1, 1.0, 0.1)) == 0.1);
}
