#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qgsaddle/oracle.hpp"
#include "qgsaddle/saddle.hpp"

using namespace qgsaddle;
using std::numbers::pi;

namespace {

SyntheticSaddleField saddle_field(double beta, double delta, double rotation = 0.0) {
  auto f = synth_field(beta, delta, 0.05, 2.0);  // resolved to ~1e-8 in the Hessian at n = 512
  f.center1 = pi;
  f.center2 = pi;
  f.rotation = rotation;
  return f;
}

const Region kCore = Region::around(pi, pi, 0.3);

std::vector<SaddleRecord> nondegenerate(std::vector<SaddleRecord> v) {
  std::erase_if(v, [](const SaddleRecord& s) { return s.degenerate; });
  return v;
}

Field2D mapped(const Field2D& f, double (*g)(double)) {
  Field2D out = f;
  for (auto& v : out.values()) v = g(v);
  return out;
}

SaddleRecord detect_one(const Field2D& f, const DetectOptions& opt = {}) {
  const auto s = nondegenerate(detect_saddles(f, kCore, opt));
  REQUIRE(s.size() == 1);
  return s[0];
}

struct AnalyticCritical {
  double x1, x2;
};

// Critical points of sin x₁ sin x₂ + cos x₂ with det H < 0, from a 4096² sign
// scan refined by Newton on the analytic gradient.
std::vector<AnalyticCritical> brute_force_cmt_saddles() {
  auto grad = [](double x1, double x2, double& g1, double& g2) {
    g1 = std::cos(x1) * std::sin(x2);
    g2 = std::sin(x1) * std::cos(x2) - std::sin(x2);
  };
  auto hess = [](double x1, double x2, double& a, double& b, double& c) {
    a = -std::sin(x1) * std::sin(x2);
    b = std::cos(x1) * std::cos(x2);
    c = -std::sin(x1) * std::sin(x2) - std::cos(x2);
  };
  const int m = 4096;
  const double h = kTwoPi / m;
  std::vector<AnalyticCritical> out;
  std::vector<double> g1(m + 1), g2(m + 1), p1(m + 1), p2(m + 1);
  for (int j = 0; j <= m; ++j) grad(0.0, j * h, p1[j], p2[j]);
  for (int i = 1; i <= m; ++i) {
    for (int j = 0; j <= m; ++j) grad(i * h, j * h, g1[j], g2[j]);
    for (int j = 0; j < m; ++j) {
      const double a[4] = {p1[j], p1[j + 1], g1[j], g1[j + 1]};
      const double b[4] = {p2[j], p2[j + 1], g2[j], g2[j + 1]};
      auto straddles = [](const double* v) {
        return *std::min_element(v, v + 4) <= 0.0 && *std::max_element(v, v + 4) >= 0.0;
      };
      if (!straddles(a) || !straddles(b)) continue;
      double x1 = (i - 0.5) * h, x2 = (j + 0.5) * h;
      for (int it = 0; it < 60; ++it) {
        double f1, f2, ha, hb, hc;
        grad(x1, x2, f1, f2);
        hess(x1, x2, ha, hb, hc);
        const double det = ha * hc - hb * hb;
        if (std::abs(det) < 1e-14) break;
        x1 -= (hc * f1 - hb * f2) / det;
        x2 -= (-hb * f1 + ha * f2) / det;
      }
      double ha, hb, hc;
      hess(x1, x2, ha, hb, hc);
      if (ha * hc - hb * hb >= -1e-10) continue;
      x1 = std::fmod(std::fmod(x1, kTwoPi) + kTwoPi, kTwoPi);
      x2 = std::fmod(std::fmod(x2, kTwoPi) + kTwoPi, kTwoPi);
      const bool seen = std::any_of(out.begin(), out.end(), [&](const AnalyticCritical& c) {
        return std::hypot(std::remainder(c.x1 - x1, kTwoPi), std::remainder(c.x2 - x2, kTwoPi)) < 1e-6;
      });
      if (!seen) out.push_back({x1, x2});
    }
    std::swap(g1, p1);
    std::swap(g2, p2);
  }
  return out;
}

}  // namespace

TEST_CASE("region wrapping") {
  const auto r = Region::around(0.1, 0.1, 0.5);
  CHECK(r.contains(kTwoPi - 0.2, 0.3));
  CHECK(!r.contains(1.0, 0.1));
  CHECK(Region{}.contains(6.0, 0.0));
}

TEST_CASE("synthetic saddle slopes and angle") {
  const auto s = detect_one(rasterize(saddle_field(0.1, 0.2), Grid2D(512)));
  CHECK(s.x1 == doctest::Approx(pi).epsilon(1e-8));
  CHECK(s.x2 == doctest::Approx(pi).epsilon(1e-8));
  CHECK(std::abs(s.beta - 0.1) <= 1e-3);
  CHECK(std::abs(s.delta - 0.2) <= 1e-3);
  CHECK(std::abs(s.gamma - 0.2971) <= 1e-3);
  CHECK(s.gamma == doctest::Approx(std::atan(s.beta) + std::atan(s.delta)).epsilon(1e-12));
  CHECK(!s.out_of_model);
  CHECK(s.quality >= 0.0);
}

TEST_CASE("angle is invariant under rotation of the field") {
  const Grid2D grid(512);
  const auto s0 = detect_one(rasterize(saddle_field(0.1, 0.2), grid));
  for (double rot : {0.3, 1.1, 2.0}) {
    const auto s = detect_one(rasterize(saddle_field(0.1, 0.2, rot), grid));
    CHECK(std::abs(s.gamma - s0.gamma) <= 1e-6);
    // the bisector turns with the field
    CHECK(std::abs(std::remainder(s.frame_angle - s0.frame_angle - rot, pi)) <= 1e-6);
    // measured in the rotated reference frame the slopes are unchanged
    DetectOptions opt;
    opt.reference_angle = rot;
    const auto r = detect_one(rasterize(saddle_field(0.1, 0.2, rot), grid), opt);
    CHECK(std::abs(r.beta - s0.beta) <= 1e-6);
    CHECK(std::abs(r.delta - s0.delta) <= 1e-6);
  }
}

TEST_CASE("angle is invariant under monotone reparametrization") {
  const auto f = rasterize(saddle_field(0.1, 0.2), Grid2D(512));
  const auto s0 = detect_one(f);
  const auto affine = detect_one(mapped(f, [](double v) { return 2.0 * v + 1.0; }));
  const auto squashed = detect_one(mapped(f, [](double v) { return std::tanh(v); }));
  CHECK(std::abs(affine.gamma - s0.gamma) <= 1e-6);
  CHECK(std::abs(squashed.gamma - s0.gamma) <= 1e-6);
}

TEST_CASE("front data saddles match a brute-force enumeration") {
  const auto f = Field2D::from_function(Grid2D(64), [](double x1, double x2) {
    return std::sin(x1) * std::sin(x2) + std::cos(x2);
  });
  const auto found = nondegenerate(detect_saddles(f));
  const auto oracle = brute_force_cmt_saddles();
  REQUIRE(!oracle.empty());
  CHECK(found.size() == oracle.size());
  for (const auto& o : oracle) {
    const bool matched = std::any_of(found.begin(), found.end(), [&](const SaddleRecord& s) {
      return std::hypot(std::remainder(s.x1 - o.x1, kTwoPi), std::remainder(s.x2 - o.x2, kTwoPi)) < 1e-8;
    });
    CHECK_MESSAGE(matched, "missing saddle at " << o.x1 << ", " << o.x2);
  }
}

TEST_CASE("critical lines are degenerate") {
  const auto f = Field2D::from_function(Grid2D(32), [](double x1, double) { return std::cos(x1); });
  CHECK(nondegenerate(detect_saddles(f)).empty());
}

TEST_CASE("tracking a static field") {
  const auto f = rasterize(saddle_field(0.1, 0.2), Grid2D(128));
  const auto seed = detect_one(f);
  std::vector<std::pair<double, Field2D>> snaps;
  for (int k = 0; k < 5; ++k) snaps.emplace_back(0.1 * k, f);
  const auto track = track_saddle(snaps, seed);
  REQUIRE(track.records.size() == 5);
  CHECK(track.terminated == SaddleTrack::Termination::none);
  for (const auto& r : track.records) {
    CHECK(r.x1 == seed.x1);
    CHECK(r.gamma == seed.gamma);
  }
}

TEST_CASE("tracking a closing saddle") {
  std::vector<std::pair<double, Field2D>> snaps;
  std::vector<double> expected;
  for (int k = 0; k < 5; ++k) {
    const double t = 0.5 * k, s = 0.2 * std::exp(-t);
    snaps.emplace_back(t, rasterize(saddle_field(s, s), Grid2D(256)));
    expected.push_back(2.0 * std::atan(s));
  }
  const auto seed = detect_one(snaps[0].second);
  const auto track = track_saddle(snaps, seed);
  REQUIRE(track.records.size() == 5);
  for (std::size_t k = 0; k < 5; ++k) {
    CHECK(track.records[k].t == snaps[k].first);
    CHECK(std::abs(track.records[k].gamma - expected[k]) <= 1e-3);
  }
}

TEST_CASE("a saddle annihilating with an extremum ends the track") {
  // cos x₁ + ½ cos 2x₁ + c sin x₁ + cos x₂: the saddle near (2π/3, 0) meets the
  // maximum near (π, 0) in a fold between c = 0.4 and c = 0.5.
  std::vector<std::pair<double, Field2D>> snaps;
  for (int k = 0; k < 4; ++k) {
    const double c = 0.2 * k;
    snaps.emplace_back(k, Field2D::from_function(Grid2D(64), [c](double x1, double x2) {
      return std::cos(x1) + 0.5 * std::cos(2 * x1) + c * std::sin(x1) + std::cos(x2);
    }));
  }
  const auto all = nondegenerate(detect_saddles(snaps[0].second, Region::around(2.1, 0.0, 0.3)));
  REQUIRE(all.size() == 1);
  const auto track = track_saddle(snaps, all[0]);
  CHECK(track.records.size() == 3);
  CHECK(track.terminated == SaddleTrack::Termination::lost);
  CHECK(track.terminated_at == 3.0);
  CHECK(to_string(track.terminated) == "lost");
}

TEST_CASE("a saddle leaving the region ends the track") {
  std::vector<std::pair<double, Field2D>> snaps;
  for (int k = 0; k < 4; ++k) {
    auto f = saddle_field(0.1, 0.2);
    f.center1 = pi + 0.1 * k;
    snaps.emplace_back(k, rasterize(f, Grid2D(128)));
  }
  TrackOptions opt;
  opt.region = Region::around(pi, pi, 0.25);
  const auto seed = detect_one(snaps[0].second);
  const auto track = track_saddle(snaps, seed, opt);
  CHECK(track.records.size() == 3);
  CHECK(track.terminated == SaddleTrack::Termination::left_region);
  CHECK(to_string(track.terminated) == "left-region");
}

TEST_CASE("angle ODE ratio") {
  SaddleTrack closing;
  const double C = 1.0, g0 = 0.1;
  std::vector<double> ts;
  for (int k = 0; k <= 1500; ++k) ts.push_back(0.002 * k);
  const auto g = double_exp_envelope(C, g0, ts);
  for (std::size_t k = 0; k < ts.size(); ++k) closing.records.push_back({.t = ts[k], .gamma = g[k]});
  const auto r = gamma_ode_ratio(closing);
  REQUIRE(r.size() == ts.size() - 4);
  for (std::size_t k = 0; k < r.size(); ++k) {
    const double lg = std::abs(std::log(g[k + 2]));
    CHECK(r[k].first == ts[k + 2]);
    // 5-point quadratic derivative: relative truncation ~ (h·dlogγ/dt)² stays below 1%
    CHECK(r[k].second == doctest::Approx(C * lg / (1.0 + lg)).epsilon(1e-2));
    if (g[k + 2] <= 1e-4) CHECK(std::abs(r[k].second - C) <= 0.1 * C);
  }

  SaddleTrack flat;
  for (int k = 0; k < 7; ++k) flat.records.push_back({.t = 0.1 * k, .gamma = 0.3});
  for (const auto& [t, v] : gamma_ode_ratio(flat)) CHECK(v == 0.0);

  SaddleTrack shorter;
  for (int k = 0; k < 4; ++k) shorter.records.push_back({.t = 0.1 * k, .gamma = 0.3});
  CHECK_THROWS_WITH(gamma_ode_ratio(shorter), doctest::Contains("track too short"));
}

TEST_CASE("double exponential envelope") {
  const std::vector<double> ts{0.0, 1.0};
  for (auto m : {EnvelopeMethod::closed_form, EnvelopeMethod::numeric}) {
    const auto g = double_exp_envelope(1.0, 0.1, ts, m);
    CHECK(g[0] == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(g[1] == doctest::Approx(std::exp(-std::numbers::e * std::log(10.0))).epsilon(1e-8));
  }
  CHECK(double_exp_envelope(1.0, 0.1, ts)[1] == doctest::Approx(1.9145e-3).epsilon(1e-4));

  std::vector<double> many;
  for (int k = 1; k <= 100; ++k) many.push_back(0.03 * k);
  const auto closed = double_exp_envelope(0.7, 0.2, many);
  const auto numeric = double_exp_envelope(0.7, 0.2, many, EnvelopeMethod::numeric);
  for (std::size_t k = 0; k < many.size(); ++k) CHECK(std::abs(numeric[k] / closed[k] - 1.0) <= 1e-8);

  CHECK_THROWS(double_exp_envelope(1.0, 1.0, ts));
  CHECK_THROWS(double_exp_envelope(1.0, 0.0, ts));
  CHECK_THROWS(double_exp_envelope(0.0, 0.5, ts));
}

TEST_CASE("ellipse fit") {
  const Grid2D grid(128);
  // Periodized exp(−(y₁² + 4y₂²)) about (π, π), same Hessian as the plane Gaussian.
  const auto g = Field2D::from_function(grid, [](double x1, double x2) {
    return std::exp(-(2.0 * (1.0 + std::cos(x1)) + 8.0 * (1.0 + std::cos(x2))));
  });
  const auto e = fit_ellipse(g, Region::around(pi, pi, 0.5), 1.5);
  CHECK(e.t == 1.5);
  CHECK(e.aspect == doctest::Approx(4.0).epsilon(1e-3 / 4.0));
  CHECK(e.x1 == doctest::Approx(pi).epsilon(1e-9));
  CHECK(std::abs(std::remainder(e.axis_angle, pi)) <= 1e-6);

  const auto radial = Field2D::from_function(grid, [](double x1, double x2) {
    return std::exp(-(2.0 - std::cos(x1 - pi) - std::cos(x2 - pi)));
  });
  CHECK(fit_ellipse(radial, Region::around(pi, pi, 0.5)).aspect == doctest::Approx(1.0).epsilon(1e-3));

  const auto hyperbolic = Field2D::from_function(grid, [](double x1, double x2) { return std::sin(x1) * std::sin(x2); });
  CHECK_THROWS_AS(fit_ellipse(hyperbolic, Region::around(pi, pi, 0.5)), NotEllipticError);
}
