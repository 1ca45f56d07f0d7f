// Serial reference vs OpenMP kernels on n×n grids.
//
//   bench_kernels [--n 1024] [--reps 20]

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <vector>

#include "qgsaddle/kernels.hpp"
#include "qgsaddle/models.hpp"

using namespace qgsaddle;
namespace ks = qgsaddle::kernels::serial;
namespace kp = qgsaddle::kernels::parallel;

namespace {

double seconds_per_call(const std::function<void()>& f, int reps) {
  f();  // warm-up
  const auto start = std::chrono::steady_clock::now();
  for (int r = 0; r < reps; ++r) f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() / reps;
}

void row(const char* name, double serial, double parallel, double diff) {
  std::printf("%-12s %12.3e %12.3e %8.2fx %12.3e\n", name, serial, parallel, serial / parallel, diff);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"serial vs parallel kernel timings"};
  int n = 1024, reps = 20;
  app.add_option("--n", n, "grid size");
  app.add_option("--reps", reps, "timed repetitions per kernel");
  CLI11_PARSE(app, argc, argv);

  const std::size_t size = static_cast<std::size_t>(n) * n;
  const std::size_t half = static_cast<std::size_t>(n) * (n / 2 + 1);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  std::vector<double> a(size), b(size), c(size), d(size), out_s(size), out_p(size), mult(half);
  for (auto* v : {&a, &b, &c, &d})
    for (auto& x : *v) x = normal(rng);
  for (auto& x : mult) x = normal(rng);
  std::vector<Complex> modes(half, Complex(1.0, 0.5)), modes_s = modes, modes_p = modes;

  std::printf("threads=%d n=%d reps=%d\n", kernels::thread_count(), n, reps);
  std::printf("%-12s %12s %12s %9s %12s\n", "kernel", "serial[s]", "parallel[s]", "speedup", "max|diff|");

  auto max_diff = [](const std::vector<double>& x, const std::vector<double>& y) {
    double m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
    return m;
  };

  {
    const double ts = seconds_per_call([&] { ks::dot2(a, b, c, d, out_s); }, reps);
    const double tp = seconds_per_call([&] { kp::dot2(a, b, c, d, out_p); }, reps);
    row("dot2", ts, tp, max_diff(out_s, out_p));
  }
  {
    const double ts = seconds_per_call([&] { ks::lincomb(out_s, a, 0.25, b); }, reps);
    const double tp = seconds_per_call([&] { kp::lincomb(out_p, a, 0.25, b); }, reps);
    row("lincomb", ts, tp, max_diff(out_s, out_p));
  }
  {
    modes_s = modes;
    modes_p = modes;
    const double ts = seconds_per_call([&] { ks::scale_imag(modes_s, mult); }, reps);
    const double tp = seconds_per_call([&] { kp::scale_imag(modes_p, mult); }, reps);
    double m = 0.0;
    for (std::size_t i = 0; i < half; ++i) m = std::max(m, std::abs(modes_s[i] - modes_p[i]));
    row("scale_imag", ts, tp, m);
  }
  {
    double rs = 0.0, rp = 0.0;
    const double ts = seconds_per_call([&] { rs = ks::max_hypot(a, b); }, reps);
    const double tp = seconds_per_call([&] { rp = kp::max_hypot(a, b); }, reps);
    row("max_hypot", ts, tp, std::abs(rs - rp));
  }
  {
    double rs = 0.0, rp = 0.0;
    const double ts = seconds_per_call([&] { rs = ks::dot(a, b); }, reps);
    const double tp = seconds_per_call([&] { rp = kp::dot(a, b); }, reps);
    row("dot", ts, tp, std::abs(rs - rp));
  }

  // End to end: one SQG tendency evaluation (FFTs plus the parallel kernels).
  const Grid2D grid(n);
  const auto theta = Field2D::from_function(grid, [](double x1, double x2) {
    return std::sin(x1) * std::sin(x2) + std::cos(x2);
  });
  const double tt = seconds_per_call([&] { (void)tendency(ModelTag::sqg, theta); }, std::max(1, reps / 4));
  std::printf("%-12s %12s %12.3e\n", "tendency", "-", tt);
  return 0;
}
