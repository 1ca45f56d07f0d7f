#include "qgsaddle/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qgsaddle::kernels {

namespace {

constexpr std::ptrdiff_t kBlock = 4096;

void require_same(std::size_t a, std::size_t b) {
  if (a != b) throw DimensionError("kernel operands differ in length");
}

}  // namespace

int thread_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace serial {

void scale_real(std::span<Complex> modes, std::span<const double> mult) {
  require_same(modes.size(), mult.size());
  for (std::size_t i = 0; i < modes.size(); ++i) modes[i] *= mult[i];
}

void scale_imag(std::span<Complex> modes, std::span<const double> mult) {
  require_same(modes.size(), mult.size());
  for (std::size_t i = 0; i < modes.size(); ++i)
    modes[i] = Complex(-modes[i].imag() * mult[i], modes[i].real() * mult[i]);
}

void dot2(std::span<const double> a1, std::span<const double> a2, std::span<const double> b1,
          std::span<const double> b2, std::span<double> out) {
  require_same(a1.size(), out.size());
  require_same(a2.size(), out.size());
  require_same(b1.size(), out.size());
  require_same(b2.size(), out.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a1[i] * b1[i] + a2[i] * b2[i];
}

void lincomb(std::span<double> out, std::span<const double> x, double a, std::span<const double> y) {
  require_same(x.size(), out.size());
  require_same(y.size(), out.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] + a * y[i];
}

double max_abs(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

double max_hypot(std::span<const double> a, std::span<const double> b) {
  require_same(a.size(), b.size());
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::hypot(a[i], b[i]));
  return m;
}

double sum(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s;
}

double dot(std::span<const double> x, std::span<const double> y) {
  require_same(x.size(), y.size());
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

}  // namespace serial

namespace parallel {

void scale_real(std::span<Complex> modes, std::span<const double> mult) {
  require_same(modes.size(), mult.size());
  const auto n = static_cast<std::ptrdiff_t>(modes.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) modes[i] *= mult[i];
}

void scale_imag(std::span<Complex> modes, std::span<const double> mult) {
  require_same(modes.size(), mult.size());
  const auto n = static_cast<std::ptrdiff_t>(modes.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    modes[i] = Complex(-modes[i].imag() * mult[i], modes[i].real() * mult[i]);
}

void dot2(std::span<const double> a1, std::span<const double> a2, std::span<const double> b1,
          std::span<const double> b2, std::span<double> out) {
  require_same(a1.size(), out.size());
  require_same(a2.size(), out.size());
  require_same(b1.size(), out.size());
  require_same(b2.size(), out.size());
  const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = a1[i] * b1[i] + a2[i] * b2[i];
}

void lincomb(std::span<double> out, std::span<const double> x, double a, std::span<const double> y) {
  require_same(x.size(), out.size());
  require_same(y.size(), out.size());
  const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = x[i] + a * y[i];
}

double max_abs(std::span<const double> x) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  double m = 0.0;
#pragma omp parallel for schedule(static) reduction(max : m)
  for (std::ptrdiff_t i = 0; i < n; ++i) m = std::max(m, std::abs(x[i]));
  return m;
}

double max_hypot(std::span<const double> a, std::span<const double> b) {
  require_same(a.size(), b.size());
  const auto n = static_cast<std::ptrdiff_t>(a.size());
  double m = 0.0;
#pragma omp parallel for schedule(static) reduction(max : m)
  for (std::ptrdiff_t i = 0; i < n; ++i) m = std::max(m, std::hypot(a[i], b[i]));
  return m;
}

namespace {

template <class Term>
double blocked_sum(std::ptrdiff_t n, Term term) {
  const std::ptrdiff_t blocks = (n + kBlock - 1) / kBlock;
  std::vector<double> partial(static_cast<std::size_t>(blocks), 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < blocks; ++b) {
    const std::ptrdiff_t end = std::min(n, (b + 1) * kBlock);
    double s = 0.0;
    for (std::ptrdiff_t i = b * kBlock; i < end; ++i) s += term(i);
    partial[static_cast<std::size_t>(b)] = s;
  }
  double total = 0.0;
  for (double s : partial) total += s;
  return total;
}

}  // namespace

double sum(std::span<const double> x) {
  return blocked_sum(static_cast<std::ptrdiff_t>(x.size()), [&](std::ptrdiff_t i) { return x[i]; });
}

double dot(std::span<const double> x, std::span<const double> y) {
  require_same(x.size(), y.size());
  return blocked_sum(static_cast<std::ptrdiff_t>(x.size()),
                     [&](std::ptrdiff_t i) { return x[i] * y[i]; });
}

}  // namespace parallel

}  // namespace qgsaddle::kernels
