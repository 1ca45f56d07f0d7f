#pragma once

// Data-parallel inner loops used by the spectral solver and diagnostics.
//
// Every kernel exists twice: `serial` is the plain reference loop kept for
// testing and benchmarking, `parallel` is the OpenMP version used by the
// library. Elementwise kernels produce bitwise identical results in both
// namespaces. Reductions in `parallel` sum fixed-size blocks and combine the
// block partials in order, so the result does not depend on the thread count;
// it can differ from the serial sum in the last bits.

#include <span>

#include "qgsaddle/grid.hpp"

namespace qgsaddle::kernels {

namespace serial {

/// modes[i] *= mult[i]
void scale_real(std::span<Complex> modes, std::span<const double> mult);
/// modes[i] *= i·mult[i]
void scale_imag(std::span<Complex> modes, std::span<const double> mult);
/// out = a1·b1 + a2·b2
void dot2(std::span<const double> a1, std::span<const double> a2, std::span<const double> b1,
          std::span<const double> b2, std::span<double> out);
/// out = x + a·y
void lincomb(std::span<double> out, std::span<const double> x, double a, std::span<const double> y);
double max_abs(std::span<const double> x);
/// max over i of hypot(a[i], b[i])
double max_hypot(std::span<const double> a, std::span<const double> b);
double sum(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);

}  // namespace serial

namespace parallel {

void scale_real(std::span<Complex> modes, std::span<const double> mult);
void scale_imag(std::span<Complex> modes, std::span<const double> mult);
void dot2(std::span<const double> a1, std::span<const double> a2, std::span<const double> b1,
          std::span<const double> b2, std::span<double> out);
void lincomb(std::span<double> out, std::span<const double> x, double a, std::span<const double> y);
double max_abs(std::span<const double> x);
double max_hypot(std::span<const double> a, std::span<const double> b);
double sum(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);

}  // namespace parallel

/// Number of OpenMP threads the parallel kernels will use (1 without OpenMP).
int thread_count();

}  // namespace qgsaddle::kernels
