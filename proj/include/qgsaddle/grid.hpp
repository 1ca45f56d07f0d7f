#pragma once

#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace qgsaddle {

using Complex = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Raised when field shapes disagree with their grid or with each other.
class DimensionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Square periodic grid over [0, 2π)². Points are x = i·dx, i = 0..n-1.
class Grid2D {
public:
  explicit Grid2D(int n);

  int n() const { return n_; }
  double length() const { return kTwoPi; }
  double dx() const { return kTwoPi / n_; }
  std::size_t size() const { return static_cast<std::size_t>(n_) * n_; }
  /// Number of stored complex modes in the half-spectrum layout n × (n/2+1).
  std::size_t spectral_size() const { return static_cast<std::size_t>(n_) * (n_ / 2 + 1); }
  int spectral_cols() const { return n_ / 2 + 1; }

  double coord(int i) const { return i * dx(); }
  /// Signed integer wavenumber of row index i (k1 axis); Nyquist maps to +n/2.
  int wavenumber(int i) const { return i <= n_ / 2 ? i : i - n_; }

  bool operator==(const Grid2D&) const = default;

private:
  int n_;
};

/// Real scalar on a Grid2D, row-major with values[i1 * n + i2] at (x1, x2) = (i1·dx, i2·dx).
class Field2D {
public:
  explicit Field2D(Grid2D grid) : grid_(grid), values_(grid.size(), 0.0) {}
  Field2D(Grid2D grid, std::vector<double> values);

  template <class F>
  static Field2D from_function(Grid2D grid, F&& f) {
    Field2D out(grid);
    const int n = grid.n();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out.at(i, j) = f(grid.coord(i), grid.coord(j));
    return out;
  }

  const Grid2D& grid() const { return grid_; }
  int n() const { return grid_.n(); }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double& at(int i1, int i2) { return values_[static_cast<std::size_t>(i1) * grid_.n() + i2]; }
  double at(int i1, int i2) const { return values_[static_cast<std::size_t>(i1) * grid_.n() + i2]; }

  bool operator==(const Field2D&) const = default;

private:
  Grid2D grid_;
  std::vector<double> values_;
};

/// Real scalar on n equispaced points of [0, 2π).
class Field1D {
public:
  explicit Field1D(int n);
  Field1D(int n, std::vector<double> values);

  template <class F>
  static Field1D from_function(int n, F&& f) {
    Field1D out(n);
    for (int i = 0; i < n; ++i) out.values_[i] = f(i * out.dx());
    return out;
  }

  int n() const { return n_; }
  double dx() const { return kTwoPi / n_; }
  double coord(int i) const { return i * dx(); }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double& operator[](int i) { return values_[i]; }
  double operator[](int i) const { return values_[i]; }
  int wavenumber(int i) const { return i <= n_ / 2 ? i : i - n_; }

  bool operator==(const Field1D&) const = default;

private:
  int n_;
  std::vector<double> values_;
};

/// Half-spectrum of a Field2D: coefficients c[i1 * (n/2+1) + j2] for wavenumbers (k1(i1), j2).
struct Spectrum2D {
  Grid2D grid;
  std::vector<Complex> modes;

  explicit Spectrum2D(Grid2D g) : grid(g), modes(g.spectral_size()) {}
  Complex& at(int i1, int j2) { return modes[static_cast<std::size_t>(i1) * grid.spectral_cols() + j2]; }
  Complex at(int i1, int j2) const { return modes[static_cast<std::size_t>(i1) * grid.spectral_cols() + j2]; }
};

/// Half-spectrum of a Field1D: n/2+1 coefficients for k = 0..n/2.
struct Spectrum1D {
  int n;
  std::vector<Complex> modes;

  explicit Spectrum1D(int points) : n(points), modes(static_cast<std::size_t>(points / 2 + 1)) {}
};

}  // namespace qgsaddle
