#include "qgsaddle/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "qgsaddle/kernels.hpp"

namespace qgsaddle {

namespace {

// FFTW planning is not thread safe; execution on new arrays is. Plans are
// made with FFTW_ESTIMATE so repeated runs pick the same algorithm and stay
// bitwise reproducible, and with FFTW_UNALIGNED so any std::vector works.
class PlanCache {
public:
  struct Pair {
    fftw_plan forward = nullptr;
    fftw_plan inverse = nullptr;
  };

  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  const Pair& plans_2d(int n) { return lookup(plans2d_, n, 2); }
  const Pair& plans_1d(int n) { return lookup(plans1d_, n, 1); }

  ~PlanCache() {
    for (auto* table : {&plans2d_, &plans1d_})
      for (auto& [n, p] : *table) {
        fftw_destroy_plan(p.forward);
        fftw_destroy_plan(p.inverse);
      }
  }

private:
  const Pair& lookup(std::map<int, Pair>& table, int n, int rank) {
    std::lock_guard lock(mutex_);
    auto it = table.find(n);
    if (it != table.end()) return it->second;

    const std::size_t real_size = rank == 2 ? static_cast<std::size_t>(n) * n : n;
    const std::size_t cplx_size =
        rank == 2 ? static_cast<std::size_t>(n) * (n / 2 + 1) : static_cast<std::size_t>(n / 2 + 1);
    std::vector<double> in(real_size);
    std::vector<Complex> out(cplx_size);
    auto* cout = reinterpret_cast<fftw_complex*>(out.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    Pair p;
    if (rank == 2) {
      p.forward = fftw_plan_dft_r2c_2d(n, n, in.data(), cout, flags);
      p.inverse = fftw_plan_dft_c2r_2d(n, n, cout, in.data(), flags);
    } else {
      p.forward = fftw_plan_dft_r2c_1d(n, in.data(), cout, flags);
      p.inverse = fftw_plan_dft_c2r_1d(n, cout, in.data(), flags);
    }
    return table.emplace(n, p).first->second;
  }

  std::mutex mutex_;
  std::map<int, Pair> plans2d_;
  std::map<int, Pair> plans1d_;
};

}  // namespace

Multiplier make_multiplier(const Grid2D& grid, const Symbol& symbol) {
  const int n = grid.n();
  const int cols = grid.spectral_cols();
  Multiplier m;
  m.values.resize(grid.spectral_size());
  m.imaginary = symbol.kind == Symbol::Kind::ddx1 || symbol.kind == Symbol::Kind::ddx2;
  if (symbol.kind == Symbol::Kind::hilbert_1d)
    throw DimensionError("hilbert_1d applies to one-dimensional fields only");

  for (int i = 0; i < n; ++i) {
    const int k1 = grid.wavenumber(i);
    for (int j = 0; j < cols; ++j) {
      const int k2 = j;
      const double kk = std::hypot(double(k1), double(k2));
      double v = 0.0;
      switch (symbol.kind) {
        case Symbol::Kind::frac_laplacian:
          v = kk == 0.0 ? (symbol.exponent == 0.0 ? 1.0 : 0.0) : std::pow(kk, symbol.exponent);
          break;
        case Symbol::Kind::inv_frac_laplacian:
          v = kk == 0.0 ? 0.0 : std::pow(kk, -symbol.exponent);
          break;
        case Symbol::Kind::ddx1:
          v = (2 * i == n) ? 0.0 : double(k1);
          break;
        case Symbol::Kind::ddx2:
          v = (2 * j == n) ? 0.0 : double(k2);
          break;
        case Symbol::Kind::dealias_two_thirds:
          v = (outside_two_thirds(k1, n) || outside_two_thirds(k2, n)) ? 0.0 : 1.0;
          break;
        case Symbol::Kind::hilbert_1d:
          break;
      }
      m.values[static_cast<std::size_t>(i) * cols + j] = v;
    }
  }
  return m;
}

Multiplier make_multiplier_1d(int n, const Symbol& symbol) {
  Multiplier m;
  m.values.resize(static_cast<std::size_t>(n / 2 + 1));
  for (int k = 0; k <= n / 2; ++k) {
    const bool nyquist = 2 * k == n;
    double v = 0.0;
    switch (symbol.kind) {
      case Symbol::Kind::frac_laplacian:
        v = k == 0 ? (symbol.exponent == 0.0 ? 1.0 : 0.0) : std::pow(double(k), symbol.exponent);
        break;
      case Symbol::Kind::inv_frac_laplacian:
        v = k == 0 ? 0.0 : std::pow(double(k), -symbol.exponent);
        break;
      case Symbol::Kind::ddx1:
        v = nyquist ? 0.0 : double(k);
        m.imaginary = true;
        break;
      case Symbol::Kind::hilbert_1d:
        // −i·sign(k); only k ≥ 0 is stored.
        v = (k == 0 || nyquist) ? 0.0 : -1.0;
        m.imaginary = true;
        break;
      case Symbol::Kind::dealias_two_thirds:
        v = outside_two_thirds(k, n) ? 0.0 : 1.0;
        break;
      case Symbol::Kind::ddx2:
        throw DimensionError("ddx2 is undefined for one-dimensional fields");
    }
    m.values[static_cast<std::size_t>(k)] = v;
  }
  return m;
}

Spectrum2D to_spectral(const Field2D& field) {
  Spectrum2D out(field.grid());
  const auto& plans = PlanCache::instance().plans_2d(field.n());
  fftw_execute_dft_r2c(plans.forward, const_cast<double*>(field.values().data()),
                       reinterpret_cast<fftw_complex*>(out.modes.data()));
  return out;
}

Field2D to_physical(const Spectrum2D& spectrum) {
  if (spectrum.modes.size() != spectrum.grid.spectral_size())
    throw DimensionError("Spectrum2D has the wrong number of modes");
  const auto& plans = PlanCache::instance().plans_2d(spectrum.grid.n());
  std::vector<Complex> scratch = spectrum.modes;  // c2r overwrites its input
  Field2D out(spectrum.grid);
  fftw_execute_dft_c2r(plans.inverse, reinterpret_cast<fftw_complex*>(scratch.data()),
                       out.values().data());
  const double scale = 1.0 / static_cast<double>(spectrum.grid.size());
  for (double& v : out.values()) v *= scale;
  return out;
}

Spectrum1D to_spectral(const Field1D& field) {
  Spectrum1D out(field.n());
  const auto& plans = PlanCache::instance().plans_1d(field.n());
  fftw_execute_dft_r2c(plans.forward, const_cast<double*>(field.values().data()),
                       reinterpret_cast<fftw_complex*>(out.modes.data()));
  return out;
}

Field1D to_physical(const Spectrum1D& spectrum) {
  if (spectrum.modes.size() != static_cast<std::size_t>(spectrum.n / 2 + 1))
    throw DimensionError("Spectrum1D has the wrong number of modes");
  const auto& plans = PlanCache::instance().plans_1d(spectrum.n);
  std::vector<Complex> scratch = spectrum.modes;
  Field1D out(spectrum.n);
  fftw_execute_dft_c2r(plans.inverse, reinterpret_cast<fftw_complex*>(scratch.data()),
                       out.values().data());
  const double scale = 1.0 / spectrum.n;
  for (double& v : out.values()) v *= scale;
  return out;
}

double parseval_mean_square(const Spectrum2D& spectrum) {
  const int n = spectrum.grid.n();
  const int cols = spectrum.grid.spectral_cols();
  double total = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < cols; ++j) {
      // Columns 0 and n/2 are their own conjugate partners; the rest appear twice.
      const double weight = (j == 0 || 2 * j == n) ? 1.0 : 2.0;
      total += weight * std::norm(spectrum.at(i, j));
    }
  const double points = static_cast<double>(spectrum.grid.size());
  return total / (points * points);
}

double parseval_mean_square(const Spectrum1D& spectrum) {
  const int n = spectrum.n;
  double total = 0.0;
  for (int k = 0; k <= n / 2; ++k) {
    const double weight = (k == 0 || 2 * k == n) ? 1.0 : 2.0;
    total += weight * std::norm(spectrum.modes[static_cast<std::size_t>(k)]);
  }
  return total / (double(n) * double(n));
}

void apply_multiplier(Spectrum2D& spectrum, const Multiplier& m) {
  if (m.imaginary)
    kernels::parallel::scale_imag(spectrum.modes, m.values);
  else
    kernels::parallel::scale_real(spectrum.modes, m.values);
}

void apply_multiplier(Spectrum1D& spectrum, const Multiplier& m) {
  if (m.imaginary)
    kernels::parallel::scale_imag(spectrum.modes, m.values);
  else
    kernels::parallel::scale_real(spectrum.modes, m.values);
}

void apply_symbol(Spectrum2D& spectrum, const Symbol& symbol) {
  apply_multiplier(spectrum, make_multiplier(spectrum.grid, symbol));
}

void apply_symbol(Spectrum1D& spectrum, const Symbol& symbol) {
  apply_multiplier(spectrum, make_multiplier_1d(spectrum.n, symbol));
}

Field2D apply_symbol(const Field2D& field, const Symbol& symbol) {
  auto spec = to_spectral(field);
  apply_symbol(spec, symbol);
  return to_physical(spec);
}

Field1D apply_symbol(const Field1D& field, const Symbol& symbol) {
  auto spec = to_spectral(field);
  apply_symbol(spec, symbol);
  return to_physical(spec);
}

std::pair<Field2D, Field2D> perp_grad(const Field2D& theta) {
  const auto& ops = SpectralOps::get(theta.n());
  const auto hat = to_spectral(theta);
  auto d1 = hat;
  auto d2 = hat;
  apply_multiplier(d1, ops.ddx1);
  apply_multiplier(d2, ops.ddx2);
  for (auto& c : d2.modes) c = -c;
  return {to_physical(d2), to_physical(d1)};
}

Field2D divergence(const Field2D& v1, const Field2D& v2) {
  if (!(v1.grid() == v2.grid())) throw DimensionError("divergence: components on different grids");
  const auto& ops = SpectralOps::get(v1.n());
  auto a = to_spectral(v1);
  auto b = to_spectral(v2);
  apply_multiplier(a, ops.ddx1);
  apply_multiplier(b, ops.ddx2);
  for (std::size_t i = 0; i < a.modes.size(); ++i) a.modes[i] += b.modes[i];
  return to_physical(a);
}

Multiplier exponential_filter(const Grid2D& grid, double strength, double order) {
  const int n = grid.n();
  const int cols = grid.spectral_cols();
  const double kmax = n / 2.0;
  Multiplier m;
  m.values.resize(grid.spectral_size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < cols; ++j) {
      const double kk = std::hypot(double(grid.wavenumber(i)), double(j)) / kmax;
      m.values[static_cast<std::size_t>(i) * cols + j] = std::exp(-strength * std::pow(kk, order));
    }
  return m;
}

Multiplier exponential_filter_1d(int n, double strength, double order) {
  Multiplier m;
  m.values.resize(static_cast<std::size_t>(n / 2 + 1));
  for (int k = 0; k <= n / 2; ++k)
    m.values[static_cast<std::size_t>(k)] = std::exp(-strength * std::pow(k / (n / 2.0), order));
  return m;
}

namespace {

struct Ops2DBuilder {
  static SpectralOps build(int n) {
    const Grid2D g(n);
    SpectralOps ops;
    ops.ddx1 = make_multiplier(g, Symbol::ddx1());
    ops.ddx2 = make_multiplier(g, Symbol::ddx2());
    ops.inv_abs_k = make_multiplier(g, Symbol::inv_frac_laplacian(1.0));
    ops.inv_k2 = make_multiplier(g, Symbol::inv_frac_laplacian(2.0));
    ops.dealias = make_multiplier(g, Symbol::dealias_two_thirds());
    return ops;
  }
};

struct Ops1DBuilder {
  static SpectralOps1D build(int n) {
    SpectralOps1D ops;
    ops.ddx = make_multiplier_1d(n, Symbol::ddx1());
    ops.hilbert = make_multiplier_1d(n, Symbol::hilbert_1d());
    ops.dealias = make_multiplier_1d(n, Symbol::dealias_two_thirds());
    return ops;
  }
};

template <class Builder, class Ops>
const Ops& cached(int n) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<Ops>> table;
  std::lock_guard lock(mutex);
  auto& slot = table[n];
  if (!slot) slot = std::make_unique<Ops>(Builder::build(n));
  return *slot;
}

}  // namespace

const SpectralOps& SpectralOps::get(int n) { return cached<Ops2DBuilder, SpectralOps>(n); }
const SpectralOps1D& SpectralOps1D::get(int n) { return cached<Ops1DBuilder, SpectralOps1D>(n); }

}  // namespace qgsaddle
