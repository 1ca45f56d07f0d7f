#include "qgsaddle/models.hpp"

#include <stdexcept>
#include <string>

#include "qgsaddle/kernels.hpp"
#include "qgsaddle/spectral.hpp"

namespace qgsaddle {

std::string_view to_string(ModelTag model) {
  switch (model) {
    case ModelTag::sqg: return "sqg";
    case ModelTag::euler2d: return "euler2d";
    case ModelTag::clm1d: return "clm1d";
  }
  return "unknown";
}

ModelTag parse_model(std::string_view name) {
  if (name == "sqg") return ModelTag::sqg;
  if (name == "euler2d") return ModelTag::euler2d;
  if (name == "clm1d") return ModelTag::clm1d;
  throw std::invalid_argument("unknown model '" + std::string(name) + "'");
}

namespace {

void require_2d(ModelTag model) {
  if (model == ModelTag::clm1d) throw DimensionError("clm1d evolves a one-dimensional state");
}

// ψ̂ = −m(k)·θ̂ with m = |k|^{-1} (sqg) or |k|^{-2} (euler2d).
Spectrum2D stream_spectrum(ModelTag model, const Field2D& scalar) {
  require_2d(model);
  const auto& ops = SpectralOps::get(scalar.n());
  auto psi = to_spectral(scalar);
  apply_multiplier(psi, model == ModelTag::sqg ? ops.inv_abs_k : ops.inv_k2);
  for (auto& c : psi.modes) c = -c;
  return psi;
}

Velocity velocity_from_stream(const Spectrum2D& psi) {
  const auto& ops = SpectralOps::get(psi.grid.n());
  auto u1 = psi;
  auto u2 = psi;
  apply_multiplier(u1, ops.ddx2);
  for (auto& c : u1.modes) c = -c;
  apply_multiplier(u2, ops.ddx1);
  return {to_physical(u1), to_physical(u2)};
}

}  // namespace

Velocity velocity_sqg(const Field2D& theta) {
  return velocity_from_stream(stream_spectrum(ModelTag::sqg, theta));
}

Velocity velocity_euler2d(const Field2D& omega) {
  return velocity_from_stream(stream_spectrum(ModelTag::euler2d, omega));
}

Velocity velocity(ModelTag model, const Field2D& scalar) {
  return velocity_from_stream(stream_spectrum(model, scalar));
}

Field2D stream_function(ModelTag model, const Field2D& scalar) {
  return to_physical(stream_spectrum(model, scalar));
}

Field2D dealias(const Field2D& field) {
  auto hat = to_spectral(field);
  apply_multiplier(hat, SpectralOps::get(field.n()).dealias);
  return to_physical(hat);
}

Field1D dealias(const Field1D& field) {
  auto hat = to_spectral(field);
  apply_multiplier(hat, SpectralOps1D::get(field.n()).dealias);
  return to_physical(hat);
}

Field2D tendency(ModelTag model, const Field2D& state) {
  require_2d(model);
  const auto& ops = SpectralOps::get(state.n());

  auto hat = to_spectral(state);
  apply_multiplier(hat, ops.dealias);

  auto psi = hat;
  apply_multiplier(psi, model == ModelTag::sqg ? ops.inv_abs_k : ops.inv_k2);
  for (auto& c : psi.modes) c = -c;
  const auto [u1, u2] = velocity_from_stream(psi);

  auto g1 = hat;
  auto g2 = hat;
  apply_multiplier(g1, ops.ddx1);
  apply_multiplier(g2, ops.ddx2);
  const Field2D d1 = to_physical(g1);
  const Field2D d2 = to_physical(g2);

  Field2D product(state.grid());
  kernels::parallel::dot2(u1.values(), u2.values(), d1.values(), d2.values(), product.values());

  auto out = to_spectral(product);
  apply_multiplier(out, ops.dealias);
  for (auto& c : out.modes) c = -c;
  return to_physical(out);
}

Field1D tendency(ModelTag model, const Field1D& state) {
  if (model != ModelTag::clm1d) throw DimensionError("2D models need a Field2D state");
  const auto& ops = SpectralOps1D::get(state.n());

  auto hat = to_spectral(state);
  apply_multiplier(hat, ops.dealias);
  const Field1D omega = to_physical(hat);
  apply_multiplier(hat, ops.hilbert);
  const Field1D h_omega = to_physical(hat);

  Field1D product(state.n());
  auto p = product.values();
  auto a = omega.values();
  auto b = h_omega.values();
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = a[i] * b[i];

  auto out = to_spectral(product);
  apply_multiplier(out, ops.dealias);
  return to_physical(out);
}

State tendency(ModelTag model, const State& state) {
  return std::visit([&](const auto& s) -> State { return tendency(model, s); }, state);
}

}  // namespace qgsaddle
