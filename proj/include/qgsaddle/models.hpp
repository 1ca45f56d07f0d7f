#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <variant>

#include "qgsaddle/grid.hpp"

namespace qgsaddle {

enum class ModelTag { sqg, euler2d, clm1d };

std::string_view to_string(ModelTag model);
ModelTag parse_model(std::string_view name);

/// A model state: a 2D scalar for sqg/euler2d, a 1D vorticity for clm1d.
using State = std::variant<Field2D, Field1D>;

using Velocity = std::pair<Field2D, Field2D>;

/// SQG law: ψ = −(−Δ)^{-1/2} θ, u = ∇⊥ψ. The mean of θ does not contribute.
Velocity velocity_sqg(const Field2D& theta);

/// 2D Euler law: Δψ = ω, u = ∇⊥ψ.
Velocity velocity_euler2d(const Field2D& omega);

Velocity velocity(ModelTag model, const Field2D& scalar);

/// Stream function of the model (zero mean).
Field2D stream_function(ModelTag model, const Field2D& scalar);

/// −u·∇θ for sqg/euler2d, H(ω)ω for clm1d. The input is projected onto the
/// 2/3-rule band before forming products in physical space and the result is
/// dealiased.
Field2D tendency(ModelTag model, const Field2D& state);
Field1D tendency(ModelTag model, const Field1D& state);
State tendency(ModelTag model, const State& state);

/// Zero the modes outside the 2/3-rule band.
Field2D dealias(const Field2D& field);
Field1D dealias(const Field1D& field);

}  // namespace qgsaddle
