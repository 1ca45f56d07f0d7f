#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "qgsaddle/integrator.hpp"
#include "qgsaddle/models.hpp"
#include "qgsaddle/saddle.hpp"

namespace qgsaddle {

/// Configuration error naming the offending line (0 for whole-config checks).
class ConfigError : public std::invalid_argument {
public:
  ConfigError(int line, const std::string& message);
  int line() const { return line_; }

private:
  int line_;
};

enum class InitialPreset { cmt, cos_x2, clm_cos, custom, random };

std::string_view to_string(InitialPreset preset);

/// Run configuration. Keys of the flat `key = value` text form:
///
///   model              sqg | euler2d | clm1d                  (sqg)
///   n                  even, 8..8192                          (256)
///   initial            cmt | cos_x2 | clm_cos | custom | random
///                      (cmt; clm_cos when model = clm1d)
///   expression         θ₀ for initial = custom, in x1, x2 (or x)
///   step               cfl | fixed                            (cfl)
///   dt                 fixed step                             (1e-3)
///   cfl                (0, 1]                                 (0.5)
///   dt_max             cfl-mode ceiling                       (1e-2)
///   t_end              >= 0                                   (1)
///   snapshot_interval  > 0                                    (0.1)
///   filter             on | off | auto (on for cmt)           (auto)
///   filter_strength    > 0                                    (36)
///   filter_order       > 0                                    (36)
///   saddle_region      none | x1min,x1max,x2min,x2max         (none)
///   track_radius       continuity radius, 0 = 10·dx           (0)
///   checkpoint_interval  time between checkpoints, 0 = final only (1)
///   output_dir         path                                   (out)
///   seed               integer for the random preset          (0)
///
/// `#` starts a comment; blank lines are ignored.
struct SimConfig {
  ModelTag model = ModelTag::sqg;
  int n = 256;
  InitialPreset initial = InitialPreset::cmt;
  std::string expression;
  StepPolicy step;
  FilterSettings filter;
  std::optional<Region> saddle_region;
  double track_radius = 0.0;
  double checkpoint_interval = 1.0;
  std::string output_dir = "out";
  std::uint64_t seed = 0;
};

SimConfig parse_config(std::string_view text);
SimConfig load_config(const std::string& path);

/// Compiles an arithmetic expression in x1, x2 (x is an alias of x1) with
/// + − * / ^, parentheses, pi, e and sin cos tan exp log sqrt tanh abs.
std::function<double(double, double)> compile_expression(std::string_view text);

/// The configured initial state on the configured grid.
State initial_state(const SimConfig& config);

}  // namespace qgsaddle
