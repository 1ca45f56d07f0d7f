#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qgsaddle/config.hpp"
#include "qgsaddle/integrator.hpp"
#include "qgsaddle/saddle.hpp"

namespace qgsaddle {

/// Outcome of `simulate`. Files written to config.output_dir:
///   series.csv          one row per snapshot (see append_series_row)
///   state_t<t>.bin      checkpoints at multiples of checkpoint_interval and at t_end
///   run.json            run summary
struct SimulationSummary {
  Trajectory trajectory;  // rows only, no stored states
  std::optional<SaddleTrack> track;
  std::vector<std::string> checkpoints;
  std::string series_path;
};

/// Runs a configuration, optionally resuming from a checkpoint. A resumed run
/// appends to the existing series (skipping the duplicated first row) and
/// carries the BKM accumulator over from its last row.
SimulationSummary simulate(const SimConfig& config, const std::optional<std::string>& resume = {});

/// Checkpoint file name for time t.
std::string checkpoint_name(double t);

/// Entry point of the command-line tool; returns the process exit code.
int run_command(int argc, const char* const* argv);
int run_command(const std::vector<std::string>& args);

}  // namespace qgsaddle
