#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qgsaddle/diagnostics.hpp"
#include "qgsaddle/fits.hpp"
#include "qgsaddle/models.hpp"
#include "qgsaddle/saddle.hpp"

namespace qgsaddle {

/// Binary checkpoint, little-endian:
///   8 bytes  magic "QGSADL01"
///   u32      version (1)
///   u32      model (0 sqg, 1 euler2d, 2 clm1d)
///   u32      n
///   f64      t
///   f64 × n² (2D, row-major, x1 slowest) or f64 × n (clm1d), physical values
class CheckpointError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline constexpr char kCheckpointMagic[9] = "QGSADL01";
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  State state;
  double t = 0.0;
  ModelTag model = ModelTag::sqg;
};

void write_checkpoint(const std::string& path, const State& state, double t, ModelTag model);
Checkpoint read_checkpoint(const std::string& path);

/// One CSV line: diagnostics plus the tracked saddle when a track is active.
struct SeriesRow {
  DiagRow diag;
  std::optional<SaddleRecord> saddle;
};

/// Column names in file order.
const std::vector<std::string>& series_columns();

/// Appends one row. A missing or empty file first receives the comment block
/// documenting each column and the header line. Doubles use 17 significant
/// digits so re-parsing restores them exactly; saddle columns are empty when
/// `row.saddle` is unset.
void append_series_row(const std::string& path, const SeriesRow& row);

/// Parses a file written by append_series_row; lines starting with '#' are skipped.
std::vector<SeriesRow> read_series(const std::string& path);

/// Extracts (t, column) pairs, skipping rows where the column is empty.
Series series_column(const std::vector<SeriesRow>& rows, const std::string& column);

}  // namespace qgsaddle
