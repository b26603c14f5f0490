#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "nuqs/fisher.hpp"
#include "nuqs/optimizer.hpp"

namespace nuqs {

/// Log-spaced axis; both end points are included exactly.
struct AxisSpec {
  double min = 1e-2;
  double max = 1e2;
  int points = 25;

  friend bool operator==(const AxisSpec&, const AxisSpec&) = default;
};

struct GridSpec {
  AxisSpec n_sat;
  AxisSpec T;
  Target target = Target::Detuning;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Throws Error{InvalidGrid} unless 0 < min < max and points >= 2 per axis.
void validate_grid(const GridSpec& grid);
std::vector<double> axis_values(const AxisSpec& axis);

struct SweepCell {
  double n_sat = 0.0;
  double T = 0.0;
  Target target = Target::Detuning;
  double i_sq = 0.0;
  double i_coh = 0.0;
  double advantage = 1.0;
  // Gaussian-family optimum.
  ProbeState state;
  double delta_bar = 0.0;
  double nbar = 0.0;
  Regime regime = Regime::CoherentRes;
  // Coherent-family optimum.
  ProbeState coh_state;
  double coh_delta_bar = 0.0;
  double coh_nbar = 0.0;
  bool boundary_flag = false;
  /// "converged", or the name of the error raised for this cell.
  std::string status = "converged";

  friend bool operator==(const SweepCell&, const SweepCell&) = default;
};

struct SweepMetadata {
  std::string config_hash;
  std::string tool_version;
  std::string timestamp;  ///< UTC, ISO 8601

  friend bool operator==(const SweepMetadata&, const SweepMetadata&) = default;
};

struct SweepTable {
  GridSpec grid;
  /// Row-major: n_sat outer, T inner.
  std::vector<SweepCell> cells;
  SweepMetadata metadata;

  const SweepCell& at(std::size_t n_sat_index, std::size_t T_index) const;
  std::size_t flagged_cells() const;

  friend bool operator==(const SweepTable&, const SweepTable&) = default;
};

struct SweepOptions {
  OptimizerConfig optimizer;
  /// Workers over grid rows; <= 0 uses all cores.
  int threads = 0;
  /// Seed each cell with the optimum of the previous cell in traversal order.
  bool warm_start = true;
};

/// Runs quantum_advantage on every cell. Cell (i, j) is warm-started from
/// (i, j-1), or from (i-1, 0) at the start of a row, so column 0 runs first
/// and the rows then run independently. Per-cell failures are recorded in
/// the cell, never thrown.
SweepTable run_sweep(const GridSpec& grid, const SweepOptions& options = {});

/// Piecewise fit of log A against log n_sat: a straight growth segment
/// followed by a constant plateau.
struct ScalingReport {
  double T_used = 0.0;
  std::size_t points = 0;
  std::size_t growth_points = 0;
  double growth_slope = 0.0;
  double growth_intercept = 0.0;  ///< log A at n_sat = 1
  double growth_rms = 0.0;        ///< rms residual in log A
  double plateau = 0.0;           ///< geometric mean of A over the plateau
  double plateau_rms = 0.0;
  double breakpoint_n_sat = 0.0;  ///< first n_sat assigned to the plateau
};

/// Fits the column nearest fixed_T (in log T). Throws Error{InsufficientColumn}
/// unless that column has >= 8 points spanning >= 3 decades of n_sat.
ScalingReport scaling_analysis(const SweepTable& table, double fixed_T);

/// The same fit on explicit data; n_sat must be increasing.
ScalingReport scaling_fit(std::span<const double> n_sat,
                          std::span<const double> advantage);

enum class TableFormat { Csv, Json };

TableFormat parse_table_format(std::string_view text);

/// Exact CSV header of write_table.
inline constexpr std::string_view kCsvHeader =
    "n_sat,T,target,I_coh,I_sq,advantage,R,theta,r,psi,delta_bar,nbar,regime,"
    "boundary_flag";

void write_table(const SweepTable& table, TableFormat format, std::ostream& out);
/// Throws Error{IoError} when the file cannot be written.
void write_table(const SweepTable& table, TableFormat format,
                 const std::filesystem::path& destination);

SweepTable read_table_json(std::istream& in);
SweepTable read_table_json(const std::filesystem::path& source);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double value);

}  // namespace nuqs
