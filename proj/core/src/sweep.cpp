#include "nuqs/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "nuqs/serialize.hpp"
#include "nuqs/version.hpp"
#include "parallel.hpp"

namespace nuqs {

namespace {

void validate_axis(const AxisSpec& axis, const char* name) {
  if (!std::isfinite(axis.min) || !std::isfinite(axis.max) ||
      !(axis.min > 0.0) || !(axis.max > axis.min) || axis.points < 2) {
    std::ostringstream msg;
    msg << name << " axis needs 0 < min < max and at least 2 points (got min="
        << axis.min << ", max=" << axis.max << ", points=" << axis.points << ")";
    throw Error(ErrorCode::InvalidGrid, msg.str());
  }
}

std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

SweepCell fill_cell(double n_sat, double T, Target target,
                    const AdvantageResult& a) {
  SweepCell c;
  c.n_sat = n_sat;
  c.T = T;
  c.target = target;
  c.i_sq = a.i_sq;
  c.i_coh = a.i_coh;
  c.advantage = a.advantage;
  c.state = a.sq_result.state;
  c.delta_bar = a.sq_result.delta_bar;
  c.nbar = a.sq_result.nbar;
  c.regime = a.sq_result.regime;
  c.coh_state = a.coh_result.state;
  c.coh_delta_bar = a.coh_result.delta_bar;
  c.coh_nbar = a.coh_result.nbar;
  c.boundary_flag = a.sq_result.boundary_flag || a.coh_result.boundary_flag;
  return c;
}

SweepCell evaluate_cell(double n_sat, double T, Target target,
                        const OptimizerConfig& base, const SweepCell* previous) {
  OptimizerConfig config = base;
  if (previous != nullptr && previous->i_coh > 0.0) {
    config.extra_seeds.push_back({previous->state, previous->delta_bar});
    config.extra_seeds.push_back({previous->coh_state, previous->coh_delta_bar});
  }
  const Medium medium{.T = T, .n_sat = n_sat};
  try {
    return fill_cell(n_sat, T, target, quantum_advantage(medium, target, config));
  } catch (const AdvantageError& e) {
    SweepCell c = fill_cell(n_sat, T, target, e.payload());
    c.boundary_flag = c.boundary_flag || e.code() == ErrorCode::BoundaryOptimum;
    c.status = std::string(to_string(e.code()));
    return c;
  } catch (const Error& e) {
    SweepCell c;
    c.n_sat = n_sat;
    c.T = T;
    c.target = target;
    c.status = std::string(to_string(e.code()));
    return c;
  }
}

nlohmann::json sweep_config_json(const GridSpec& grid,
                                 const SweepOptions& options) {
  return {{"grid", grid},
          {"optimizer", options.optimizer},
          {"warm_start", options.warm_start}};
}

}  // namespace

void validate_grid(const GridSpec& grid) {
  validate_axis(grid.n_sat, "n_sat");
  validate_axis(grid.T, "T");
}

std::vector<double> axis_values(const AxisSpec& axis) {
  validate_axis(axis, "axis");
  const auto n = static_cast<std::size_t>(axis.points);
  std::vector<double> out(n);
  const double lo = std::log(axis.min);
  const double step = (std::log(axis.max) - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::exp(lo + step * static_cast<double>(i));
  }
  out.front() = axis.min;
  out.back() = axis.max;
  return out;
}

const SweepCell& SweepTable::at(std::size_t n_sat_index,
                                std::size_t T_index) const {
  const auto cols = static_cast<std::size_t>(grid.T.points);
  return cells.at(n_sat_index * cols + T_index);
}

std::size_t SweepTable::flagged_cells() const {
  return static_cast<std::size_t>(
      std::count_if(cells.begin(), cells.end(), [](const SweepCell& c) {
        return c.boundary_flag || c.status != "converged";
      }));
}

SweepTable run_sweep(const GridSpec& grid, const SweepOptions& options) {
  validate_grid(grid);
  const std::vector<double> n_sat = axis_values(grid.n_sat);
  const std::vector<double> T = axis_values(grid.T);
  const std::size_t rows = n_sat.size();
  const std::size_t cols = T.size();

  SweepTable table;
  table.grid = grid;
  table.cells.resize(rows * cols);

  // Each cell's optimizer runs single-threaded; parallelism is over rows.
  OptimizerConfig base = options.optimizer;
  base.threads = 1;
  const bool warm = options.warm_start;

  for (std::size_t i = 0; i < rows; ++i) {
    const SweepCell* prev = (warm && i > 0) ? &table.cells[(i - 1) * cols] : nullptr;
    table.cells[i * cols] = evaluate_cell(n_sat[i], T[0], grid.target, base, prev);
  }

  const int threads =
      options.threads > 0 ? options.threads : detail::default_thread_count();
  detail::parallel_for(rows, threads, [&](std::size_t i) {
    for (std::size_t j = 1; j < cols; ++j) {
      const SweepCell* prev = warm ? &table.cells[i * cols + j - 1] : nullptr;
      table.cells[i * cols + j] =
          evaluate_cell(n_sat[i], T[j], grid.target, base, prev);
    }
  });

  table.metadata.config_hash = content_hash(sweep_config_json(grid, options));
  table.metadata.tool_version = std::string(kVersion);
  table.metadata.timestamp = utc_timestamp();
  return table;
}

// ---- scaling --------------------------------------------------------------

namespace {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double sse = 0.0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (f.intercept + f.slope * x[i]);
    f.sse += e * e;
  }
  return f;
}

struct LevelFit {
  double level = 0.0;
  double sse = 0.0;
};

LevelFit fit_level(std::span<const double> y) {
  LevelFit f;
  for (double v : y) f.level += v;
  f.level /= static_cast<double>(y.size());
  for (double v : y) f.sse += (v - f.level) * (v - f.level);
  return f;
}

}  // namespace

ScalingReport scaling_fit(std::span<const double> n_sat,
                          std::span<const double> advantage) {
  if (n_sat.size() != advantage.size() || n_sat.size() < 4) {
    throw Error(ErrorCode::InsufficientColumn,
                "scaling fit needs at least 4 matched (n_sat, A) points");
  }
  std::vector<double> x(n_sat.size()), y(n_sat.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(n_sat[i] > 0.0) || !(advantage[i] > 0.0) ||
        (i > 0 && !(n_sat[i] > n_sat[i - 1]))) {
      throw Error(ErrorCode::InsufficientColumn,
                  "scaling fit needs increasing positive n_sat and positive A");
    }
    x[i] = std::log(n_sat[i]);
    y[i] = std::log(advantage[i]);
  }

  const std::size_t n = x.size();
  std::size_t best_split = 0;
  double best_sse = std::numeric_limits<double>::infinity();
  LineFit best_growth;
  LevelFit best_plateau;
  for (std::size_t k = 2; k + 2 <= n; ++k) {
    const LineFit g = fit_line(std::span(x).first(k), std::span(y).first(k));
    const LevelFit p = fit_level(std::span(y).subspan(k));
    if (g.sse + p.sse < best_sse) {
      best_sse = g.sse + p.sse;
      best_split = k;
      best_growth = g;
      best_plateau = p;
    }
  }

  ScalingReport r;
  r.points = n;
  r.growth_points = best_split;
  r.growth_slope = best_growth.slope;
  r.growth_intercept = best_growth.intercept;
  r.growth_rms = std::sqrt(best_growth.sse / static_cast<double>(best_split));
  r.plateau = std::exp(best_plateau.level);
  r.plateau_rms =
      std::sqrt(best_plateau.sse / static_cast<double>(n - best_split));
  r.breakpoint_n_sat = n_sat[best_split];
  return r;
}

ScalingReport scaling_analysis(const SweepTable& table, double fixed_T) {
  if (!(fixed_T > 0.0) || table.cells.empty()) {
    throw Error(ErrorCode::InsufficientColumn, "empty table or fixed_T <= 0");
  }
  const auto rows = static_cast<std::size_t>(table.grid.n_sat.points);
  const auto cols = static_cast<std::size_t>(table.grid.T.points);
  if (table.cells.size() != rows * cols) {
    throw Error(ErrorCode::InsufficientColumn,
                "table cell count does not match its grid");
  }

  std::size_t column = 0;
  double distance = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < cols; ++j) {
    const double d = std::abs(std::log(table.at(0, j).T / fixed_T));
    if (d < distance) {
      distance = d;
      column = j;
    }
  }

  std::vector<double> n_sat, advantage;
  for (std::size_t i = 0; i < rows; ++i) {
    const SweepCell& c = table.at(i, column);
    if (c.advantage > 0.0 && std::isfinite(c.advantage)) {
      n_sat.push_back(c.n_sat);
      advantage.push_back(c.advantage);
    }
  }
  if (n_sat.size() < 8 || n_sat.back() / n_sat.front() < 1e3 * (1.0 - 1e-12)) {
    std::ostringstream msg;
    msg << "column T=" << table.at(0, column).T << " has " << n_sat.size()
        << " usable points; need >= 8 spanning >= 3 decades of n_sat";
    throw Error(ErrorCode::InsufficientColumn, msg.str());
  }

  ScalingReport r = scaling_fit(n_sat, advantage);
  r.T_used = table.at(0, column).T;
  return r;
}

// ---- output ---------------------------------------------------------------

TableFormat parse_table_format(std::string_view text) {
  if (text == "csv") return TableFormat::Csv;
  if (text == "json") return TableFormat::Json;
  throw Error(ErrorCode::InvalidConfig,
              "format must be 'csv' or 'json', got '" + std::string(text) + "'");
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

void write_table(const SweepTable& table, TableFormat format,
                 std::ostream& out) {
  if (format == TableFormat::Json) {
    out << nlohmann::json(table).dump(2) << '\n';
    return;
  }
  out << kCsvHeader << '\n';
  for (const SweepCell& c : table.cells) {
    out << format_double(c.n_sat) << ',' << format_double(c.T) << ','
        << to_string(c.target) << ',' << format_double(c.i_coh) << ','
        << format_double(c.i_sq) << ',' << format_double(c.advantage) << ','
        << format_double(c.state.R) << ',' << format_double(c.state.theta)
        << ',' << format_double(c.state.r) << ','
        << format_double(c.state.psi) << ',' << format_double(c.delta_bar)
        << ',' << format_double(c.nbar) << ',' << to_string(c.regime) << ','
        << (c.boundary_flag ? 1 : 0) << '\n';
  }
}

void write_table(const SweepTable& table, TableFormat format,
                 const std::filesystem::path& destination) {
  std::ofstream out(destination);
  if (!out) {
    throw Error(ErrorCode::IoError,
                "cannot open '" + destination.string() + "' for writing");
  }
  write_table(table, format, out);
  out.flush();
  if (!out) {
    throw Error(ErrorCode::IoError, "write to '" + destination.string() + "' failed");
  }
}

SweepTable read_table_json(std::istream& in) {
  try {
    return nlohmann::json::parse(in).get<SweepTable>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::IoError, std::string("malformed sweep table: ") + e.what());
  }
}

SweepTable read_table_json(const std::filesystem::path& source) {
  std::ifstream in(source);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot open '" + source.string() + "'");
  }
  return read_table_json(in);
}

}  // namespace nuqs
