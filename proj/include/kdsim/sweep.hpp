#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kdsim/config.hpp"

namespace kdsim {

struct SweepRow {
  double dt = 0.0;
  double theta_q = 0.0;
  double visibility_G = 0.0;
  double p_closed = 0.0;
  double p_full = 0.0;
  double p_background = 0.0;
  double abs_err = 0.0;  // |p_closed - p_full|
  std::optional<double> p_grid;
  std::optional<double> grid_abs_err;  // |p_grid - p_full|
};

struct SweepTable {
  double delta_p = 0.0;
  std::vector<SweepRow> rows;
};

// One table per delta_p, rows in dt_list order regardless of `jobs`.
// Throws ConfigError when the config has no sweep block.
std::vector<SweepTable> run_sweep(const RunConfig& cfg, bool with_oracle, int jobs = 1);

// Columns dt_s,theta_q_rad,G,P_closed,P_full,P_background,abs_err[,P_grid,grid_abs_err]
std::string sweep_csv(const SweepTable& table);

}  // namespace kdsim
