#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ahi/distributions.hpp"

namespace ahi {

struct SimulationConfig {
  std::vector<DistributionSpec> specs;
  std::vector<std::size_t> n_grid;
  std::size_t replications = 4000;
  // Atkinson parameters for atkinson_sweep; empty means the default grid.
  std::vector<double> eps_grid;
  std::uint64_t master_seed = 20250101;
  double confidence_level = 0.95;
  // Worker threads; 0 uses the hardware concurrency. Results do not depend
  // on this value.
  unsigned workers = 0;
};

inline const std::vector<double> kDefaultEpsGrid = {0.5, 1.0, 1.5, 2.0, 3.0, 5.0};

struct CellResult {
  DistributionSpec spec;
  std::size_t n = 0;
  double eps = 2.0;
  double true_value = 0.0;
  double bias = 0.0;      // mean of (estimate - true_value)
  double mse = 0.0;       // mean of (estimate - true_value)^2
  double variance = 0.0;  // divisor R, so mse == bias^2 + variance
  double bias_se = 0.0;   // sqrt(s^2 / R) with the 1/(R-1) sample variance; nan for R = 1
  std::optional<double> coverage;  // ci_coverage only; nan for R = 1
  bool skipped = false;
  std::string note;
};

struct SimulationResult {
  std::size_t replications = 0;
  std::uint64_t master_seed = 0;
  double confidence_level = 0.95;
  std::vector<CellResult> cells;
};

/// Throws ConfigError for empty grids, R = 0, or an invalid level.
void validate(const SimulationConfig& config);

/// Bias and MSE of j_hat for every (spec, n), in spec-major order.
SimulationResult run_grid(const SimulationConfig& config);

/// Bias and MSE of the plug-in Atkinson index for every (spec, n, eps),
/// using the same samples for all eps. Pairs without a finite population
/// A(eps) are returned with skipped = true and a note.
SimulationResult atkinson_sweep(const SimulationConfig& config);

/// run_grid plus the fraction of Wald intervals that contain J.
SimulationResult ci_coverage(const SimulationConfig& config);

/// Sample used for replication `rep` of the cell (spec_index, n_index).
/// Identical across run_grid, atkinson_sweep and ci_coverage.
std::vector<double> replication_sample(const SimulationConfig& config, std::size_t spec_index,
                                       std::size_t n_index, std::size_t rep);

SimulationConfig config_from_json(const std::string& text);

/// One row per cell: family,params,n,eps,true_value,bias,mse,variance,
/// bias_se,coverage,note.
std::string to_csv(const SimulationResult& result);
std::string to_json(const SimulationResult& result);

}  // namespace ahi
