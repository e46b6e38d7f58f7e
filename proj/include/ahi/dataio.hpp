#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ahi/distributions.hpp"

namespace ahi {

struct LoadReport {
  std::size_t rows = 0;     // data rows in the file
  std::size_t dropped = 0;  // rows removed by filtering
  std::vector<std::string> warnings;
};

struct LoadedSample {
  Sample sample;
  LoadReport report;
};

/// Reads one numeric column of a headed CSV file. `column` is a header name
/// or, failing that, a 0-based column index; empty selects the last column.
/// Empty cells are skipped with a warning. Nonpositive, non-finite or
/// non-numeric cells are dropped when drop_invalid is set and raise
/// DataError otherwise. Values are multiplied by `scale`.
LoadedSample load_observations(const std::string& path, const std::string& column,
                               double scale = 1.0, bool drop_invalid = true);

/// Parses CSV text into rows of fields (RFC 4180 quoting).
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

struct SummaryStats {
  std::size_t n = 0;
  double mean = 0.0;
  double median = 0.0;
  double std_dev = 0.0;  // divisor n - 1; 0 when n == 1
  // m3 / m2^{3/2} with population central moments.
  std::optional<double> skewness_moment;
  // Adjusted Fisher-Pearson G1 = g1 sqrt(n (n - 1)) / (n - 2).
  std::optional<double> skewness_adjusted;
  double min = 0.0;
  double max = 0.0;
};

/// Skewness is empty for n < 3 or zero variance.
SummaryStats summarize(const Sample& sample);

std::string summary_to_json(const SummaryStats& s);
std::string summary_to_csv(const SummaryStats& s);

}  // namespace ahi
