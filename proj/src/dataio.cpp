#include "ahi/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ahi/error.hpp"
#include "ahi/format.hpp"

namespace ahi {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_number(const std::string& s) {
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (begin != end && *begin == '+') ++begin;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

std::optional<std::size_t> parse_index(const std::string& s) {
  if (s.empty()) return std::nullopt;
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

nlohmann::json number_or_null(const std::optional<double>& v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return std::stod(format_number(*v));
}

}  // namespace

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  std::size_t i = 0;
  if (text.compare(0, 3, "\xEF\xBB\xBF") == 0) i = 3;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n') {
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      any = false;
    } else if (c != '\r') {
      field += c;
      any = true;
    }
  }
  if (quoted) throw DataError("unterminated quoted field in CSV input");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

LoadedSample load_observations(const std::string& path, const std::string& column, double scale,
                               bool drop_invalid) {
  if (!std::isfinite(scale) || !(scale > 0.0)) {
    throw DomainError("scale must be finite and > 0, got " + format_number(scale));
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const auto rows = parse_csv(buf.str());
  if (rows.empty()) throw DataError(path + ": file is empty");

  const auto& header = rows.front();
  std::optional<std::size_t> col;
  if (column.empty()) col = header.size() - 1;
  for (std::size_t k = 0; !col && k < header.size(); ++k) {
    if (trim(header[k]) == column) {
      col = k;
    }
  }
  if (!col) {
    col = parse_index(column);
    if (!col || *col >= header.size()) {
      throw DataError(path + ": no column named \"" + column + "\"");
    }
  }

  LoadReport report;
  std::vector<double> values;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    ++report.rows;
    const std::string where = path + " line " + std::to_string(r + 1);
    const std::string cell = *col < rows[r].size() ? trim(rows[r][*col]) : "";
    if (cell.empty()) {
      report.warnings.push_back(where + ": empty cell skipped");
      ++report.dropped;
      continue;
    }
    const auto v = parse_number(cell);
    std::string problem;
    if (!v) {
      problem = "non-numeric value \"" + cell + "\"";
    } else if (!std::isfinite(*v)) {
      problem = "non-finite value " + cell;
    } else if (!(*v > 0.0)) {
      problem = "nonpositive value " + cell;
    }
    if (problem.empty()) {
      values.push_back(*v * scale);
      continue;
    }
    if (!drop_invalid) throw DataError(where + ": " + problem);
    report.warnings.push_back(where + ": " + problem + " dropped");
    ++report.dropped;
  }
  if (values.empty()) throw DataError(path + ": no valid observations in column \"" + column + "\"");
  return {Sample(std::move(values), path), std::move(report)};
}

SummaryStats summarize(const Sample& sample) {
  const auto x = sample.values();
  SummaryStats s;
  s.n = x.size();
  const double n = static_cast<double>(s.n);

  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  s.min = sorted.front();
  s.max = sorted.back();
  const std::size_t mid = s.n / 2;
  s.median = s.n % 2 == 1 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);

  double sum = 0.0;
  for (double v : x) sum += v;
  s.mean = sum / n;
  double m2 = 0.0, m3 = 0.0;
  for (double v : x) {
    const double d = v - s.mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  s.std_dev = s.n > 1 ? std::sqrt(m2 / (n - 1.0)) : 0.0;
  m2 /= n;
  m3 /= n;
  if (s.n >= 3 && m2 > 0.0) {
    const double g1 = m3 / std::pow(m2, 1.5);
    s.skewness_moment = g1;
    s.skewness_adjusted = g1 * std::sqrt(n * (n - 1.0)) / (n - 2.0);
  }
  return s;
}

std::string summary_to_json(const SummaryStats& s) {
  const nlohmann::json doc = {
      {"n", s.n},
      {"mean", number_or_null(s.mean)},
      {"median", number_or_null(s.median)},
      {"std_dev", number_or_null(s.std_dev)},
      {"skewness", number_or_null(s.skewness_adjusted)},
      {"skewness_moment", number_or_null(s.skewness_moment)},
      {"skewness_convention", "adjusted Fisher-Pearson G1"},
      {"min", number_or_null(s.min)},
      {"max", number_or_null(s.max)},
  };
  return doc.dump(2) + "\n";
}

std::string summary_to_csv(const SummaryStats& s) {
  auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
  std::ostringstream out;
  out << "n,mean,median,std_dev,skewness,skewness_moment,min,max\n"
      << s.n << ',' << format_number(s.mean) << ',' << format_number(s.median) << ','
      << format_number(s.std_dev) << ',' << opt(s.skewness_adjusted) << ','
      << opt(s.skewness_moment) << ',' << format_number(s.min) << ',' << format_number(s.max)
      << '\n';
  return out.str();
}

}  // namespace ahi
