#include "ahi/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "ahi/error.hpp"
#include "ahi/format.hpp"
#include "ahi/indices.hpp"
#include "ahi/random.hpp"

namespace ahi {
namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

enum class Mode { jhat, sweep, coverage };

struct Target {
  double eps;
  double true_value;
  bool skipped;
  std::string note;
};

std::size_t cell_index(const SimulationConfig& config, std::size_t spec_index,
                       std::size_t n_index) {
  return spec_index * config.n_grid.size() + n_index;
}

unsigned worker_count(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Runs body(unit) for unit in [0, units) on `workers` threads.
template <class Body>
void parallel_for(std::size_t units, unsigned workers, const Body& body) {
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(units, 1)));
  if (workers <= 1) {
    for (std::size_t u = 0; u < units; ++u) body(u);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      (void)w;
      for (;;) {
        const std::size_t u = next.fetch_add(1);
        if (u >= units || failed.load()) return;
        try {
          body(u);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<Target> targets_for(const DistributionSpec& spec, Mode mode,
                                const std::vector<double>& eps_grid) {
  if (mode != Mode::sweep) return {{2.0, population_index(spec), false, ""}};
  std::vector<Target> out;
  for (double eps : eps_grid) {
    try {
      out.push_back({eps, population_atkinson(spec, eps), false, ""});
    } catch (const IndexUndefinedError& e) {
      out.push_back({eps, kNaN, true, std::string("skipped: ") + e.what()});
    }
  }
  return out;
}

SimulationResult run(const SimulationConfig& config, Mode mode) {
  validate(config);
  const std::vector<double>& eps_grid =
      config.eps_grid.empty() ? kDefaultEpsGrid : config.eps_grid;
  if (mode == Mode::sweep) {
    for (double eps : eps_grid) {
      if (!std::isfinite(eps) || eps < 0.0) {
        throw ConfigError("eps values must be finite and >= 0, got " + format_number(eps));
      }
    }
  }
  if (mode == Mode::coverage) {
    for (std::size_t n : config.n_grid) {
      if (n < 2) throw ConfigError("coverage requires every n >= 2");
    }
  }

  std::vector<std::vector<Target>> targets;
  for (const auto& spec : config.specs) {
    try {
      targets.push_back(targets_for(spec, mode, eps_grid));
    } catch (const Error& e) {
      throw ConfigError("no population benchmark for " + spec.label() + ": " + e.what());
    }
  }

  const std::size_t n_cells = config.specs.size() * config.n_grid.size();
  const std::size_t reps = config.replications;
  std::size_t width = 0;
  for (const auto& t : targets) width = std::max(width, t.size());

  // values[(cell * reps + rep) * width + k]
  std::vector<double> values(n_cells * reps * width, kNaN);
  std::vector<unsigned char> covered(mode == Mode::coverage ? n_cells * reps : 0, 0);

  constexpr std::size_t kChunk = 64;
  const std::size_t chunks_per_cell = (reps + kChunk - 1) / kChunk;

  parallel_for(n_cells * chunks_per_cell, worker_count(config.workers), [&](std::size_t unit) {
    const std::size_t cell = unit / chunks_per_cell;
    const std::size_t spec_index = cell / config.n_grid.size();
    const std::size_t n_index = cell % config.n_grid.size();
    const auto& spec = config.specs[spec_index];
    const auto& cell_targets = targets[spec_index];
    const std::size_t n = config.n_grid[n_index];
    std::vector<double> buffer(n);
    const std::size_t first = (unit % chunks_per_cell) * kChunk;
    const std::size_t last = std::min(reps, first + kChunk);
    for (std::size_t rep = first; rep < last; ++rep) {
      Rng rng(derive_stream_seed(config.master_seed, cell, rep));
      draw_into(spec, rng, buffer);
      double* out = &values[(cell * reps + rep) * width];
      for (std::size_t k = 0; k < cell_targets.size(); ++k) {
        if (cell_targets[k].skipped) continue;
        out[k] = mode == Mode::sweep ? atkinson_kernel(buffer, cell_targets[k].eps)
                                     : jhat_kernel(buffer);
      }
      if (mode == Mode::coverage) {
        const IndexEstimate est = estimate_index(Sample(buffer), config.confidence_level);
        const double j = cell_targets[0].true_value;
        covered[cell * reps + rep] = est.ci_low <= j && j <= est.ci_high;
      }
    }
  });

  SimulationResult result;
  result.replications = reps;
  result.master_seed = config.master_seed;
  result.confidence_level = config.confidence_level;
  const double r = static_cast<double>(reps);
  for (std::size_t cell = 0; cell < n_cells; ++cell) {
    const std::size_t spec_index = cell / config.n_grid.size();
    const std::size_t n_index = cell % config.n_grid.size();
    const auto& cell_targets = targets[spec_index];
    for (std::size_t k = 0; k < cell_targets.size(); ++k) {
      CellResult row{.spec = config.specs[spec_index],
                     .n = config.n_grid[n_index],
                     .eps = cell_targets[k].eps,
                     .true_value = cell_targets[k].true_value,
                     .coverage = std::nullopt,
                     .note = {}};
      if (cell_targets[k].skipped) {
        row.skipped = true;
        row.bias = row.mse = row.variance = row.bias_se = kNaN;
        row.note = cell_targets[k].note;
        result.cells.push_back(std::move(row));
        continue;
      }
      double sum = 0.0, sum_sq = 0.0;
      for (std::size_t rep = 0; rep < reps; ++rep) {
        const double d = values[(cell * reps + rep) * width + k] - row.true_value;
        sum += d;
        sum_sq += d * d;
      }
      row.bias = sum / r;
      row.mse = sum_sq / r;
      double centred = 0.0;
      for (std::size_t rep = 0; rep < reps; ++rep) {
        const double d = values[(cell * reps + rep) * width + k] - row.true_value - row.bias;
        centred += d * d;
      }
      row.variance = centred / r;
      row.bias_se = reps > 1 ? std::sqrt(centred / (r - 1.0) / r) : kNaN;
      if (mode == Mode::coverage) {
        std::size_t hits = 0;
        for (std::size_t rep = 0; rep < reps; ++rep) hits += covered[cell * reps + rep];
        row.coverage = reps > 1 ? static_cast<double>(hits) / r : kNaN;
      }
      result.cells.push_back(std::move(row));
    }
  }
  return result;
}

DistributionSpec spec_from_json(const json& j) {
  if (!j.is_object() || !j.contains("dist")) {
    throw ConfigError("each spec needs a \"dist\" field (gig, ig or gamma)");
  }
  auto num = [&](const char* key) {
    if (!j.contains(key) || !j.at(key).is_number()) {
      throw ConfigError(std::string("spec field \"") + key + "\" missing or not a number");
    }
    return j.at(key).get<double>();
  };
  const std::string dist = j.at("dist").get<std::string>();
  try {
    if (dist == "ig") return DistributionSpec::inverse_gaussian(num("mu"), num("lambda"));
    if (dist == "gamma") {
      const double beta = j.contains("beta") ? num("beta") : 1.0;
      return DistributionSpec::gamma(num("alpha"), beta);
    }
    if (dist == "gig") return DistributionSpec::gig(num("p"), num("a"), num("b"));
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("unknown dist \"" + dist + "\" (expected gig, ig or gamma)");
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

json number_or_null(double v) {
  if (!std::isfinite(v)) return nullptr;
  return std::stod(format_number(v));
}

}  // namespace

void validate(const SimulationConfig& config) {
  if (config.specs.empty()) throw ConfigError("specs must be nonempty");
  if (config.n_grid.empty()) throw ConfigError("n_grid must be nonempty");
  for (std::size_t n : config.n_grid) {
    if (n == 0) throw ConfigError("every n in n_grid must be >= 1");
  }
  if (config.replications == 0) throw ConfigError("replications must be >= 1");
  if (!(config.confidence_level > 0.0 && config.confidence_level < 1.0)) {
    throw ConfigError("confidence_level must lie in (0, 1)");
  }
}

SimulationResult run_grid(const SimulationConfig& config) { return run(config, Mode::jhat); }

SimulationResult atkinson_sweep(const SimulationConfig& config) {
  return run(config, Mode::sweep);
}

SimulationResult ci_coverage(const SimulationConfig& config) {
  return run(config, Mode::coverage);
}

std::vector<double> replication_sample(const SimulationConfig& config, std::size_t spec_index,
                                       std::size_t n_index, std::size_t rep) {
  if (spec_index >= config.specs.size() || n_index >= config.n_grid.size()) {
    throw ConfigError("cell index out of range");
  }
  std::vector<double> out(config.n_grid[n_index]);
  Rng rng(derive_stream_seed(config.master_seed, cell_index(config, spec_index, n_index), rep));
  draw_into(config.specs[spec_index], rng, out);
  return out;
}

SimulationConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("simulation config must be a JSON object");
  static const char* const kKnown[] = {"specs", "n_grid", "replications", "eps_grid",
                                       "master_seed", "confidence_level", "workers"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(std::begin(kKnown), std::end(kKnown), key) == std::end(kKnown)) {
      throw ConfigError("unknown config field \"" + key + "\"");
    }
  }

  SimulationConfig config;
  try {
    if (!j.contains("specs") || !j["specs"].is_array()) {
      throw ConfigError("\"specs\" must be an array");
    }
    for (const auto& s : j["specs"]) config.specs.push_back(spec_from_json(s));
    if (!j.contains("n_grid") || !j["n_grid"].is_array()) {
      throw ConfigError("\"n_grid\" must be an array");
    }
    for (const auto& n : j["n_grid"]) config.n_grid.push_back(n.get<std::size_t>());
    if (j.contains("replications")) config.replications = j["replications"].get<std::size_t>();
    if (j.contains("eps_grid")) {
      for (const auto& e : j["eps_grid"]) config.eps_grid.push_back(e.get<double>());
    }
    if (j.contains("master_seed")) config.master_seed = j["master_seed"].get<std::uint64_t>();
    if (j.contains("confidence_level")) {
      config.confidence_level = j["confidence_level"].get<double>();
    }
    if (j.contains("workers")) config.workers = j["workers"].get<unsigned>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid config value: ") + e.what());
  }
  validate(config);
  return config;
}

std::string to_csv(const SimulationResult& result) {
  std::ostringstream out;
  out << "family,params,n,eps,true_value,bias,mse,variance,bias_se,coverage,note\n";
  for (const auto& c : result.cells) {
    out << c.spec.family_name() << ',' << c.spec.params_string() << ',' << c.n << ','
        << format_number(c.eps) << ',' << format_number(c.true_value) << ','
        << format_number(c.bias) << ',' << format_number(c.mse) << ','
        << format_number(c.variance) << ',' << format_number(c.bias_se) << ','
        << (c.coverage ? format_number(*c.coverage) : "") << ',' << csv_field(c.note) << '\n';
  }
  return out.str();
}

std::string to_json(const SimulationResult& result) {
  json cells = json::array();
  for (const auto& c : result.cells) {
    cells.push_back({
        {"family", c.spec.family_name()},
        {"params", c.spec.params_string()},
        {"n", c.n},
        {"eps", number_or_null(c.eps)},
        {"true_value", number_or_null(c.true_value)},
        {"bias", number_or_null(c.bias)},
        {"mse", number_or_null(c.mse)},
        {"variance", number_or_null(c.variance)},
        {"bias_se", number_or_null(c.bias_se)},
        {"coverage", c.coverage ? number_or_null(*c.coverage) : json(nullptr)},
        {"skipped", c.skipped},
        {"note", c.note},
    });
  }
  json doc = {
      {"replications", result.replications},
      {"master_seed", result.master_seed},
      {"confidence_level", number_or_null(result.confidence_level)},
      {"cells", cells},
  };
  return doc.dump(2) + "\n";
}

}  // namespace ahi
