#include "ahi/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ahi/dataio.hpp"
#include "ahi/distributions.hpp"
#include "ahi/error.hpp"
#include "ahi/exact_expectation.hpp"
#include "ahi/format.hpp"
#include "ahi/indices.hpp"
#include "ahi/montecarlo.hpp"

namespace ahi {
namespace {

using nlohmann::json;

constexpr int kUsageError = 2;
constexpr int kComputationError = 1;

// Errors caused by the values the user supplied rather than by a failed
// computation.
class UsageError : public Error {
 public:
  using Error::Error;
};

json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return std::stod(format_number(v));
}

std::string fmt(double v) { return format_number(v); }

// Label left-justified in a column of `width`, at least one space wide.
std::string pad(const std::string& label, std::size_t width) {
  return label + std::string(label.size() < width ? width - label.size() : 1, ' ');
}

struct DistFlags {
  std::string dist;
  double p = 0, a = 0, b = 0, mu = 0, lambda = 0, alpha = 0, beta = 1;
  CLI::Option* p_opt = nullptr;
  CLI::Option* a_opt = nullptr;
  CLI::Option* b_opt = nullptr;
  CLI::Option* mu_opt = nullptr;
  CLI::Option* lambda_opt = nullptr;
  CLI::Option* alpha_opt = nullptr;

  void add_to(CLI::App* sub) {
    sub->add_option("--dist", dist, "Distribution family")
        ->required()
        ->check(CLI::IsMember({"gig", "ig", "gamma"}));
    p_opt = sub->add_option("--p", p, "GIG index p");
    a_opt = sub->add_option("--a", a, "GIG parameter a > 0");
    b_opt = sub->add_option("--b", b, "GIG parameter b > 0");
    mu_opt = sub->add_option("--mu", mu, "IG mean mu > 0");
    lambda_opt = sub->add_option("--lambda", lambda, "IG shape lambda > 0");
    alpha_opt = sub->add_option("--alpha", alpha, "Gamma shape alpha > 0");
    sub->add_option("--beta", beta, "Gamma rate beta > 0")->capture_default_str();
  }

  DistributionSpec build() const {
    auto need = [](const CLI::Option* opt, const char* name, const std::string& d) {
      if (opt->count() == 0) throw UsageError("--dist " + d + " requires " + name);
    };
    try {
      if (dist == "ig") {
        need(mu_opt, "--mu", dist);
        need(lambda_opt, "--lambda", dist);
        return DistributionSpec::inverse_gaussian(mu, lambda);
      }
      if (dist == "gamma") {
        need(alpha_opt, "--alpha", dist);
        return DistributionSpec::gamma(alpha, beta);
      }
      need(p_opt, "--p", dist);
      need(a_opt, "--a", dist);
      need(b_opt, "--b", dist);
      return DistributionSpec::gig(p, a, b);
    } catch (const DomainError& e) {
      throw UsageError(e.what());
    }
  }
};

struct InputFlags {
  std::string input;
  std::vector<double> values;
  std::string column;
  double scale = 1.0;
  bool strict = false;

  void add_to(CLI::App* sub, bool allow_values) {
    auto* in = sub->add_option("--input", input, "CSV file with a header row")
                   ->check(CLI::ExistingFile);
    if (allow_values) {
      auto* vals = sub->add_option("--values", values, "Comma-separated observations")
                       ->delimiter(',');
      in->excludes(vals);
    }
    sub->add_option("--column", column, "Column name or 0-based index (default: last column)");
    sub->add_option("--scale", scale, "Multiply every observation by this factor")
        ->capture_default_str();
    sub->add_flag("--strict", strict, "Fail on nonpositive or non-numeric cells instead of dropping them");
  }

  Sample load(std::ostream& err) const {
    if (input.empty()) {
      if (values.empty()) throw UsageError("one of --input or --values is required");
      try {
        std::vector<double> scaled = values;
        if (!std::isfinite(scale) || !(scale > 0.0)) {
          throw DomainError("scale must be finite and > 0, got " + fmt(scale));
        }
        for (double& v : scaled) v *= scale;
        return Sample(std::move(scaled), "command line");
      } catch (const DomainError& e) {
        throw UsageError(e.what());
      }
    }
    LoadedSample loaded = load_observations(input, column, scale, !strict);
    for (const auto& w : loaded.report.warnings) err << "warning: " << w << '\n';
    return std::move(loaded.sample);
  }
};

struct SimFlags {
  std::string config_path;
  unsigned workers = 0;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replications;
  bool coverage = false;

  void add_to(CLI::App* sub, bool with_coverage) {
    sub->add_option("--config", config_path, "Simulation config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--workers", workers, "Worker threads (0 = all cores)")->capture_default_str();
    sub->add_option("--seed", seed, "Override master_seed from the config");
    sub->add_option("--replications", replications, "Override replications from the config");
    if (with_coverage) {
      sub->add_flag("--coverage", coverage, "Also report Wald interval coverage");
    }
  }

  SimulationConfig load() const {
    std::ifstream in(config_path);
    if (!in) throw UsageError("cannot open " + config_path);
    std::stringstream buf;
    buf << in.rdbuf();
    SimulationConfig config;
    try {
      config = config_from_json(buf.str());
    } catch (const ConfigError& e) {
      throw UsageError(config_path + ": " + e.what());
    }
    if (seed) config.master_seed = *seed;
    if (replications) config.replications = *replications;
    if (workers > 0) config.workers = workers;
    return config;
  }
};

// --- subcommand bodies -----------------------------------------------------

void run_population(const DistFlags& flags, const std::vector<double>& eps_list,
                    OutputFormat format, std::ostream& out) {
  const DistributionSpec spec = flags.build();
  double j;
  std::vector<std::pair<double, double>> atkinson;
  try {
    j = population_index(spec);
    for (double eps : eps_list) atkinson.emplace_back(eps, population_atkinson(spec, eps));
  } catch (const IndexUndefinedError& e) {
    throw UsageError(e.what());
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  std::optional<MomentSet> moments;
  try {
    moments = moment_set(spec);
  } catch (const MomentExistenceError&) {
  }

  switch (format) {
    case OutputFormat::csv:
      out << "family,params,quantity,eps,value\n";
      out << spec.family_name() << ',' << spec.params_string() << ",J,2," << fmt(j) << '\n';
      for (const auto& [eps, v] : atkinson) {
        out << spec.family_name() << ',' << spec.params_string() << ",atkinson," << fmt(eps)
            << ',' << fmt(v) << '\n';
      }
      if (moments) {
        out << spec.family_name() << ',' << spec.params_string() << ",sigma_j_sq,,"
            << fmt(asymptotic_variance(*moments)) << '\n';
        out << spec.family_name() << ',' << spec.params_string() << ",bias_bracket,,"
            << fmt(bias_bracket(*moments)) << '\n';
        out << spec.family_name() << ',' << spec.params_string() << ",cv_link,,"
            << fmt(cv_link(*moments)) << '\n';
      }
      break;
    case OutputFormat::json: {
      json doc = {{"family", spec.family_name()}, {"params", spec.params_string()}, {"J", num(j)}};
      json rows = json::array();
      for (const auto& [eps, v] : atkinson) rows.push_back({{"eps", num(eps)}, {"value", num(v)}});
      doc["atkinson"] = rows;
      if (moments) {
        doc["sigma_j_sq"] = num(asymptotic_variance(*moments));
        doc["bias_bracket"] = num(bias_bracket(*moments));
        doc["cv_link"] = num(cv_link(*moments));
      }
      out << doc.dump(2) << '\n';
      break;
    }
    case OutputFormat::human:
      out << spec.label() << '\n';
      out << "  " << pad("J", 15) << fmt(j) << '\n';
      for (const auto& [eps, v] : atkinson) {
        out << "  " << pad("A(" + fmt(eps) + ")", 15) << fmt(v) << '\n';
      }
      if (moments) {
        out << "  " << pad("sigma_J^2", 15) << fmt(asymptotic_variance(*moments)) << '\n';
        out << "  " << pad("bias bracket", 15) << fmt(bias_bracket(*moments)) << '\n';
        out << "  " << pad("CV^2/(1+CV^2)", 15) << fmt(cv_link(*moments)) << '\n';
      }
      break;
  }
}

void run_estimate(const InputFlags& input, const std::vector<double>& eps_list, double level,
                  bool bias_correct, OutputFormat format, std::ostream& out, std::ostream& err) {
  const Sample sample = input.load(err);
  IndexEstimate est;
  std::vector<std::pair<double, double>> atkinson;
  try {
    est = estimate_index(sample, level);
    for (double eps : eps_list) atkinson.emplace_back(eps, estimate_atkinson(sample, eps));
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  double sum = 0.0, sum_inv = 0.0;
  for (double v : sample.values()) {
    sum += v;
    sum_inv += 1.0 / v;
  }
  const double n = static_cast<double>(sample.n());
  const double mean = sum / n;
  const double mean_inv = sum_inv / n;

  switch (format) {
    case OutputFormat::csv:
      out << "quantity,eps,value\n";
      out << "n,," << sample.n() << '\n';
      out << "mean,," << fmt(mean) << '\n';
      out << "mean_reciprocal,," << fmt(mean_inv) << '\n';
      out << "j_hat,2," << fmt(est.j_hat) << '\n';
      out << "std_error,," << fmt(est.std_error) << '\n';
      out << "ci_low,," << fmt(est.ci_low) << '\n';
      out << "ci_high,," << fmt(est.ci_high) << '\n';
      out << "confidence_level,," << fmt(est.confidence_level) << '\n';
      out << "degenerate,," << (est.degenerate ? 1 : 0) << '\n';
      if (bias_correct) {
        out << "bias_correction,," << fmt(est.bias_correction) << '\n';
        out << "j_hat_corrected,," << fmt(est.corrected()) << '\n';
      }
      for (const auto& [eps, v] : atkinson) out << "atkinson," << fmt(eps) << ',' << fmt(v) << '\n';
      break;
    case OutputFormat::json: {
      json doc = {
          {"n", sample.n()},
          {"mean", num(mean)},
          {"mean_reciprocal", num(mean_inv)},
          {"j_hat", num(est.j_hat)},
          {"std_error", num(est.std_error)},
          {"ci_low", num(est.ci_low)},
          {"ci_high", num(est.ci_high)},
          {"confidence_level", num(est.confidence_level)},
          {"degenerate", est.degenerate},
      };
      if (bias_correct) {
        doc["bias_correction"] = num(est.bias_correction);
        doc["j_hat_corrected"] = num(est.corrected());
      }
      json rows = json::array();
      for (const auto& [eps, v] : atkinson) rows.push_back({{"eps", num(eps)}, {"value", num(v)}});
      doc["atkinson"] = rows;
      if (sample.source()) doc["source"] = *sample.source();
      out << doc.dump(2) << '\n';
      break;
    }
    case OutputFormat::human: {
      out << "n                 " << sample.n() << '\n';
      out << "mean              " << fmt(mean) << '\n';
      out << "mean reciprocal   " << fmt(mean_inv) << '\n';
      out << "J hat             " << fmt(est.j_hat) << (est.degenerate ? "  (degenerate sample)" : "")
          << '\n';
      out << "std error         " << fmt(est.std_error) << '\n';
      out << pad(fmt(100.0 * est.confidence_level) + "% CI", 18) << "[" << fmt(est.ci_low)
          << ", " << fmt(est.ci_high) << "]\n";
      if (bias_correct) {
        out << "bias correction   " << fmt(est.bias_correction) << '\n';
        out << "corrected J hat   " << fmt(est.corrected()) << '\n';
      }
      for (const auto& [eps, v] : atkinson) {
        out << pad("A(" + fmt(eps) + ")", 18) << fmt(v) << '\n';
      }
      break;
    }
  }
}

ExactRoute parse_route(const std::string& method) {
  if (method == "generic") return ExactRoute::generic;
  if (method == "family") return ExactRoute::family;
  return ExactRoute::automatic;
}

void run_exact(const DistFlags& flags, const std::vector<std::size_t>& n_list,
               const std::string& method, OutputFormat format, std::ostream& out) {
  const DistributionSpec spec = flags.build();
  const ExactRoute route = parse_route(method);
  struct Row {
    std::size_t n;
    ExactExpectation e;
    double j;
    std::optional<double> first_order;
  };
  std::vector<Row> rows;
  double j;
  try {
    j = population_index(spec);
  } catch (const IndexUndefinedError& e) {
    throw UsageError(e.what());
  }
  for (std::size_t n : n_list) {
    if (n == 0) throw UsageError("--n values must be >= 1");
    Row row{n, {}, j, std::nullopt};
    try {
      row.e = expected_jhat(spec, n, route);
    } catch (const UnsupportedCaseError& e) {
      throw UsageError(e.what());
    }
    try {
      row.first_order = j + first_order_bias(spec, n);
    } catch (const MomentExistenceError&) {
    }
    rows.push_back(row);
  }

  switch (format) {
    case OutputFormat::csv:
      out << "family,params,n,method,expected_jhat,error_estimate,J,exact_bias,first_order_expected\n";
      for (const auto& r : rows) {
        out << spec.family_name() << ',' << spec.params_string() << ',' << r.n << ','
            << method_name(r.e.method) << ',' << fmt(r.e.value) << ',' << fmt(r.e.error_estimate)
            << ',' << fmt(r.j) << ',' << fmt(r.e.value - r.j) << ','
            << (r.first_order ? fmt(*r.first_order) : "") << '\n';
      }
      break;
    case OutputFormat::json: {
      json doc = {{"family", spec.family_name()}, {"params", spec.params_string()}, {"J", num(j)}};
      json arr = json::array();
      for (const auto& r : rows) {
        arr.push_back({
            {"n", r.n},
            {"method", method_name(r.e.method)},
            {"expected_jhat", num(r.e.value)},
            {"error_estimate", num(r.e.error_estimate)},
            {"exact_bias", num(r.e.value - r.j)},
            {"first_order_expected", r.first_order ? num(*r.first_order) : json(nullptr)},
        });
      }
      doc["results"] = arr;
      out << doc.dump(2) << '\n';
      break;
    }
    case OutputFormat::human:
      out << spec.label() << "  J = " << fmt(j) << '\n';
      for (const auto& r : rows) {
        out << "  n=" << r.n << "  E[J hat]=" << fmt(r.e.value) << "  bias=" << fmt(r.e.value - r.j)
            << "  (" << method_name(r.e.method) << ")";
        if (r.first_order) out << "  first-order " << fmt(*r.first_order);
        out << '\n';
      }
      break;
  }
}

void write_simulation(const SimulationResult& result, OutputFormat format, std::ostream& out) {
  switch (format) {
    case OutputFormat::csv:
      out << to_csv(result);
      break;
    case OutputFormat::json:
      out << to_json(result);
      break;
    case OutputFormat::human: {
      char line[256];
      std::snprintf(line, sizeof line, "%-28s %5s %5s %12s %13s %12s %12s %9s\n", "spec", "n",
                    "eps", "true", "bias", "mse", "bias_se", "coverage");
      out << line;
      for (const auto& c : result.cells) {
        if (c.skipped) {
          std::snprintf(line, sizeof line, "%-28s %5zu %5s  %s\n", c.spec.label().c_str(), c.n,
                        fmt(c.eps).c_str(), c.note.c_str());
        } else {
          std::snprintf(line, sizeof line, "%-28s %5zu %5s %12.6g %13.6g %12.6g %12.6g %9s\n",
                        c.spec.label().c_str(), c.n, fmt(c.eps).c_str(), c.true_value, c.bias,
                        c.mse, c.bias_se, c.coverage ? fmt(*c.coverage).c_str() : "-");
        }
        out << line;
      }
      out << "replications " << result.replications << ", master seed " << result.master_seed
          << '\n';
      break;
    }
  }
}

void run_summary(const InputFlags& input, OutputFormat format, std::ostream& out,
                 std::ostream& err) {
  const Sample sample = input.load(err);
  const SummaryStats s = summarize(sample);
  switch (format) {
    case OutputFormat::csv:
      out << summary_to_csv(s);
      break;
    case OutputFormat::json:
      out << summary_to_json(s);
      break;
    case OutputFormat::human: {
      auto opt = [](const std::optional<double>& v) { return v ? fmt(*v) : std::string("undefined"); };
      out << "n                  " << s.n << '\n';
      out << "mean               " << fmt(s.mean) << '\n';
      out << "median             " << fmt(s.median) << '\n';
      out << "std dev            " << fmt(s.std_dev) << '\n';
      out << "skewness (G1)      " << opt(s.skewness_adjusted) << '\n';
      out << "skewness (g1)      " << opt(s.skewness_moment) << '\n';
      out << "min                " << fmt(s.min) << '\n';
      out << "max                " << fmt(s.max) << '\n';
      break;
    }
  }
}

OutputFormat parse_format(const std::string& name) {
  if (name == "csv") return OutputFormat::csv;
  if (name == "json") return OutputFormat::json;
  return OutputFormat::human;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Arithmetic-harmonic inequality index: population values, estimates, exact "
               "expectations and Monte Carlo studies.",
               "ahi"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string format_name = "human";
  if (const char* env = std::getenv("AHI_FORMAT")) {
    const std::string v = env;
    if (v == "csv" || v == "json" || v == "human") format_name = v;
  }
  app.add_option("--format", format_name, "Output format (default from AHI_FORMAT, else human)")
      ->check(CLI::IsMember({"csv", "json", "human"}));

  DistFlags pop_dist;
  std::vector<double> pop_eps;
  auto* population = app.add_subcommand("population", "Population J and Atkinson values");
  pop_dist.add_to(population);
  population->add_option("--eps", pop_eps, "Atkinson parameters, comma-separated")->delimiter(',');

  InputFlags est_input;
  std::vector<double> est_eps;
  double level = 0.95;
  bool bias_correct = false;
  auto* estimate = app.add_subcommand("estimate", "Plug-in estimates from a sample");
  est_input.add_to(estimate, true);
  estimate->add_option("--eps", est_eps, "Atkinson parameters, comma-separated")->delimiter(',');
  estimate->add_option("--level", level, "Confidence level of the Wald interval")
      ->capture_default_str();
  estimate->add_flag("--bias-correct", bias_correct, "Report the first-order bias correction");

  DistFlags exact_dist;
  std::vector<std::size_t> exact_n;
  std::string method = "auto";
  auto* exact = app.add_subcommand("exact", "Exact finite-sample E[J hat]");
  exact_dist.add_to(exact);
  exact->add_option("--n", exact_n, "Sample sizes, comma-separated")->required()->delimiter(',');
  exact->add_option("--method", method, "Integration route")
      ->check(CLI::IsMember({"auto", "generic", "family"}))
      ->capture_default_str();

  SimFlags sim_flags;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo bias/MSE grid for J hat");
  sim_flags.add_to(simulate, true);

  SimFlags sweep_flags;
  auto* sweep = app.add_subcommand("sweep", "Monte Carlo bias/MSE of Atkinson estimators");
  sweep_flags.add_to(sweep, false);

  InputFlags sum_input;
  auto* summary = app.add_subcommand("summary", "Descriptive statistics of a sample");
  sum_input.add_to(summary, true);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::CallForVersion& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsageError;
  }

  const OutputFormat format = parse_format(format_name);
  try {
    if (population->parsed()) {
      run_population(pop_dist, pop_eps, format, out);
    } else if (estimate->parsed()) {
      run_estimate(est_input, est_eps, level, bias_correct, format, out, err);
    } else if (exact->parsed()) {
      run_exact(exact_dist, exact_n, method, format, out);
    } else if (simulate->parsed()) {
      const SimulationConfig config = sim_flags.load();
      write_simulation(sim_flags.coverage ? ci_coverage(config) : run_grid(config), format, out);
    } else if (sweep->parsed()) {
      write_simulation(atkinson_sweep(sweep_flags.load()), format, out);
    } else if (summary->parsed()) {
      run_summary(sum_input, format, out, err);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kComputationError;
  }
  return 0;
}

}  // namespace ahi
