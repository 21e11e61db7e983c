// Command-line front end: fit, compare, consistency.

#include "lbd/app.hpp"
#include "lbd/format.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

using lbd::ExitCode;

struct FitOptions
{
  std::string data;
  std::string preset;
  std::string synthetic;
  long n = 0;
  std::uint64_t seed = 1;
  long iters = 60000;
  long burnin = 10000;
  long thin = 10;
  long n_max = 0;
  double c = 1.0;
  double s = 0.5;
  std::string lambda_prior = "improper";
  std::string bandwidth = "auto";
  std::string weight = "length";
  double grid_max = 0.0;
  long grid_points = 512;
  std::string out;
};

void
add_fit_flags(CLI::App* cmd, FitOptions& o)
{
  cmd->add_option("--data", o.data, "CSV file with one column of positive observations");
  cmd->add_option("--preset", o.preset, "Synthetic preset: gamma1 | mixture2");
  cmd->add_option("--synthetic", o.synthetic,
                  "Synthetic biased density, e.g. 'gamma(2,0.5)' or "
                  "'0.25*gamma(2,1)+0.75*gamma(10,1)'");
  cmd->add_option("--n", o.n, "Synthetic sample size (default: preset size, or 50)");
  cmd->add_option("--seed", o.seed, "Random seed");
  cmd->add_option("--iters", o.iters, "Gibbs iterations");
  cmd->add_option("--burnin", o.burnin, "Burn-in iterations");
  cmd->add_option("--thin", o.thin, "Keep every thin-th iteration after burn-in");
  cmd->add_option("--n-max", o.n_max, "Truncation guard (0 = 10 n + 100)");
  cmd->add_option("--c", o.c, "DP concentration");
  cmd->add_option("--s", o.s, "Base-measure precision, atoms ~ N(0, 1/s)");
  cmd->add_option("--lambda-prior", o.lambda_prior,
                  "Precision prior: 'a,b' for Ga(a,b), 'improper' for 1/lambda, "
                  "'informative' for Ga(3,0.01)");
  cmd->add_option("--bandwidth", o.bandwidth, "KDE bandwidth h, or 'auto'");
  cmd->add_option("--weight", o.weight, "Weight function: length | power:<p> | table:x:w,...");
  cmd->add_option("--grid-max", o.grid_max, "Upper end of the grid (0 = 1.5 max(data))");
  cmd->add_option("--grid-points", o.grid_points, "Number of grid points");
}

lbd::ExperimentConfig
to_config(const FitOptions& o)
{
  lbd::ExperimentConfig cfg;
  const int sources = !o.data.empty() + !o.preset.empty() + !o.synthetic.empty();
  if (sources != 1) {
    throw lbd::ConfigError("give exactly one of --data, --preset, --synthetic");
  }
  if (!o.data.empty()) {
    cfg.data_path = o.data;
  } else if (!o.preset.empty()) {
    cfg.synthetic = lbd::preset(o.preset);
  } else {
    cfg.synthetic = lbd::SyntheticSpec{ "custom", lbd::parse_distribution(o.synthetic), 50 };
  }
  if (cfg.synthetic && o.n > 0) {
    cfg.synthetic->n = o.n;
  }

  auto& hp = cfg.hp;
  hp.seed = o.seed;
  hp.n_iter = o.iters;
  hp.burn_in = o.burnin;
  hp.thin = o.thin;
  hp.n_max = o.n_max;
  hp.c = o.c;
  hp.s = o.s;
  if (o.lambda_prior == "improper") {
    hp.a = hp.b = 0.0;
  } else if (o.lambda_prior == "informative") {
    hp.a = 3.0;
    hp.b = 0.01;
  } else {
    auto comma = o.lambda_prior.find(',');
    if (comma == std::string::npos ||
        !lbd::parse_double(std::string_view(o.lambda_prior).substr(0, comma), hp.a) ||
        !lbd::parse_double(std::string_view(o.lambda_prior).substr(comma + 1), hp.b)) {
      throw lbd::ConfigError("--lambda-prior expects a,b | improper | informative");
    }
  }

  if (o.bandwidth != "auto") {
    double h = 0.0;
    if (!lbd::parse_double(o.bandwidth, h)) {
      throw lbd::ConfigError("--bandwidth expects a number or 'auto'");
    }
    cfg.bandwidth = h;
  }
  cfg.weight = lbd::WeightFn::parse(o.weight);
  cfg.grid_max = o.grid_max;
  cfg.grid_points = o.grid_points;
  if (!o.out.empty()) {
    cfg.out_dir = o.out;
  }
  return cfg;
}

std::vector<long>
parse_ladder(const std::string& text)
{
  std::vector<long> out;
  std::size_t start = 0;
  while (start < text.size()) {
    auto comma = text.find(',', start);
    if (comma == std::string::npos) {
      comma = text.size();
    }
    try {
      out.push_back(std::stol(text.substr(start, comma - start)));
    } catch (const std::exception&) {
      throw lbd::ConfigError("--ladder expects comma-separated sample sizes");
    }
    start = comma + 1;
  }
  return out;
}

int
report_error(const std::exception& e)
{
  std::cerr << "error: " << e.what() << '\n';
  return static_cast<int>(lbd::exit_code_for(e));
}

} // namespace

int
main(int argc, char** argv)
{
  CLI::App app{ "Bayesian nonparametric density estimation under length bias" };
  app.require_subcommand(1);

  FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit the DP mixture and debias the predictive");
  add_fit_flags(fit_cmd, fit);
  fit_cmd->add_option("--out", fit.out, "Output directory for the run report");

  std::vector<std::string> compare_paths;
  std::string compare_out;
  std::string compare_json;
  auto* cmp_cmd = app.add_subcommand("compare", "L1 distances between run reports and truths");
  cmp_cmd->add_option("reports", compare_paths, "Report directories")->required();
  cmp_cmd->add_option("--out", compare_out, "Write the CSV table here instead of stdout");
  cmp_cmd->add_option("--json", compare_json, "Also write a JSON summary");

  FitOptions cons;
  cons.preset = "";
  std::string ladder = "50,200,800";
  int replicates = 5;
  std::string cons_out;
  auto* cons_cmd =
    app.add_subcommand("consistency", "Mean L1(f_n, f_0) across a ladder of sample sizes");
  add_fit_flags(cons_cmd, cons);
  cons_cmd->add_option("--ladder", ladder, "Comma-separated sample sizes");
  cons_cmd->add_option("--replicates", replicates, "Seeds per rung");
  cons_cmd->add_option("--out", cons_out, "Write the trend table here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitCode::config);
  }

  try {
    if (*fit_cmd) {
      const auto cfg = to_config(fit);
      const auto report = lbd::cmd_fit(cfg);
      if (cfg.out_dir) {
        lbd::write_report(report, *cfg.out_dir);
      }
      if (!report.valid) {
        std::cerr << "error: " << report.error << '\n';
        return static_cast<int>(report.status);
      }
      std::cout << "kept draws: " << report.predictive.size()
                << "  average clusters: " << lbd::format_double(report.average_clusters)
                << "  acceptance: " << lbd::format_double(report.acceptance_rate)
                << "  bandwidth: " << lbd::format_double(report.bandwidth.h) << " ("
                << lbd::to_string(report.bandwidth.method) << ")\n";
      return 0;
    }
    if (*cmp_cmd) {
      std::vector<std::filesystem::path> paths(compare_paths.begin(), compare_paths.end());
      const auto table = lbd::cmd_compare(paths);
      if (compare_out.empty()) {
        std::cout << table.to_csv();
      } else {
        std::ofstream(compare_out, std::ios::binary) << table.to_csv();
      }
      if (!compare_json.empty()) {
        std::ofstream(compare_json, std::ios::binary) << table.to_json().dump(2) << '\n';
      }
      return 0;
    }
    if (*cons_cmd) {
      if (cons.data.empty() && cons.preset.empty() && cons.synthetic.empty()) {
        cons.preset = "gamma1";
      }
      const auto cfg = to_config(cons);
      const auto table = lbd::cmd_consistency(cfg, parse_ladder(ladder), replicates);
      if (cons_out.empty()) {
        std::cout << table.to_csv();
      } else {
        std::ofstream(cons_out, std::ios::binary) << table.to_csv();
      }
      return 0;
    }
  } catch (const lbd::IoError& e) {
    return report_error(e);
  } catch (const std::invalid_argument& e) {
    return report_error(e);
  } catch (const std::domain_error& e) {
    return report_error(e);
  } catch (const lbd::NumericalError& e) {
    return report_error(e);
  }
  return static_cast<int>(ExitCode::config);
}
