#include "lbd/app.hpp"
#include "lbd/format.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace lbd {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kDataStream = 1;
constexpr std::uint64_t kChainStream = 2;
constexpr std::uint64_t kDebiasStream = 3;

std::string
trim_copy(std::string s)
{
  auto not_space = [](unsigned char ch) { return !std::isspace(ch); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::ofstream
open_out(const fs::path& path)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  return out;
}

std::string
lambda_prior_text(const Hyperparams& hp)
{
  if (hp.improper_lambda_prior()) {
    return "improper";
  }
  return format_double(hp.a) + "," + format_double(hp.b);
}

DensityEstimate
on_grid(const Eigen::VectorXd& grid, Eigen::VectorXd values)
{
  return DensityEstimate{ grid, std::move(values), false };
}

// Mass of a truth density outside the grid, from its grid integral.
double
tail_mass(const DensityEstimate& truth)
{
  return std::abs(1.0 - trapezoid(truth.grid, truth.values));
}

} // namespace

ExitCode
exit_code_for(const std::exception& e)
{
  if (dynamic_cast<const DataError*>(&e) || dynamic_cast<const DomainError*>(&e)) {
    return ExitCode::data;
  }
  if (dynamic_cast<const NumericalError*>(&e)) {
    return ExitCode::numerical;
  }
  return ExitCode::config;
}

Dataset
load_csv(const fs::path& path)
{
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot read data file " + path.string());
  }
  std::vector<double> values;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string cell = trim_copy(line);
    if (cell.empty()) {
      continue;
    }
    if (cell.find(',') != std::string::npos) {
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": expected a single column");
    }
    double v = 0.0;
    if (!parse_double(cell, v)) {
      if (line_no == 1) {
        continue; // header
      }
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": '" + cell +
                      "' is not a number");
    }
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": value " + cell +
                      " is not positive");
    }
    values.push_back(v);
  }
  if (values.empty()) {
    throw DataError(path.string() + ": no observations");
  }
  return Dataset::from(values);
}

void
write_column_csv(const fs::path& path, const std::vector<double>& values)
{
  auto out = open_out(path);
  out << "value\n";
  for (double v : values) {
    out << format_double(v) << '\n';
  }
}

void
write_density_csv(const fs::path& path, const DensityEstimate& est)
{
  auto out = open_out(path);
  out << "y,density\n";
  for (Eigen::Index i = 0; i < est.grid.size(); ++i) {
    out << format_double(est.grid(i)) << ',' << format_double(est.values(i)) << '\n';
  }
}

DensityEstimate
read_density_csv(const fs::path& path)
{
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot read density file " + path.string());
  }
  std::vector<double> xs;
  std::vector<double> ys;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 || trim_copy(line).empty()) {
      continue;
    }
    auto comma = line.find(',');
    double x = 0.0;
    double y = 0.0;
    if (comma == std::string::npos ||
        !parse_double(std::string_view(line).substr(0, comma), x) ||
        !parse_double(std::string_view(line).substr(comma + 1), y)) {
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": malformed row");
    }
    xs.push_back(x);
    ys.push_back(y);
  }
  DensityEstimate est;
  est.grid = Eigen::Map<Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
  est.values = Eigen::Map<Eigen::VectorXd>(ys.data(), static_cast<Eigen::Index>(ys.size()));
  return est;
}

SyntheticSpec
preset(const std::string& name)
{
  if (name == "gamma1") {
    return SyntheticSpec{ name, GammaParams{ 2.0, 0.5 }, 50 };
  }
  if (name == "mixture2") {
    return SyntheticSpec{
      name,
      MixtureParams{ { 0.25, 0.75 }, { GammaParams{ 2.0, 1.0 }, GammaParams{ 10.0, 1.0 } } },
      70
    };
  }
  throw ConfigError("unknown preset '" + name + "' (expected gamma1 or mixture2)");
}

Dataset
gen_synthetic(const Distribution& g, long n, std::uint64_t seed)
{
  validate(g);
  if (n < 1) {
    throw ConfigError("synthetic sample size must be positive");
  }
  Rng rng(seed, kDataStream);
  std::vector<double> values(static_cast<std::size_t>(n));
  for (auto& v : values) {
    v = sample(g, rng);
  }
  try {
    return Dataset::from(values);
  } catch (const DataError&) {
    throw ConfigError("synthetic distribution " + to_string(g) +
                      " produced nonpositive draws; length-biased data must be positive");
  }
}

void
validate(const ExperimentConfig& config)
{
  if (config.data_path.has_value() == config.synthetic.has_value()) {
    throw ConfigError("exactly one data source (CSV path or synthetic) is required");
  }
  validate(config.hp);
  if (config.grid_points < 2) {
    throw ConfigError("grid needs at least 2 points");
  }
  if (config.grid_max < 0.0 || !std::isfinite(config.grid_max)) {
    throw ConfigError("grid maximum must be positive (or 0 for automatic)");
  }
  if (config.bandwidth && !(*config.bandwidth > 0.0)) {
    throw ConfigError("bandwidth must be positive");
  }
  if (config.synthetic) {
    validate(config.synthetic->g);
    if (config.synthetic->n < 1) {
      throw ConfigError("synthetic sample size must be positive");
    }
  }
}

std::string
config_echo(const ExperimentConfig& config)
{
  std::ostringstream out;
  if (config.data_path) {
    out << "source = csv\n";
    out << "data = " << config.data_path->string() << '\n';
  } else if (config.synthetic) {
    out << "source = synthetic\n";
    out << "preset = " << config.synthetic->name << '\n';
    out << "synthetic = " << to_string(config.synthetic->g) << '\n';
    out << "n = " << config.synthetic->n << '\n';
  }
  const auto& hp = config.hp;
  out << "seed = " << hp.seed << '\n';
  out << "iters = " << hp.n_iter << '\n';
  out << "burnin = " << hp.burn_in << '\n';
  out << "thin = " << hp.thin << '\n';
  out << "c = " << format_double(hp.c) << '\n';
  out << "s = " << format_double(hp.s) << '\n';
  out << "lambda_prior = " << lambda_prior_text(hp) << '\n';
  out << "n_max = " << hp.n_max << '\n';
  out << "weight = " << config.weight.describe() << '\n';
  out << "bandwidth = "
      << (config.bandwidth ? format_double(*config.bandwidth) : std::string("auto")) << '\n';
  out << "grid_max = "
      << (config.grid_max > 0 ? format_double(config.grid_max) : std::string("auto")) << '\n';
  out << "grid_points = " << config.grid_points << '\n';
  return out.str();
}

RunReport
cmd_fit(const ExperimentConfig& config)
{
  RunReport report;
  try {
    validate(config);
    report.config = config_echo(config);

    const Dataset data = config.data_path
                           ? load_csv(*config.data_path)
                           : gen_synthetic(config.synthetic->g, config.synthetic->n,
                                           config.seed());
    report.data.assign(data.y.data(), data.y.data() + data.y.size());

    const double top = config.grid_max > 0 ? config.grid_max : 1.5 * data.y.maxCoeff();
    const Eigen::VectorXd grid = make_grid(0.0, top, config.grid_points);

    const bool exact = config.weight.power().has_value();
    Eigen::VectorXd debiased_acc = Eigen::VectorXd::Zero(grid.size());
    long kept = 0;

    Rng chain_rng(config.seed(), kChainStream);
    Rng debias_rng(config.seed(), kDebiasStream);
    DebiasChain chain(data.y(0));

    ChainHooks hooks;
    hooks.on_kept = [&](const ChainState& state, double draw) {
      debias_step(chain, draw, config.weight, debias_rng);
      report.debiased.push_back(chain.x_current);
      report.trace.acceptance_running.push_back(chain.acceptance_rate());
      if (exact) {
        debiased_acc += exact_debias_density(state, config.hp, grid, config.weight);
      }
      ++kept;
    };

    ChainReport chain_report = run_chain(data, config.hp, chain_rng, hooks, grid);
    report.iterations_run = chain_report.iterations_run;
    report.predictive = std::move(chain_report.predictive);
    report.predictive_density = std::move(chain_report.predictive_density);
    report.trace.cluster_counts = std::move(chain_report.cluster_counts);
    if (exact && kept > 0) {
      report.debiased_density = on_grid(grid, debiased_acc / static_cast<double>(kept));
    }
    if (!chain_report.lambda_trace.empty()) {
      double s = 0.0;
      for (double l : chain_report.lambda_trace) {
        s += l;
      }
      report.lambda_mean = s / static_cast<double>(chain_report.lambda_trace.size());
    }

    report.bandwidth = config.bandwidth
                         ? Bandwidth{ *config.bandwidth, BandwidthMethod::manual }
                         : select_bandwidth(data.y);
    report.classical = classical_kde(data.y, report.bandwidth, grid);
    report.jones = jones_kde(data.y, report.bandwidth, grid);

    if (config.synthetic) {
      report.truth_g = on_grid(grid, pdf_eval(config.synthetic->g, grid));
      try {
        report.truth_f =
          on_grid(grid, pdf_eval(debiased_distribution(config.synthetic->g, config.weight), grid));
      } catch (const ConfigError&) {
        // no closed-form f for this (g, w); leave the truth out
      }
    }

    if (!report.predictive.empty()) {
      report.trace.running_mean = running_average(report.debiased);
      report.trace.predictive_running_mean = running_average(report.predictive);
      const int lag = static_cast<int>(std::min<std::size_t>(100, report.predictive.size() - 1));
      if (lag >= 1) {
        try {
          report.trace.acf = acf(report.predictive, lag);
        } catch (const DataError&) {
          // constant predictive trace; acf undefined
        }
      }
      report.average_clusters = average_clusters(report.trace.cluster_counts);
      report.acceptance_rate = chain.acceptance_rate();
    }

    if (!chain_report.valid) {
      throw NumericalError(chain_report.error);
    }
    report.valid = true;
    report.status = ExitCode::ok;
  } catch (const IoError& e) {
    report.valid = false;
    report.error = e.what();
    report.status = ExitCode::config;
  } catch (const std::invalid_argument& e) {
    report.valid = false;
    report.error = e.what();
    report.status = exit_code_for(e);
  } catch (const std::domain_error& e) {
    report.valid = false;
    report.error = e.what();
    report.status = ExitCode::data;
  } catch (const NumericalError& e) {
    report.valid = false;
    report.error = e.what();
    report.status = ExitCode::numerical;
  }
  return report;
}

TruthDistances
truth_distances(const RunReport& report)
{
  TruthDistances out;
  auto usable = [](const DensityEstimate& d) { return d.grid.size() > 0 && d.values.size() == d.grid.size(); };
  if (report.truth_g) {
    if (usable(report.predictive_density)) {
      out.predictive_to_g = l1_distance(report.predictive_density, *report.truth_g);
    }
    if (usable(report.classical)) {
      out.classical_to_g = l1_distance(report.classical, *report.truth_g);
    }
  }
  if (report.truth_f) {
    if (report.debiased_density) {
      out.debiased_to_f = l1_distance(*report.debiased_density, *report.truth_f);
    }
    if (usable(report.classical)) {
      out.classical_to_f = l1_distance(report.classical, *report.truth_f);
    }
    if (usable(report.jones)) {
      out.jones_to_f = l1_distance(report.jones, *report.truth_f);
    }
  }
  return out;
}

void
write_report(const RunReport& report, const fs::path& dir)
{
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  }
  {
    auto out = open_out(dir / "config.txt");
    out << report.config;
  }
  if (!report.data.empty()) {
    write_column_csv(dir / "data.csv", report.data);
  }
  write_column_csv(dir / "predictive_sample.csv", report.predictive);
  write_column_csv(dir / "debiased_sample.csv", report.debiased);
  auto write_if = [&](const char* name, const DensityEstimate& d) {
    if (d.grid.size() > 0 && d.values.size() == d.grid.size()) {
      write_density_csv(dir / name, d);
    }
  };
  write_if("density_predictive.csv", report.predictive_density);
  if (report.debiased_density) {
    write_if("density_debiased.csv", *report.debiased_density);
  }
  write_if("kde_classical.csv", report.classical);
  write_if("kde_jones.csv", report.jones);
  if (report.truth_g) {
    write_if("truth_g.csv", *report.truth_g);
  }
  if (report.truth_f) {
    write_if("truth_f.csv", *report.truth_f);
  }

  nlohmann::json j;
  j["valid"] = report.valid;
  j["error"] = report.error;
  j["exit_code"] = static_cast<int>(report.status);
  j["n_data"] = report.data.size();
  j["n_kept"] = report.predictive.size();
  j["iterations_run"] = report.iterations_run;
  j["average_clusters"] = report.average_clusters;
  j["acceptance_rate"] = report.acceptance_rate;
  j["lambda_mean"] = report.lambda_mean;
  j["bandwidth"] = { { "h", report.bandwidth.h },
                     { "method", to_string(report.bandwidth.method) } };
  j["trace"] = report.trace;
  const auto dist = truth_distances(report);
  nlohmann::json l1 = nlohmann::json::object();
  auto put = [&](const char* key, const std::optional<double>& v) {
    if (v) {
      l1[key] = *v;
    }
  };
  put("predictive_to_g", dist.predictive_to_g);
  put("debiased_to_f", dist.debiased_to_f);
  put("classical_to_f", dist.classical_to_f);
  put("classical_to_g", dist.classical_to_g);
  put("jones_to_f", dist.jones_to_f);
  j["l1"] = l1;
  auto out = open_out(dir / "diagnostics.json");
  out << j.dump(2) << '\n';
}

std::string
ComparisonTable::to_csv() const
{
  std::string out = "section,report,other,method,l1\n";
  for (const auto& r : rows) {
    out += r.section + "," + r.report + "," + r.other + "," + r.method + "," +
           format_double(r.l1) + "\n";
  }
  return out;
}

nlohmann::json
ComparisonTable::to_json() const
{
  nlohmann::json j;
  j["rows"] = nlohmann::json::array();
  for (const auto& r : rows) {
    j["rows"].push_back({ { "section", r.section },
                          { "report", r.report },
                          { "other", r.other },
                          { "method", r.method },
                          { "l1", r.l1 } });
  }
  j["tail_mass"] = nlohmann::json::object();
  for (const auto& [name, mass] : tail_mass) {
    j["tail_mass"][name] = mass;
  }
  return j;
}

ComparisonTable
cmd_compare(const std::vector<fs::path>& reports)
{
  if (reports.empty()) {
    throw ConfigError("compare needs at least one report directory");
  }
  struct Loaded
  {
    std::string name;
    std::vector<std::pair<std::string, DensityEstimate>> methods;
    std::optional<DensityEstimate> truth_f;
    std::optional<DensityEstimate> truth_g;
  };
  static const std::pair<const char*, const char*> kMethods[] = {
    { "bayes_predictive", "density_predictive.csv" },
    { "bayes_debiased", "density_debiased.csv" },
    { "classical", "kde_classical.csv" },
    { "jones", "kde_jones.csv" },
  };

  std::vector<Loaded> loaded;
  for (const auto& dir : reports) {
    if (!fs::is_directory(dir) || !fs::exists(dir / "diagnostics.json")) {
      throw IoError("not a report directory: " + dir.string());
    }
    Loaded l;
    l.name = dir.filename().empty() ? dir.parent_path().filename().string()
                                    : dir.filename().string();
    for (const auto& [method, file] : kMethods) {
      if (fs::exists(dir / file)) {
        l.methods.emplace_back(method, read_density_csv(dir / file));
      }
    }
    if (fs::exists(dir / "truth_f.csv")) {
      l.truth_f = read_density_csv(dir / "truth_f.csv");
    }
    if (fs::exists(dir / "truth_g.csv")) {
      l.truth_g = read_density_csv(dir / "truth_g.csv");
    }
    loaded.push_back(std::move(l));
  }

  ComparisonTable table;
  for (const auto& l : loaded) {
    double tail = 0.0;
    for (const auto& [label, truth] : { std::pair{ "f", &l.truth_f }, std::pair{ "g", &l.truth_g } }) {
      if (!*truth) {
        continue;
      }
      tail = std::max(tail, tail_mass(**truth));
      for (const auto& [method, est] : l.methods) {
        table.rows.push_back({ "truth", l.name, label, method, l1_distance(est, **truth) });
      }
    }
    if (l.truth_f || l.truth_g) {
      table.tail_mass.emplace_back(l.name, tail);
    }
  }
  for (std::size_t a = 0; a < loaded.size(); ++a) {
    for (std::size_t b = a + 1; b < loaded.size(); ++b) {
      for (const auto& [method, est] : loaded[a].methods) {
        for (const auto& [other_method, other] : loaded[b].methods) {
          if (method == other_method) {
            table.rows.push_back(
              { "pairwise", loaded[a].name, loaded[b].name, method, l1_distance(est, other) });
          }
        }
      }
    }
  }
  return table;
}

std::string
TrendTable::to_csv() const
{
  std::string out = "n,replicates,mean_l1,sd_l1\n";
  for (const auto& r : rows) {
    out += std::to_string(r.n) + "," + std::to_string(r.l1.size()) + "," +
           format_double(r.mean_l1) + "," + format_double(r.sd_l1) + "\n";
  }
  return out;
}

TrendTable
cmd_consistency(const ExperimentConfig& base, const std::vector<long>& ladder, int replicates)
{
  if (!base.synthetic) {
    throw ConfigError("consistency needs a synthetic data source with a known truth");
  }
  if (ladder.empty() || replicates < 1) {
    throw ConfigError("consistency needs a nonempty ladder and at least one replicate");
  }
  TrendTable table;
  for (long n : ladder) {
    TrendRow row;
    row.n = n;
    for (int r = 0; r < replicates; ++r) {
      ExperimentConfig cfg = base;
      cfg.synthetic->n = n;
      cfg.hp.seed = base.hp.seed + static_cast<std::uint64_t>(r);
      cfg.out_dir.reset();
      RunReport rep = cmd_fit(cfg);
      if (!rep.valid) {
        if (rep.status == ExitCode::numerical) {
          throw NumericalError("consistency run n=" + std::to_string(n) + ": " + rep.error);
        }
        if (rep.status == ExitCode::data) {
          throw DataError(rep.error);
        }
        throw ConfigError(rep.error);
      }
      const auto dist = truth_distances(rep);
      if (!dist.debiased_to_f) {
        throw ConfigError("consistency needs a closed-form debiased truth");
      }
      row.l1.push_back(*dist.debiased_to_f);
    }
    double sum = 0.0;
    for (double v : row.l1) {
      sum += v;
    }
    row.mean_l1 = sum / static_cast<double>(row.l1.size());
    double ss = 0.0;
    for (double v : row.l1) {
      ss += (v - row.mean_l1) * (v - row.mean_l1);
    }
    row.sd_l1 = row.l1.size() > 1 ? std::sqrt(ss / static_cast<double>(row.l1.size() - 1)) : 0.0;
    table.rows.push_back(std::move(row));
  }
  return table;
}

} // namespace lbd
