#pragma once

#include "lbd/debias.hpp"
#include "lbd/density_estimate.hpp"
#include "lbd/diagnostics.hpp"
#include "lbd/distributions.hpp"
#include "lbd/dpmm.hpp"
#include "lbd/errors.hpp"
#include "lbd/kde.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace lbd {

/// Unreadable or unwritable file.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Exit status for an exception thrown by any lbd module.
ExitCode exit_code_for(const std::exception& e);

// -- Data ---------------------------------------------------------------------

/// One numeric column, optional non-numeric header on line 1. Blank lines are
/// skipped. Errors name the offending line.
Dataset load_csv(const std::filesystem::path& path);

/// Single-column CSV with header "value", shortest round-trip formatting.
void write_column_csv(const std::filesystem::path& path, const std::vector<double>& values);

/// Two-column CSV "y,density".
void write_density_csv(const std::filesystem::path& path, const DensityEstimate& est);
DensityEstimate read_density_csv(const std::filesystem::path& path);

/// Biased-sample generator: a distribution for g plus a default sample size.
struct SyntheticSpec
{
  std::string name;
  Distribution g;
  long n = 50;
};

/// "gamma1" (Ga(2, 0.5), n = 50) or "mixture2" (0.25 Ga(2,1) + 0.75 Ga(10,1), n = 70).
SyntheticSpec preset(const std::string& name);

/// n i.i.d. draws from `g`, reproducible per seed.
Dataset gen_synthetic(const Distribution& g, long n, std::uint64_t seed);

// -- Configuration --------------------------------------------------------------

struct ExperimentConfig
{
  std::optional<std::filesystem::path> data_path;
  std::optional<SyntheticSpec> synthetic;
  Hyperparams hp;
  WeightFn weight = LengthWeight{};
  /// Upper grid end; 0 selects 1.5 max(data).
  double grid_max = 0.0;
  long grid_points = 512;
  /// Manual KDE bandwidth; empty selects Sheather–Jones.
  std::optional<double> bandwidth;
  std::optional<std::filesystem::path> out_dir;

  std::uint64_t seed() const { return hp.seed; }
};

/// Throws ConfigError unless exactly one data source is set and all fields
/// are in range.
void validate(const ExperimentConfig& config);

/// "key = value" lines, stable order.
std::string config_echo(const ExperimentConfig& config);

// -- Fit ------------------------------------------------------------------------

struct RunReport
{
  std::vector<double> data;
  std::vector<double> predictive;
  std::vector<double> debiased;
  DensityEstimate predictive_density;
  /// Average over kept states of the exact debiased density (power weights only).
  std::optional<DensityEstimate> debiased_density;
  DensityEstimate classical;
  DensityEstimate jones;
  std::optional<DensityEstimate> truth_g;
  std::optional<DensityEstimate> truth_f;
  TraceSummary trace;
  double average_clusters = 0.0;
  double acceptance_rate = 0.0;
  double lambda_mean = 0.0;
  long iterations_run = 0;
  Bandwidth bandwidth;
  std::string config;
  bool valid = false;
  std::string error;
  ExitCode status = ExitCode::ok;
};

/// Runs the sampler with the debias chain attached, the exact debiased
/// density average and both KDE baselines. Module errors do not escape: they
/// produce a report with valid = false and the matching status.
RunReport cmd_fit(const ExperimentConfig& config);

/// Writes the run directory: config.txt, data.csv, predictive_sample.csv,
/// debiased_sample.csv, density_*.csv, kde_*.csv, truth_*.csv and
/// diagnostics.json.
void write_report(const RunReport& report, const std::filesystem::path& dir);

/// L1 of each estimate to whichever truth it targets, when truths exist.
struct TruthDistances
{
  std::optional<double> predictive_to_g;
  std::optional<double> debiased_to_f;
  std::optional<double> classical_to_f;
  std::optional<double> classical_to_g;
  std::optional<double> jones_to_f;
};

TruthDistances truth_distances(const RunReport& report);

// -- Compare --------------------------------------------------------------------

struct ComparisonRow
{
  std::string section; // "truth" or "pairwise"
  std::string report;
  std::string other;   // truth label ("f" / "g") or the second report
  std::string method;
  double l1 = 0.0;
};

struct ComparisonTable
{
  std::vector<ComparisonRow> rows;
  /// Truth mass outside the grid, per report (largest over f and g).
  std::vector<std::pair<std::string, double>> tail_mass;

  std::string to_csv() const;
  nlohmann::json to_json() const;
};

/// Reads report directories and compares every method against the stored
/// truths and across reports. Throws IoError for unreadable directories and
/// ConfigError for grid mismatches.
ComparisonTable cmd_compare(const std::vector<std::filesystem::path>& reports);

// -- Consistency ------------------------------------------------------------------

struct TrendRow
{
  long n = 0;
  std::vector<double> l1;
  double mean_l1 = 0.0;
  double sd_l1 = 0.0;
};

struct TrendTable
{
  std::vector<TrendRow> rows;
  std::string to_csv() const;
};

/// For each n in `ladder` and replicate r, fits synthetic data with seed
/// base_seed + r and records L1(f_n, f_0). Needs a synthetic source.
TrendTable cmd_consistency(const ExperimentConfig& base, const std::vector<long>& ladder,
                           int replicates);

} // namespace lbd
