#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tfsense/design.hpp"
#include "tfsense/errors.hpp"
#include "tfsense/metrics.hpp"
#include "tfsense/model.hpp"

namespace tfs::bench {

enum class Experiment { Histogram, OracleSweep, RecoverySweep, DimensionRatio, EnergySweep };
enum class Estimator { Oracle, Omp, Bpdn };

std::string to_string(Experiment e);
std::string to_string(Estimator e);
Experiment parse_experiment(const std::string& s);
Estimator parse_estimator(const std::string& s);

struct DictionaryKind {
  enum class Kind { Gaussian, Canonical, Specified } kind = Kind::Gaussian;
  double ratio = 1.0;  // Specified only

  /// "gaussian", "canonical" or "specified(<ratio>)".
  std::string label() const;
  static DictionaryKind parse(const std::string& label);
  bool overcomplete() const { return kind != Kind::Canonical; }
};

/// Configuration error in an experiment description; maps to a usage error.
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

struct ExperimentConfig {
  std::string name;  // output file stem; defaults to the experiment name
  Experiment experiment = Experiment::OracleSweep;
  Index m = 0;
  Index n = 0;
  Index nhat = 0;
  Index s = 0;  // fixed sparsity for measurement/dimension sweeps
  double sigma2 = 0.0;
  std::vector<Index> sparsity_grid;
  std::vector<Index> measurement_grid;
  std::vector<Index> dimension_grid;
  std::vector<DesignMethod> designs;
  DictionaryKind dictionary_kind;
  std::vector<Estimator> estimators;
  std::uint64_t trials = 1;
  std::uint64_t base_seed = 0;

  Index histogram_bins = 20;
  SpikeKind spikes = SpikeKind::Rademacher;
  std::optional<double> bpdn_epsilon;  // default: default_bpdn_epsilon(sigma2, m)
  unsigned threads = 0;                // 0: hardware concurrency

  /// Throws ConfigError describing the first violated constraint.
  void validate() const;
};

/// Parses a JSON document holding one experiment object or an array of them.
/// Unknown keys are rejected.
std::vector<ExperimentConfig> parse_configs(const std::string& json_text);
std::vector<ExperimentConfig> load_configs(const std::filesystem::path& path);

struct SweepRow {
  std::string experiment;
  std::string design;
  std::string dictionary_kind;
  std::string estimator;
  Index s = 0;
  Index m = 0;
  Index n = 0;
  Index nhat = 0;
  double sigma2 = 0.0;
  std::uint64_t trials = 0;
  double mse_mean = 0.0;
  double mse_stderr = 0.0;
  double sensed_energy_mean = 0.0;
  std::uint64_t singular_trials = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  friend bool operator==(const SweepResult&, const SweepResult&) = default;
};

struct HistogramSeries {
  std::string design;
  Histogram histogram;
};

struct BenchOutput {
  SweepResult result;
  std::vector<HistogramSeries> histograms;  // histogram experiment only
  std::uint64_t nonconverged = 0;           // BPDN runs that hit max_iterations
};

inline constexpr const char* kCsvHeader =
    "experiment,design,dictionary_kind,estimator,s,m,n,nhat,sigma2,trials,mse_mean,mse_stderr,"
    "sensed_energy_mean,singular_trials,seed";
inline constexpr const char* kHistogramHeader = "design,bin_left,bin_right,count";

void write_csv(std::ostream& out, const SweepResult& result);
SweepResult read_csv(std::istream& in, const std::string& origin = "<stream>");
void write_csv(const SweepResult& result, const std::filesystem::path& path);
SweepResult read_csv(const std::filesystem::path& path);
void write_histogram_csv(std::ostream& out, const std::vector<HistogramSeries>& series);

/// Off-diagonal Gram histogram and sensed energy of each design on one
/// dictionary.
BenchOutput run_histogram(const ExperimentConfig& cfg);
/// Oracle least-squares MSE per (design, s) on a fixed dictionary.
BenchOutput run_oracle_sweep(const ExperimentConfig& cfg);
/// MSE per (design, estimator, s or m) on a fixed dictionary.
BenchOutput run_recovery_sweep(const ExperimentConfig& cfg);
/// Ratio of optimized-design MSE to Gaussian-design MSE per (estimator, n),
/// redrawing the dictionary every trial.
BenchOutput run_dimension_ratio(const ExperimentConfig& cfg);
/// Mean sensed energy ||Phi Psi||_F^2 per (design, n).
BenchOutput run_energy_sweep(const ExperimentConfig& cfg);

BenchOutput run(const ExperimentConfig& cfg);

/// Mean and standard error (sample std / sqrt(count)) of per-trial values.
/// NaN entries mark singular trials: they are skipped and counted.
struct Summary {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t used = 0;
  std::uint64_t skipped = 0;
};
Summary summarize(const std::vector<double>& values);
/// mean(num) / mean(den) over trials where both are finite, with a
/// first-order standard error that includes their covariance.
Summary paired_ratio(const std::vector<double>& num, const std::vector<double>& den);

/// Stream id of (purpose tag, cell, trial); distinct triples map to distinct ids.
std::uint64_t stream_key(std::uint8_t tag, std::uint64_t cell, std::uint64_t trial);

}  // namespace tfs::bench
