#pragma once
// Batch orchestration: named experiments over the library modules, with a
// stream-per-replica parallelism contract, deterministic JSON/CSV reports,
// and the deterministic kernel verification suite.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cbe/common.hpp"
#include "cbe/field.hpp"

namespace cbe {

enum class ExperimentKind {
  kMaxDist,        // field maxima, counting extremes
  kMartConv,       // derivative-martingale convergence records
  kSdeDecoration,  // window SDE decoration summaries
  kPppMetrics,     // point-process metric estimates on Poisson draws
  kVerifyKernels,  // deterministic kernel suite as an experiment
  kLimitTables,    // reference density tables
  kCountingCheck,  // counting-function jumps vs coefficient-domain roots
};

const char* experiment_name(ExperimentKind kind);
ExperimentKind experiment_from_name(const std::string& name);

Sigma sigma_from_string(const std::string& text);  // "real" / "imaginary"
const char* sigma_to_string(Sigma sigma);

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::kVerifyKernels;

  std::uint64_t n = 256;  // ensemble dimension (power of two for mart-conv)
  double beta = 2.0;
  Sigma sigma = Sigma::kOne;

  // Window / barrier parameters (used where relevant).
  double k1 = 16.0;
  double k2 = 0.0;
  double k3 = 0.0;
  double k4 = 5.0;
  double k5 = 4.0;
  double k6 = 0.0;
  double k7 = 10.0;

  std::uint64_t replicas = 8;
  std::uint64_t seed = 1;
  std::uint64_t workers = 1;
  std::string out;  // output directory; empty = no files written

  std::uint64_t mesh_count = 0;  // 0 = derived as max(64, mesh_factor * n)
  double mesh_factor = 8.0;
  double dt_factor = 1e-3;   // SDE step = min(dt_factor * span, 1e-2)
  std::uint64_t samples = 16;  // inner draws per replica / table rows
  double x_min = -8.0;       // limit-table abscissa range
  double x_max = 6.0;
  double eta = 0.05;         // truncation window parameter
  double lambda = 2.0;       // Poisson intensity total mass
  std::uint64_t f_len = 4;   // decoration profile length for ppp draws

  // Schema validation for the target experiment; throws ConfigError.
  void validate() const;
};

// Build a config from string key=value pairs (config file and/or CLI flags;
// the caller merges maps with flags winning).  Unknown keys and malformed
// values throw ConfigError.
ExperimentConfig experiment_config_from_map(
    const std::map<std::string, std::string>& kv);

struct ExperimentReport {
  int schema_version = 1;
  std::string experiment;
  std::map<std::string, std::string> config_echo;
  std::vector<std::string> record_columns;
  std::vector<std::vector<double>> records;   // replica-major order
  std::map<std::string, double> aggregates;
  double wall_seconds = 0.0;  // timing; excluded from the determinism contract

  // JSON text (2-space indent).  include_timing = false yields the
  // deterministic payload: a pure function of (config, seed).
  std::string to_json(bool include_timing = true) const;
};

// Runs the experiment with static sharding of replicas over workers
// (replica r on worker r mod workers); one replica consumes exactly one
// stream, new_stream(seed, r); aggregation is single-threaded.
ExperimentReport run_experiment(const ExperimentConfig& config);

// Writes report.json and records.csv (plus, for sde-decoration, a binary
// path dump sde_path.bin) under config.out.  No-op when out is empty.
void write_experiment_outputs(const ExperimentConfig& config,
                              const ExperimentReport& report);

// True when the report records any failed check (verify-kernels).
bool report_has_failures(const ExperimentReport& report);

// One deterministic kernel check: closed-form identities and quadrature
// normalizations that need no Monte Carlo.
struct KernelCheck {
  std::string name;
  bool pass = false;
  double residual = 0.0;  // check-specific residual, smaller is better
  double tolerance = 0.0;
};

// The suite behind `verify` and the verify-kernels experiment: Fejer sums,
// Bernstein ratios, interpolation brackets, increment moment formulas,
// bridge density and limit-law normalizations.  Randomized corpora draw from
// new_stream(seed, 0) so the suite is reproducible.
std::vector<KernelCheck> run_kernel_checks(std::uint64_t seed);

}  // namespace cbe
