#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "raas/baselines.hpp"
#include "raas/diagnostics.hpp"
#include "raas/raas.hpp"

namespace raas {

struct ProblemConfig {
  enum class Type { Quadratic, Logistic } type = Type::Quadratic;
  QuadraticSpec quadratic;
  LogisticSpec logistic;
};

// Method hyperparameters before the problem is known; step sizes may be
// given relative to 1/L.
struct MethodConfig {
  std::string tag;
  std::string name;
  RaasParams raas;
  std::optional<double> mu;          // unset: problem mu
  std::optional<double> gamma0_L;    // gamma0 = gamma0_L / L
  BaselineParams baseline;
  std::optional<double> eta_L;       // eta = eta_L / L
  double cap_vartheta = 0.0;         // vartheta used for the default step cap
};

struct NoiseGrid {
  std::vector<double> sigma_g, sigma_f, bias_rel;
};

struct TheoryConfig {
  std::optional<OracleMoments> moments;
  double S_f = 0.0, S_g = 0.0;
  double p_hat = 0.75;
  std::optional<double> B;
};

struct ExperimentConfig {
  ProblemConfig problem;
  NoiseConfig noise;
  NoiseGrid grid;
  std::vector<MethodConfig> methods;
  std::vector<std::uint64_t> seeds{42, 43, 44, 45, 46};
  long T = 500;
  int R = 5;
  std::string out_dir = "out";
  std::optional<StopRule> stop;
  TheoryConfig theory;
  int jobs = 1;
  std::string canonical;  // normalized JSON text, input to fingerprints
};

// Registered method tags.
const std::vector<std::string>& method_tags();
bool is_adaptive(const std::string& tag);

// Parses and validates; every problem found is reported in one ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

ProblemPtr build_problem(const ProblemConfig& pc);

// Finalized engine parameters for an adaptive method on a given problem.
RaasParams resolve_raas(const MethodConfig& m, const Problem& p);
BaselineParams resolve_baseline(const MethodConfig& m, const Problem& p);

std::uint64_t fingerprint(const std::string& canonical, const std::string& method,
                          std::uint64_t seed);

struct AggregateSeries {
  std::vector<double> mean;
  std::vector<double> stdev;  // population (n divisor)
};

// Elementwise mean and population std of the per-trial gap series.
AggregateSeries aggregate(const std::vector<const RunTrace*>& traces);

struct MethodResult {
  MethodConfig config;
  std::optional<RaasParams> params;  // adaptive methods only
  std::vector<std::optional<RunTrace>> traces;  // indexed like seeds
  std::vector<std::string> failures;            // indexed like seeds, empty = ok
  AggregateSeries series;
};

struct ExperimentResult {
  ProblemPtr problem;
  NoiseConfig noise;
  std::vector<std::uint64_t> seeds;
  std::vector<MethodResult> methods;
  std::string canonical;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg, int jobs,
                                ProblemPtr problem = nullptr);

struct EmitOptions {
  bool csv = true;
  bool svg = false;
};

EmitOptions parse_formats(const std::string& formats);

// Writes per-run trial CSVs, per-method aggregates, optional SVG and a
// manifest. Returns the written paths relative to out_dir.
std::vector<std::string> emit(const ExperimentResult& res, const std::string& out_dir,
                              const EmitOptions& opt);

std::string format_double(double v);
std::string trial_csv_header();
std::string trial_csv_row(const TrialRecord& r);

// Runs every noise point of the grid; each point goes to its own subdirectory.
std::vector<std::string> sweep(const ExperimentConfig& cfg, const std::string& out_dir,
                               const EmitOptions& opt, int jobs);

struct VerifyReport {
  std::vector<std::string> lines;
  long violations = 0;
};

VerifyReport verify(const ExperimentConfig& cfg, int jobs);

// Theory constants for each adaptive method of the config, as JSON text.
std::string constants_json(const ExperimentConfig& cfg);
TheoryConstants constants_for(const ExperimentConfig& cfg, const MethodConfig& m,
                              const Problem& p);

}  // namespace raas
