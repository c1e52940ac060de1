#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "bjcc/config.hpp"
#include "bjcc/mcmc.hpp"
#include "bjcc/queue_model.hpp"
#include "bjcc/rng.hpp"
#include "bjcc/staffing_solver.hpp"
#include "bjcc/vb_engine.hpp"

namespace bjcc {

enum class Profile { Desk, Paper };

struct ExperimentConfig {
  std::string profile = "desk";
  TrueParams true_params{16.0, 1.0};
  PriorSpec prior{};
  // staffing.alpha is the QoS target; staffing.beta drives the feasibility
  // and rate experiments.
  StaffingSpec staffing{0.5, 0.7, 200};
  // Confidence levels swept by the consistency experiment.
  std::vector<double> betas{0.7};
  std::vector<std::size_t> n_grid{125, 250, 500, 1000, 2000};
  std::size_t replications = 50;
  bool run_mcmc = true;
  McmcConfig mcmc{1000, 200, 0.05, Seed{0}};
  Seed base_seed{20240601};
  // Server count probed by the feasibility experiment; 0 means C* - 1.
  int c_probe = 0;
  unsigned threads = 1;
  VbOptions vb{};

  double alpha_qos() const { return staffing.alpha; }
};

ExperimentConfig default_config(Profile profile);
Profile parse_profile(const std::string& name);

// Overlays keys from a flat key/value file onto `base`. Unknown keys are an
// error.
ExperimentConfig apply_config(ExperimentConfig base, const KeyValueConfig& kv);

// Inverse of apply_config: every key with its resolved value.
KeyValueConfig to_key_values(const ExperimentConfig& cfg);

// Throws ConfigError on an invalid configuration.
void validate(const ExperimentConfig& cfg);

// Seed of replication `rep` at sample size `n`; independent of the grid.
Seed cell_seed(Seed base, std::size_t n, std::size_t rep);

// Order-statistic quantile: the ceil(p N)-th smallest value (N >= 1).
double nearest_rank_quantile(std::vector<double> values, double p);

struct QuantileRow {
  std::size_t n = 0;
  double beta = 0.0;
  std::string method; // "vb" or "mcmc"
  std::size_t used = 0;
  std::size_t excluded = 0;
  double q05 = 0.0;
  double q50 = 0.0;
  double q95 = 0.0;
};

struct QuantileTable {
  int c_true = 0;
  std::vector<QuantileRow> rows;
  std::string to_csv() const;
};

struct FeasibilityRow {
  std::size_t n = 0;
  std::size_t used = 0;
  std::size_t excluded = 0;
  std::size_t included = 0; // replications with c_probe in the VB feasible set
  double frequency = 0.0;
};

struct FeasibilityTable {
  int c_probe = 0;
  double beta = 0.0;
  std::vector<FeasibilityRow> rows;
  std::string to_csv() const;
};

struct RateRow {
  std::size_t n = 0;
  std::size_t used = 0;
  std::size_t excluded = 0;
  std::size_t misstaffed = 0; // |C*_VB - C*| >= 1
  double frequency = 0.0;
  double epsilon_sq = 0.0; // log(n) / n
};

struct RateTable {
  int c_true = 0;
  double beta = 0.0;
  double fitted_constant = 0.0; // max_n frequency / epsilon_sq
  std::vector<RateRow> rows;
  std::string to_csv() const;
};

double rate_epsilon_sq(std::size_t n);

// Quantiles of C*_VB (and C*_MCMC when enabled) per n and beta.
QuantileTable run_consistency(const ExperimentConfig& cfg);

// Frequency with which c_probe (truly infeasible) lands in the VB feasible
// set. Throws ConfigError if c_probe is feasible at the true parameters.
FeasibilityTable run_feasibility_decay(const ExperimentConfig& cfg);

RateTable run_rate_check(const ExperimentConfig& cfg);

} // namespace bjcc
