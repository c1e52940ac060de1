#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "bjcc/rng.hpp"

namespace bjcc {

// Per-customer durations: interarrival T_i - T_{i-1} and service E_i - S_i.
// The likelihood depends on the data only through these, so timestamps are
// never materialised.
class Dataset {
public:
  Dataset(std::vector<double> interarrivals, std::vector<double> services);

  std::size_t size() const { return interarrivals_.size(); }
  const std::vector<double>& interarrivals() const { return interarrivals_; }
  const std::vector<double>& services() const { return services_; }

private:
  std::vector<double> interarrivals_;
  std::vector<double> services_;
};

struct SuffStats {
  std::size_t n = 0;
  double sum_interarrival = 0.0;
  double sum_service = 0.0;

  double mle_lambda() const { return static_cast<double>(n) / sum_interarrival; }
  double mle_mu() const { return static_cast<double>(n) / sum_service; }
};

struct TrueParams {
  double lambda0 = 16.0; // arrivals per unit time
  double mu0 = 1.0;      // services per unit time per server

  double offered_load() const { return lambda0 / mu0; }
};

SuffStats suff_stats(const Dataset& data);

// Throws DomainError if n == 0 or a sum is not positive.
void validate(const SuffStats& stats);

// n i.i.d. Exp(lambda0) interarrivals and Exp(mu0) services drawn from two
// independent streams of `seed`.
Dataset simulate_dataset(const TrueParams& params, std::size_t n, Seed seed);

// n ln(lambda) - lambda * sum_T + n ln(mu) - mu * sum_S.
double log_likelihood(const SuffStats& stats, double lambda, double mu);

// CSV with header `interarrival,service`, one row per customer.
void write_dataset_csv(const Dataset& data, const std::filesystem::path& path);
Dataset read_dataset_csv(const std::filesystem::path& path);

} // namespace bjcc
