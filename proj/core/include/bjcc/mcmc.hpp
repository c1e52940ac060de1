#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "bjcc/queue_model.hpp"
#include "bjcc/rng.hpp"
#include "bjcc/vb_engine.hpp"

namespace bjcc {

struct McmcConfig {
  std::size_t total_samples = 1000;
  std::size_t burn_in = 200;
  double proposal_std = 0.05; // isotropic, in (log lambda, log mu)
  Seed seed{};
};

struct RatePair {
  double lambda = 0.0;
  double mu = 0.0;
};

struct McmcChain {
  std::vector<RatePair> samples; // post burn-in, no thinning
  double acceptance_rate = 0.0;  // over all total_samples proposals
};

// log-likelihood + log prior(lambda) + log prior(mu); the evidence is omitted.
double log_unnormalized_posterior(const SuffStats& stats, const PriorSpec& prior, double lambda, double mu);

// Random-walk Metropolis-Hastings in log space, started at the MLE.
// Throws DomainError if burn_in >= total_samples or proposal_std < 0.
McmcChain run_chain(const SuffStats& stats, const PriorSpec& prior, const McmcConfig& config);

// CSV with header `lambda,mu`.
void write_chain_csv(const McmcChain& chain, const std::filesystem::path& path);

} // namespace bjcc
