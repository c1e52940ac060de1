#include "bjcc/mcmc.hpp"

#include <cmath>
#include <string>

#include "bjcc/csv.hpp"
#include "bjcc/errors.hpp"

namespace bjcc {

double log_unnormalized_posterior(const SuffStats& stats, const PriorSpec& prior, double lambda, double mu) {
  return log_likelihood(stats, lambda, mu) + invgamma_logpdf(prior.prior_lambda, lambda) +
         invgamma_logpdf(prior.prior_mu, mu);
}

McmcChain run_chain(const SuffStats& stats, const PriorSpec& prior, const McmcConfig& config) {
  validate(stats);
  if (config.burn_in >= config.total_samples) throw DomainError("run_chain: burn_in must be below total_samples");
  if (!(config.proposal_std >= 0.0) || !std::isfinite(config.proposal_std))
    throw DomainError("run_chain: proposal_std must be finite and nonnegative");

  // Target density on (x, y) = (log lambda, log mu) picks up the Jacobian
  // lambda * mu of the change of variables.
  auto log_target = [&](double x, double y) {
    return log_unnormalized_posterior(stats, prior, std::exp(x), std::exp(y)) + x + y;
  };

  Rng rng(config.seed);
  double x = std::log(stats.mle_lambda());
  double y = std::log(stats.mle_mu());
  double current = log_target(x, y);
  std::size_t accepted = 0;

  McmcChain chain;
  chain.samples.reserve(config.total_samples - config.burn_in);
  for (std::size_t i = 0; i < config.total_samples; ++i) {
    const double xp = x + config.proposal_std * rng.normal();
    const double yp = y + config.proposal_std * rng.normal();
    const double proposed = log_target(xp, yp);
    const double log_u = std::log(rng.uniform());
    if (log_u < proposed - current) {
      x = xp;
      y = yp;
      current = proposed;
      ++accepted;
    }
    if (i >= config.burn_in) chain.samples.push_back({std::exp(x), std::exp(y)});
  }
  chain.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(config.total_samples);
  return chain;
}

void write_chain_csv(const McmcChain& chain, const std::filesystem::path& path) {
  std::string out = "lambda,mu\n";
  for (const auto& s : chain.samples) {
    out += csv::format_double(s.lambda);
    out += ',';
    out += csv::format_double(s.mu);
    out += '\n';
  }
  csv::write_text(path, out);
}

} // namespace bjcc
