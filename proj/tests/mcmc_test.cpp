#include "bjcc/mcmc.hpp"

#include <cmath>
#include <fstream>

#include <gtest/gtest.h>

#include "bjcc/errors.hpp"
#include "support/oracles.hpp"
#include "support/posterior_checks.hpp"

namespace bjcc {
namespace {

using oracle::Real;

TEST(LogPosterior, SumOfTerms) {
  const SuffStats s{4, 0.3, 5.0};
  const PriorSpec prior{InvGammaLaw(2.0, 3.0), InvGammaLaw(1.5, 0.5)};
  const double lam = 12.0, mu = 0.8;
  const Real expect = oracle::log_post_block(lam, 4, 0.3, 2.0, 3.0) + oracle::log_post_block(mu, 4, 5.0, 1.5, 0.5);
  EXPECT_NEAR(log_unnormalized_posterior(s, prior, lam, mu), static_cast<double>(expect), 1e-12);
  EXPECT_THROW(log_unnormalized_posterior(s, prior, 0.0, mu), DomainError);
}

TEST(LogPosterior, GridNormalisedIntegratesToOne) {
  const auto s = suff_stats(Dataset({0.071, 0.012, 0.094, 0.033, 0.058}, {0.84, 1.91, 0.27, 1.12, 0.55}));
  const PriorSpec prior{};
  const oracle::RateBlock lam(s.n, s.sum_interarrival, 1.0L, 1.0L);
  const oracle::RateBlock mu(s.n, s.sum_service, 1.0L, 1.0L);
  const Real log_z = oracle::log_evidence_grid(lam, mu, 801);
  // Trapezoid over (log lambda, log mu) of the library density, normalised by the oracle evidence.
  const int nodes = 801;
  const Real du = (lam.u_hi - lam.u_lo) / (nodes - 1);
  const Real dv = (mu.u_hi - mu.u_lo) / (nodes - 1);
  Real total = 0.0L;
  for (int i = 0; i < nodes; ++i) {
    for (int j = 0; j < nodes; ++j) {
      const Real u = lam.u_lo + i * du;
      const Real v = mu.u_lo + j * dv;
      const Real w = ((i == 0 || i == nodes - 1) ? 0.5L : 1.0L) * ((j == 0 || j == nodes - 1) ? 0.5L : 1.0L);
      const double lp = log_unnormalized_posterior(s, prior, std::exp(static_cast<double>(u)), std::exp(static_cast<double>(v)));
      total += w * std::exp(lp + u + v - log_z);
    }
  }
  EXPECT_NEAR(static_cast<double>(total * du * dv), 1.0, 1e-8);
}

TEST(RunChain, DeterministicAndPositive) {
  const auto s = suff_stats(simulate_dataset(TrueParams{}, 30, Seed{1}));
  const McmcConfig cfg{2000, 500, 0.1, Seed{9}};
  const auto a = run_chain(s, PriorSpec{}, cfg);
  const auto b = run_chain(s, PriorSpec{}, cfg);
  ASSERT_EQ(a.samples.size(), 1500u);
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    EXPECT_EQ(a.samples[i].lambda, b.samples[i].lambda);
    EXPECT_EQ(a.samples[i].mu, b.samples[i].mu);
    EXPECT_GT(a.samples[i].lambda, 0.0);
    EXPECT_GT(a.samples[i].mu, 0.0);
  }
  EXPECT_GE(a.acceptance_rate, 0.0);
  EXPECT_LE(a.acceptance_rate, 1.0);
}

TEST(RunChain, RejectsBadConfig) {
  const SuffStats s{3, 1.0, 1.0};
  EXPECT_THROW(run_chain(s, PriorSpec{}, McmcConfig{100, 100, 0.1, Seed{}}), DomainError);
  EXPECT_THROW(run_chain(s, PriorSpec{}, McmcConfig{100, 10, -0.1, Seed{}}), DomainError);
}

TEST(RunChain, ZeroStepAcceptsEverything) {
  const auto s = suff_stats(simulate_dataset(TrueParams{}, 30, Seed{2}));
  EXPECT_EQ(run_chain(s, PriorSpec{}, McmcConfig{1000, 100, 0.0, Seed{3}}).acceptance_rate, 1.0);
  EXPECT_GT(run_chain(s, PriorSpec{}, McmcConfig{1000, 100, 1e-6, Seed{3}}).acceptance_rate, 0.99);
}

TEST(RunChain, PaperScaleMean) {
  const auto s = suff_stats(simulate_dataset(TrueParams{}, 2000, Seed{21}));
  const auto chain = run_chain(s, PriorSpec{}, McmcConfig{20000, 2000, 0.05, Seed{4}});
  std::vector<double> xs;
  double mean = 0.0;
  for (const auto& r : chain.samples) {
    xs.push_back(r.lambda);
    mean += r.lambda / chain.samples.size();
  }
  EXPECT_LT(std::fabs(mean - 16.0), 3.0 * 16.0 / std::sqrt(2000.0) + 3.0 * oracle::batch_mean_se(xs));
}

TEST(RunChain, MatchesGridPosteriorOnToyData) {
  const auto s = suff_stats(simulate_dataset(TrueParams{}, 20, Seed{20}));
  const auto chain = run_chain(s, PriorSpec{}, McmcConfig{101000, 1000, 0.15, Seed{5}});
  const auto cmp = oracle::compare_chain_to_grid(s, PriorSpec{}, chain);
  EXPECT_LT(cmp.tv, 0.05);
  EXPECT_LT(cmp.z_lambda(), 3.0);
  EXPECT_LT(cmp.z_mu(), 3.0);
}

// Stationary flux of accepted moves that raise lambda equals the flux of
// accepted moves that lower it.
TEST(RunChain, DetailedBalanceSmoke) {
  const auto s = suff_stats(simulate_dataset(TrueParams{}, 20, Seed{20}));
  const PriorSpec prior{};
  const auto chain = run_chain(s, prior, McmcConfig{201000, 1000, 0.15, Seed{6}});
  auto log_target = [&](double x, double y) {
    return log_unnormalized_posterior(s, prior, std::exp(x), std::exp(y)) + x + y;
  };
  Rng rng(Seed{77}, 3);
  double up = 0, down = 0;
  for (std::size_t k = 0; k < chain.samples.size(); k += 20) {
    const double x = std::log(chain.samples[k].lambda);
    const double y = std::log(chain.samples[k].mu);
    for (int rep = 0; rep < 5; ++rep) {
      const double xp = x + 0.15 * rng.normal();
      const double yp = y + 0.15 * rng.normal();
      if (std::log(rng.uniform()) < log_target(xp, yp) - log_target(x, y)) (xp > x ? up : down) += 1.0;
    }
  }
  EXPECT_LT(std::fabs(up - down), 3.0 * std::sqrt(up + down));
}

TEST(ChainCsv, Header) {
  const auto s = suff_stats(simulate_dataset(TrueParams{}, 10, Seed{1}));
  const auto chain = run_chain(s, PriorSpec{}, McmcConfig{30, 10, 0.1, Seed{1}});
  const auto path = std::filesystem::temp_directory_path() / "bjcc_mcmc_test" / "chain.csv";
  write_chain_csv(chain, path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "lambda,mu");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 20);
}

} // namespace
} // namespace bjcc
