#include "bjcc/vb_engine.hpp"

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "bjcc/errors.hpp"
#include "bjcc/special_math.hpp"
#include "support/oracles.hpp"

namespace bjcc {
namespace {

using oracle::Real;

const Dataset& toy5() {
  static const Dataset d({0.071, 0.012, 0.094, 0.033, 0.058}, {0.84, 1.91, 0.27, 1.12, 0.55});
  return d;
}

// log(likelihood * prior / q) at one draw, written out term by term.
Real elbo_integrand(const SuffStats& s, const PriorSpec& p, const ProductGammaPosterior& q, Real lam, Real mu) {
  auto log_gamma_pdf = [](const GammaLaw& g, Real x) {
    return g.shape() * std::log(static_cast<Real>(g.rate())) - oracle::log_gamma(g.shape()) +
           (g.shape() - 1.0L) * std::log(x) - g.rate() * x;
  };
  return oracle::log_post_block(lam, s.n, s.sum_interarrival, p.prior_lambda.shape(), p.prior_lambda.scale()) +
         oracle::log_post_block(mu, s.n, s.sum_service, p.prior_mu.shape(), p.prior_mu.scale()) -
         log_gamma_pdf(q.q_lambda, lam) - log_gamma_pdf(q.q_mu, mu);
}

TEST(Elbo, MatchesMonteCarlo) {
  const auto s = suff_stats(toy5());
  const PriorSpec prior{};
  const ProductGammaPosterior q{GammaLaw(6.0, 0.4), GammaLaw(5.5, 4.0)};
  const std::size_t n = 1'000'000;
  const auto lam = sample_gamma(q.q_lambda, Seed{101}, n);
  const auto mu = sample_gamma(q.q_mu, Seed{202}, n);
  Real sum = 0, sum2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Real v = elbo_integrand(s, prior, q, lam[i], mu[i]);
    sum += v;
    sum2 += v * v;
  }
  const Real mean = sum / n;
  const Real se = std::sqrt((sum2 / n - mean * mean) / n);
  EXPECT_LT(std::fabs(elbo(s, prior, q) - static_cast<double>(mean)), 3.0 * static_cast<double>(se));
}

TEST(Elbo, BelowLogEvidence) {
  const auto s = suff_stats(toy5());
  const PriorSpec prior{};
  const oracle::RateBlock lam(s.n, s.sum_interarrival, 1.0L, 1.0L);
  const oracle::RateBlock mu(s.n, s.sum_service, 1.0L, 1.0L);
  const double log_ev = static_cast<double>(lam.log_norm + mu.log_norm);
  // The tensor-grid evaluation agrees with the separable one.
  EXPECT_NEAR(static_cast<double>(oracle::log_evidence_grid(lam, mu, 801)), log_ev, 1e-8);
  const auto fit = fit_vb(s, prior);
  EXPECT_LE(fit.report.value, log_ev);
  for (double a : {1.1, 2.0, 5.0, 20.0})
    for (double m : {10.0, 50.0, 100.0})
      EXPECT_LE(elbo(s, prior, {GammaLaw(a, a / m), GammaLaw(a, a * 1.5)}), log_ev);
}

TEST(Elbo, BlockOrderInvariance) {
  const SuffStats s{7, 0.5, 6.0};
  const SuffStats swapped{7, 6.0, 0.5};
  const PriorSpec prior{InvGammaLaw(1.0, 1.0), InvGammaLaw(2.0, 3.0)};
  const PriorSpec prior_swapped{InvGammaLaw(2.0, 3.0), InvGammaLaw(1.0, 1.0)};
  const ProductGammaPosterior q{GammaLaw(8.0, 0.6), GammaLaw(3.0, 2.5)};
  const ProductGammaPosterior q_swapped{GammaLaw(3.0, 2.5), GammaLaw(8.0, 0.6)};
  EXPECT_DOUBLE_EQ(elbo(s, prior, q), elbo(swapped, prior_swapped, q_swapped));
}

TEST(Elbo, RejectsShapeAtMostOne) {
  const SuffStats s{3, 1.0, 1.0};
  EXPECT_THROW(elbo(s, PriorSpec{}, {GammaLaw(1.0, 1.0), GammaLaw(2.0, 1.0)}), DomainError);
}

TEST(Elbo, GradientMatchesFiniteDifference) {
  // Stationarity of the fitted optimum, checked without the library gradient.
  const SuffStats s{30, 1.9, 31.0};
  const auto fit = fit_vb(s, PriorSpec{});
  auto f = [&](double aq, double bq) {
    return elbo(s, PriorSpec{}, {GammaLaw(aq, bq), fit.posterior.q_mu});
  };
  const double a = fit.posterior.q_lambda.shape();
  const double b = fit.posterior.q_lambda.rate();
  const double ha = 1e-4 * a, hb = 1e-4 * b;
  EXPECT_NEAR((f(a + ha, b) - f(a - ha, b)) / (2 * ha), 0.0, 1e-5);
  EXPECT_NEAR((f(a, b + hb) - f(a, b - hb)) / (2 * hb), 0.0, 1e-5);
}

TEST(FitVb, ConsistentAtPaperScale) {
  const auto stats = suff_stats(simulate_dataset(TrueParams{}, 2000, Seed{77}));
  const auto fit = fit_vb(stats, PriorSpec{});
  EXPECT_TRUE(fit.report.converged);
  EXPECT_LE(fit.report.gradient_norm, 1e-8);
  EXPECT_LT(std::fabs(fit.posterior.q_lambda.mean() - 16.0), 3.0 * 16.0 / std::sqrt(2000.0));
}

TEST(FitVb, StartsAgree) {
  for (std::size_t n : {3u, 40u, 2000u}) {
    const auto stats = suff_stats(simulate_dataset(TrueParams{}, n, Seed{n}));
    const double a = fit_vb_from(stats, PriorSpec{}, VbStart::MleMatched).report.value;
    for (VbStart st : {VbStart::PriorMatched, VbStart::Wide}) {
      const auto other = fit_vb_from(stats, PriorSpec{}, st);
      EXPECT_TRUE(other.report.converged);
      EXPECT_LE(std::fabs(other.report.value - a), 1e-6 * std::fabs(a)) << n;
    }
  }
}

TEST(FitVb, SingleObservation) {
  const auto stats = suff_stats(Dataset({0.05}, {1.3}));
  const auto fit = fit_vb(stats, PriorSpec{});
  EXPECT_TRUE(fit.report.converged);
  EXPECT_TRUE(std::isfinite(fit.posterior.q_lambda.shape()));
  EXPECT_TRUE(std::isfinite(fit.posterior.q_mu.rate()));
  EXPECT_GT(fit.posterior.q_lambda.shape(), 1.0);
}

TEST(FitVb, TraceNondecreasing) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto stats = suff_stats(simulate_dataset(TrueParams{}, 10 * seed, Seed{seed}));
    for (VbStart st : {VbStart::MleMatched, VbStart::PriorMatched, VbStart::Wide}) {
      const auto tr = fit_vb_from(stats, PriorSpec{}, st).report.trace;
      ASSERT_FALSE(tr.empty());
      for (std::size_t i = 1; i < tr.size(); ++i)
        EXPECT_GE(tr[i], tr[i - 1] - 1e-12 * std::fabs(tr[i - 1])) << seed << " step " << i;
    }
  }
}

TEST(FitVb, DominatesMleBaseline) {
  for (std::size_t n : {10u, 100u, 2000u}) {
    const auto stats = suff_stats(simulate_dataset(TrueParams{}, n, Seed{500 + n}));
    const auto base = lemma_baseline(n, TrueParams{stats.mle_lambda(), stats.mle_mu()});
    EXPECT_GE(fit_vb(stats, PriorSpec{}).report.value, elbo(stats, PriorSpec{}, base) - 1e-9);
  }
}

TEST(FitVb, VarianceScalesAsOneOverN) {
  const std::vector<std::size_t> grid{125, 250, 500, 1000, 2000};
  std::vector<double> lx, ly;
  for (std::size_t n : grid) {
    double v = 0;
    for (std::uint64_t rep = 0; rep < 10; ++rep) {
      const auto q = fit_vb(suff_stats(simulate_dataset(TrueParams{}, n, Seed{n * 1000 + rep})), PriorSpec{}).posterior;
      v += q.q_lambda.variance();
    }
    lx.push_back(std::log(static_cast<double>(n)));
    ly.push_back(std::log(v / 10));
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i] / lx.size();
    my += ly[i] / ly.size();
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  const double slope = sxy / sxx;
  EXPECT_GE(slope, -1.3);
  EXPECT_LE(slope, -0.7);
}

TEST(LemmaBaseline, Moments) {
  const auto q = lemma_baseline(100, TrueParams{});
  EXPECT_DOUBLE_EQ(q.q_lambda.mean(), 16.0);
  EXPECT_NEAR(q.q_lambda.variance(), 2.56, 1e-12);
  EXPECT_NEAR(lemma_baseline(50, TrueParams{}).q_mu.variance() / lemma_baseline(200, TrueParams{}).q_mu.variance(), 4.0,
              1e-12);
  EXPECT_THROW(lemma_baseline(1, TrueParams{}), DomainError);
}

// KL(Gamma(n, n/rate0) || InvGamma prior) and n E_q[KL(Exp(rate0) || Exp(rate))]
// by quadrature in u = log(rate).
struct BoundTerms {
  Real kl_prior;
  Real data_kl;
};

BoundTerms quadrature_terms(std::size_t n, double rate0, const InvGammaLaw& prior) {
  const Real a = static_cast<Real>(n);
  const Real b = a / rate0;
  const Real lg = oracle::log_gamma(a);
  auto log_q = [&](Real x) { return a * std::log(b) - lg + (a - 1.0L) * std::log(x) - b * x; };
  auto log_p = [&](Real x) {
    return prior.shape() * std::log(static_cast<Real>(prior.scale())) - oracle::log_gamma(prior.shape()) -
           (prior.shape() + 1.0L) * std::log(x) - prior.scale() / x;
  };
  const Real sd = std::sqrt(a) / b;
  const Real lo = std::log(std::max<Real>(rate0 * 1e-3L, rate0 - 40.0L * sd));
  const Real hi = std::log(rate0 + 40.0L * sd);
  const Real kl = oracle::integrate(
      [&](Real u) {
        const Real x = std::exp(u);
        return std::exp(log_q(x) + u) * (log_q(x) - log_p(x));
      },
      lo, hi, 1e-15L, 1e-25L);
  const Real dk = oracle::integrate(
      [&](Real u) {
        const Real x = std::exp(u);
        return std::exp(log_q(x) + u) * a * (std::log(rate0 / x) + x / rate0 - 1.0L);
      },
      lo, hi, 1e-15L, 1e-25L);
  return {kl, dk};
}

TEST(LemmaBaseline, BoundTermsMatchQuadratureAndHold) {
  const TrueParams truth{};
  const PriorSpec prior{};
  for (std::size_t n : {10u, 100u, 1000u}) {
    const auto bb = baseline_bound(n, truth, prior);
    const auto l = quadrature_terms(n, truth.lambda0, prior.prior_lambda);
    const auto m = quadrature_terms(n, truth.mu0, prior.prior_mu);
    EXPECT_NEAR(bb.kl_to_prior, static_cast<double>(l.kl_prior + m.kl_prior), 1e-8) << n;
    EXPECT_NEAR(bb.expected_data_kl, static_cast<double>(l.data_kl + m.data_kl), 1e-8) << n;
    EXPECT_GT(bb.c9, 0.0);
    EXPECT_LE(bb.total(), bb.bound(n)) << n;
  }
}

} // namespace
} // namespace bjcc
