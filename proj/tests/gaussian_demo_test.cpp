#include "bjcc/gaussian_demo.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "bjcc/errors.hpp"
#include "support/oracles.hpp"

namespace bjcc {
namespace {

LinearCC example(double sigma, double beta = 0.9) { return LinearCC{unit_gaussian(sigma), 1.0, beta}; }

TEST(ExactMembership, OriginAndScaling) {
  const auto cc = example(-0.1);
  EXPECT_TRUE(exact_membership(cc, {0.0, 0.0}));
  Rng rng(Seed{4});
  for (int k = 0; k < 2000; ++k) {
    const Vec2 x{4.0 * (rng.uniform() - 0.5), 4.0 * (rng.uniform() - 0.5)};
    if (!exact_membership(cc, x)) continue;
    for (double s = 0.0; s <= 1.0; s += 0.1) EXPECT_TRUE(exact_membership(cc, {s * x[0], s * x[1]}));
  }
}

TEST(ExactMembership, FlipsAtBoundaryAlongRay) {
  for (double sigma : {-0.1, 0.025, 0.1}) {
    const auto cc = example(sigma);
    for (double angle = 0.0; angle < 6.28; angle += 0.37) {
      const long double d1 = std::cos(angle), d2 = std::sin(angle);
      // Root of z * s * sqrt(d' Sigma d) = 1 by bisection on the oracle quantile.
      const long double z = oracle::normal_quantile(0.9L);
      long double lo = 0.0L, hi = 10.0L;
      for (int i = 0; i < 200; ++i) {
        const long double s = 0.5L * (lo + hi);
        const long double g = z * s * std::sqrt(d1 * d1 + d2 * d2 + 2.0L * sigma * d1 * d2) - 1.0L;
        (g <= 0.0L ? lo : hi) = s;
      }
      const double root = static_cast<double>(lo);
      const double in = root * (1.0 - 1e-7), out = root * (1.0 + 1e-7);
      EXPECT_TRUE(exact_membership(cc, {in * static_cast<double>(d1), in * static_cast<double>(d2)})) << sigma << " " << angle;
      EXPECT_FALSE(exact_membership(cc, {out * static_cast<double>(d1), out * static_cast<double>(d2)})) << sigma << " " << angle;
    }
  }
}

TEST(McMembership, AgreesWithExactOutsideBoundaryBand) {
  const auto cc = example(-0.1);
  const std::size_t n = 1'000'000;
  const auto samples = sample_bivariate_normal(cc.law, Seed{17}, n);
  EXPECT_TRUE(mc_membership(samples, cc, {0.0, 0.0}));
  const double band = 3.0 * std::sqrt(0.9 * 0.1 / n);
  int checked = 0;
  for (double x1 = -1.0; x1 <= 1.0; x1 += 0.1) {
    for (double x2 = -1.0; x2 <= 1.0; x2 += 0.1) {
      const double var = x1 * x1 + x2 * x2 - 0.2 * x1 * x2;
      const double p = var == 0.0 ? 1.0 : static_cast<double>(oracle::normal_cdf(1.0L / std::sqrt(static_cast<long double>(var))));
      if (std::fabs(p - 0.9) < band) continue;
      ++checked;
      EXPECT_EQ(mc_membership(samples, cc, {x1, x2}), exact_membership(cc, {x1, x2})) << x1 << " " << x2;
    }
  }
  EXPECT_GT(checked, 400);
}

TEST(McMembership, TenSamplesAreNonConvex) {
  const auto cc = example(-0.1);
  RegionOptions opts;
  opts.mc_samples = 10;
  const auto region = emit_region_grid(cc, RegionMethod::MonteCarlo, GridSpec{}, Seed{1}, opts);
  const auto witness = find_grid_witness(region);
  ASSERT_TRUE(witness.has_value());
  const auto samples = region_samples(cc.law, Seed{1}, opts);
  EXPECT_TRUE(mc_membership(samples, cc, witness->first));
  EXPECT_TRUE(mc_membership(samples, cc, witness->second));
  EXPECT_FALSE(mc_membership(samples, cc, witness->midpoint));
  EXPECT_NEAR(witness->midpoint[0], 0.5 * (witness->first[0] + witness->second[0]), 1e-12);
  EXPECT_NEAR(witness->midpoint[1], 0.5 * (witness->first[1] + witness->second[1]), 1e-12);
}

TEST(McMembership, DisagreementHalvesWithFourTimesTheSamples) {
  const auto cc = example(-0.1);
  const GridSpec grid{-1.5, 1.5, -1.5, 1.5, 101, 101};
  const auto exact = emit_region_grid(cc, RegionMethod::Exact, grid, Seed{0});
  auto disagreement = [&](std::size_t samples) {
    double total = 0.0;
    for (std::uint64_t s = 0; s < 20; ++s) {
      RegionOptions opts;
      opts.mc_samples = samples;
      const auto mc = emit_region_grid(cc, RegionMethod::MonteCarlo, grid, Seed{s}, opts);
      for (std::size_t k = 0; k < mc.flags.size(); ++k) total += mc.flags[k] != exact.flags[k];
    }
    return total;
  };
  const double ratio = disagreement(4000) / disagreement(1000);
  EXPECT_GT(ratio, 0.25);
  EXPECT_LT(ratio, 0.75);
}

TEST(MeanField, Variances) {
  for (double sigma : {-0.1, -0.025, 0.025, 0.1}) {
    const auto q = mean_field_approx(unit_gaussian(sigma));
    EXPECT_NEAR(q.covariance().a11, 1.0 - sigma * sigma, 1e-12);
    EXPECT_NEAR(q.covariance().a22, 1.0 - sigma * sigma, 1e-12);
    EXPECT_EQ(q.covariance().a12, 0.0);
    EXPECT_EQ(q.mean(), (Vec2{0.0, 0.0}));
  }
  const auto id = mean_field_approx(unit_gaussian(0.0));
  EXPECT_EQ(id.covariance().a11, 1.0);
  EXPECT_EQ(id.covariance().a22, 1.0);
}

TEST(MeanField, PrecisionIdentity) {
  const BivariateNormal law({0.3, -1.2}, Mat2{2.0, 0.7, 0.7, 0.5});
  const auto q = mean_field_approx(law);
  const double det = 2.0 * 0.5 - 0.49;
  EXPECT_NEAR(q.covariance().a11, 1.0 / (0.5 / det), 1e-12);
  EXPECT_NEAR(q.covariance().a22, 1.0 / (2.0 / det), 1e-12);
  EXPECT_EQ(q.mean(), law.mean());
}

TEST(MeanField, MinimisesKlOverDiagonalGaussians) {
  const auto p = unit_gaussian(-0.1);
  const auto q = mean_field_approx(p);
  const double best = gaussian_kl(q, p);
  // Closed form for KL(N(0, diag(v,v)) || N(0, Sigma)) at v = 1 - sigma^2.
  const double v = 0.99, det = 0.99;
  EXPECT_NEAR(best, 0.5 * (2.0 * v / det - 2.0 + std::log(det) - 2.0 * std::log(v)), 1e-12);
  Rng rng(Seed{3});
  for (int k = 0; k < 100; ++k) {
    const double v1 = 0.2 + 1.8 * rng.uniform();
    const double v2 = 0.2 + 1.8 * rng.uniform();
    const Vec2 m{0.3 * (rng.uniform() - 0.5), 0.3 * (rng.uniform() - 0.5)};
    EXPECT_LE(best, gaussian_kl(BivariateNormal(m, Mat2{v1, 0, 0, v2}), p));
  }
}

TEST(Region, VbIsConvex) {
  for (double sigma : {-0.1, -0.025, 0.025, 0.1}) {
    const auto cc = example(sigma);
    const auto vb = emit_region_grid(cc, RegionMethod::VariationalBayes, GridSpec{}, Seed{0});
    EXPECT_FALSE(find_grid_witness(vb).has_value());
    const LinearCC vb_cc{mean_field_approx(cc.law), 1.0, 0.9};
    EXPECT_EQ(midpoint_violations(vb, [&](const Vec2& x) { return exact_membership(vb_cc, x); }, 10'000, Seed{5}), 0u);
  }
}

TEST(Region, ExactIsConvex) {
  const auto cc = example(0.1);
  const auto ex = emit_region_grid(cc, RegionMethod::Exact, GridSpec{-2, 2, -2, 2, 201, 201}, Seed{0});
  EXPECT_EQ(midpoint_violations(ex, [&](const Vec2& x) { return exact_membership(cc, x); }, 10'000, Seed{6}), 0u);
}

TEST(Region, VbLeavesExactRegionUnderPositiveCorrelation) {
  const GridSpec fine{-1.5, 1.5, -1.5, 1.5, 301, 301};
  for (double sigma : {0.025, 0.1}) {
    const auto cc = example(sigma);
    const auto vb = emit_region_grid(cc, RegionMethod::VariationalBayes, fine, Seed{0});
    const auto ex = emit_region_grid(cc, RegionMethod::Exact, fine, Seed{0});
    std::size_t outside = 0;
    for (std::size_t k = 0; k < vb.flags.size(); ++k) outside += vb.flags[k] && !ex.flags[k];
    EXPECT_GT(outside, 0u) << sigma;
  }
}

TEST(Region, ResolutionAndDeterminism) {
  const auto cc = example(-0.1);
  const GridSpec two{-1, 1, -1, 1, 2, 2};
  EXPECT_EQ(emit_region_grid(cc, RegionMethod::Exact, two, Seed{0}).flags.size(), 4u);
  EXPECT_THROW(emit_region_grid(cc, RegionMethod::Exact, GridSpec{-1, 1, -1, 1, 1, 5}, Seed{0}), DomainError);
  RegionOptions opts;
  opts.mc_samples = 200;
  EXPECT_EQ(emit_region_grid(cc, RegionMethod::MonteCarlo, GridSpec{}, Seed{9}, opts).flags,
            emit_region_grid(cc, RegionMethod::MonteCarlo, GridSpec{}, Seed{9}, opts).flags);
  opts.metropolis = true;
  EXPECT_EQ(region_samples(cc.law, Seed{2}, opts).size(), 200u);
}

TEST(Region, MethodNames) {
  for (auto m : {RegionMethod::Exact, RegionMethod::MonteCarlo, RegionMethod::VariationalBayes})
    EXPECT_EQ(parse_region_method(to_string(m)), m);
  EXPECT_THROW(parse_region_method("grid"), ConfigError);
}

} // namespace
} // namespace bjcc
