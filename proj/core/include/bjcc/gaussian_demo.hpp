#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "bjcc/distributions.hpp"
#include "bjcc/rng.hpp"

namespace bjcc {

// Feasible set {x : P(xi^T x <= threshold) >= beta}, xi ~ law.
struct LinearCC {
  BivariateNormal law;
  double threshold = 1.0;
  double beta = 0.9;
};

// Zero mean, unit variances and covariance sigma.
BivariateNormal unit_gaussian(double sigma);

bool exact_membership(const LinearCC& cc, const Vec2& x);
bool mc_membership(std::span<const Vec2> samples, const LinearCC& cc, const Vec2& x);

// KL(q || p)-optimal factorised Gaussian: same mean, variances 1 / (Sigma^-1)_ii.
BivariateNormal mean_field_approx(const BivariateNormal& law);

// KL(q || p) between bivariate normals.
double gaussian_kl(const BivariateNormal& q, const BivariateNormal& p);

enum class RegionMethod { Exact, MonteCarlo, VariationalBayes };

RegionMethod parse_region_method(std::string_view name);
std::string_view to_string(RegionMethod method);

struct GridSpec {
  double x1_min = -10.0;
  double x1_max = 10.0;
  double x2_min = -10.0;
  double x2_max = 10.0;
  std::size_t n1 = 201;
  std::size_t n2 = 201;

  double x1(std::size_t i) const;
  double x2(std::size_t j) const;
};

struct RegionOptions {
  std::size_t mc_samples = 5000;
  // Draw the Monte-Carlo cloud with a random-walk Metropolis chain instead of
  // exact Gaussian sampling.
  bool metropolis = false;
  std::size_t metropolis_burn_in = 3000;
  double metropolis_step = 1.0;
};

// Flags in row-major order: row j runs over x2, column i over x1.
struct RegionGrid {
  GridSpec grid;
  std::vector<std::uint8_t> flags;

  bool at(std::size_t i, std::size_t j) const { return flags[j * grid.n1 + i] != 0; }
};

// Draws used by the Monte-Carlo region; deterministic in the seed.
std::vector<Vec2> region_samples(const BivariateNormal& law, Seed seed, const RegionOptions& opts);

RegionGrid emit_region_grid(const LinearCC& cc, RegionMethod method, const GridSpec& grid, Seed seed,
                            const RegionOptions& opts = {});

// CSV with header `x1,x2,feasible`.
void write_region_csv(const RegionGrid& region, const std::filesystem::path& path);

using Membership = std::function<bool(const Vec2&)>;

struct ConvexityWitness {
  Vec2 first;
  Vec2 second;
  Vec2 midpoint;
};

// Scans every row, column and diagonal of the grid for two feasible points
// whose on-grid midpoint is infeasible.
std::optional<ConvexityWitness> find_grid_witness(const RegionGrid& region);

// Draws `pairs` random feasible pairs from the grid's feasible cells and
// evaluates `member` at each continuous midpoint; returns the violation count.
std::size_t midpoint_violations(const RegionGrid& region, const Membership& member, std::size_t pairs, Seed seed);

} // namespace bjcc
