#include "bjcc/gaussian_demo.hpp"

#include <cmath>
#include <string>

#include "bjcc/csv.hpp"
#include "bjcc/errors.hpp"
#include "bjcc/special_math.hpp"

namespace bjcc {

BivariateNormal unit_gaussian(double sigma) { return BivariateNormal({0.0, 0.0}, Mat2{1.0, sigma, sigma, 1.0}); }

bool exact_membership(const LinearCC& cc, const Vec2& x) {
  const auto& m = cc.law.mean();
  const double spread = std::sqrt(cc.law.covariance().quad_form(x));
  return m[0] * x[0] + m[1] * x[1] + special::std_normal_quantile(cc.beta) * spread <= cc.threshold;
}

bool mc_membership(std::span<const Vec2> samples, const LinearCC& cc, const Vec2& x) {
  if (samples.empty()) throw DomainError("mc_membership: no samples");
  std::size_t hits = 0;
  for (const auto& xi : samples) hits += (xi[0] * x[0] + xi[1] * x[1] <= cc.threshold) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(samples.size()) >= cc.beta;
}

BivariateNormal mean_field_approx(const BivariateNormal& law) {
  const Mat2 precision = law.covariance().inverse();
  return BivariateNormal(law.mean(), Mat2{1.0 / precision.a11, 0.0, 0.0, 1.0 / precision.a22});
}

double gaussian_kl(const BivariateNormal& q, const BivariateNormal& p) {
  const Mat2 pinv = p.covariance().inverse();
  const Mat2& sq = q.covariance();
  const double trace = pinv.a11 * sq.a11 + pinv.a12 * sq.a21 + pinv.a21 * sq.a12 + pinv.a22 * sq.a22;
  const Vec2 d{p.mean()[0] - q.mean()[0], p.mean()[1] - q.mean()[1]};
  return 0.5 * (trace + pinv.quad_form(d) - 2.0 + std::log(p.covariance().det() / sq.det()));
}

RegionMethod parse_region_method(std::string_view name) {
  if (name == "exact") return RegionMethod::Exact;
  if (name == "mc") return RegionMethod::MonteCarlo;
  if (name == "vb") return RegionMethod::VariationalBayes;
  throw ConfigError("unknown region method '" + std::string(name) + "' (expected exact|mc|vb)");
}

std::string_view to_string(RegionMethod method) {
  switch (method) {
  case RegionMethod::Exact: return "exact";
  case RegionMethod::MonteCarlo: return "mc";
  case RegionMethod::VariationalBayes: return "vb";
  }
  return "exact";
}

double GridSpec::x1(std::size_t i) const {
  return x1_min + (x1_max - x1_min) * static_cast<double>(i) / static_cast<double>(n1 - 1);
}

double GridSpec::x2(std::size_t j) const {
  return x2_min + (x2_max - x2_min) * static_cast<double>(j) / static_cast<double>(n2 - 1);
}

std::vector<Vec2> region_samples(const BivariateNormal& law, Seed seed, const RegionOptions& opts) {
  if (opts.mc_samples == 0) throw DomainError("region_samples: mc_samples must be at least 1");
  if (!opts.metropolis) return sample_bivariate_normal(law, seed, opts.mc_samples);

  const Mat2 precision = law.covariance().inverse();
  const auto& m = law.mean();
  auto log_density = [&](const Vec2& x) { return -0.5 * precision.quad_form({x[0] - m[0], x[1] - m[1]}); };
  Rng rng(seed);
  Vec2 x = m;
  double current = log_density(x);
  std::vector<Vec2> out;
  out.reserve(opts.mc_samples);
  const std::size_t total = opts.metropolis_burn_in + opts.mc_samples;
  for (std::size_t i = 0; i < total; ++i) {
    const Vec2 y{x[0] + opts.metropolis_step * rng.normal(), x[1] + opts.metropolis_step * rng.normal()};
    const double proposed = log_density(y);
    if (std::log(rng.uniform()) < proposed - current) {
      x = y;
      current = proposed;
    }
    if (i >= opts.metropolis_burn_in) out.push_back(x);
  }
  return out;
}

RegionGrid emit_region_grid(const LinearCC& cc, RegionMethod method, const GridSpec& grid, Seed seed,
                            const RegionOptions& opts) {
  if (grid.n1 < 2 || grid.n2 < 2) throw DomainError("emit_region_grid: resolution must be at least 2 per axis");
  RegionGrid out{grid, std::vector<std::uint8_t>(grid.n1 * grid.n2, 0)};

  Membership member;
  std::vector<Vec2> samples;
  switch (method) {
  case RegionMethod::Exact: member = [&](const Vec2& x) { return exact_membership(cc, x); }; break;
  case RegionMethod::VariationalBayes: {
    const LinearCC vb{mean_field_approx(cc.law), cc.threshold, cc.beta};
    member = [vb](const Vec2& x) { return exact_membership(vb, x); };
    break;
  }
  case RegionMethod::MonteCarlo:
    samples = region_samples(cc.law, seed, opts);
    member = [&](const Vec2& x) { return mc_membership(samples, cc, x); };
    break;
  }

  for (std::size_t j = 0; j < grid.n2; ++j)
    for (std::size_t i = 0; i < grid.n1; ++i) out.flags[j * grid.n1 + i] = member({grid.x1(i), grid.x2(j)}) ? 1 : 0;
  return out;
}

void write_region_csv(const RegionGrid& region, const std::filesystem::path& path) {
  std::string out = "x1,x2,feasible\n";
  const auto& g = region.grid;
  for (std::size_t j = 0; j < g.n2; ++j) {
    for (std::size_t i = 0; i < g.n1; ++i) {
      out += csv::format_double(g.x1(i));
      out += ',';
      out += csv::format_double(g.x2(j));
      out += region.at(i, j) ? ",1\n" : ",0\n";
    }
  }
  csv::write_text(path, out);
}

std::optional<ConvexityWitness> find_grid_witness(const RegionGrid& region) {
  const auto& g = region.grid;
  const long n1 = static_cast<long>(g.n1);
  const long n2 = static_cast<long>(g.n2);
  auto feasible = [&](long i, long j) {
    return i >= 0 && j >= 0 && i < n1 && j < n2 && region.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  };
  auto point = [&](long i, long j) { return Vec2{g.x1(static_cast<std::size_t>(i)), g.x2(static_cast<std::size_t>(j))}; };

  // Along each direction, an infeasible cell strictly between two feasible
  // cells on the same line is a witness; pick the endpoints symmetric about it.
  const long dirs[4][2] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};
  for (const auto& d : dirs) {
    for (long j = 0; j < n2; ++j) {
      for (long i = 0; i < n1; ++i) {
        if (feasible(i, j)) continue;
        for (long k = 1;; ++k) {
          const long ia = i - k * d[0], ja = j - k * d[1];
          const long ib = i + k * d[0], jb = j + k * d[1];
          const bool in_a = ia >= 0 && ja >= 0 && ia < n1 && ja < n2;
          const bool in_b = ib >= 0 && jb >= 0 && ib < n1 && jb < n2;
          if (!in_a || !in_b) break;
          if (feasible(ia, ja) && feasible(ib, jb)) return ConvexityWitness{point(ia, ja), point(ib, jb), point(i, j)};
        }
      }
    }
  }
  return std::nullopt;
}

std::size_t midpoint_violations(const RegionGrid& region, const Membership& member, std::size_t pairs, Seed seed) {
  std::vector<Vec2> feasible;
  const auto& g = region.grid;
  for (std::size_t j = 0; j < g.n2; ++j)
    for (std::size_t i = 0; i < g.n1; ++i)
      if (region.at(i, j)) feasible.push_back({g.x1(i), g.x2(j)});
  if (feasible.empty()) return 0;
  Rng rng(seed);
  std::size_t violations = 0;
  const auto count = static_cast<double>(feasible.size());
  for (std::size_t k = 0; k < pairs; ++k) {
    const auto& a = feasible[static_cast<std::size_t>(rng.uniform() * count)];
    const auto& b = feasible[static_cast<std::size_t>(rng.uniform() * count)];
    if (!member({0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])})) ++violations;
  }
  return violations;
}

} // namespace bjcc
