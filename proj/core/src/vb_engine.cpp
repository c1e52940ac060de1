#include "bjcc/vb_engine.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "bjcc/errors.hpp"
#include "bjcc/special_math.hpp"

namespace bjcc {

namespace {

using special::digamma;
using special::log_gamma;
using special::trigamma;

// One rate parameter's sub-problem in unconstrained coordinates
// u = log(a - 1 - margin), v = log(b).
struct Block {
  double n;
  double sum;
  double prior_shape;
  double prior_scale;
  double margin;

  double shape(double u) const { return 1.0 + margin + std::exp(u); }

  double value(double a, double b) const {
    const double e_log = digamma(a) - std::log(b);
    const double data = n * e_log - (a / b) * sum;
    const double prior = prior_shape * std::log(prior_scale) - log_gamma(prior_shape) -
                         (prior_shape + 1.0) * e_log - prior_scale * b / (a - 1.0);
    const double entropy = a - std::log(b) + log_gamma(a) + (1.0 - a) * digamma(a);
    return data + prior + entropy;
  }

  // Gradient with respect to (u, v).
  std::array<double, 2> gradient(double u, double v) const {
    const double a = shape(u);
    const double b = std::exp(v);
    const double am1 = a - 1.0;
    const double d_a = (n - prior_shape - a) * trigamma(a) + 1.0 - sum / b + prior_scale * b / (am1 * am1);
    const double d_b = (prior_shape - n) / b + sum * a / (b * b) - prior_scale / am1;
    return {d_a * (a - 1.0 - margin), d_b * b};
  }
};

struct Iterate {
  std::array<double, 2> x{};
  double f = 0.0;               // negated ELBO block
  std::array<double, 2> g{};    // gradient of f
  std::array<double, 4> h{};    // inverse Hessian approximation, row-major
  bool done = false;
  bool first_step = true;

  double grad_norm() const { return std::hypot(g[0], g[1]); }
};

Iterate make_iterate(const Block& blk, double a, double b) {
  Iterate it;
  it.x = {std::log(std::max(a - 1.0 - blk.margin, 1e-12)), std::log(b)};
  it.f = -blk.value(blk.shape(it.x[0]), std::exp(it.x[1]));
  const auto g = blk.gradient(it.x[0], it.x[1]);
  it.g = {-g[0], -g[1]};
  it.h = {1.0, 0.0, 0.0, 1.0};
  return it;
}

// One damped BFGS step. Returns false when no acceptable step exists.
bool bfgs_step(const Block& blk, Iterate& it) {
  auto direction = [&] {
    return std::array<double, 2>{-(it.h[0] * it.g[0] + it.h[1] * it.g[1]),
                                 -(it.h[2] * it.g[0] + it.h[3] * it.g[1])};
  };
  auto d = direction();
  double slope = d[0] * it.g[0] + d[1] * it.g[1];
  if (!(slope < 0.0)) {
    it.h = {1.0, 0.0, 0.0, 1.0};
    d = direction();
    slope = d[0] * it.g[0] + d[1] * it.g[1];
  }
  // Log-coordinates: cap the trial move so exp() stays well-scaled.
  const double max_move = std::max(std::abs(d[0]), std::abs(d[1]));
  if (max_move > 2.0) {
    d = {d[0] * 2.0 / max_move, d[1] * 2.0 / max_move};
    slope *= 2.0 / max_move;
  }

  const double noise = 1e-13 * std::max(1.0, std::abs(it.f));
  const double g_norm = it.grad_norm();
  for (double t = 1.0; t > 1e-16; t *= 0.5) {
    const std::array<double, 2> x{it.x[0] + t * d[0], it.x[1] + t * d[1]};
    const double a = blk.shape(x[0]);
    const double b = std::exp(x[1]);
    if (!(a > 1.0) || !std::isfinite(b) || !(b > 0.0)) continue;
    const double f = -blk.value(a, b);
    if (!std::isfinite(f)) continue;
    const auto gp = blk.gradient(x[0], x[1]);
    const std::array<double, 2> g{-gp[0], -gp[1]};
    const bool armijo = f <= it.f + 1e-4 * t * slope;
    // Near the optimum f changes by less than its rounding error; accept a
    // step that stays within that noise and shrinks the gradient.
    const bool flat = f <= it.f + noise && std::hypot(g[0], g[1]) < g_norm;
    if (!armijo && !flat) continue;

    const std::array<double, 2> s{x[0] - it.x[0], x[1] - it.x[1]};
    const std::array<double, 2> y{g[0] - it.g[0], g[1] - it.g[1]};
    const double sy = s[0] * y[0] + s[1] * y[1];
    if (sy > 1e-300) {
      if (it.first_step) {
        const double scale = sy / (y[0] * y[0] + y[1] * y[1]);
        it.h = {scale, 0.0, 0.0, scale};
        it.first_step = false;
      }
      // H+ = (I - rho s y^T) H (I - rho y s^T) + rho s s^T
      const double rho = 1.0 / sy;
      const auto& h = it.h;
      const std::array<double, 2> hy{h[0] * y[0] + h[1] * y[1], h[2] * y[0] + h[3] * y[1]};
      const double yhy = y[0] * hy[0] + y[1] * hy[1];
      const double c = rho * rho * yhy + rho;
      it.h = {h[0] - rho * (hy[0] * s[0] + s[0] * hy[0]) + c * s[0] * s[0],
              h[1] - rho * (hy[0] * s[1] + s[0] * hy[1]) + c * s[0] * s[1],
              h[2] - rho * (hy[1] * s[0] + s[1] * hy[0]) + c * s[1] * s[0],
              h[3] - rho * (hy[1] * s[1] + s[1] * hy[1]) + c * s[1] * s[1]};
    }
    it.x = x;
    it.f = f;
    it.g = g;
    return true;
  }
  return false;
}

std::array<double, 2> start_point(VbStart start, std::size_t n, double sum, const InvGammaLaw& prior) {
  const double nd = static_cast<double>(n);
  const double mle = nd / sum;
  switch (start) {
  case VbStart::MleMatched: return {nd + 1.5, (nd + 1.5) / mle};
  case VbStart::PriorMatched: {
    // Mean at the prior mode with a diffuse shape.
    const double a = prior.shape() + 2.0;
    return {a, a / prior.mode()};
  }
  case VbStart::Wide: return {2.0, 2.0 / mle};
  }
  return {nd + 1.5, (nd + 1.5) / mle};
}

} // namespace

double elbo_block(std::size_t n, double sum, const InvGammaLaw& prior, const GammaLaw& q) {
  if (!(q.shape() > 1.0)) throw DomainError("elbo: variational shape must exceed 1");
  const Block blk{static_cast<double>(n), sum, prior.shape(), prior.scale(), 0.0};
  return blk.value(q.shape(), q.rate());
}

double elbo(const SuffStats& stats, const PriorSpec& prior, const ProductGammaPosterior& q) {
  return elbo_block(stats.n, stats.sum_interarrival, prior.prior_lambda, q.q_lambda) +
         elbo_block(stats.n, stats.sum_service, prior.prior_mu, q.q_mu);
}

VbFit fit_vb_from(const SuffStats& stats, const PriorSpec& prior, VbStart start, const VbOptions& opts) {
  validate(stats);
  const std::array<Block, 2> blocks{
      Block{static_cast<double>(stats.n), stats.sum_interarrival, prior.prior_lambda.shape(),
            prior.prior_lambda.scale(), opts.shape_margin},
      Block{static_cast<double>(stats.n), stats.sum_service, prior.prior_mu.shape(), prior.prior_mu.scale(),
            opts.shape_margin}};
  const auto s0 = start_point(start, stats.n, stats.sum_interarrival, prior.prior_lambda);
  const auto s1 = start_point(start, stats.n, stats.sum_service, prior.prior_mu);
  std::array<Iterate, 2> its{make_iterate(blocks[0], s0[0], s0[1]), make_iterate(blocks[1], s1[0], s1[1])};

  ElboReport report;
  auto total = [&] { return -(its[0].f + its[1].f); };
  report.trace.push_back(total());

  int iter = 0;
  for (; iter < opts.max_iterations; ++iter) {
    bool active = false;
    for (std::size_t k = 0; k < 2; ++k) {
      auto& it = its[k];
      if (it.done) continue;
      if (it.grad_norm() <= opts.gradient_tolerance || !bfgs_step(blocks[k], it)) {
        it.done = true;
        continue;
      }
      active = true;
    }
    if (!active) break;
    report.trace.push_back(total());
  }

  report.iterations = iter;
  report.value = total();
  report.gradient_norm = std::sqrt(its[0].grad_norm() * its[0].grad_norm() + its[1].grad_norm() * its[1].grad_norm());
  report.converged = its[0].grad_norm() <= opts.gradient_tolerance && its[1].grad_norm() <= opts.gradient_tolerance;

  auto law = [&](std::size_t k) { return GammaLaw(blocks[k].shape(its[k].x[0]), std::exp(its[k].x[1])); };
  return VbFit{ProductGammaPosterior{law(0), law(1)}, std::move(report)};
}

VbFit fit_vb(const SuffStats& stats, const PriorSpec& prior, const VbOptions& opts) {
  VbFit best = fit_vb_from(stats, prior, VbStart::MleMatched, opts);
  for (VbStart start : {VbStart::PriorMatched, VbStart::Wide}) {
    VbFit cand = fit_vb_from(stats, prior, start, opts);
    const bool better = cand.report.converged == best.report.converged
                            ? cand.report.value > best.report.value
                            : cand.report.converged;
    if (better) best = std::move(cand);
  }
  return best;
}

ProductGammaPosterior lemma_baseline(std::size_t n, const TrueParams& anchor) {
  if (n < 2) throw DomainError("lemma_baseline: n must be at least 2");
  const double nd = static_cast<double>(n);
  return ProductGammaPosterior{GammaLaw(nd, nd / anchor.lambda0), GammaLaw(nd, nd / anchor.mu0)};
}

namespace {

double gamma_entropy(const GammaLaw& q) {
  const double a = q.shape();
  return a - std::log(q.rate()) + log_gamma(a) + (1.0 - a) * digamma(a);
}

double expected_log_invgamma(const GammaLaw& q, const InvGammaLaw& prior) {
  const double a = q.shape();
  const double e_log = digamma(a) - std::log(q.rate());
  return prior.shape() * std::log(prior.scale()) - log_gamma(prior.shape()) - (prior.shape() + 1.0) * e_log -
         prior.scale() * q.rate() / (a - 1.0);
}

// n * E_q[KL(Exp(rate0) || Exp(rate))].
double expected_exponential_kl(std::size_t n, double rate0, const GammaLaw& q) {
  const double e_log = digamma(q.shape()) - std::log(q.rate());
  return static_cast<double>(n) * (std::log(rate0) - e_log + q.mean() / rate0 - 1.0);
}

double c9_term(double rate0, const InvGammaLaw& prior) {
  const double a = prior.shape();
  const double b = prior.scale();
  const double v = 2.0 + 2.0 * b / rate0 - 0.5 * std::log(2.0 * std::numbers::pi) -
                   (a * std::log(b) - log_gamma(a)) + a * std::log(rate0);
  return std::max(0.0, v);
}

} // namespace

double BaselineBound::bound(std::size_t n) const { return c9 * std::log(static_cast<double>(n)); }

BaselineBound baseline_bound(std::size_t n, const TrueParams& truth, const PriorSpec& prior) {
  const auto q = lemma_baseline(n, truth);
  BaselineBound out;
  out.kl_to_prior = -gamma_entropy(q.q_lambda) - expected_log_invgamma(q.q_lambda, prior.prior_lambda) -
                    gamma_entropy(q.q_mu) - expected_log_invgamma(q.q_mu, prior.prior_mu);
  out.expected_data_kl =
      expected_exponential_kl(n, truth.lambda0, q.q_lambda) + expected_exponential_kl(n, truth.mu0, q.q_mu);
  out.c9 = 1.0 + c9_term(truth.lambda0, prior.prior_lambda) + c9_term(truth.mu0, prior.prior_mu);
  return out;
}

} // namespace bjcc
