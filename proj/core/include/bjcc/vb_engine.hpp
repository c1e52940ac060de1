#pragma once

#include <cstddef>
#include <vector>

#include "bjcc/distributions.hpp"
#include "bjcc/queue_model.hpp"

namespace bjcc {

struct PriorSpec {
  InvGammaLaw prior_lambda{1.0, 1.0};
  InvGammaLaw prior_mu{1.0, 1.0};
};

// Mean-field posterior q(lambda, mu) = Gamma(lambda; a_q, b_q) Gamma(mu; a_s, b_s).
struct ProductGammaPosterior {
  GammaLaw q_lambda;
  GammaLaw q_mu;
};

struct VbOptions {
  double gradient_tolerance = 1e-8;
  int max_iterations = 500;
  // Shapes are kept above 1 + shape_margin so E_q[1/lambda] stays finite.
  double shape_margin = 1e-6;
};

struct ElboReport {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  double gradient_norm = 0.0;
  // Total ELBO after every accepted optimizer step, starting point first.
  std::vector<double> trace;
};

struct VbFit {
  ProductGammaPosterior posterior;
  ElboReport report;
};

enum class VbStart { MleMatched, PriorMatched, Wide };

// ELBO contribution of one rate parameter: data block (n, sum), inverse-gamma
// prior and Gamma(shape, rate) factor. Throws DomainError if shape <= 1.
double elbo_block(std::size_t n, double sum, const InvGammaLaw& prior, const GammaLaw& q);

// E_q[log p(X | lambda, mu)] + E_q[log prior] + H(q), summed over both blocks.
double elbo(const SuffStats& stats, const PriorSpec& prior, const ProductGammaPosterior& q);

// Best of the three deterministic starts.
VbFit fit_vb(const SuffStats& stats, const PriorSpec& prior, const VbOptions& opts = {});

// Single quasi-Newton run from one start.
VbFit fit_vb_from(const SuffStats& stats, const PriorSpec& prior, VbStart start, const VbOptions& opts = {});

// Gamma(n, n / anchor.lambda0) x Gamma(n, n / anchor.mu0): mean equal to the
// anchor, variance anchor^2 / n. Requires n >= 2.
ProductGammaPosterior lemma_baseline(std::size_t n, const TrueParams& anchor);

// Terms of the bound KL(Q_n || prior) + E_{Q_n}[KL(P0^n || P^n)] <= C9 log n
// for the baseline sequence at the true parameters.
struct BaselineBound {
  double kl_to_prior = 0.0;
  double expected_data_kl = 0.0;
  double c9 = 0.0;
  double total() const { return kl_to_prior + expected_data_kl; }
  double bound(std::size_t n) const;
};

BaselineBound baseline_bound(std::size_t n, const TrueParams& truth, const PriorSpec& prior);

} // namespace bjcc
