#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "bjcc/mcmc.hpp"
#include "bjcc/queue_model.hpp"
#include "bjcc/vb_engine.hpp"

namespace bjcc {

struct StaffingSpec {
  double alpha = 0.5; // maximum fraction of customers delayed
  double beta = 0.7;  // confidence level of the chance constraint
  int c_max = 200;    // search cap
};

struct StaffingSolution {
  int c_star = 0;
  double attained_probability = 0.0;
  // Every probed (c, probability), sorted by c.
  std::vector<std::pair<int, double>> probe_trace;
};

// Throws DomainError unless 0 < alpha < 1, 0 < beta < 1 and c_max >= 1.
void validate(const StaffingSpec& spec);

// The joint event {delay(lambda/mu, c) <= alpha} and {c mu > lambda} is
// exactly {lambda/mu <= r*(c, alpha)} because r*(c, alpha) < c.

// P(lambda / mu <= t) for independent Gamma factors: I_u(a_q, a_s) with
// u = k / (1 + k), k = t b_q / b_s.
double ratio_cdf(const ProductGammaPosterior& q, double t);

double constraint_probability_gamma(const ProductGammaPosterior& q, int c, double alpha);

// Sample-average approximation over posterior draws.
double constraint_probability_samples(std::span<const RatePair> samples, int c, double alpha);
double constraint_probability_samples(const McmcChain& chain, int c, double alpha);

// Dirac posterior at (lambda, mu): 1 if the constraints hold, else 0.
double constraint_probability_point(double lambda, double mu, int c, double alpha);

// Smallest c in [1, c_max] with prob(c) >= beta. `prob` must be nondecreasing
// in c. The scan starts at clamp(start_hint, 1, c_max) and moves down while
// the constraint still holds, or up until it first holds. Throws
// InfeasibleError if prob(c_max) < beta and std::logic_error if the probed
// values are not monotone.
StaffingSolution solve_staffing(const std::function<double(int)>& prob, const StaffingSpec& spec,
                                int start_hint = 1);

// Start hint ceil(E[lambda] / E[mu]).
int start_hint(const ProductGammaPosterior& q);
int start_hint(std::span<const RatePair> samples);

// Deterministic staffing optimum at known rates, by brute-force scan of the
// Erlang-C delay over c (unstable c counts as infeasible).
int deterministic_optimum(const TrueParams& params, double alpha, int c_max = 200);

} // namespace bjcc
