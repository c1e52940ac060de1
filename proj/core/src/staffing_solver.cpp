#include "bjcc/staffing_solver.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "bjcc/erlang.hpp"
#include "bjcc/errors.hpp"
#include "bjcc/special_math.hpp"

namespace bjcc {

void validate(const StaffingSpec& spec) {
  if (!(spec.alpha > 0.0 && spec.alpha < 1.0)) throw DomainError("StaffingSpec: alpha must lie in (0, 1)");
  if (!(spec.beta > 0.0 && spec.beta < 1.0)) throw DomainError("StaffingSpec: beta must lie in (0, 1)");
  if (spec.c_max < 1) throw DomainError("StaffingSpec: c_max must be at least 1");
}

double ratio_cdf(const ProductGammaPosterior& q, double t) {
  if (std::isnan(t)) throw DomainError("ratio_cdf: threshold is NaN");
  if (t <= 0.0) return 0.0;
  if (std::isinf(t)) return 1.0;
  const double k = t * q.q_lambda.rate() / q.q_mu.rate();
  const double u = k / (1.0 + k);
  return special::reg_incomplete_beta(q.q_lambda.shape(), q.q_mu.shape(), u);
}

double constraint_probability_gamma(const ProductGammaPosterior& q, int c, double alpha) {
  return ratio_cdf(q, max_load_for_target(c, alpha));
}

double constraint_probability_samples(std::span<const RatePair> samples, int c, double alpha) {
  if (samples.empty()) throw DomainError("constraint_probability_samples: no samples");
  const double t = max_load_for_target(c, alpha);
  const auto hits = std::count_if(samples.begin(), samples.end(),
                                  [t](const RatePair& s) { return s.lambda / s.mu <= t; });
  return static_cast<double>(hits) / static_cast<double>(samples.size());
}

double constraint_probability_samples(const McmcChain& chain, int c, double alpha) {
  return constraint_probability_samples(std::span<const RatePair>(chain.samples), c, alpha);
}

double constraint_probability_point(double lambda, double mu, int c, double alpha) {
  const RatePair p{lambda, mu};
  return constraint_probability_samples(std::span<const RatePair>(&p, 1), c, alpha);
}

StaffingSolution solve_staffing(const std::function<double(int)>& prob, const StaffingSpec& spec, int start_hint) {
  validate(spec);
  std::map<int, double> memo;
  auto probe = [&](int c) {
    auto it = memo.find(c);
    if (it != memo.end()) return it->second;
    const double p = prob(c);
    memo.emplace(c, p);
    return p;
  };

  int c = std::clamp(start_hint, 1, spec.c_max);
  if (probe(c) >= spec.beta) {
    while (c > 1 && probe(c - 1) >= spec.beta) --c;
  } else {
    while (c < spec.c_max && probe(c) < spec.beta) ++c;
    if (probe(c) < spec.beta)
      throw InfeasibleError("solve_staffing: constraint probability " + std::to_string(probe(c)) +
                            " below beta at c_max = " + std::to_string(spec.c_max));
  }

  StaffingSolution out;
  out.c_star = c;
  out.attained_probability = memo.at(c);
  out.probe_trace.assign(memo.begin(), memo.end());
  for (std::size_t i = 1; i < out.probe_trace.size(); ++i) {
    if (out.probe_trace[i].second < out.probe_trace[i - 1].second - 1e-12)
      throw std::logic_error("solve_staffing: constraint probability decreased between c = " +
                             std::to_string(out.probe_trace[i - 1].first) + " and c = " +
                             std::to_string(out.probe_trace[i].first));
  }
  return out;
}

int start_hint(const ProductGammaPosterior& q) {
  return static_cast<int>(std::min(1e6, std::ceil(q.q_lambda.mean() / q.q_mu.mean())));
}

int start_hint(std::span<const RatePair> samples) {
  if (samples.empty()) return 1;
  double sl = 0.0;
  double sm = 0.0;
  for (const auto& s : samples) {
    sl += s.lambda;
    sm += s.mu;
  }
  return static_cast<int>(std::min(1e6, std::ceil(sl / sm)));
}

int deterministic_optimum(const TrueParams& params, double alpha, int c_max) {
  const double r = params.offered_load();
  for (int c = 1; c <= c_max; ++c) {
    if (r >= static_cast<double>(c)) continue;
    if (erlang_c_delay(r, c) <= alpha) return c;
  }
  throw InfeasibleError("deterministic_optimum: no feasible c up to " + std::to_string(c_max));
}

} // namespace bjcc
