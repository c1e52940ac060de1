#pragma once

// Scalar special functions. All functions are pure and throw DomainError
// outside their documented domain instead of returning NaN.

namespace bjcc::special {

// ln Gamma(x), x > 0.
double log_gamma(double x);

// psi(x) = d/dx ln Gamma(x), x > 0.
double digamma(double x);

// psi'(x), x > 0. Used by the variational optimizer gradients.
double trigamma(double x);

// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double reg_lower_incomplete_gamma(double a, double x);

// Regularized incomplete beta I_x(a, b), a, b > 0, x in [0, 1].
double reg_incomplete_beta(double a, double b, double x);

// Standard normal CDF.
double std_normal_cdf(double z);

// Inverse of the standard normal CDF, 0 < p < 1.
double std_normal_quantile(double p);

} // namespace bjcc::special
