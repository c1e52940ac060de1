#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "bjcc/rng.hpp"

namespace bjcc {

using Vec2 = std::array<double, 2>;

// Row-major symmetric 2x2 matrix.
struct Mat2 {
  double a11 = 1.0;
  double a12 = 0.0;
  double a21 = 0.0;
  double a22 = 1.0;

  double det() const { return a11 * a22 - a12 * a21; }
  Mat2 inverse() const;
  double quad_form(const Vec2& x) const;
};

// Gamma law in shape/rate form: density b^a x^(a-1) e^(-b x) / Gamma(a).
// A shape/scale (k, theta) pair converts as a = k, b = 1 / theta.
class GammaLaw {
public:
  GammaLaw(double shape, double rate);

  double shape() const { return shape_; }
  double rate() const { return rate_; }
  double mean() const { return shape_ / rate_; }
  double variance() const { return shape_ / (rate_ * rate_); }

private:
  double shape_;
  double rate_;
};

// Inverse-Gamma law in shape/scale form: density beta^alpha x^(-alpha-1)
// e^(-beta / x) / Gamma(alpha). If X ~ InvGamma(alpha, beta) then
// 1 / X ~ Gamma(shape alpha, rate beta).
class InvGammaLaw {
public:
  InvGammaLaw(double shape, double scale);

  double shape() const { return shape_; }
  double scale() const { return scale_; }
  double mode() const { return scale_ / (shape_ + 1.0); }

private:
  double shape_;
  double scale_;
};

class BivariateNormal {
public:
  // Throws DomainError unless the covariance is symmetric positive definite.
  BivariateNormal(Vec2 mean, Mat2 covariance);

  const Vec2& mean() const { return mean_; }
  const Mat2& covariance() const { return cov_; }
  // Lower Cholesky factor (l11, 0; l21, l22) stored as {l11, l21, l22}.
  const std::array<double, 3>& cholesky() const { return chol_; }

private:
  Vec2 mean_;
  Mat2 cov_;
  std::array<double, 3> chol_;
};

double gamma_logpdf(const GammaLaw& law, double x);
double gamma_cdf(const GammaLaw& law, double x);
double invgamma_logpdf(const InvGammaLaw& law, double x);
double invgamma_cdf(const InvGammaLaw& law, double x);
double exponential_logpdf(double rate, double x);

// Single Marsaglia-Tsang draw from an explicit generator.
double draw_gamma(const GammaLaw& law, Rng& rng);

std::vector<double> sample_gamma(const GammaLaw& law, Seed seed, std::size_t count);
std::vector<Vec2> sample_bivariate_normal(const BivariateNormal& law, Seed seed, std::size_t count);

} // namespace bjcc
