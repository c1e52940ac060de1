#include "bjcc/distributions.hpp"

#include <cmath>

#include "bjcc/errors.hpp"
#include "bjcc/special_math.hpp"

namespace bjcc {

namespace {

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

void require_count(std::size_t count) {
  if (count == 0) throw DomainError("sample count must be at least 1");
}

} // namespace

Mat2 Mat2::inverse() const {
  const double d = det();
  if (d == 0.0 || !std::isfinite(d)) throw DomainError("Mat2::inverse: singular matrix");
  return Mat2{a22 / d, -a12 / d, -a21 / d, a11 / d};
}

double Mat2::quad_form(const Vec2& x) const {
  return a11 * x[0] * x[0] + (a12 + a21) * x[0] * x[1] + a22 * x[1] * x[1];
}

GammaLaw::GammaLaw(double shape, double rate) : shape_(shape), rate_(rate) {
  if (!positive(shape) || !positive(rate)) throw DomainError("GammaLaw: shape and rate must be positive");
}

InvGammaLaw::InvGammaLaw(double shape, double scale) : shape_(shape), scale_(scale) {
  if (!positive(shape) || !positive(scale)) throw DomainError("InvGammaLaw: shape and scale must be positive");
}

BivariateNormal::BivariateNormal(Vec2 mean, Mat2 covariance) : mean_(mean), cov_(covariance), chol_{} {
  if (!std::isfinite(mean[0]) || !std::isfinite(mean[1])) throw DomainError("BivariateNormal: mean must be finite");
  if (cov_.a12 != cov_.a21) throw DomainError("BivariateNormal: covariance must be symmetric");
  if (!(cov_.a11 > 0.0) || !(cov_.det() > 0.0) || !std::isfinite(cov_.det()))
    throw DomainError("BivariateNormal: covariance must be positive definite");
  const double l11 = std::sqrt(cov_.a11);
  const double l21 = cov_.a21 / l11;
  const double l22 = std::sqrt(cov_.a22 - l21 * l21);
  chol_ = {l11, l21, l22};
}

double gamma_logpdf(const GammaLaw& law, double x) {
  if (!positive(x)) throw DomainError("gamma_logpdf: x must be positive");
  const double a = law.shape();
  const double b = law.rate();
  return a * std::log(b) - special::log_gamma(a) + (a - 1.0) * std::log(x) - b * x;
}

double gamma_cdf(const GammaLaw& law, double x) {
  if (std::isnan(x) || x < 0.0) throw DomainError("gamma_cdf: x must be nonnegative");
  return special::reg_lower_incomplete_gamma(law.shape(), law.rate() * x);
}

double invgamma_logpdf(const InvGammaLaw& law, double x) {
  if (!positive(x)) throw DomainError("invgamma_logpdf: x must be positive");
  const double a = law.shape();
  const double b = law.scale();
  return a * std::log(b) - special::log_gamma(a) - (a + 1.0) * std::log(x) - b / x;
}

double invgamma_cdf(const InvGammaLaw& law, double x) {
  if (std::isnan(x) || x < 0.0) throw DomainError("invgamma_cdf: x must be nonnegative");
  if (x == 0.0) return 0.0;
  return 1.0 - special::reg_lower_incomplete_gamma(law.shape(), law.scale() / x);
}

double exponential_logpdf(double rate, double x) {
  if (!positive(rate) || !positive(x)) throw DomainError("exponential_logpdf: rate and x must be positive");
  return std::log(rate) - rate * x;
}

double draw_gamma(const GammaLaw& law, Rng& rng) {
  // Shape boost: Gamma(a) = Gamma(a + 1) * U^(1/a) for a < 1.
  const double a = law.shape();
  const double boosted = a < 1.0 ? a + 1.0 : a;
  const double d = boosted - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  double draw = 0.0;
  for (;;) {
    double z = 0.0;
    double v = 0.0;
    do {
      z = rng.normal();
      v = 1.0 + c * z;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    const double z2 = z * z;
    if (u < 1.0 - 0.0331 * z2 * z2 || std::log(u) < 0.5 * z2 + d * (1.0 - v + std::log(v))) {
      draw = d * v;
      break;
    }
  }
  if (a < 1.0) draw *= std::pow(rng.uniform(), 1.0 / a);
  return draw / law.rate();
}

std::vector<double> sample_gamma(const GammaLaw& law, Seed seed, std::size_t count) {
  require_count(count);
  Rng rng(seed);
  std::vector<double> out(count);
  for (auto& x : out) x = draw_gamma(law, rng);
  return out;
}

std::vector<Vec2> sample_bivariate_normal(const BivariateNormal& law, Seed seed, std::size_t count) {
  require_count(count);
  Rng rng(seed);
  const auto& l = law.cholesky();
  const auto& m = law.mean();
  std::vector<Vec2> out(count);
  for (auto& x : out) {
    const double z1 = rng.normal();
    const double z2 = rng.normal();
    x = {m[0] + l[0] * z1, m[1] + l[1] * z1 + l[2] * z2};
  }
  return out;
}

} // namespace bjcc
