#include "bjcc/erlang.hpp"

#include <cmath>
#include <string>

#include "bjcc/errors.hpp"

namespace bjcc {

double erlang_c_delay(double r, int c) {
  if (c < 1) throw DomainError("erlang_c_delay: c must be at least 1");
  if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("erlang_c_delay: offered load must be positive");
  if (r >= static_cast<double>(c))
    throw InstabilityError("erlang_c_delay: offered load " + std::to_string(r) + " >= " + std::to_string(c) +
                           " servers");
  if (c == 1) return r; // M/M/1: P(wait > 0) = rho
  double b = 1.0;
  for (int k = 1; k <= c; ++k) b = r * b / (static_cast<double>(k) + r * b);
  const double rho = r / static_cast<double>(c);
  return b / (1.0 - rho * (1.0 - b));
}

double max_load_for_target(int c, double alpha) {
  if (c < 1) throw DomainError("max_load_for_target: c must be at least 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("max_load_for_target: alpha must lie in (0, 1)");
  double lo = 0.0;
  double hi = static_cast<double>(c);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (erlang_c_delay(mid, c) <= alpha) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

} // namespace bjcc
