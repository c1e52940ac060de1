#pragma once

namespace bjcc {

// Erlang-C delay probability P(wait > 0) for an M/M/c queue with offered load
// r = lambda / mu. Evaluated through the Erlang-B recursion
//   B(0) = 1,  B(k) = r B(k-1) / (k + r B(k-1)),  C = B(c) / (1 - rho (1 - B(c)))
// so no factorial is ever formed. Throws InstabilityError when r >= c and
// DomainError when r <= 0 or c < 1.
double erlang_c_delay(double r, int c);

// Largest offered load r* in (0, c) with erlang_c_delay(r*, c) <= alpha.
// The delay probability is increasing in r, so erlang_c_delay(r, c) <= alpha
// exactly when r <= r*. Bisection to machine resolution.
double max_load_for_target(int c, double alpha);

} // namespace bjcc
