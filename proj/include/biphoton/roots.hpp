#pragma once

#include <cmath>
#include <functional>
#include <limits>

namespace biphoton {

struct Bracket {
  double lo;
  double hi;
};

struct RootResult {
  double root = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
  bool bracketed = false;
  double f_lo = 0.0;  // mismatch at the original bracket ends
  double f_hi = 0.0;
};

// Bisection safeguarded secant iteration on a sign-changing bracket. A secant
// step is taken whenever it lands strictly inside the current bracket and at
// least halves it compared with the previous iteration; otherwise the
// bracket is bisected. Stops when the bracket width drops below
// rel_tol * |x| (plus a tiny absolute floor).
RootResult find_root_bracketed(const std::function<double(double)>& f, Bracket bracket,
                               double rel_tol = 1e-12, int max_iterations = 200);

}  // namespace biphoton
