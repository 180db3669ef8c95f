#include "biphoton/roots.hpp"

#include <algorithm>

namespace biphoton {

RootResult find_root_bracketed(const std::function<double(double)>& f, Bracket bracket,
                               double rel_tol, int max_iterations) {
  RootResult out;
  double a = bracket.lo;
  double b = bracket.hi;
  double fa = f(a);
  double fb = f(b);
  out.f_lo = fa;
  out.f_hi = fb;

  if (fa == 0.0) {
    out.root = a;
    out.bracketed = true;
    return out;
  }
  if (fb == 0.0) {
    out.root = b;
    out.bracketed = true;
    return out;
  }
  if ((fa < 0.0) == (fb < 0.0)) return out;
  out.bracketed = true;

  double previous_width = std::abs(b - a);
  for (int it = 1; it <= max_iterations; ++it) {
    out.iterations = it;
    const double width = std::abs(b - a);
    const double scale = std::max(std::abs(a), std::abs(b));
    if (width <= rel_tol * scale + std::numeric_limits<double>::min()) break;

    double x = b - fb * (b - a) / (fb - fa);
    const double lo = std::min(a, b);
    const double hi = std::max(a, b);
    const bool secant_ok = std::isfinite(x) && x > lo && x < hi && width <= 0.5 * previous_width;
    if (!secant_ok) x = 0.5 * (a + b);
    previous_width = width;

    const double fx = f(x);
    if (fx == 0.0) {
      a = b = x;
      break;
    }
    if ((fx < 0.0) == (fa < 0.0)) {
      a = x;
      fa = fx;
    } else {
      b = x;
      fb = fx;
    }
  }

  out.root = std::abs(fa) < std::abs(fb) ? a : b;
  return out;
}

}  // namespace biphoton
