#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace oracle {

double wootters_concurrence(const Eigen::Matrix4cd& rho) {
  Eigen::Matrix2cd sy;
  sy << 0.0, std::complex<double>(0.0, -1.0), std::complex<double>(0.0, 1.0), 0.0;
  Eigen::Matrix4cd flip;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) flip(2 * a + c, 2 * b + d) = sy(a, b) * sy(c, d);
  const Eigen::Matrix4cd tilde = flip * rho.conjugate() * flip;
  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(rho * tilde);
  std::vector<double> lambda;
  for (int i = 0; i < 4; ++i) lambda.push_back(std::sqrt(std::max(0.0, es.eigenvalues()(i).real())));
  std::sort(lambda.begin(), lambda.end(), std::greater<>());
  return std::max(0.0, lambda[0] - lambda[1] - lambda[2] - lambda[3]);
}

std::vector<double> scan_roots(const std::function<double(double)>& f, double lo, double hi, int samples) {
  std::vector<double> roots;
  double x0 = lo;
  double f0 = f(lo);
  for (int i = 1; i <= samples; ++i) {
    const double x1 = lo + (hi - lo) * i / samples;
    const double f1 = f(x1);
    if (f0 == 0.0) roots.push_back(x0);
    else if ((f0 < 0.0) != (f1 < 0.0) && f1 != 0.0) roots.push_back(x0 - f0 * (x1 - x0) / (f1 - f0));
    x0 = x1;
    f0 = f1;
  }
  return roots;
}

double dominant_period(const std::vector<double>& t, const std::vector<double>& v, double min_period,
                       double max_period) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  auto power = [&](double period) {
    const double w = 2.0 * std::numbers::pi / period;
    std::complex<double> acc = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) acc += (v[i] - mean) * std::polar(1.0, -w * t[i]);
    return std::norm(acc);
  };
  const int scan = 4000;
  double best = min_period;
  double best_power = -1.0;
  for (int i = 0; i <= scan; ++i) {
    const double period = min_period + (max_period - min_period) * i / scan;
    const double p = power(period);
    if (p > best_power) {
      best_power = p;
      best = period;
    }
  }
  // Golden-section polish around the scan maximum.
  double a = best - (max_period - min_period) / scan;
  double b = best + (max_period - min_period) / scan;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 100; ++it) {
    const double c = b - g * (b - a);
    const double d = a + g * (b - a);
    if (power(c) > power(d)) b = d;
    else a = c;
  }
  return 0.5 * (a + b);
}

double refined_peak(const std::vector<double>& x, const std::vector<double>& y) {
  const auto i = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
  if (i == 0 || i + 1 == y.size()) return x[i];
  const double l = y[i - 1], c = y[i], r = y[i + 1];
  const double den = l - 2.0 * c + r;
  const double shift = den < 0.0 ? 0.5 * (l - r) / den : 0.0;
  return x[i] + shift * (x[i + 1] - x[i]);
}

}  // namespace oracle
