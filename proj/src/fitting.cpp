#include "biphoton/fitting.hpp"

#include <complex>
#include <limits>
#include <sstream>

#include "biphoton/units.hpp"

namespace biphoton {

namespace {

using Vec5 = Eigen::Matrix<double, kFitParamCount, 1>;
using Mat5 = Eigen::Matrix<double, kFitParamCount, kFitParamCount>;

// Internal units: ps for delays, rad/ps for mu, 1/ps for a.
constexpr std::array<double, kFitParamCount> kToSi = {1.0, units::ps, 1.0 / units::ps, 1.0 / units::ps, 1.0};
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::array<double, kFitParamCount> kLower = {0.0, 1e-9, 0.0, -kInf, -kInf};
constexpr std::array<double, kFitParamCount> kUpper = {1.0, kInf, kInf, kInf, kInf};

struct Prepared {
  Eigen::VectorXd t;
  Eigen::VectorXd y;
  Eigen::VectorXd w;  // 1 / sigma^2
  double scale = 1.0;
  bool weighted = false;
};

Prepared prepare(const Interferogram& data, std::optional<double> count_scale) {
  data.validate();
  const auto n = static_cast<Eigen::Index>(data.size());
  Prepared p;
  p.t.resize(n);
  p.y.resize(n);
  p.w.resize(n);
  if (data.kind == InterferogramKind::Counts) {
    p.scale = count_scale ? *count_scale : estimate_count_scale(data);
    if (!(p.scale > 0.0)) throw Error(ErrorKind::Domain, "fit: count scale must be positive");
    p.weighted = true;
  } else {
    p.weighted = !data.errors.empty();
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    p.t(i) = data.delays[k] / units::ps;
    p.y(i) = data.values[k] / p.scale;
    double sigma = 1.0;
    if (!data.errors.empty()) {
      sigma = data.errors[k] / p.scale;
    } else if (data.kind == InterferogramKind::Counts) {
      sigma = std::sqrt(std::max(data.values[k], 1.0)) / p.scale;
    }
    p.w(i) = 1.0 / (sigma * sigma);
  }
  return p;
}

Vec5 to_internal(const HomFitParams& p) {
  Vec5 x;
  x << p.visibility, p.delta_tau / kToSi[1], p.mu / kToSi[2], p.a / kToSi[3], p.b;
  return x;
}

HomFitParams to_si(const Vec5& x) {
  HomFitParams p;
  p.visibility = x(0);
  p.delta_tau = x(1) * kToSi[1];
  p.mu = x(2) * kToSi[2];
  p.a = x(3) * kToSi[3];
  p.b = x(4);
  return p;
}

void evaluate(const Vec5& x, const Eigen::VectorXd& t, Eigen::VectorXd& f, Eigen::MatrixXd* jac) {
  const double v = x(0), dt = x(1), mu = x(2), a = x(3), b = x(4);
  const Eigen::Index n = t.size();
  f.resize(n);
  if (jac) jac->resize(n, kFitParamCount);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double ti = t(i);
    const double g = std::exp(-ti * ti / (2.0 * dt * dt));
    const double cs = std::cos(mu * ti);
    f(i) = 0.5 * (1.0 - v * g * cs) + a * ti + b;
    if (jac) {
      (*jac)(i, 0) = -0.5 * g * cs;
      (*jac)(i, 1) = -0.5 * v * cs * g * ti * ti / (dt * dt * dt);
      (*jac)(i, 2) = 0.5 * v * g * ti * std::sin(mu * ti);
      (*jac)(i, 3) = ti;
      (*jac)(i, 4) = 1.0;
    }
  }
}

double objective(const Vec5& x, const Prepared& p) {
  Eigen::VectorXd f;
  evaluate(x, p.t, f, nullptr);
  return (p.w.array() * (f - p.y).array().square()).sum();
}

Vec5 project(Vec5 x) {
  for (int k = 0; k < kFitParamCount; ++k) x(k) = std::clamp(x(k), kLower[k], kUpper[k]);
  return x;
}

bool at_lower(const Vec5& x, int k) { return x(k) <= kLower[k]; }
bool at_upper(const Vec5& x, int k) { return x(k) >= kUpper[k]; }

// Inverse of the curvature restricted to `active`; false when singular.
bool restricted_inverse(const Mat5& h, const std::vector<int>& active, Mat5& out) {
  out.setZero();
  const auto m = static_cast<Eigen::Index>(active.size());
  if (m == 0) return true;
  Eigen::MatrixXd sub(m, m);
  Eigen::VectorXd s(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (!(h(active[i], active[i]) > 0.0)) return false;
    s(i) = 1.0 / std::sqrt(h(active[i], active[i]));
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) sub(i, j) = h(active[i], active[j]) * s(i) * s(j);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sub);
  const Eigen::VectorXd ev = eig.eigenvalues();
  if (!(ev.minCoeff() > 1e-12 * ev.maxCoeff())) return false;
  const Eigen::MatrixXd inv =
      eig.eigenvectors() * ev.cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) out(active[i], active[j]) = inv(i, j) * s(i) * s(j);
  }
  return true;
}

// Least-squares line through the points selected by `keep`; returns (intercept, slope).
std::pair<double, double> line_fit(const Eigen::VectorXd& t, const Eigen::VectorXd& y, const std::vector<bool>& keep) {
  double n = 0, st = 0, sy = 0, stt = 0, sty = 0;
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    if (!keep[static_cast<std::size_t>(i)]) continue;
    n += 1;
    st += t(i);
    sy += y(i);
    stt += t(i) * t(i);
    sty += t(i) * y(i);
  }
  if (n == 0) return {0.5, 0.0};
  const double det = n * stt - st * st;
  if (n < 2 || std::abs(det) <= 1e-12 * n * stt) return {sy / n, 0.0};
  const double slope = (n * sty - st * sy) / det;
  return {(sy - slope * st) / n, slope};
}

std::vector<bool> outer_tails(const Eigen::VectorXd& t) {
  const double lo = t(0);
  const double hi = t(t.size() - 1);
  const double edge = 0.2 * (hi - lo);
  std::vector<bool> keep(static_cast<std::size_t>(t.size()));
  for (Eigen::Index i = 0; i < t.size(); ++i) keep[static_cast<std::size_t>(i)] = t(i) <= lo + edge || t(i) >= hi - edge;
  return keep;
}

}  // namespace

const char* fit_param_name(int index) noexcept {
  switch (index) {
    case kFitV: return "V";
    case kFitDeltaTau: return "delta_tau";
    case kFitMu: return "mu";
    case kFitA: return "a";
    case kFitB: return "b";
  }
  return "?";
}

double estimate_count_scale(const Interferogram& data) {
  if (data.size() < 2) throw Error(ErrorKind::InsufficientData, "count scale: need at least two samples");
  const double lo = data.delays.front();
  const double hi = data.delays.back();
  const double edge = 0.2 * (hi - lo);
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.delays[i] <= lo + edge || data.delays[i] >= hi - edge) {
      sum += data.values[i];
      ++n;
    }
  }
  if (n == 0 || !(sum > 0.0)) throw Error(ErrorKind::DegenerateInput, "count scale: tails carry no counts");
  return 2.0 * sum / static_cast<double>(n);
}

InitialGuess initial_guess(const Interferogram& data, std::optional<double> count_scale) {
  if (data.size() < 4) {
    throw Error(ErrorKind::InsufficientData, "initial guess: need at least 4 samples");
  }
  const Prepared p = prepare(data, count_scale);
  const Eigen::Index n = p.t.size();
  const double span = p.t(n - 1) - p.t(0);

  const std::vector<bool> tails = outer_tails(p.t);
  const auto [intercept, slope] = line_fit(p.t, p.y, tails);
  const Eigen::VectorXd baseline = (intercept + slope * p.t.array()).matrix();
  const Eigen::VectorXd d = p.y - baseline;

  double floor = 0.0;
  std::size_t tail_count = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (tails[static_cast<std::size_t>(i)]) {
      floor += d(i) * d(i);
      ++tail_count;
    }
  }
  floor /= static_cast<double>(std::max<std::size_t>(tail_count, 1));

  // d^2 follows exp(-t^2 / dtau^2), a Gaussian of variance dtau^2 / 2.
  double w0 = 0.0, w1 = 0.0, w2 = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double w = std::max(0.0, d(i) * d(i) - floor);
    w0 += w;
    w1 += w * p.t(i);
    w2 += w * p.t(i) * p.t(i);
  }
  double centre = 0.0;
  double dtau = 0.25 * span;
  if (w0 > 0.0) {
    centre = w1 / w0;
    dtau = std::sqrt(2.0 * std::max(w2 / w0 - centre * centre, 0.0));
    if (!(dtau > 0.0)) dtau = 0.25 * span;
  }

  double lo = kInf, hi = -kInf;
  const double core = std::max(0.5 * dtau, 2.0 * span / static_cast<double>(n - 1));
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(p.t(i) - centre) > core) continue;
    const double z = d(i) + 0.5;
    lo = std::min(lo, z);
    hi = std::max(hi, z);
  }
  double visibility = (hi > lo && hi + lo > 0.0) ? (hi - lo) / (hi + lo) : 0.0;

  // Periodogram of the residual, zero-padded fourfold.
  std::vector<double> steps;
  for (Eigen::Index i = 1; i < n; ++i) steps.push_back(p.t(i) - p.t(i - 1));
  std::nth_element(steps.begin(), steps.begin() + static_cast<long>(steps.size() / 2), steps.end());
  const double median_step = steps[steps.size() / 2];
  const double d_omega = kTwoPi / (4.0 * span);
  const auto bins = static_cast<std::size_t>(std::floor(kPi / median_step / d_omega)) + 1;
  std::vector<double> power(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    const double omega = static_cast<double>(k) * d_omega;
    std::complex<double> acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) acc += d(i) * std::polar(1.0, -omega * p.t(i));
    power[k] = std::norm(acc);
  }
  const auto peak = static_cast<std::size_t>(std::max_element(power.begin(), power.end()) - power.begin());
  double mu = static_cast<double>(peak) * d_omega;
  if (peak > 0 && peak + 1 < bins) {
    const double l = power[peak - 1], c = power[peak], r = power[peak + 1];
    const double den = l - 2.0 * c + r;
    if (den < 0.0) mu += 0.5 * (l - r) / den * d_omega;
  }

  // Refine V, a, b by linear least squares at the guessed dtau and mu.
  Eigen::MatrixXd design(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double g = std::exp(-p.t(i) * p.t(i) / (2.0 * dtau * dtau));
    design(i, 0) = -0.5 * g * std::cos(mu * p.t(i));
    design(i, 1) = p.t(i);
    design(i, 2) = 1.0;
  }
  double a = slope;
  double b = intercept - 0.5;
  if (design.col(0).norm() > 1e-12 * std::sqrt(static_cast<double>(n))) {
    const Eigen::Vector3d coef = design.colPivHouseholderQr().solve((p.y.array() - 0.5).matrix());
    if (coef.allFinite()) {
      visibility = coef(0);
      a = coef(1);
      b = coef(2);
    }
  }
  if (!(visibility > 0.0)) visibility = 0.0;
  visibility = std::min(visibility, 1.0);

  InitialGuess guess;
  guess.params = to_si((Vec5() << visibility, dtau, mu, a, b).finished());
  guess.low_frequency = mu < kTwoPi / span;
  return guess;
}

FitResult fit_hom_interferogram(const Interferogram& data, const HomFitParams& init, const FitOptions& options) {
  if (data.size() < 10) {
    std::ostringstream msg;
    msg << "fit: need at least 10 samples, got " << data.size();
    throw Error(ErrorKind::InsufficientData, msg.str());
  }
  const Prepared p = prepare(data, options.count_scale);
  const Eigen::Index n = p.t.size();
  const double span = p.t(n - 1) - p.t(0);

  Vec5 x = to_internal(init);
  for (int k = 0; k < kFitParamCount; ++k) {
    if (!std::isfinite(x(k)) || x(k) < kLower[k] || x(k) > kUpper[k]) {
      std::ostringstream msg;
      msg << "fit: initial " << fit_param_name(k) << " outside its bounds";
      throw Error(ErrorKind::Domain, msg.str());
    }
  }
  if (!options.fixed[kFitMu] && x(kFitMu) > 0.0 && span < kTwoPi / x(kFitMu)) {
    throw Error(ErrorKind::InsufficientData, "fit: delays span less than one beat period");
  }

  FitResult result;
  result.count_scale = p.scale;
  const Eigen::ArrayXd sqrt_w = p.w.array().sqrt();

  Eigen::VectorXd f;
  Eigen::MatrixXd jac;
  double obj = objective(x, p);
  result.objective_history.push_back(obj);
  Vec5 scaling = Vec5::Zero();
  double lambda = 1e-3;
  bool converged = false;
  int iter = 0;
  double grad_norm = kInf;

  for (; iter < options.max_iterations && !converged; ++iter) {
    evaluate(x, p.t, f, &jac);
    const Eigen::MatrixXd jw = jac.array().colwise() * sqrt_w;
    const Eigen::VectorXd rw = ((f - p.y).array() * sqrt_w).matrix();
    const Mat5 h = jw.transpose() * jw;
    const Vec5 g = jw.transpose() * rw;

    std::vector<int> free;
    grad_norm = 0.0;
    for (int k = 0; k < kFitParamCount; ++k) {
      if (options.fixed[k]) continue;
      if ((at_lower(x, k) && g(k) > 0.0) || (at_upper(x, k) && g(k) < 0.0)) continue;
      free.push_back(k);
      grad_norm = std::max(grad_norm, std::abs(g(k)));
    }
    if (grad_norm < options.gradient_tol) {
      converged = true;
      break;
    }

    scaling = scaling.cwiseMax(h.diagonal());
    const double floor = 1e-12 * std::max(scaling.maxCoeff(), 1e-300);
    const auto m = static_cast<Eigen::Index>(free.size());

    bool accepted = false;
    while (!accepted) {
      Eigen::MatrixXd a(m, m);
      Eigen::VectorXd rhs(m);
      for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) a(i, j) = h(free[i], free[j]);
        a(i, i) += lambda * std::max(scaling(free[i]), floor);
        rhs(i) = -g(free[i]);
      }
      const Eigen::VectorXd step = a.ldlt().solve(rhs);
      Vec5 trial = x;
      for (Eigen::Index i = 0; i < m; ++i) trial(free[i]) += step(i);
      trial = project(trial);
      const double trial_obj = step.allFinite() ? objective(trial, p) : kInf;
      const double moved = (trial - x).cwiseAbs().maxCoeff();

      if (trial_obj < obj) {
        const double drop = (obj - trial_obj) / std::max(obj, 1e-300);
        x = trial;
        obj = trial_obj;
        result.objective_history.push_back(obj);
        lambda = std::max(lambda / 3.0, 1e-15);
        accepted = true;
        if (drop < options.objective_rtol) converged = true;
      } else {
        lambda *= 10.0;
        // No decreasing step exists at machine precision: stationary point.
        if (lambda > 1e16 || moved <= 1e-15 * (x.cwiseAbs().maxCoeff() + 1e-15)) {
          converged = true;
          break;
        }
      }
    }
  }

  const HomFitParams best = to_si(x);
  if (!converged) {
    std::ostringstream msg;
    msg << "fit: no convergence after " << options.max_iterations << " iterations (objective " << obj << ")";
    throw FitNonConvergence(msg.str(), best, iter);
  }

  evaluate(x, p.t, f, &jac);
  const Eigen::MatrixXd jw = jac.array().colwise() * sqrt_w;
  const Mat5 h = jw.transpose() * jw;
  const Vec5 g = jw.transpose() * ((f - p.y).array() * sqrt_w).matrix();
  grad_norm = 0.0;
  for (int k = 0; k < kFitParamCount; ++k) {
    if (options.fixed[k]) continue;
    if ((at_lower(x, k) && g(k) > 0.0) || (at_upper(x, k) && g(k) < 0.0)) continue;
    grad_norm = std::max(grad_norm, std::abs(g(k)));
  }

  std::vector<int> active;
  for (int k = 0; k < kFitParamCount; ++k) {
    if (!options.fixed[k]) active.push_back(k);
  }
  const auto dof = static_cast<double>(n) - static_cast<double>(active.size());
  result.reduced_chi2 = dof > 0.0 ? obj / dof : 0.0;

  Mat5 cov;
  if (!restricted_inverse(h, active, cov)) {
    if (options.fixed[kFitV] || x(kFitV) > 1e-9) {
      throw Error(ErrorKind::DegenerateFit, "fit: singular curvature at the optimum");
    }
    std::vector<int> identified;
    for (int k : active) {
      if (k == kFitDeltaTau || k == kFitMu) {
        result.unidentified.push_back(fit_param_name(k));
      } else {
        identified.push_back(k);
      }
    }
    result.degenerate = true;
    if (!restricted_inverse(h, identified, cov)) {
      throw Error(ErrorKind::DegenerateFit, "fit: singular curvature at the optimum");
    }
  }
  if (!p.weighted) cov *= result.reduced_chi2;

  if (!result.degenerate && !options.fixed[kFitV] && x(kFitV) < 2.0 * std::sqrt(std::max(cov(0, 0), 0.0))) {
    result.degenerate = true;
    for (int k : {kFitDeltaTau, kFitMu}) {
      if (!options.fixed[k]) result.unidentified.push_back(fit_param_name(k));
    }
  }

  for (int i = 0; i < kFitParamCount; ++i) {
    for (int j = 0; j < kFitParamCount; ++j) result.covariance(i, j) = cov(i, j) * kToSi[i] * kToSi[j];
  }
  result.params = best;
  result.iterations = iter;
  result.converged = true;
  result.gradient_norm = grad_norm;
  result.rms_residual = std::sqrt((f - p.y).squaredNorm() / static_cast<double>(n));
  return result;
}

}  // namespace biphoton
