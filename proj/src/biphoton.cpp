#include "biphoton/biphoton.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "biphoton/errors.hpp"
#include "biphoton/parallel.hpp"
#include "biphoton/units.hpp"

namespace biphoton {

namespace {

constexpr std::size_t kMinGridPoints = 64;
constexpr double kMaxNormError = 1e-6;

double spectral_factor(double omega_plus, const SeparableJsa& p) {
  const double x = omega_plus - p.omega_p;
  return std::exp(-x * x / (4.0 * p.sigma_plus * p.sigma_plus));
}

double phase_matching_factor(Interaction interaction, double omega_minus, const SeparableJsa& p) {
  const double centre = interaction == Interaction::HV ? p.mu : -p.mu;
  const double x = omega_minus - centre;
  return std::sqrt(kPi) * p.waist_wz *
         std::exp(-x * x / (2.0 * p.delta_omega_minus * p.delta_omega_minus));
}

std::vector<double> cell_widths(const std::vector<double>& axis) {
  const std::size_t n = axis.size();
  std::vector<double> w(n, 0.0);
  if (n == 1) {
    w[0] = 1.0;
    return w;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double left = i == 0 ? axis[0] : 0.5 * (axis[i - 1] + axis[i]);
    const double right = i + 1 == n ? axis[n - 1] : 0.5 * (axis[i] + axis[i + 1]);
    w[i] = right - left;
  }
  return w;
}

}  // namespace

double pump_spectral_width(const PumpConfig& pump) {
  if (!(pump.pulse_fwhm > 0.0)) throw Error(ErrorKind::Domain, "pump pulse_fwhm must be positive");
  return 2.0 * std::sqrt(std::log(2.0)) / pump.pulse_fwhm;
}

SeparableJsa separable_jsa(const PumpConfig& pump, const DispersionModel& model) {
  return SeparableJsa{
      .omega_p = pump.omega_p(),
      .sigma_plus = pump_spectral_width(pump),
      .mu = spectral_separation_mu(pump, model),
      .delta_omega_minus = intra_mode_width(pump, model),
      .waist_wz = pump.waist_wz,
  };
}

cplx pump_spectral_amplitude(double omega_plus, const PumpConfig& pump) {
  SeparableJsa p;
  p.omega_p = pump.omega_p();
  p.sigma_plus = pump_spectral_width(pump);
  return spectral_factor(omega_plus, p);
}

cplx phase_matching_amplitude(Interaction interaction, double omega_minus, const PumpConfig& pump,
                              const DispersionModel& model) {
  return phase_matching_factor(interaction, omega_minus, separable_jsa(pump, model));
}

JointSpectrum::JointSpectrum(SeparableJsa params, std::vector<double> axis)
    : params_(params), axis_(std::move(axis)) {
  const std::size_t n = axis_.size();
  if (n < 2) throw Error(ErrorKind::Resolution, "joint spectrum needs at least two points per axis");
  spacing_ = axis_[1] - axis_[0];
  amp_hv_.resize(n * n);
  amp_vh_.resize(n * n);

  parallel_for(n, [&](std::size_t i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double s = spectral_factor(axis_[i] + axis_[j], params_);
      const double minus = axis_[i] - axis_[j];
      amp_hv_[i * n + j] = s * phase_matching_factor(Interaction::HV, minus, params_);
      amp_vh_[i * n + j] = s * phase_matching_factor(Interaction::VH, minus, params_);
    }
  });

  double norm = 0.0;
  for (std::size_t k = 0; k < n * n; ++k) norm += std::norm(amp_hv_[k]) + std::norm(amp_vh_[k]);
  norm *= spacing_ * spacing_;
  if (!(norm > 0.0)) throw Error(ErrorKind::DegenerateInput, "joint spectrum has zero weight on its grid");
  normalization_ = 1.0 / std::sqrt(norm);
  for (auto& a : amp_hv_) a *= normalization_;
  for (auto& a : amp_vh_) a *= normalization_;
}

cplx JointSpectrum::amplitude(Interaction interaction, double omega, double omega_prime) const {
  return normalization_ * spectral_factor(omega + omega_prime, params_) *
         phase_matching_factor(interaction, omega - omega_prime, params_);
}

std::vector<double> joint_spectrum_axis(const SeparableJsa& params, const GridSpec& grid) {
  // Amplitude widths: S has exp(-x^2 / (2 (sqrt2 sigma_+)^2)), G has width dw.
  const double half_plus = grid.extent_sigmas * std::sqrt(2.0) * params.sigma_plus;
  const double half_minus = std::abs(params.mu) + grid.extent_sigmas * params.delta_omega_minus;
  const double half = 0.5 * (half_plus + half_minus);
  const double centre = 0.5 * params.omega_p;
  const std::size_t n = grid.points;
  std::vector<double> axis(n);
  for (std::size_t i = 0; i < n; ++i) {
    axis[i] = centre - half + 2.0 * half * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return axis;
}

double norm_discretization_error(const SeparableJsa& params, double spacing) {
  // |phi|^2 is Gaussian with std sigma_+ along omega_+ and dw/sqrt2 along omega_-.
  const double var_plus = params.sigma_plus * params.sigma_plus;
  const double var_minus = 0.5 * params.delta_omega_minus * params.delta_omega_minus;
  const double scale = 2.0 * kPi * kPi / (spacing * spacing);
  const double axis_term = std::exp(-scale * 0.25 * (var_plus + var_minus));
  const double plus_term = std::exp(-scale * var_plus);
  const double minus_term = std::exp(-scale * var_minus);
  return 2.0 * (2.0 * axis_term + plus_term + minus_term);
}

JointSpectrum build_joint_spectrum(const PumpConfig& pump, const DispersionModel& model,
                                   const GridSpec& grid) {
  pump.validate();
  model.validate();
  if (grid.points < kMinGridPoints) {
    std::ostringstream msg;
    msg << "joint spectrum grid needs at least " << kMinGridPoints << " points per axis, got "
        << grid.points;
    throw Error(ErrorKind::Resolution, msg.str());
  }
  if (!(grid.extent_sigmas >= 5.0)) {
    throw Error(ErrorKind::Resolution, "joint spectrum grid must span at least 5 widths");
  }
  const SeparableJsa params = separable_jsa(pump, model);
  std::vector<double> axis = joint_spectrum_axis(params, grid);
  const double spacing = axis[1] - axis[0];
  const double err = norm_discretization_error(params, spacing);
  if (err > kMaxNormError) {
    std::ostringstream msg;
    msg << "joint spectrum grid too coarse: estimated norm discretization error " << err
        << " exceeds " << kMaxNormError << "; increase grid points";
    throw Error(ErrorKind::Resolution, msg.str());
  }
  return JointSpectrum(params, std::move(axis));
}

MarginalSpectra marginal_spectra(const JointSpectrum& js) {
  const std::size_t n = js.size();
  const double h = js.spacing();
  MarginalSpectra m;
  m.omega = js.omega_s_axis();
  m.signal.assign(n, 0.0);
  m.idler.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double w = js.jsi(i, j) * h;
      m.signal[i] += w;
      m.idler[j] += w;
    }
  }
  return m;
}

JsiGrid jsi_grid(const JointSpectrum& js) {
  const std::size_t n = js.size();
  JsiGrid g;
  g.omega_s = js.omega_s_axis();
  g.omega_i = js.omega_i_axis();
  g.values.resize(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) g.values[i * n + j] = js.jsi(i, j);
  }
  return g;
}

double extract_population_p(const JsiGrid& jsi, double omega_split) {
  const std::size_t ns = jsi.omega_s.size();
  const std::size_t ni = jsi.omega_i.size();
  if (ns == 0 || ni == 0 || jsi.values.size() != ns * ni) {
    throw Error(ErrorKind::DegenerateInput, "extract_population_p: empty or inconsistent JSI grid");
  }
  const std::vector<double> ws = cell_widths(jsi.omega_s);
  const std::vector<double> wi = cell_widths(jsi.omega_i);

  double upper = 0.0;
  double total = 0.0;
  for (std::size_t s = 0; s < ns; ++s) {
    double row = 0.0;
    for (std::size_t i = 0; i < ni; ++i) {
      const double v = jsi.at(s, i);
      if (v < 0.0 || !std::isfinite(v)) {
        throw Error(ErrorKind::DegenerateInput, "extract_population_p: JSI values must be non-negative");
      }
      row += v * wi[i];
    }
    row *= ws[s];
    total += row;
    if (jsi.omega_s[s] > omega_split) {
      upper += row;
    } else if (jsi.omega_s[s] == omega_split) {
      upper += 0.5 * row;
    }
  }
  if (!(total > 0.0)) throw Error(ErrorKind::DegenerateInput, "extract_population_p: JSI has zero total weight");
  return upper / total;
}

Eigen::MatrixXcd sum_difference_samples(const JointSpectrum& js, Interaction interaction) {
  const auto n = static_cast<long>(js.size());
  const long centre = n / 2;
  const long reach = std::min(centre, n - 1 - centre);
  const SeparableJsa& p = js.parameters();
  const double w_plus = std::sqrt(2.0) * p.sigma_plus;
  const double w_minus = std::abs(p.mu) + p.delta_omega_minus;
  const long u_max = static_cast<long>(std::floor(reach * w_plus / (w_plus + w_minus)));
  const long v_max = reach - u_max;

  Eigen::MatrixXcd m(2 * u_max + 1, 2 * v_max + 1);
  for (long u = -u_max; u <= u_max; ++u) {
    for (long v = -v_max; v <= v_max; ++v) {
      const long i = centre + u + v;
      const long j = centre + u - v;
      m(u + u_max, v + v_max) = js.amp(interaction, static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    }
  }
  return m;
}

}  // namespace biphoton
