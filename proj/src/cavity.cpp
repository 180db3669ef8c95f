#include "biphoton/cavity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "biphoton/errors.hpp"
#include "biphoton/fitting.hpp"
#include "biphoton/parallel.hpp"
#include "biphoton/units.hpp"

namespace biphoton {

namespace {

constexpr double kMinPointsPerFsr = 8.0;
constexpr std::size_t kRowBlock = 16;
constexpr std::size_t kPowerRefresh = 64;
constexpr int kWindowIntervals = 16;

const cplx kI{0.0, 1.0};

// Delay exponents (p, q) of the four path terms: exp(-i (p w1 + q w2) tau).
constexpr std::array<int, 4> kExpA = {0, 1, 0, 1};
constexpr std::array<int, 4> kExpB = {1, 1, 0, 0};

// Path amplitudes of one coefficient; sign +1 for A and C, -1 for B and D.
std::array<cplx, 4> path_terms(cplx phi, double sign, cplx r1, cplx t1, cplx r2, cplx t2) {
  return {-sign * r1 * r2 * phi, kI * t1 * r2 * phi, kI * r1 * t2 * phi, sign * kI * t1 * t2 * phi};
}

cplx delay_factor(int k, double omega1, double omega2, double tau) {
  return std::polar(1.0, -(kExpA[k] * omega1 + kExpB[k] * omega2) * tau);
}

void check_fsr(const JointSpectrum& js, const WaveguideConfig& wg) {
  wg.validate();
  const double per_fsr = wg.free_spectral_range() / js.spacing();
  if (per_fsr < kMinPointsPerFsr) {
    std::ostringstream msg;
    msg << "cavity: grid has " << per_fsr << " points per free spectral range (need >= " << kMinPointsPerFsr
        << "); build the joint spectrum with cavity_grid_spec";
    throw Error(ErrorKind::Resolution, msg.str());
  }
}

double trapezoid_weight(std::size_t i, std::size_t n) { return (i == 0 || i + 1 == n) ? 0.5 : 1.0; }

double pump_period(const PumpConfig& pump) { return kTwoPi / pump.omega_p(); }

}  // namespace

void WaveguideConfig::validate() const {
  if (!(length_l > 0.0)) throw Error(ErrorKind::Domain, "waveguide: length_L must be positive");
  if (reflectivity_r == 1.0) {
    throw Error(ErrorKind::SingularCavity, "waveguide: reflectivity_R = 1 makes the cavity singular");
  }
  if (!(reflectivity_r >= 0.0 && reflectivity_r < 1.0)) {
    throw Error(ErrorKind::Domain, "waveguide: reflectivity_R must lie in [0, 1)");
  }
  if (!(modal_index_n > 1.0)) throw Error(ErrorKind::Domain, "waveguide: modal_index_n must exceed 1");
}

double WaveguideConfig::free_spectral_range() const { return kPi * kSpeedOfLight / (modal_index_n * length_l); }

WaveguideConfig WaveguideConfig::reference_device() {
  return WaveguideConfig{.length_l = 2.6 * units::mm, .reflectivity_r = 0.10, .modal_index_n = 3.156};
}

FacetAmplitudes facet_amplitudes(double omega, const WaveguideConfig& wg) {
  if (wg.reflectivity_r == 1.0) {
    throw Error(ErrorKind::SingularCavity, "facet_amplitudes: reflectivity_R = 1 makes the cavity singular");
  }
  if (!(omega > 0.0)) throw Error(ErrorKind::Domain, "facet_amplitudes: omega must be positive");
  const double r = wg.reflectivity_r;
  const double phase = omega * wg.modal_index_n * wg.length_l / kSpeedOfLight;
  const cplx denominator = 1.0 - r * std::polar(1.0, 2.0 * phase);
  return FacetAmplitudes{
      .reflected = std::sqrt(r * (1.0 - r)) * std::polar(1.0, 1.5 * phase) / denominator,
      .transmitted = std::sqrt(1.0 - r) * std::polar(1.0, 0.5 * phase) / denominator,
  };
}

MixedCoefficients mixed_coefficients(double omega1, double omega2, double tau, const JointSpectrum& js,
                                     const WaveguideConfig& wg) {
  const FacetAmplitudes f1 = facet_amplitudes(omega1, wg);
  const FacetAmplitudes f2 = facet_amplitudes(omega2, wg);
  const cplx hv = js.amplitude(Interaction::HV, omega1, omega2);
  const cplx vh = js.amplitude(Interaction::VH, omega1, omega2);
  auto combine = [&](cplx phi, double sign) {
    const auto terms = path_terms(phi, sign, f1.reflected, f1.transmitted, f2.reflected, f2.transmitted);
    cplx sum = 0.0;
    for (int k = 0; k < 4; ++k) sum += terms[k] * delay_factor(k, omega1, omega2, tau);
    return sum;
  };
  return MixedCoefficients{combine(hv, 1.0), combine(vh, -1.0), combine(vh, 1.0), combine(hv, -1.0)};
}

GridSpec cavity_grid_spec(const PumpConfig& pump, const DispersionModel& model, const WaveguideConfig& wg,
                          double points_per_fsr) {
  wg.validate();
  if (!(points_per_fsr >= kMinPointsPerFsr)) {
    throw Error(ErrorKind::Domain, "cavity_grid_spec: points_per_fsr must be at least 8");
  }
  GridSpec grid;
  const std::vector<double> axis = joint_spectrum_axis(separable_jsa(pump, model), grid);
  const double width = axis.back() - axis.front();
  const double step = wg.free_spectral_range() / points_per_fsr;
  const auto needed = static_cast<std::size_t>(std::ceil(width / step)) + 1;
  grid.points = std::max(grid.points, needed);
  return grid;
}

CavityHom::CavityHom(const JointSpectrum& js, const WaveguideConfig& wg) : js_(js), wg_(wg) {
  check_fsr(js, wg);
  const auto& axis = js.omega_s_axis();
  fr_.resize(axis.size());
  ft_.resize(axis.size());
  for (std::size_t i = 0; i < axis.size(); ++i) {
    const FacetAmplitudes f = facet_amplitudes(axis[i], wg);
    fr_[i] = f.reflected;
    ft_[i] = f.transmitted;
  }
}

CavityProbabilities CavityHom::probabilities(double tau) const {
  if (js_.spacing() * std::abs(tau) > 0.25 * kPi) {
    std::ostringstream msg;
    msg << "cavity: delay " << tau << " s advances the phase by " << js_.spacing() * std::abs(tau)
        << " rad per grid cell (limit pi/4); use a finer grid";
    throw Error(ErrorKind::Resolution, msg.str());
  }
  const std::size_t n = js_.size();
  const auto& axis = js_.omega_s_axis();
  std::vector<cplx> a(n * n), b(n * n), c(n * n), d(n * n);
  std::vector<cplx> e1(n);
  for (std::size_t j = 0; j < n; ++j) e1[j] = std::polar(1.0, -axis[j] * tau);

  parallel_for(n, [&](std::size_t j) {
    for (std::size_t k = 0; k < n; ++k) {
      const std::array<cplx, 4> phase = {e1[k], e1[j] * e1[k], 1.0, e1[j]};
      auto combine = [&](cplx phi, double sign) {
        const auto terms = path_terms(phi, sign, fr_[j], ft_[j], fr_[k], ft_[k]);
        cplx sum = 0.0;
        for (int m = 0; m < 4; ++m) sum += terms[m] * phase[m];
        return sum;
      };
      const cplx hv = js_.amp(Interaction::HV, j, k);
      const cplx vh = js_.amp(Interaction::VH, j, k);
      a[j * n + k] = combine(hv, 1.0);
      b[j * n + k] = combine(vh, -1.0);
      c[j * n + k] = combine(vh, 1.0);
      d[j * n + k] = combine(hv, -1.0);
    }
  });

  double p_hv = 0.0, p_vh = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double row_hv = 0.0, row_vh = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double w = trapezoid_weight(k, n);
      const std::size_t jk = j * n + k, kj = k * n + j;
      row_hv += w * (std::norm(a[jk]) + std::norm(b[jk]) + 2.0 * std::real(std::conj(a[jk]) * b[kj]));
      row_vh += w * (std::norm(c[jk]) + std::norm(d[jk]) + 2.0 * std::real(std::conj(c[jk]) * d[kj]));
    }
    p_hv += trapezoid_weight(j, n) * row_hv;
    p_vh += trapezoid_weight(j, n) * row_vh;
  }
  const double h = js_.spacing();
  return CavityProbabilities{0.25 * p_hv * h * h, 0.25 * p_vh * h * h};
}

CavityInterferometer::CavityInterferometer(const JointSpectrum& js, const WaveguideConfig& wg)
    : omega0_(js.omega_s_axis().front()), spacing_(js.spacing()) {
  check_fsr(js, wg);
  const std::size_t n = js.size();
  const auto& axis = js.omega_s_axis();
  std::vector<cplx> fr(n), ft(n);
  for (std::size_t i = 0; i < n; ++i) {
    const FacetAmplitudes f = facet_amplitudes(axis[i], wg);
    fr[i] = f.reflected;
    ft[i] = f.transmitted;
  }
  const std::array<std::size_t, 3> lengths = {n, n, 2 * n - 1};

  // Fixed row blocks keep the summation order independent of the worker count.
  const std::size_t blocks = (n + kRowBlock - 1) / kRowBlock;
  std::vector<std::array<std::vector<cplx>, 3>> partial(blocks);

  parallel_for(blocks, [&](std::size_t blk) {
    auto& series = partial[blk];
    for (int c = 0; c < 3; ++c) series[c].assign(lengths[c], 0.0);
    auto add = [&](int p, int q, long j, long k, cplx value) {
      int carrier = p + q;
      long m = p * j + q * k;
      if (carrier < 0 || (carrier == 0 && m < 0)) {
        carrier = -carrier;
        m = -m;
        value = std::conj(value);
      }
      series[carrier][static_cast<std::size_t>(m)] += value;
    };

    const std::size_t j_end = std::min(n, (blk + 1) * kRowBlock);
    for (std::size_t j = blk * kRowBlock; j < j_end; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        const double w = trapezoid_weight(j, n) * trapezoid_weight(k, n);
        const auto jl = static_cast<long>(j), kl = static_cast<long>(k);
        // Channel pairs (A, B) and (C, D): X carries sign +1, Y sign -1.
        const std::array<std::pair<Interaction, Interaction>, 2> channels = {
            std::pair{Interaction::HV, Interaction::VH}, std::pair{Interaction::VH, Interaction::HV}};
        for (const auto& [ix, iy] : channels) {
          const auto x = path_terms(js.amp(ix, j, k), 1.0, fr[j], ft[j], fr[k], ft[k]);
          const auto y = path_terms(js.amp(iy, j, k), -1.0, fr[j], ft[j], fr[k], ft[k]);
          const auto y_swap = path_terms(js.amp(iy, k, j), -1.0, fr[k], ft[k], fr[j], ft[j]);
          for (int m = 0; m < 4; ++m) {
            for (int l = 0; l < 4; ++l) {
              const int p = kExpA[m] - kExpA[l];
              const int q = kExpB[m] - kExpB[l];
              add(p, q, jl, kl, w * (x[m] * std::conj(x[l]) + y[m] * std::conj(y[l])));
              add(kExpB[l] - kExpA[m], kExpA[l] - kExpB[m], jl, kl, 2.0 * w * std::conj(x[m]) * y_swap[l]);
            }
          }
        }
      }
    }
  });

  for (int c = 0; c < 3; ++c) {
    series_[c].assign(lengths[c], 0.0);
    for (const auto& block : partial) {
      for (std::size_t m = 0; m < lengths[c]; ++m) series_[c][m] += block[c][m];
    }
  }
}

double CavityInterferometer::coincidence(double tau) const {
  const auto parts = carrier_components(tau);
  return parts[0] + parts[1] + parts[2];
}

std::array<double, 3> CavityInterferometer::carrier_components(double tau) const {
  if (spacing_ * std::abs(tau) > 0.25 * kPi) {
    std::ostringstream msg;
    msg << "cavity: delay " << tau << " s advances the phase by " << spacing_ * std::abs(tau)
        << " rad per grid cell (limit pi/4); use a finer grid";
    throw Error(ErrorKind::Resolution, msg.str());
  }
  const cplx z = std::polar(1.0, -spacing_ * tau);
  std::array<double, 3> parts{};
  for (int c = 0; c < 3; ++c) {
    const auto& s = series_[c];
    cplx acc = 0.0;
    cplx power = 1.0;
    for (std::size_t m = 0; m < s.size(); ++m) {
      if (m % kPowerRefresh == 0) {
        power = std::polar(1.0, -static_cast<double>(m) * spacing_ * tau);
      } else {
        power *= z;
      }
      acc += s[m] * power;
    }
    parts[c] = 0.25 * std::real(acc * std::polar(1.0, -c * omega0_ * tau)) * spacing_ * spacing_;
  }
  return parts;
}

Interferogram CavityInterferometer::scan(std::span<const double> delays) const {
  Interferogram out;
  out.delays.assign(delays.begin(), delays.end());
  out.values.resize(delays.size());
  parallel_for(delays.size(), [&](std::size_t i) { out.values[i] = coincidence(delays[i]); });
  return out;
}

Interferogram CavityInterferometer::averaged_scan(std::span<const double> delays, const PumpConfig& pump) const {
  const double step = fast_sampling_step(pump);
  Interferogram out;
  out.delays.assign(delays.begin(), delays.end());
  out.values.resize(delays.size());
  parallel_for(delays.size(), [&](std::size_t i) {
    double sum = 0.0;
    for (int k = -kWindowIntervals / 2; k <= kWindowIntervals / 2; ++k) {
      const double weight = std::abs(k) == kWindowIntervals / 2 ? 0.5 : 1.0;
      sum += weight * coincidence(delays[i] + k * step);
    }
    out.values[i] = sum / kWindowIntervals;
  });
  return out;
}

double cavity_coincidence(double tau, const JointSpectrum& js, const WaveguideConfig& wg) {
  return CavityHom(js, wg).coincidence(tau);
}

double fast_sampling_step(const PumpConfig& pump) { return pump_period(pump) / kWindowIntervals; }

Interferogram average_fast_oscillation(const Interferogram& raw, const PumpConfig& pump,
                                       std::optional<std::vector<double>> output_delays) {
  raw.validate();
  if (raw.size() < 2) throw Error(ErrorKind::Resolution, "averaging: need at least two raw samples");
  const double period = pump_period(pump);
  const double half = 0.5 * period;
  const double eps = 1e-9 * period;
  const auto& t = raw.delays;
  const auto& v = raw.values;

  std::vector<double> outputs;
  if (output_delays) {
    outputs = std::move(*output_delays);
  } else {
    for (double tau : t) {
      if (tau - half >= t.front() - eps && tau + half <= t.back() + eps) outputs.push_back(tau);
    }
    if (outputs.empty()) throw Error(ErrorKind::Resolution, "averaging: raw scan shorter than one pump period");
  }

  auto value_at = [&](std::size_t i, double x) {
    const double f = (x - t[i]) / (t[i + 1] - t[i]);
    return v[i] + f * (v[i + 1] - v[i]);
  };

  Interferogram out;
  out.kind = raw.kind;
  out.delays = outputs;
  out.values.resize(outputs.size());
  for (std::size_t o = 0; o < outputs.size(); ++o) {
    const double lo = outputs[o] - half;
    const double hi = outputs[o] + half;
    if (lo < t.front() - eps || hi > t.back() + eps) {
      std::ostringstream msg;
      msg << "averaging: window around " << outputs[o] << " s extends past the raw scan";
      throw Error(ErrorKind::Resolution, msg.str());
    }
    const double a = std::max(lo, t.front());
    const double b = std::min(hi, t.back());
    auto it = std::upper_bound(t.begin(), t.end(), a);
    std::size_t i = it == t.begin() ? 0 : static_cast<std::size_t>(it - t.begin()) - 1;
    i = std::min(i, t.size() - 2);
    double integral = 0.0;
    for (; i + 1 < t.size() && t[i] < b; ++i) {
      if (t[i + 1] - t[i] > period / 8.0 + eps) {
        std::ostringstream msg;
        msg << "averaging: raw sampling gap of " << t[i + 1] - t[i] << " s exceeds 1/8 pump period";
        throw Error(ErrorKind::Resolution, msg.str());
      }
      const double x0 = std::max(a, t[i]);
      const double x1 = std::min(b, t[i + 1]);
      if (x1 > x0) integral += 0.5 * (x1 - x0) * (value_at(i, x0) + value_at(i, x1));
    }
    out.values[o] = integral / (b - a);
  }
  return out;
}

double effective_visibility(const Interferogram& averaged) {
  const InitialGuess guess = initial_guess(averaged);
  HomFitParams init = guess.params;
  init.a = 0.0;
  init.b = 0.0;
  FitOptions options;
  options.fixed[kFitA] = true;
  options.fixed[kFitB] = true;
  if (guess.low_frequency) {
    init.mu = 0.0;
    options.fixed[kFitMu] = true;
  }
  return fit_hom_interferogram(averaged, init, options).params.visibility;
}

}  // namespace biphoton
