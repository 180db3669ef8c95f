#include "biphoton/hom.hpp"

#include <cmath>
#include <sstream>

#include "biphoton/errors.hpp"
#include "biphoton/parallel.hpp"
#include "biphoton/units.hpp"

namespace biphoton {

void Interferogram::validate() const {
  if (values.size() != delays.size()) {
    throw Error(ErrorKind::DegenerateInput, "interferogram: delays and values differ in length");
  }
  if (!errors.empty() && errors.size() != values.size()) {
    throw Error(ErrorKind::DegenerateInput, "interferogram: errors must match values in length");
  }
  for (std::size_t i = 1; i < delays.size(); ++i) {
    if (!(delays[i] > delays[i - 1])) {
      throw Error(ErrorKind::DegenerateInput, "interferogram: delays must be strictly increasing");
    }
  }
  for (double v : values) {
    if (!(v >= -1e-9) || !std::isfinite(v)) {
      throw Error(ErrorKind::DegenerateInput, "interferogram: values must be finite and non-negative");
    }
    if (kind == InterferogramKind::Probability && v > 1.0 + 1e-9) {
      throw Error(ErrorKind::DegenerateInput, "interferogram: probability exceeds 1");
    }
  }
  for (double e : errors) {
    if (!(e > 0.0) || !std::isfinite(e)) {
      throw Error(ErrorKind::DegenerateInput, "interferogram: errors must be positive");
    }
  }
}

void HomFitParams::validate() const {
  if (!(visibility >= 0.0 && visibility <= 1.0)) {
    throw Error(ErrorKind::Domain, "fit parameters: visibility must lie in [0, 1]");
  }
  if (!(delta_tau > 0.0)) throw Error(ErrorKind::Domain, "fit parameters: delta_tau must be positive");
}

std::vector<double> delay_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo)) throw Error(ErrorKind::Domain, "delay_grid: need step > 0 and hi >= lo");
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) grid[i] = lo + static_cast<double>(i) * step;
  return grid;
}

double coincidence_quadrature(const JointSpectrum& js, double tau) {
  const std::size_t n = js.size();
  const double h = js.spacing();
  const double phase_per_cell = h * std::abs(tau);
  if (phase_per_cell > 0.25 * kPi) {
    std::ostringstream msg;
    msg << "coincidence_quadrature: delay " << tau << " s advances the phase by " << phase_per_cell
        << " rad per grid cell (limit pi/4); use a finer grid";
    throw Error(ErrorKind::Resolution, msg.str());
  }

  // exp(-i (w - w') tau) = e_j conj(e_k); the common carrier cancels.
  const double centre = 0.5 * (js.omega_s_axis().front() + js.omega_s_axis().back());
  std::vector<cplx> phase(n);
  for (std::size_t j = 0; j < n; ++j) phase[j] = std::polar(1.0, -(js.omega_s_axis()[j] - centre) * tau);

  const auto hv = js.amp(Interaction::HV);
  const auto vh = js.amp(Interaction::VH);
  double overlap = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double wj = (j == 0 || j + 1 == n) ? 0.5 : 1.0;
    cplx row = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double wk = (k == 0 || k + 1 == n) ? 0.5 : 1.0;
      row += wk * hv[j * n + k] * std::conj(vh[k * n + j]) * std::conj(phase[k]);
    }
    overlap += wj * std::real(row * phase[j]);
  }
  return 0.5 - overlap * h * h;
}

Interferogram quadrature_interferogram(const JointSpectrum& js, std::span<const double> delays) {
  Interferogram out;
  out.delays.assign(delays.begin(), delays.end());
  out.values.resize(delays.size());
  parallel_for(delays.size(), [&](std::size_t i) { out.values[i] = coincidence_quadrature(js, delays[i]); });
  return out;
}

double coincidence_closed_form(double tau, double mu, double delta_tau) {
  if (!(delta_tau > 0.0)) throw Error(ErrorKind::Domain, "coincidence_closed_form: delta_tau must be positive");
  const double envelope = std::exp(-tau * tau / (2.0 * delta_tau * delta_tau));
  return 0.5 - 0.5 * envelope * std::cos(mu * tau);
}

Interferogram closed_form_interferogram(std::span<const double> delays, double mu, double delta_tau) {
  Interferogram out;
  out.delays.assign(delays.begin(), delays.end());
  out.values.reserve(delays.size());
  for (double tau : delays) out.values.push_back(coincidence_closed_form(tau, mu, delta_tau));
  return out;
}

double fit_model(double tau, const HomFitParams& p) {
  const double envelope = std::exp(-tau * tau / (2.0 * p.delta_tau * p.delta_tau));
  return 0.5 * (1.0 - p.visibility * envelope * std::cos(p.mu * tau)) + p.a * tau + p.b;
}

double probability_excursion(const Interferogram& interferogram) {
  double worst = 0.0;
  for (double v : interferogram.values) {
    worst = std::max({worst, -v, v - 1.0});
  }
  return worst;
}

}  // namespace biphoton
