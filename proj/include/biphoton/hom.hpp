#pragma once

#include <span>
#include <vector>

#include "biphoton/biphoton.hpp"

namespace biphoton {

enum class InterferogramKind { Probability, Counts };

// Coincidence signal sampled against the signal/idler delay.
struct Interferogram {
  std::vector<double> delays;  // s, strictly increasing
  std::vector<double> values;  // probability or raw counts
  std::vector<double> errors;  // optional, empty or same length as values
  InterferogramKind kind = InterferogramKind::Probability;

  std::size_t size() const noexcept { return delays.size(); }
  void validate() const;
};

// Parameters of the drift-corrected beating model
//   P(tau) = (1 - V exp(-tau^2 / 2 dtau^2) cos(mu tau)) / 2 + a tau + b.
struct HomFitParams {
  double visibility = 1.0;
  double delta_tau = 0.0;  // s
  double mu = 0.0;         // rad/s
  double a = 0.0;          // 1/s
  double b = 0.0;

  void validate() const;
};

// Uniform delay grid from lo to hi (inclusive when hi - lo is a multiple of step).
std::vector<double> delay_grid(double lo, double hi, double step);

// 1/2 - Re sum phi_HV(w, w') conj(phi_VH(w', w)) exp(-i (w - w') tau) dw dw'
// by 2D trapezoidal quadrature on the stored grid. The value is returned as
// computed, without clamping. Throws Error(Resolution) when the oscillatory
// factor advances by more than pi/4 per grid cell.
double coincidence_quadrature(const JointSpectrum& js, double tau);

Interferogram quadrature_interferogram(const JointSpectrum& js, std::span<const double> delays);

// 1/2 - exp(-tau^2 / 2 dtau^2) cos(mu tau) / 2.
double coincidence_closed_form(double tau, double mu, double delta_tau);

Interferogram closed_form_interferogram(std::span<const double> delays, double mu, double delta_tau);

double fit_model(double tau, const HomFitParams& params);

// Largest deviation of a probability interferogram outside [0, 1].
double probability_excursion(const Interferogram& interferogram);

}  // namespace biphoton
