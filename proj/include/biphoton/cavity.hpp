#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "biphoton/biphoton.hpp"
#include "biphoton/hom.hpp"

namespace biphoton {

struct WaveguideConfig {
  double length_l = 0.0;        // m
  double reflectivity_r = 0.0;  // facet intensity reflectivity, [0, 1)
  double modal_index_n = 0.0;   // shared by both polarizations

  void validate() const;
  // Angular-frequency spacing of round-trip resonances, pi c / (n L).
  double free_spectral_range() const;

  static WaveguideConfig reference_device();
};

struct FacetAmplitudes {
  cplx reflected;    // f_r
  cplx transmitted;  // f_t
};

// Field amplitudes for a photon born at the waveguide centre leaving through
// the far facet (f_t) or after one internal reflection (f_r). Throws
// Error(SingularCavity) at R = 1 and Error(Domain) for omega <= 0.
FacetAmplitudes facet_amplitudes(double omega, const WaveguideConfig& wg);

struct MixedCoefficients {
  cplx a, b, c, d;
};

// Amplitudes of the four coincidence channels after the beamsplitter for a
// pair (omega1, omega2) with delay tau on the right-hand arm.
MixedCoefficients mixed_coefficients(double omega1, double omega2, double tau, const JointSpectrum& js,
                                     const WaveguideConfig& wg);

// Square grid that resolves both the joint spectrum and the cavity free
// spectral range with at least points_per_fsr samples per FSR.
GridSpec cavity_grid_spec(const PumpConfig& pump, const DispersionModel& model, const WaveguideConfig& wg,
                          double points_per_fsr = 12.0);

struct CavityProbabilities {
  double hv = 0.0;
  double vh = 0.0;
  double total() const noexcept { return hv + vh; }
};

/// Direct evaluation: builds A..D on the whole grid for every delay and
/// integrates the coincidence kernels by the trapezoid rule. O(N^2) per delay.
class CavityHom {
 public:
  // Throws Error(Resolution) below 8 grid points per free spectral range.
  CavityHom(const JointSpectrum& js, const WaveguideConfig& wg);

  CavityProbabilities probabilities(double tau) const;
  double coincidence(double tau) const { return probabilities(tau).total(); }

 private:
  const JointSpectrum& js_;
  WaveguideConfig wg_;
  std::vector<cplx> fr_;
  std::vector<cplx> ft_;
};

/// Fast evaluation of the same quadrature. Every delay dependence is a phase
/// exp(-i (p w + q w') tau) with p, q in {-1, 0, 1}; the delay-independent
/// kernels are projected once onto the index p j + q k so that each delay
/// costs O(N).
class CavityInterferometer {
 public:
  // Throws Error(Resolution) below 8 grid points per free spectral range.
  CavityInterferometer(const JointSpectrum& js, const WaveguideConfig& wg);

  // Throws Error(Resolution) when tau advances the phase by more than pi/4
  // per grid cell.
  double coincidence(double tau) const;

  // Contributions oscillating near 0, omega_p / 2 and omega_p; they sum to
  // coincidence(tau).
  std::array<double, 3> carrier_components(double tau) const;

  Interferogram scan(std::span<const double> delays) const;

  // Samples each output delay over one pump period (16 intervals) and
  // averages with a rectangular window.
  Interferogram averaged_scan(std::span<const double> delays, const PumpConfig& pump) const;

 private:
  double omega0_ = 0.0;
  double spacing_ = 0.0;
  // carrier c in {0, 1, 2}; term m multiplies exp(-i (c omega0 + m h) tau).
  std::array<std::vector<cplx>, 3> series_;
};

// Single delay by direct evaluation on a cavity-resolving grid.
double cavity_coincidence(double tau, const JointSpectrum& js, const WaveguideConfig& wg);

// Mean over a rectangular window of one pump period centred on each output
// delay, integrating the piecewise-linear interpolant of the raw samples.
// Default output: every raw delay whose window lies inside the raw span.
// Throws Error(Resolution) when a window contains a gap wider than 1/8 period
// or extends past the raw data.
Interferogram average_fast_oscillation(const Interferogram& raw, const PumpConfig& pump,
                                       std::optional<std::vector<double>> output_delays = std::nullopt);

// Visibility of an averaged interferogram from the beating model with the
// drift terms fixed to zero.
double effective_visibility(const Interferogram& averaged);

// Delays of the raw scan used by averaged_scan: step (2 pi / omega_p) / 16.
double fast_sampling_step(const PumpConfig& pump);

}  // namespace biphoton
