#pragma once

#include <vector>

#include "biphoton/dispersion.hpp"
#include "biphoton/errors.hpp"
#include "biphoton/roots.hpp"

namespace biphoton {

// HV: H-polarized signal (z > 0) with V-polarized idler; VH: the converse.
enum class Interaction { HV, VH };

struct PumpConfig {
  double lambda_p = 0.0;    // m
  double pulse_fwhm = 0.0;  // s, intensity FWHM
  double waist_wz = 0.0;    // m, Gaussian spot waist along the waveguide
  double theta = 0.0;       // rad, incidence angle from the vertical axis

  double omega_p() const noexcept;
  void validate() const;

  static PumpConfig reference_device();
};

struct TunabilityPoint {
  double theta = 0.0;
  double omega_s_hv = 0.0;
  double omega_i_hv = 0.0;
  double omega_s_vh = 0.0;
  double omega_i_vh = 0.0;
};

class NoPhaseMatchingError : public Error {
 public:
  NoPhaseMatchingError(const std::string& message, double lo, double hi, double mismatch_lo,
                       double mismatch_hi)
      : Error(ErrorKind::NoPhaseMatching, message),
        lo_(lo), hi_(hi), mismatch_lo_(mismatch_lo), mismatch_hi_(mismatch_hi) {}

  double bracket_lo() const noexcept { return lo_; }
  double bracket_hi() const noexcept { return hi_; }
  double mismatch_lo() const noexcept { return mismatch_lo_; }
  double mismatch_hi() const noexcept { return mismatch_hi_; }

 private:
  double lo_, hi_, mismatch_lo_, mismatch_hi_;
};

// Longitudinal momentum mismatch (rad/s) for a signal at omega_s:
//   omega_p sin(theta) - [omega_s n_a(omega_s) - omega_i n_b(omega_i)]
// with (a, b) = (H, V) for HV and (V, H) for VH, omega_i = omega_p - omega_s.
double phase_mismatch(Interaction interaction, double omega_s, const PumpConfig& pump,
                      const DispersionModel& model);

// Signal search bracket (0.6, 1.4) * omega_p / 2.
Bracket signal_search_bracket(const PumpConfig& pump);

// Central signal/idler frequencies of both interactions at the pump angle.
// Throws NoPhaseMatchingError when the mismatch does not change sign.
TunabilityPoint solve_central_frequencies(const PumpConfig& pump, const DispersionModel& model);

// Angle sweep, one solve per angle (evaluated in parallel).
std::vector<TunabilityPoint> tunability_curve(const PumpConfig& pump, const DispersionModel& model,
                                              const std::vector<double>& thetas);

// mu = v_g omega_p (n_H - n_V) / 2c; positive when n_H > n_V.
double spectral_separation_mu(const PumpConfig& pump, const DispersionModel& model);

// Width of each interaction along omega_- : sqrt(2) v_g / w_z.
double intra_mode_width(const PumpConfig& pump, const DispersionModel& model);

// HOM envelope width sqrt(2) / intra_mode_width = w_z / v_g.
double envelope_width(const PumpConfig& pump, const DispersionModel& model);

}  // namespace biphoton
