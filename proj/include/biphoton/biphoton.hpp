#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "biphoton/dispersion.hpp"
#include "biphoton/phasematch.hpp"

namespace biphoton {

using cplx = std::complex<double>;

struct GridSpec {
  std::size_t points = 512;    // per axis; signal and idler share the axis
  double extent_sigmas = 5.0;  // coverage in Gaussian widths along omega_+ and omega_-
};

// Parameters of the separable amplitude phi(w, w') = S(w + w') G(w - w').
struct SeparableJsa {
  double omega_p = 0.0;            // pump centre, rad/s
  double sigma_plus = 0.0;         // pump spectral width, rad/s
  double mu = 0.0;                 // HV centre along omega_-, rad/s (VH sits at -mu)
  double delta_omega_minus = 0.0;  // intra-mode width, rad/s
  double waist_wz = 0.0;           // m, sets the sqrt(pi) w_z prefactor
};

SeparableJsa separable_jsa(const PumpConfig& pump, const DispersionModel& model);

// sigma_+ = 2 sqrt(ln 2) / pulse_fwhm.
double pump_spectral_width(const PumpConfig& pump);

// exp(-(omega_+ - omega_p)^2 / (4 sigma_+^2)); peak value 1.
cplx pump_spectral_amplitude(double omega_plus, const PumpConfig& pump);

// sqrt(pi) w_z exp(-(omega_- -+ mu)^2 / (2 dw^2)); "-" for HV, "+" for VH.
cplx phase_matching_amplitude(Interaction interaction, double omega_minus, const PumpConfig& pump,
                              const DispersionModel& model);

/// Complex joint spectral amplitudes of both interactions on a square grid.
///
/// Signal and idler share one uniform, increasing axis centred on omega_p / 2,
/// so exchanging (w, w') is a transpose. Grids are row-major with the signal
/// frequency as the row index. The amplitudes are jointly normalized:
///   sum(|amp_HV|^2 + |amp_VH|^2) * dw^2 = 1.
class JointSpectrum {
 public:
  JointSpectrum(SeparableJsa params, std::vector<double> axis);

  std::size_t size() const noexcept { return axis_.size(); }
  const std::vector<double>& omega_s_axis() const noexcept { return axis_; }
  const std::vector<double>& omega_i_axis() const noexcept { return axis_; }
  double spacing() const noexcept { return spacing_; }
  const SeparableJsa& parameters() const noexcept { return params_; }

  // Factor applied to phi^spec * phi^pm to reach unit joint norm.
  double normalization() const noexcept { return normalization_; }

  std::span<const cplx> amp(Interaction interaction) const noexcept {
    return interaction == Interaction::HV ? amp_hv_ : amp_vh_;
  }
  cplx amp(Interaction interaction, std::size_t signal, std::size_t idler) const noexcept {
    return amp(interaction)[signal * size() + idler];
  }
  double jsi(std::size_t signal, std::size_t idler) const noexcept {
    return std::norm(amp_hv_[signal * size() + idler]) + std::norm(amp_vh_[signal * size() + idler]);
  }

  // Normalized amplitude at arbitrary frequencies (off-grid evaluation).
  cplx amplitude(Interaction interaction, double omega, double omega_prime) const;

 private:
  SeparableJsa params_;
  std::vector<double> axis_;
  double spacing_ = 0.0;
  double normalization_ = 1.0;
  std::vector<cplx> amp_hv_;
  std::vector<cplx> amp_vh_;
};

// Axis covering extent_sigmas widths of both factors around both peaks.
std::vector<double> joint_spectrum_axis(const SeparableJsa& params, const GridSpec& grid);

// Relative trapezoid error of the norm predicted from the Gaussian widths and
// the grid spacing (Poisson-summation estimate).
double norm_discretization_error(const SeparableJsa& params, double spacing);

// Throws Error(Resolution) below 64 points per axis or when the predicted norm
// error exceeds 1e-6.
JointSpectrum build_joint_spectrum(const PumpConfig& pump, const DispersionModel& model,
                                   const GridSpec& grid = {});

struct MarginalSpectra {
  std::vector<double> omega;
  std::vector<double> signal;  // integrated over the idler frequency
  std::vector<double> idler;
};

MarginalSpectra marginal_spectra(const JointSpectrum& js);

// Plain JSI samples with their axes, as produced by simulation or measured.
// Axes are increasing in angular frequency; values are row-major by signal.
struct JsiGrid {
  std::vector<double> omega_s;
  std::vector<double> omega_i;
  std::vector<double> values;

  double at(std::size_t signal, std::size_t idler) const { return values[signal * omega_i.size() + idler]; }
};

JsiGrid jsi_grid(const JointSpectrum& js);

// Fraction of the JSI weight whose signal frequency lies above omega_split
// (the omega_1 peak). Axes may be non-uniform; each sample carries the width
// of its cell.
double extract_population_p(const JsiGrid& jsi, double omega_split);

// Exact resampling of one interaction onto (omega_+, omega_-) axes using the
// rotated sub-lattice of grid points with even (i + j) and (i - j). Only the
// rectangle of that lattice lying inside the square grid is kept; rows follow
// omega_+, columns omega_-.
Eigen::MatrixXcd sum_difference_samples(const JointSpectrum& js, Interaction interaction);

}  // namespace biphoton
