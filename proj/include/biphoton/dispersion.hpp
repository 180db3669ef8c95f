#pragma once

namespace biphoton {

enum class Polarization { H, V };

/// First-order modal dispersion of the waveguide for both polarizations.
///
/// Each index is linear in angular frequency and anchored at `omega_ref`,
/// with a slope chosen so that n + omega * dn/domega equals the shared group
/// index there. Only the birefringence and the group velocity enter the
/// two-photon amplitudes, so this is the smallest model that carries both.
struct DispersionModel {
  double n0_h = 0.0;       // H (TE) modal index at omega_ref
  double n0_v = 0.0;       // V (TM) modal index at omega_ref
  double n_group = 0.0;    // group index, shared by both polarizations
  double omega_ref = 0.0;  // rad/s

  double birefringence() const noexcept { return n0_h - n0_v; }
  double index_at_reference(Polarization pol) const noexcept {
    return pol == Polarization::H ? n0_h : n0_v;
  }

  // Throws Error(Domain) naming the first violated bound.
  void validate() const;

  // Calibrated to the AlGaAs ridge device: birefringence 1.2e-2, group index
  // matching a 10.5 ps HOM envelope for a 1 mm pump waist, reference at the
  // 1546.3 nm degeneracy wavelength.
  static DispersionModel reference_device();
};

double modal_index(Polarization pol, double omega, const DispersionModel& model);

// n + omega * dn/domega evaluated from the linear model.
double group_index(Polarization pol, double omega, const DispersionModel& model);

// c / n_group. With a shared group index this is also the harmonic mean of the
// signal and idler group velocities.
double group_velocity(const DispersionModel& model);

}  // namespace biphoton
