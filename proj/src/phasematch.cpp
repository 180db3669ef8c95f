#include "biphoton/phasematch.hpp"

#include <cmath>
#include <sstream>

#include "biphoton/parallel.hpp"
#include "biphoton/units.hpp"

namespace biphoton {

double PumpConfig::omega_p() const noexcept { return omega_from_wavelength(lambda_p); }

void PumpConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::Domain, "pump: " + what); };
  if (!(lambda_p > 0.5 * units::um && lambda_p < 1.5 * units::um)) {
    fail("lambda_p must lie in (0.5, 1.5) um");
  }
  if (!(pulse_fwhm > 0.0) || !std::isfinite(pulse_fwhm)) fail("pulse_fwhm must be positive");
  if (!(waist_wz > 0.0) || !std::isfinite(waist_wz)) fail("waist_wz must be positive");
  if (!(std::abs(theta) < 0.5 * kPi)) fail("|theta| must be below pi/2");
}

PumpConfig PumpConfig::reference_device() {
  return PumpConfig{
      .lambda_p = 773.15 * units::nm,
      .pulse_fwhm = 4.5 * units::ps,
      .waist_wz = 1.0 * units::mm,
      .theta = 0.0,
  };
}

double phase_mismatch(Interaction interaction, double omega_s, const PumpConfig& pump,
                      const DispersionModel& model) {
  const double omega_p = pump.omega_p();
  const double omega_i = omega_p - omega_s;
  const Polarization signal_pol = interaction == Interaction::HV ? Polarization::H : Polarization::V;
  const Polarization idler_pol = interaction == Interaction::HV ? Polarization::V : Polarization::H;
  const double k_signal = omega_s * modal_index(signal_pol, omega_s, model);
  const double k_idler = omega_i * modal_index(idler_pol, omega_i, model);
  return omega_p * std::sin(pump.theta) - (k_signal - k_idler);
}

Bracket signal_search_bracket(const PumpConfig& pump) {
  const double half = 0.5 * pump.omega_p();
  return Bracket{0.6 * half, 1.4 * half};
}

namespace {

double solve_signal(Interaction interaction, const PumpConfig& pump, const DispersionModel& model) {
  const Bracket bracket = signal_search_bracket(pump);
  const RootResult r = find_root_bracketed(
      [&](double omega_s) { return phase_mismatch(interaction, omega_s, pump, model); }, bracket,
      1e-12);
  if (!r.bracketed) {
    std::ostringstream msg;
    msg << "no phase matching for interaction " << (interaction == Interaction::HV ? "HV" : "VH")
        << " at theta = " << pump.theta << " rad: mismatch " << r.f_lo << " at omega_s = "
        << bracket.lo << " and " << r.f_hi << " at omega_s = " << bracket.hi
        << " (no sign change)";
    throw NoPhaseMatchingError(msg.str(), bracket.lo, bracket.hi, r.f_lo, r.f_hi);
  }
  return r.root;
}

}  // namespace

TunabilityPoint solve_central_frequencies(const PumpConfig& pump, const DispersionModel& model) {
  pump.validate();
  model.validate();
  const double omega_p = pump.omega_p();
  TunabilityPoint point;
  point.theta = pump.theta;
  point.omega_s_hv = solve_signal(Interaction::HV, pump, model);
  point.omega_i_hv = omega_p - point.omega_s_hv;
  point.omega_s_vh = solve_signal(Interaction::VH, pump, model);
  point.omega_i_vh = omega_p - point.omega_s_vh;
  return point;
}

std::vector<TunabilityPoint> tunability_curve(const PumpConfig& pump, const DispersionModel& model,
                                              const std::vector<double>& thetas) {
  std::vector<TunabilityPoint> curve(thetas.size());
  parallel_for(thetas.size(), [&](std::size_t i) {
    PumpConfig tilted = pump;
    tilted.theta = thetas[i];
    curve[i] = solve_central_frequencies(tilted, model);
  });
  return curve;
}

double spectral_separation_mu(const PumpConfig& pump, const DispersionModel& model) {
  return group_velocity(model) * pump.omega_p() * model.birefringence() / (2.0 * kSpeedOfLight);
}

double intra_mode_width(const PumpConfig& pump, const DispersionModel& model) {
  if (!(pump.waist_wz > 0.0)) throw Error(ErrorKind::Domain, "pump waist must be positive");
  return std::sqrt(2.0) * group_velocity(model) / pump.waist_wz;
}

double envelope_width(const PumpConfig& pump, const DispersionModel& model) {
  return std::sqrt(2.0) / intra_mode_width(pump, model);
}

}  // namespace biphoton
