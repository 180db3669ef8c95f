#include "biphoton/dispersion.hpp"

#include <cmath>
#include <sstream>

#include "biphoton/errors.hpp"
#include "biphoton/units.hpp"

namespace biphoton {

namespace {

void require_index(const char* name, double value) {
  if (!(value > 1.0 && value < 10.0)) {
    std::ostringstream msg;
    msg << "dispersion: " << name << " must lie in (1, 10), got " << value;
    throw Error(ErrorKind::Domain, msg.str());
  }
}

}  // namespace

void DispersionModel::validate() const {
  require_index("n0_h", n0_h);
  require_index("n0_v", n0_v);
  require_index("n_group", n_group);
  if (!(std::abs(birefringence()) < 0.1)) {
    std::ostringstream msg;
    msg << "dispersion: |n0_h - n0_v| must be below 0.1, got " << birefringence();
    throw Error(ErrorKind::Domain, msg.str());
  }
  if (!(omega_ref > 0.0) || !std::isfinite(omega_ref)) {
    throw Error(ErrorKind::Domain, "dispersion: omega_ref must be positive and finite");
  }
}

DispersionModel DispersionModel::reference_device() {
  return DispersionModel{
      .n0_h = 3.162,
      .n0_v = 3.150,
      .n_group = 3.15,
      .omega_ref = omega_from_wavelength(1546.3 * units::nm),
  };
}

double modal_index(Polarization pol, double omega, const DispersionModel& model) {
  if (!(omega > 0.0)) {
    std::ostringstream msg;
    msg << "modal_index: angular frequency must be positive, got " << omega;
    throw Error(ErrorKind::Domain, msg.str());
  }
  const double n0 = model.index_at_reference(pol);
  return n0 + (model.n_group - n0) * (omega - model.omega_ref) / model.omega_ref;
}

double group_index(Polarization pol, double omega, const DispersionModel& model) {
  const double n0 = model.index_at_reference(pol);
  const double slope = (model.n_group - n0) / model.omega_ref;
  return modal_index(pol, omega, model) + omega * slope;
}

double group_velocity(const DispersionModel& model) {
  if (!(model.n_group >= 1.0)) {
    throw Error(ErrorKind::Domain, "group_velocity: group index must be >= 1");
  }
  return kSpeedOfLight / model.n_group;
}

}  // namespace biphoton
