#include "doctest.h"

#include <cmath>

#include "biphoton/dispersion.hpp"
#include "biphoton/errors.hpp"
#include "biphoton/units.hpp"

using namespace biphoton;

namespace {

DispersionModel model(double n0h, double n0v, double ng) {
  return DispersionModel{n0h, n0v, ng, omega_from_wavelength(1546.3 * units::nm)};
}

}  // namespace

TEST_CASE("modal index is the reference value at the reference frequency") {
  const auto m = DispersionModel::reference_device();
  CHECK(modal_index(Polarization::H, m.omega_ref, m) == doctest::Approx(m.n0_h).epsilon(1e-15));
  CHECK(modal_index(Polarization::V, m.omega_ref, m) == doctest::Approx(m.n0_v).epsilon(1e-15));
  CHECK(modal_index(Polarization::H, m.omega_ref, m) - modal_index(Polarization::V, m.omega_ref, m) ==
        doctest::Approx(1.2e-2).epsilon(1e-12));
}

TEST_CASE("linear formula off reference") {
  const auto m = model(3.0, 2.99, 3.15);
  CHECK(modal_index(Polarization::H, 1.01 * m.omega_ref, m) == doctest::Approx(3.0015).epsilon(1e-13));
}

TEST_CASE("group velocity") {
  CHECK(group_velocity(model(1.0, 1.0, 1.0)) == doctest::Approx(kSpeedOfLight).epsilon(1e-15));
  CHECK(group_velocity(model(3.16, 3.15, 3.15)) == doctest::Approx(9.52e7).epsilon(1e-3));
  CHECK(group_velocity(model(2.0, 2.0, 2.0)) == doctest::Approx(1.499e8).epsilon(1e-3));
  // Envelope width w_z / v_g for a 1 mm waist.
  CHECK(1e-3 / group_velocity(DispersionModel::reference_device()) == doctest::Approx(10.5e-12).epsilon(0.01));
}

TEST_CASE("modal index slope is exactly linear") {
  const auto m = DispersionModel::reference_device();
  for (auto pol : {Polarization::H, Polarization::V}) {
    const double expected = (m.n_group - m.index_at_reference(pol)) / m.omega_ref;
    const double w[] = {0.7, 0.93, 1.0, 1.18, 1.4};
    for (int i = 0; i + 1 < 5; ++i) {
      const double a = w[i] * m.omega_ref;
      const double b = w[i + 1] * m.omega_ref;
      const double slope = (modal_index(pol, b, m) - modal_index(pol, a, m)) / (b - a);
      CHECK(slope == doctest::Approx(expected).epsilon(1e-9));
    }
  }
}

TEST_CASE("group index at reference equals n_g") {
  const auto m = DispersionModel::reference_device();
  CHECK(group_index(Polarization::H, m.omega_ref, m) == doctest::Approx(m.n_group).epsilon(1e-14));
  CHECK(group_index(Polarization::V, m.omega_ref, m) == doctest::Approx(m.n_group).epsilon(1e-14));
  // Independent check: n + w dn/dw by central difference.
  const double w = m.omega_ref;
  const double dw = 1e-4 * w;
  const double dn = (modal_index(Polarization::H, w + dw, m) - modal_index(Polarization::H, w - dw, m)) / (2 * dw);
  CHECK(modal_index(Polarization::H, w, m) + w * dn == doctest::Approx(m.n_group).epsilon(1e-9));
}

TEST_CASE("invalid inputs") {
  const auto m = DispersionModel::reference_device();
  CHECK_THROWS_AS(modal_index(Polarization::H, 0.0, m), Error);
  CHECK_THROWS_AS(modal_index(Polarization::H, -1.0, m), Error);
  CHECK_THROWS_AS(model(3.2, 3.05, 3.15).validate(), Error);
  CHECK_THROWS_AS(model(0.9, 0.9, 3.15).validate(), Error);
  CHECK_THROWS_AS(model(3.0, 3.0, 11.0).validate(), Error);
  CHECK_NOTHROW(model(3.10, 3.15, 3.15).validate());
  try {
    modal_index(Polarization::H, 0.0, m);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Domain);
  }
}
