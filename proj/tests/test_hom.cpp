#include "doctest.h"

#include <cmath>
#include <random>

#include "biphoton/hom.hpp"
#include "biphoton/units.hpp"

using namespace biphoton;

namespace {

const JointSpectrum& preset_spectrum() {
  static const JointSpectrum js =
      build_joint_spectrum(PumpConfig::reference_device(), DispersionModel::reference_device(), GridSpec{});
  return js;
}

constexpr double ps = units::ps;

}  // namespace

TEST_CASE("closed form values") {
  const double mu = kTwoPi / (1.3 * ps);
  const double dt = 10.5 * ps;
  CHECK(coincidence_closed_form(0.0, mu, dt) == 0.0);
  CHECK(coincidence_closed_form(kPi / mu, mu, dt) > 0.99);
  CHECK(coincidence_closed_form(kPi / mu, mu, dt) > 0.5);
  CHECK(coincidence_closed_form(1e-9, mu, dt) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("first beat maximum of the preset") {
  const double mu = kTwoPi / (1.3 * ps);
  const double dt = 10.5 * ps;
  // Golden-section search for the maximum on (0.3, 1.0) ps.
  double a = 0.3 * ps, b = 1.0 * ps;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int i = 0; i < 200; ++i) {
    const double c = b - g * (b - a), d = a + g * (b - a);
    if (coincidence_closed_form(c, mu, dt) > coincidence_closed_form(d, mu, dt)) b = d;
    else a = c;
  }
  CHECK(0.5 * (a + b) / ps == doctest::Approx(0.65).epsilon(1e-3));
}

TEST_CASE("fit model") {
  HomFitParams p{1.0, 10.5 * ps, kTwoPi / (1.3 * ps), 0.0, 0.0};
  for (double t : {-3.0, -0.4, 0.0, 0.7, 12.0}) {
    CHECK(fit_model(t * ps, p) == coincidence_closed_form(t * ps, p.mu, p.delta_tau));
  }
  HomFitParams q{0.701, 10.0 * ps, kTwoPi / (1.8 * ps), 0.0, 0.0};
  CHECK(fit_model(0.0, q) == doctest::Approx(0.1495).epsilon(1e-12));
  CHECK(fit_model(1e-6, q) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(fit_model(-1e-6, q) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("envelope bound and symmetry") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    HomFitParams p{u(rng), (1 + 20 * u(rng)) * ps, kTwoPi / ((0.5 + 3 * u(rng)) * ps), (u(rng) - 0.5) * 1e9,
                   (u(rng) - 0.5) * 0.1};
    for (int k = 0; k < 50; ++k) {
      const double t = (u(rng) - 0.5) * 80 * ps;
      const double env = 0.5 * p.visibility * std::exp(-t * t / (2 * p.delta_tau * p.delta_tau));
      CHECK(std::abs(fit_model(t, p) - 0.5 - p.a * t - p.b) <= env * (1 + 1e-12) + 1e-15);
      CHECK(coincidence_closed_form(-t, p.mu, p.delta_tau) == coincidence_closed_form(t, p.mu, p.delta_tau));
    }
    const double t0 = kTwoPi / p.mu;  // cos = 1
    const double env0 = 0.5 * p.visibility * std::exp(-t0 * t0 / (2 * p.delta_tau * p.delta_tau));
    CHECK(std::abs(fit_model(t0, p) - 0.5 - p.a * t0 - p.b) == doctest::Approx(env0).epsilon(1e-9));
  }
}

TEST_CASE("degenerate beat frequency gives a plain dip") {
  for (double t = -40.0; t <= 40.0; t += 0.37) {
    const double v = coincidence_closed_form(t * ps, 0.0, 10.5 * ps);
    CHECK(v <= 0.5);
    CHECK(v == doctest::Approx(0.5 * (1 - std::exp(-t * t / (2 * 10.5 * 10.5)))).epsilon(1e-14));
  }
}

TEST_CASE("quadrature dip and distinguishable limit") {
  const auto& js = preset_spectrum();
  CHECK(std::abs(coincidence_quadrature(js, 0.0)) < 1e-6);
  const auto pump = PumpConfig::reference_device();
  const auto model = DispersionModel::reference_device();
  const double far = 10 * envelope_width(pump, model);
  // The default grid cannot resolve the oscillatory factor at 10 envelope widths.
  try {
    coincidence_quadrature(js, far);
    FAIL("expected resolution error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Resolution);
  }
  const auto fine = build_joint_spectrum(pump, model, GridSpec{1200, 5.0});
  CHECK(coincidence_quadrature(fine, far) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(coincidence_quadrature(fine, -far) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("quadrature matches the closed form") {
  const auto& js = preset_spectrum();
  const auto pump = PumpConfig::reference_device();
  const auto model = DispersionModel::reference_device();
  const double mu = spectral_separation_mu(pump, model);
  const double dt = envelope_width(pump, model);
  const auto delays = delay_grid(-30 * ps, 30 * ps, 1 * ps);
  REQUIRE(delays.size() == 61);
  const auto q = quadrature_interferogram(js, delays);
  double worst = 0.0;
  for (std::size_t i = 0; i < delays.size(); ++i) {
    worst = std::max(worst, std::abs(q.values[i] - coincidence_closed_form(delays[i], mu, dt)));
    CHECK(q.values[i] == coincidence_quadrature(js, delays[i]));
  }
  CHECK(worst < 1e-6);
  CHECK(probability_excursion(q) < 1e-6);
}

TEST_CASE("delay grid and interferogram validation") {
  const auto d = delay_grid(-1 * ps, 1 * ps, 0.1 * ps);
  REQUIRE(d.size() == 21);
  CHECK(d.front() == -1 * ps);
  CHECK(d.back() == doctest::Approx(1 * ps).epsilon(1e-12));
  CHECK(d[10] == doctest::Approx(0.0).epsilon(1e-12));
  Interferogram bad;
  bad.delays = {0.0, 0.0};
  bad.values = {0.1, 0.2};
  CHECK_THROWS_AS(bad.validate(), Error);
  bad.delays = {0.0, 1.0};
  bad.values = {0.1, 1.5};
  CHECK_THROWS_AS(bad.validate(), Error);
  bad.kind = InterferogramKind::Counts;
  CHECK_NOTHROW(bad.validate());
  bad.values = {-1.0, 3.0};
  CHECK_THROWS_AS(bad.validate(), Error);
  HomFitParams p{1.2, 1.0, 0.0, 0.0, 0.0};
  CHECK_THROWS_AS(p.validate(), Error);
  p = {0.5, 0.0, 0.0, 0.0, 0.0};
  CHECK_THROWS_AS(p.validate(), Error);
}
