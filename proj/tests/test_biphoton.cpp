#include "doctest.h"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "biphoton/biphoton.hpp"
#include "biphoton/units.hpp"
#include "oracles.hpp"

using namespace biphoton;

namespace {

const JointSpectrum& preset_spectrum() {
  static const JointSpectrum js =
      build_joint_spectrum(PumpConfig::reference_device(), DispersionModel::reference_device(), GridSpec{});
  return js;
}

double jsi_total(const JointSpectrum& js) {
  double s = 0.0;
  for (std::size_t i = 0; i < js.size(); ++i)
    for (std::size_t j = 0; j < js.size(); ++j) s += js.jsi(i, j);
  return s * js.spacing() * js.spacing();
}

// Signal-axis peak positions of the two lobes (below and above omega_p / 2).
std::pair<double, double> lobe_peaks(const std::vector<double>& omega, const std::vector<double>& marginal,
                                     double centre) {
  std::vector<double> lo_x, lo_y, hi_x, hi_y;
  for (std::size_t i = 0; i < omega.size(); ++i) {
    auto& x = omega[i] < centre ? lo_x : hi_x;
    auto& y = omega[i] < centre ? lo_y : hi_y;
    x.push_back(omega[i]);
    y.push_back(marginal[i]);
  }
  return {oracle::refined_peak(lo_x, lo_y), oracle::refined_peak(hi_x, hi_y)};
}

}  // namespace

TEST_CASE("pump spectral amplitude") {
  const auto pump = PumpConfig::reference_device();
  const double wp = pump.omega_p();
  const double s = pump_spectral_width(pump);
  CHECK(std::abs(pump_spectral_amplitude(wp, pump)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(s == doctest::Approx(3.70e11).epsilon(2e-3));
  const double half = s * std::sqrt(2.0 * std::log(2.0));
  CHECK(std::norm(pump_spectral_amplitude(wp + half, pump)) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::norm(pump_spectral_amplitude(wp - half, pump)) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("phase-matching amplitude") {
  const auto pump = PumpConfig::reference_device();
  const auto model = DispersionModel::reference_device();
  const double mu = spectral_separation_mu(pump, model);
  const double dw = intra_mode_width(pump, model);
  const double peak = std::sqrt(kPi) * pump.waist_wz;
  CHECK(std::abs(phase_matching_amplitude(Interaction::HV, mu, pump, model)) == doctest::Approx(peak).epsilon(1e-14));
  CHECK(std::abs(phase_matching_amplitude(Interaction::HV, mu + dw, pump, model)) / peak ==
        doctest::Approx(std::exp(-0.5)).epsilon(1e-13));
  for (double x : {-3e12, -1e11, 0.0, 2.5e11, 4e12}) {
    CHECK(std::abs(phase_matching_amplitude(Interaction::HV, x, pump, model) -
                   phase_matching_amplitude(Interaction::VH, -x, pump, model)) < 1e-18);
  }
}

TEST_CASE("joint spectrum normalization and axes") {
  const auto& js = preset_spectrum();
  CHECK(jsi_total(js) == doctest::Approx(1.0).epsilon(1e-9));
  const auto& axis = js.omega_s_axis();
  for (std::size_t i = 1; i < axis.size(); ++i) {
    CHECK(axis[i] > axis[i - 1]);
    CHECK(axis[i] - axis[i - 1] == doctest::Approx(js.spacing()).epsilon(1e-9));
  }
  const double wp = PumpConfig::reference_device().omega_p();
  CHECK(0.5 * (axis.front() + axis.back()) == doctest::Approx(wp / 2).epsilon(1e-14));
}

TEST_CASE("two JSI peaks separated by mu along the signal axis") {
  const auto& js = preset_spectrum();
  const auto pump = PumpConfig::reference_device();
  const double mu = spectral_separation_mu(pump, DispersionModel::reference_device());
  const std::size_t n = js.size();
  std::size_t best_hv = 0, best_vh = 0;
  for (std::size_t k = 0; k < n * n; ++k) {
    if (std::norm(js.amp(Interaction::HV)[k]) > std::norm(js.amp(Interaction::HV)[best_hv])) best_hv = k;
    if (std::norm(js.amp(Interaction::VH)[k]) > std::norm(js.amp(Interaction::VH)[best_vh])) best_vh = k;
  }
  const auto& axis = js.omega_s_axis();
  const double s_hv = axis[best_hv / n], i_hv = axis[best_hv % n];
  const double s_vh = axis[best_vh / n], i_vh = axis[best_vh % n];
  CHECK(std::abs((s_hv - s_vh) - mu) <= js.spacing());
  // Mirror images about the degenerate point.
  CHECK(s_hv == doctest::Approx(i_vh).epsilon(1e-15));
  CHECK(i_hv == doctest::Approx(s_vh).epsilon(1e-15));
  // Anti-diagonal orientation: the lobe is longer along omega_- than along omega_+.
  const auto sd = sum_difference_samples(js, Interaction::HV);
  CHECK(pump_spectral_width(pump) < intra_mode_width(pump, DispersionModel::reference_device()) * 10);
  CHECK(sd.rows() > 0);
}

TEST_CASE("no birefringence collapses the peaks") {
  auto model = DispersionModel::reference_device();
  model.n0_h = model.n0_v = 3.156;
  const auto js = build_joint_spectrum(PumpConfig::reference_device(), model, GridSpec{128, 5.0});
  for (std::size_t k = 0; k < js.size() * js.size(); ++k) {
    CHECK(js.amp(Interaction::HV)[k] == js.amp(Interaction::VH)[k]);
  }
}

TEST_CASE("exchange symmetry") {
  const auto& js = preset_spectrum();
  double worst = 0.0;
  for (std::size_t i = 0; i < js.size(); ++i)
    for (std::size_t j = 0; j < js.size(); ++j)
      worst = std::max(worst, std::abs(js.amp(Interaction::HV, i, j) - js.amp(Interaction::VH, j, i)));
  CHECK(worst < 1e-12 * std::abs(js.amp(Interaction::HV)[0] + 1.0));
}

TEST_CASE("separability in sum and difference coordinates") {
  const auto& js = preset_spectrum();
  for (auto inter : {Interaction::HV, Interaction::VH}) {
    const Eigen::MatrixXcd m = sum_difference_samples(js, inter);
    REQUIRE(m.rows() >= 16);
    REQUIRE(m.cols() >= 16);
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(m);
    const auto& s = svd.singularValues();
    CHECK(s(1) < 1e-6 * s(0));
  }
}

TEST_CASE("marginals") {
  const auto& js = preset_spectrum();
  const auto marg = marginal_spectra(js);
  const double h = js.spacing();
  double ss = 0.0, si = 0.0;
  for (std::size_t i = 0; i < marg.omega.size(); ++i) {
    ss += marg.signal[i] * h;
    si += marg.idler[i] * h;
  }
  CHECK(ss == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(si == doctest::Approx(1.0).epsilon(1e-9));
  const std::size_t n = marg.omega.size();
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(marg.signal[i] == doctest::Approx(marg.idler[n - 1 - i]).epsilon(1e-12));
  }
  const double wp = PumpConfig::reference_device().omega_p();
  CHECK(extract_population_p(jsi_grid(js), wp / 2) == doctest::Approx(0.5).epsilon(1e-6));
  const auto [lo, hi] = lobe_peaks(marg.omega, marg.signal, wp / 2);
  const double sep_nm = (wavelength_from_omega(lo) - wavelength_from_omega(hi)) / units::nm;
  CHECK(sep_nm == doctest::Approx(6.2).epsilon(0.10));
}

TEST_CASE("population from a synthetic two-peak JSI") {
  // 0.6 of the weight in the upper signal lobe, 0.4 in the lower, on a
  // non-uniform grid fine enough that the cell sums equal the integrals.
  JsiGrid g;
  const double c = 1.2e15, sep = 4e12, w = 2e11;
  for (int i = -300; i <= 300; ++i) {
    const double x = i / 30.0;
    g.omega_s.push_back(c + x * 1e12 + 1e10 * std::sin(x));
    g.omega_i.push_back(c + x * 1e12);
  }
  for (double s : g.omega_s)
    for (double id : g.omega_i) {
      auto lobe = [&](double cs, double ci) {
        return std::exp(-((s - cs) * (s - cs) + (id - ci) * (id - ci)) / (2 * w * w));
      };
      g.values.push_back(0.6 * lobe(c + sep / 2, c - sep / 2) + 0.4 * lobe(c - sep / 2, c + sep / 2));
    }
  CHECK(extract_population_p(g, c) == doctest::Approx(0.6).epsilon(1e-6));
}

TEST_CASE("population input errors") {
  JsiGrid empty;
  CHECK_THROWS_AS(extract_population_p(empty, 1.0), Error);
  JsiGrid zero{{1.0, 2.0}, {1.0, 2.0}, {0.0, 0.0, 0.0, 0.0}};
  try {
    extract_population_p(zero, 1.5);
    FAIL("expected degenerate input");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateInput);
  }
}

TEST_CASE("refinement invariance") {
  const auto pump = PumpConfig::reference_device();
  const auto model = DispersionModel::reference_device();
  const auto& coarse = preset_spectrum();
  const auto fine = build_joint_spectrum(pump, model, GridSpec{1024, 5.0});
  const double wp = pump.omega_p();
  CHECK(std::abs(extract_population_p(jsi_grid(coarse), wp / 2) - extract_population_p(jsi_grid(fine), wp / 2)) <
        1e-6);
  const auto mc = marginal_spectra(coarse);
  const auto mf = marginal_spectra(fine);
  const auto [lc, hc] = lobe_peaks(mc.omega, mc.signal, wp / 2);
  const auto [lf, hf] = lobe_peaks(mf.omega, mf.signal, wp / 2);
  CHECK(std::abs(lc - lf) / wp < 1e-6);
  CHECK(std::abs(hc - hf) / wp < 1e-6);
  // Marginal value at the peak, compared through the off-grid amplitude.
  const double mu = spectral_separation_mu(pump, model);
  const double probe = wp / 2 + mu / 2;
  auto marginal_at = [](const MarginalSpectra& m, double w) {
    const auto it = std::lower_bound(m.omega.begin(), m.omega.end(), w);
    const std::size_t k = static_cast<std::size_t>(it - m.omega.begin());
    const double t = (w - m.omega[k - 1]) / (m.omega[k] - m.omega[k - 1]);
    return (1 - t) * m.signal[k - 1] + t * m.signal[k];
  };
  const double pc = marginal_at(mc, probe);
  CHECK(std::abs(pc - marginal_at(mf, probe)) / pc < 1e-2);
  CHECK(std::abs(fine.amplitude(Interaction::HV, probe, wp / 2 - mu / 2) -
                 coarse.amplitude(Interaction::HV, probe, wp / 2 - mu / 2)) /
            std::abs(coarse.amplitude(Interaction::HV, probe, wp / 2 - mu / 2)) <
        1e-6);
}

TEST_CASE("coarse grids are rejected") {
  const auto pump = PumpConfig::reference_device();
  const auto model = DispersionModel::reference_device();
  for (std::size_t points : {std::size_t{32}, std::size_t{64}}) {
    try {
      build_joint_spectrum(pump, model, GridSpec{points, 5.0});
      FAIL("expected resolution error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Resolution);
    }
  }
}
