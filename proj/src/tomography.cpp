#include "biphoton/tomography.hpp"

#include <cmath>
#include <complex>
#include <sstream>

#include "biphoton/errors.hpp"

namespace biphoton {

namespace {

constexpr double kConstraintSlack = 1e-12;

void physicality(const std::string& what) { throw Error(ErrorKind::Physicality, what); }

}  // namespace

RestrictedDensityMatrix::RestrictedDensityMatrix(double p, double visibility, double phi)
    : p_(p), visibility_(visibility), phi_(phi), matrix_(Eigen::Matrix4cd::Zero()) {
  const std::complex<double> coherence = std::polar(0.5 * visibility, phi);
  matrix_(1, 1) = p;
  matrix_(2, 2) = 1.0 - p;
  matrix_(1, 2) = coherence;
  matrix_(2, 1) = std::conj(coherence);
}

RestrictedDensityMatrix RestrictedDensityMatrix::build(double p, double visibility, double phi) {
  if (!(p >= 0.0 && p <= 1.0)) {
    std::ostringstream msg;
    msg << "density matrix: balance p = " << p << " violates 0 <= p <= 1";
    physicality(msg.str());
  }
  if (!(visibility >= 0.0)) {
    std::ostringstream msg;
    msg << "density matrix: visibility V = " << visibility << " violates 0 <= V/2";
    physicality(msg.str());
  }
  const double bound = std::sqrt(p * (1.0 - p));
  if (0.5 * visibility > bound + kConstraintSlack) {
    std::ostringstream msg;
    msg << "density matrix: V/2 = " << 0.5 * visibility << " violates V/2 <= sqrt(p(1-p)) = " << bound;
    physicality(msg.str());
  }
  if (!std::isfinite(phi)) physicality("density matrix: phase must be finite");
  return RestrictedDensityMatrix(p, visibility, phi);
}

double purity(const RestrictedDensityMatrix& rho) {
  const double p = rho.p();
  const double v = rho.visibility();
  return p * p + (1.0 - p) * (1.0 - p) + 0.5 * v * v;
}

double fidelity_to_ideal(const RestrictedDensityMatrix& rho) {
  return 0.5 * (1.0 + rho.visibility() * std::cos(rho.phi()));
}

double concurrence(const RestrictedDensityMatrix& rho) {
  // With rho11 = rho44 = 0 the Wootters value 2 max(0, |rho23| - sqrt(rho11 rho44)) is V.
  return rho.visibility();
}

double purity_from_matrix(const Eigen::Matrix4cd& rho) { return (rho * rho).trace().real(); }

double fidelity_from_matrix(const Eigen::Matrix4cd& rho) {
  Eigen::Vector4cd psi = Eigen::Vector4cd::Zero();
  psi(1) = psi(2) = 1.0 / std::sqrt(2.0);
  return (psi.adjoint() * rho * psi)(0, 0).real();
}

MetricUncertainty propagate_uncertainty(const RestrictedDensityMatrix& rho, double sigma_p,
                                        double sigma_visibility) {
  const double p = rho.p();
  const double v = rho.visibility();
  const double c = std::cos(rho.phi());
  MetricUncertainty out;
  out.purity = std::hypot((4.0 * p - 2.0) * sigma_p, v * sigma_visibility);
  out.fidelity = std::abs(0.5 * c) * sigma_visibility;
  out.concurrence = sigma_visibility;
  return out;
}

}  // namespace biphoton
