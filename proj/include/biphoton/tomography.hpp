#pragma once

#include <Eigen/Dense>

namespace biphoton {

/// Restricted two-photon density matrix on the hybrid polarization-frequency
/// subspace, in the basis
///   { |H w2>|V w1>, |H w1>|V w2>, |V w2>|H w1>, |V w1>|H w2> }  (signal, idler).
/// Only the middle 2x2 block is populated:
///   rho22 = p, rho33 = 1 - p, rho23 = (V/2) e^{i phi}.
class RestrictedDensityMatrix {
 public:
  // Throws Error(Physicality) unless 0 <= p <= 1, 0 <= V and
  // V/2 <= sqrt(p (1 - p)).
  static RestrictedDensityMatrix build(double p, double visibility, double phi = 0.0);

  double p() const noexcept { return p_; }
  double visibility() const noexcept { return visibility_; }
  double phi() const noexcept { return phi_; }
  const Eigen::Matrix4cd& matrix() const noexcept { return matrix_; }

 private:
  RestrictedDensityMatrix(double p, double visibility, double phi);

  double p_;
  double visibility_;
  double phi_;
  Eigen::Matrix4cd matrix_;
};

inline RestrictedDensityMatrix build_density_matrix(double p, double visibility, double phi = 0.0) {
  return RestrictedDensityMatrix::build(p, visibility, phi);
}

// Closed forms on the (p, V, phi) parameters.
double purity(const RestrictedDensityMatrix& rho);             // p^2 + (1-p)^2 + V^2/2
double fidelity_to_ideal(const RestrictedDensityMatrix& rho);  // (1 + V cos phi) / 2
double concurrence(const RestrictedDensityMatrix& rho);        // V

// The same quantities from the matrix itself.
double purity_from_matrix(const Eigen::Matrix4cd& rho);    // Tr(rho^2)
double fidelity_from_matrix(const Eigen::Matrix4cd& rho);  // <Psi|rho|Psi>, Psi = (e2 + e3)/sqrt2

struct MetricUncertainty {
  double purity = 0.0;
  double fidelity = 0.0;
  double concurrence = 0.0;
};

// First-order propagation of independent standard errors on p and V.
MetricUncertainty propagate_uncertainty(const RestrictedDensityMatrix& rho, double sigma_p,
                                        double sigma_visibility);

}  // namespace biphoton
