#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "biphoton/errors.hpp"
#include "biphoton/hom.hpp"

namespace biphoton {

// Parameter order used by masks and the covariance matrix.
enum FitParam : int { kFitV = 0, kFitDeltaTau = 1, kFitMu = 2, kFitA = 3, kFitB = 4 };
inline constexpr int kFitParamCount = 5;

const char* fit_param_name(int index) noexcept;

struct FitOptions {
  std::array<bool, kFitParamCount> fixed{};  // true keeps the initial value
  int max_iterations = 500;
  double objective_rtol = 1e-10;
  double gradient_tol = 1e-8;
  // Counts per unit probability. Counts data are divided by this before
  // fitting; when absent it is estimated as twice the mean of the outer tails.
  std::optional<double> count_scale;
};

struct FitResult {
  HomFitParams params;
  Eigen::Matrix<double, kFitParamCount, kFitParamCount> covariance =
      Eigen::Matrix<double, kFitParamCount, kFitParamCount>::Zero();
  double reduced_chi2 = 0.0;
  double rms_residual = 0.0;  // unweighted, in probability units
  double gradient_norm = 0.0;  // projected max-norm of the objective gradient at params, internal units
  double count_scale = 1.0;
  int iterations = 0;
  bool converged = false;
  // Set when the visibility sits at zero and the envelope and beat parameters
  // are not identified by the data; their covariance rows are left at zero.
  bool degenerate = false;
  std::vector<std::string> unidentified;
  std::vector<double> objective_history;  // accepted objective values

  double standard_error(int index) const { return std::sqrt(std::max(0.0, covariance(index, index))); }
};

class FitNonConvergence : public Error {
 public:
  FitNonConvergence(const std::string& message, HomFitParams best, int iterations)
      : Error(ErrorKind::NonConvergence, message), best_(best), iterations_(iterations) {}

  const HomFitParams& best_so_far() const noexcept { return best_; }
  int iterations() const noexcept { return iterations_; }

 private:
  HomFitParams best_;
  int iterations_;
};

struct InitialGuess {
  HomFitParams params;
  bool low_frequency = false;  // beat frequency below 2 pi / span
};

// Heuristic starting point. Throws Error(InsufficientData) below 4 points.
InitialGuess initial_guess(const Interferogram& data, std::optional<double> count_scale = std::nullopt);

// Weighted damped least-squares fit of the drift-corrected beating model.
// Throws Error(InsufficientData) below 10 points or when the delays span less
// than one beat period of the initial guess, Error(Domain) for an initial
// point outside the bounds, FitNonConvergence after max_iterations and
// Error(DegenerateFit) when the curvature is singular at the optimum.
FitResult fit_hom_interferogram(const Interferogram& data, const HomFitParams& init,
                                const FitOptions& options = {});

// Counts per unit probability estimated from the outer 20% of the delay span.
double estimate_count_scale(const Interferogram& data);

}  // namespace biphoton
