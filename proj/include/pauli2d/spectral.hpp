#pragma once

#include <complex>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "pauli2d/fields.hpp"
#include "pauli2d/geometry.hpp"
#include "pauli2d/potential.hpp"

namespace pauli2d {

/// Discrete spin component (h D - A)^2 + spin*h*B in the gauge A = perp
/// grad psi0, P1 Galerkin with centroid-evaluated gauge terms, Dirichlet
/// rows/columns eliminated.
struct PauliDiscretization {
  Eigen::SparseMatrix<std::complex<double>> stiffness;  // interior dofs
  Eigen::SparseMatrix<double> mass;                     // interior dofs
  double h = 1.0;
  int spin = -1;  // +1 or -1
  std::string gauge;
  std::vector<int> interior;  // reduced index -> mesh vertex
  std::shared_ptr<const TriMesh> mesh;
};

/// Real symmetric Galerkin form h^2 |grad u|^2 + (|grad psi|^2 - h B)|u|^2.
struct WittenDiscretization {
  Eigen::SparseMatrix<double> stiffness;
  Eigen::SparseMatrix<double> mass;
  double h = 1.0;
  std::vector<int> interior;
  std::shared_ptr<const TriMesh> mesh;
};

struct SpectralResult {
  double lambda = 0.0;
  Eigen::VectorXcd eigenvector;  // per mesh vertex, zero on the boundary
  double h = 1.0;
  double residual = 0.0;
  int iterations = 0;
};

struct RateEstimate {
  std::vector<std::pair<double, double>> samples;  // (h, lambda)
  std::vector<double> r_values;                    // h * log lambda
  double fitted_limit = 0.0;                       // intercept of affine fit
  double fit_slope = 0.0;
  double fit_residual = 0.0;
};

/// Assemble the spin component. The gauge gradient uses the field's
/// analytic grad_psi when available, otherwise the P1 gradient of psi.
PauliDiscretization assemble_pauli(std::shared_ptr<const TriMesh> mesh,
                                   const MagneticField& field, const ScalarField& psi,
                                   double h, int spin);

/// Smallest generalized eigenvalue by shift-invert (shift 0, deterministic
/// all-ones start), relative eigen-residual <= tol.
SpectralResult smallest_eigenvalue(const PauliDiscretization& disc, double tol = 1e-8);
SpectralResult smallest_eigenvalue(const WittenDiscretization& disc, double tol = 1e-8);

/// Ground-state energy of the Dirichlet Laplacian on the mesh.
double dirichlet_ground(const TriMesh& mesh, double tol = 1e-10);

/// lambda_D * h^2 * exp(-2 osc / h).
double ekp_lower_bound(double lambdaD, double osc, double h);

struct TrialStateBound {
  double value = 0.0;       // Rayleigh quotient of the trial state
  double quad_error = 0.0;  // difference between two quadrature orders
};

/// Variational bound from the trial state v_eta * exp(-psi/h): v_eta is the
/// distance-ramp cutoff equal to 1 at distance >= 2*eta from the boundary.
/// Quadrature weights are rescaled by exp(2 psi_min / h) before summation.
/// When `analytic` carries a closed-form potential it is used at quadrature
/// points, otherwise the P1 interpolant of `psi`.
TrialStateBound trial_state_bound(const ScalarField& psi, double h, double eta,
                                  const MagneticField* analytic = nullptr);

WittenDiscretization assemble_witten(std::shared_ptr<const TriMesh> mesh,
                                     const MagneticField& field, const ScalarField& psi,
                                     double h);

enum class SpinMode { minus, plus, both };

struct SweepConfig {
  MagneticField field;
  std::shared_ptr<const ImplicitDomain> domain;
  double mesh_h = 0.02;
  std::vector<double> h_list;
  SpinMode mode = SpinMode::both;
  double tol = 1e-8;
  double eta = 0.1;
  bool with_bounds = true;  // lower bound, trial upper bound, Witten column
};

struct SweepRow {
  double h = 0.0;
  std::optional<double> lambda_minus;
  std::optional<double> lambda_plus;
  std::optional<double> Lambda;
  std::optional<double> r_of_h;
  std::optional<double> lower_bound;
  std::optional<double> trial_upper_bound;
  std::optional<double> witten_lambda;
  bool failed = false;
  std::string error;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  RateEstimate rate;
  double osc = 0.0;
  double psi_min = 0.0;
  double psi_max = 0.0;
  double lambdaD = 0.0;
  double theoretical_target = 0.0;  // -2 osc (both), 2 psi_min (minus), -2 psi_max (plus)
  int sandwich_violations = 0;
  bool partial = false;
};

/// Full sweep: mesh the domain, solve the potential, then per h compute the
/// requested spin eigenvalues, r(h) = h log lambda, the rigorous lower
/// bound, the trial-state and Witten upper-bound columns, and an affine fit
/// of r(h). Per-h failures are flagged and skipped in the fit.
SweepResult rate_sweep(const SweepConfig& config);

/// Affine least-squares fit r(h) ~ c0 + c1 h; returns the RateEstimate with
/// fitted_limit = c0.
RateEstimate fit_rate(const std::vector<std::pair<double, double>>& h_lambda);

}  // namespace pauli2d
