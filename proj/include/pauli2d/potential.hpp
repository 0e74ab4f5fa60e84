#pragma once

#include <memory>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pauli2d/fields.hpp"
#include "pauli2d/geometry.hpp"

namespace pauli2d {

/// Nodal P1 scalar data on a triangulation.
struct ScalarField {
  std::shared_ptr<const TriMesh> mesh;
  Eigen::VectorXd values;
};

/// Extremum/oscillation summary of a Dirichlet potential.
struct PotentialSolution {
  ScalarField psi;
  double psi_min = 0.0;
  double psi_max = 0.0;
  Point2 argmin;
  Point2 argmax;
  double osc = 0.0;
};

/// P1 Galerkin solution of laplacian(psi) = B with homogeneous Dirichlet
/// data. Load integrated with 3-point vertex quadrature. Direct SPD
/// factorization with an iterative fallback; relative residual <= 1e-10
/// enforced (SingularSystem otherwise).
ScalarField solve_poisson(std::shared_ptr<const TriMesh> mesh, const MagneticField& field);

/// Min/max/oscillation of a nodal field, with one local-quadratic Newton
/// refinement around each interior extremal vertex.
PotentialSolution oscillation(const ScalarField& psi);

/// Outward normal derivative along the boundary, recovered from averaged
/// gradients of boundary-adjacent triangles, at `arc_samples` points spread
/// uniformly in arclength. Returns (point, derivative) pairs in boundary
/// order.
std::vector<std::pair<Point2, double>> normal_derivative(const ScalarField& psi,
                                                         int arc_samples);

/// Dirichlet potential on {sign*B > 0} ∩ container: builds the region via
/// the sublevel machinery, meshes it at mesh_h, solves, and summarizes.
/// sign is +1 or -1. Throws EmptyRegion when the region is below mesh
/// resolution.
PotentialSolution restricted_potential(const MagneticField& field, int sign, double mesh_h,
                                       const ImplicitDomain& container);
PotentialSolution restricted_potential(const MagneticField& field, int sign, double mesh_h);

/// P1 interpolation of the field at p. Throws InvalidArgument if p lies
/// outside the mesh.
double interpolate(const ScalarField& field, Point2 p);

std::string scalar_field_to_json(const ScalarField& field, const std::string& mesh_ref);

}  // namespace pauli2d
