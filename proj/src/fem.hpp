#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "pauli2d/geometry.hpp"

namespace pauli2d::detail {

/// P1 element geometry: area and the constant gradient of each nodal basis
/// function on the triangle.
struct TriGeom {
  double area = 0.0;
  Eigen::Matrix<double, 2, 3> grads;
};

TriGeom tri_geom(const TriMesh& mesh, int t);

/// Full (no boundary conditions) stiffness and exact P1 mass matrices.
Eigen::SparseMatrix<double> stiffness_matrix(const TriMesh& mesh);
Eigen::SparseMatrix<double> mass_matrix(const TriMesh& mesh);

/// Dirichlet dof bookkeeping: interior vertex <-> reduced index.
struct DofMap {
  std::vector<int> full_to_reduced;  // -1 for boundary vertices
  std::vector<int> reduced_to_full;
  int n_reduced = 0;
};
DofMap dirichlet_dof_map(const TriMesh& mesh);

/// Restrict a full matrix/vector to interior dofs.
Eigen::SparseMatrix<double> restrict_matrix(const Eigen::SparseMatrix<double>& A,
                                            const DofMap& dofs);
Eigen::VectorXd restrict_vector(const Eigen::VectorXd& v, const DofMap& dofs);

/// Uniform-grid point locator over mesh triangles.
class PointLocator {
 public:
  explicit PointLocator(const TriMesh& mesh);
  /// Containing triangle (barycentric coords optionally returned), or -1.
  /// Points within `slack` outside an element (curved-boundary queries) are
  /// snapped to the nearest candidate triangle.
  int locate(Point2 p, std::array<double, 3>* bary = nullptr,
             double slack = 1e-9) const;

 private:
  const TriMesh& mesh_;
  BBox box_;
  double cell_ = 1.0;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<int>> cells_;
};

/// Area-weighted average of incident-triangle P1 gradients, per vertex.
/// Column v is the recovered gradient at vertex v.
Eigen::Matrix2Xd recovered_gradients(const TriMesh& mesh, const Eigen::VectorXd& values);

/// Boundary edges chained into a closed CCW loop of vertex indices.
/// Throws MeshFailure if the boundary is not a single closed loop.
std::vector<int> boundary_loop(const TriMesh& mesh);

}  // namespace pauli2d::detail
