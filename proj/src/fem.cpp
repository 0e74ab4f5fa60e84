#include "fem.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace pauli2d::detail {

TriGeom tri_geom(const TriMesh& mesh, int t) {
  const auto& tr = mesh.triangles[t];
  const Point2 a = mesh.vertices[tr[0]];
  const Point2 b = mesh.vertices[tr[1]];
  const Point2 c = mesh.vertices[tr[2]];
  const double det = cross(b - a, c - a);  // 2*area, positive (CCW)
  TriGeom g;
  g.area = 0.5 * det;
  // grad of barycentric coordinate i is perp(edge opposite i) / det.
  g.grads.col(0) = Eigen::Vector2d(b.x2 - c.x2, c.x1 - b.x1) / det;
  g.grads.col(1) = Eigen::Vector2d(c.x2 - a.x2, a.x1 - c.x1) / det;
  g.grads.col(2) = Eigen::Vector2d(a.x2 - b.x2, b.x1 - a.x1) / det;
  return g;
}

Eigen::SparseMatrix<double> stiffness_matrix(const TriMesh& mesh) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(mesh.triangles.size() * 9);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const TriGeom g = tri_geom(mesh, t);
    const auto& tr = mesh.triangles[t];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        trip.emplace_back(tr[i], tr[j], g.area * g.grads.col(i).dot(g.grads.col(j)));
  }
  Eigen::SparseMatrix<double> K(mesh.num_vertices(), mesh.num_vertices());
  K.setFromTriplets(trip.begin(), trip.end());
  return K;
}

Eigen::SparseMatrix<double> mass_matrix(const TriMesh& mesh) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(mesh.triangles.size() * 9);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const double area = mesh.triangle_area(t);
    const auto& tr = mesh.triangles[t];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        trip.emplace_back(tr[i], tr[j], area * (i == j ? 1.0 / 6.0 : 1.0 / 12.0));
  }
  Eigen::SparseMatrix<double> M(mesh.num_vertices(), mesh.num_vertices());
  M.setFromTriplets(trip.begin(), trip.end());
  return M;
}

DofMap dirichlet_dof_map(const TriMesh& mesh) {
  DofMap d;
  d.full_to_reduced.assign(mesh.num_vertices(), -1);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (!mesh.is_boundary(v)) {
      d.full_to_reduced[v] = d.n_reduced++;
      d.reduced_to_full.push_back(v);
    }
  }
  return d;
}

Eigen::SparseMatrix<double> restrict_matrix(const Eigen::SparseMatrix<double>& A,
                                            const DofMap& dofs) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(A.nonZeros());
  for (int k = 0; k < A.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it) {
      const int i = dofs.full_to_reduced[it.row()];
      const int j = dofs.full_to_reduced[it.col()];
      if (i >= 0 && j >= 0) trip.emplace_back(i, j, it.value());
    }
  Eigen::SparseMatrix<double> R(dofs.n_reduced, dofs.n_reduced);
  R.setFromTriplets(trip.begin(), trip.end());
  return R;
}

Eigen::VectorXd restrict_vector(const Eigen::VectorXd& v, const DofMap& dofs) {
  Eigen::VectorXd r(dofs.n_reduced);
  for (int i = 0; i < dofs.n_reduced; ++i) r[i] = v[dofs.reduced_to_full[i]];
  return r;
}

PointLocator::PointLocator(const TriMesh& mesh) : mesh_(mesh) {
  Point2 lo{1e300, 1e300}, hi{-1e300, -1e300};
  for (const auto& p : mesh.vertices) {
    lo.x1 = std::min(lo.x1, p.x1);
    lo.x2 = std::min(lo.x2, p.x2);
    hi.x1 = std::max(hi.x1, p.x1);
    hi.x2 = std::max(hi.x2, p.x2);
  }
  box_ = BBox{lo, hi};
  const double target = std::max(1.0, (double)mesh.num_triangles());
  cell_ = std::max(1e-12, std::sqrt(std::max(1e-30, box_.width() * box_.height()) / target));
  nx_ = std::max(1, (int)std::ceil(box_.width() / cell_));
  ny_ = std::max(1, (int)std::ceil(box_.height() / cell_));
  cells_.assign((size_t)nx_ * ny_, {});
  auto xi = [&](double x) { return std::min(nx_ - 1, std::max(0, (int)((x - box_.lo.x1) / cell_))); };
  auto yi = [&](double y) { return std::min(ny_ - 1, std::max(0, (int)((y - box_.lo.x2) / cell_))); };
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tr = mesh.triangles[t];
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (const int v : tr) {
      x0 = std::min(x0, mesh.vertices[v].x1);
      x1 = std::max(x1, mesh.vertices[v].x1);
      y0 = std::min(y0, mesh.vertices[v].x2);
      y1 = std::max(y1, mesh.vertices[v].x2);
    }
    for (int j = yi(y0); j <= yi(y1); ++j)
      for (int i = xi(x0); i <= xi(x1); ++i) cells_[(size_t)j * nx_ + i].push_back(t);
  }
}

int PointLocator::locate(Point2 p, std::array<double, 3>* bary, double slack) const {
  auto xi = [&](double x) { return std::min(nx_ - 1, std::max(0, (int)((x - box_.lo.x1) / cell_))); };
  auto yi = [&](double y) { return std::min(ny_ - 1, std::max(0, (int)((y - box_.lo.x2) / cell_))); };
  const int ci = xi(p.x1), cj = yi(p.x2);

  int best_t = -1;
  double best_minbary = -1e300;
  std::array<double, 3> best_b{};
  for (int ring = 0; ring <= 2; ++ring) {
    for (int j = cj - ring; j <= cj + ring; ++j) {
      if (j < 0 || j >= ny_) continue;
      for (int i = ci - ring; i <= ci + ring; ++i) {
        if (i < 0 || i >= nx_) continue;
        if (std::max(std::abs(i - ci), std::abs(j - cj)) != ring) continue;
        for (const int t : cells_[(size_t)j * nx_ + i]) {
          const auto& tr = mesh_.triangles[t];
          const Point2 a = mesh_.vertices[tr[0]], b = mesh_.vertices[tr[1]],
                       c = mesh_.vertices[tr[2]];
          const double det = cross(b - a, c - a);
          if (det <= 0.0) continue;
          const double l0 = cross(b - p, c - p) / det;
          const double l1 = cross(c - p, a - p) / det;
          const double l2 = 1.0 - l0 - l1;
          const double mn = std::min({l0, l1, l2});
          if (mn > best_minbary) {
            best_minbary = mn;
            best_t = t;
            best_b = {l0, l1, l2};
          }
        }
      }
    }
    if (best_minbary >= 0.0) break;  // strictly contained, done
  }
  if (best_t < 0) return -1;
  if (best_minbary < -slack) return -1;
  if (bary) *bary = best_b;
  return best_t;
}

Eigen::Matrix2Xd recovered_gradients(const TriMesh& mesh, const Eigen::VectorXd& values) {
  Eigen::Matrix2Xd g = Eigen::Matrix2Xd::Zero(2, mesh.num_vertices());
  Eigen::VectorXd w = Eigen::VectorXd::Zero(mesh.num_vertices());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const TriGeom tg = tri_geom(mesh, t);
    const auto& tr = mesh.triangles[t];
    Eigen::Vector2d gt = Eigen::Vector2d::Zero();
    for (int i = 0; i < 3; ++i) gt += values[tr[i]] * tg.grads.col(i);
    for (int i = 0; i < 3; ++i) {
      g.col(tr[i]) += tg.area * gt;
      w[tr[i]] += tg.area;
    }
  }
  for (int v = 0; v < mesh.num_vertices(); ++v)
    if (w[v] > 0.0) g.col(v) /= w[v];
  return g;
}

std::vector<int> boundary_loop(const TriMesh& mesh) {
  // Directed boundary edges: each appears once, oriented CCW (domain left).
  std::map<int, int> next;
  std::map<std::pair<int, int>, int> count;
  for (const auto& t : mesh.triangles)
    for (int e = 0; e < 3; ++e) {
      int a = t[e], b = t[(e + 1) % 3];
      const auto key = std::minmax(a, b);
      count[{key.first, key.second}]++;
    }
  for (const auto& t : mesh.triangles)
    for (int e = 0; e < 3; ++e) {
      const int a = t[e], b = t[(e + 1) % 3];
      const auto key = std::minmax(a, b);
      if (count[{key.first, key.second}] == 1) next[a] = b;  // CCW triangle edge
    }
  if (next.empty()) throw MeshFailure("mesh has no boundary edges");
  std::vector<int> loop;
  const int start = next.begin()->first;
  int cur = start;
  do {
    loop.push_back(cur);
    const auto it = next.find(cur);
    if (it == next.end()) throw MeshFailure("boundary loop is not closed");
    cur = it->second;
    if (loop.size() > next.size() + 1) throw MeshFailure("boundary loop does not close");
  } while (cur != start);
  if (loop.size() != next.size())
    throw MeshFailure("boundary has more than one loop");
  return loop;
}

}  // namespace pauli2d::detail
