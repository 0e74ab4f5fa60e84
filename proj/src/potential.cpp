#include "pauli2d/potential.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <nlohmann/json.hpp>

#include "fem.hpp"

namespace pauli2d {

using detail::DofMap;

ScalarField solve_poisson(std::shared_ptr<const TriMesh> mesh, const MagneticField& field) {
  const TriMesh& m = *mesh;
  const auto K = detail::stiffness_matrix(m);

  // Load F_i = ∫ B φ_i with vertex quadrature (B at the triangle corners).
  Eigen::VectorXd F = Eigen::VectorXd::Zero(m.num_vertices());
  for (int t = 0; t < m.num_triangles(); ++t) {
    const double w = m.triangle_area(t) / 3.0;
    for (const int v : m.triangles[t]) F[v] += w * field.B(m.vertices[v]);
  }

  // Weak form of Δψ = B with ψ ∈ H¹₀: ∫∇ψ·∇v = -∫B v.
  const DofMap dofs = detail::dirichlet_dof_map(m);
  const auto Kii = detail::restrict_matrix(K, dofs);
  const Eigen::VectorXd Fi = -detail::restrict_vector(F, dofs);

  Eigen::VectorXd ui;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(Kii);
  bool ok = (ldlt.info() == Eigen::Success);
  if (ok) {
    ui = ldlt.solve(Fi);
    ok = (ldlt.info() == Eigen::Success);
  }
  const double fnorm = std::max(Fi.norm(), 1e-300);
  if (!ok || (Kii * ui - Fi).norm() / fnorm > 1e-10) {
    // Iterative fallback.
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg(Kii);
    cg.setTolerance(1e-12);
    cg.setMaxIterations(20000);
    ui = cg.solve(Fi);
    if ((Kii * ui - Fi).norm() / fnorm > 1e-10)
      throw SingularSystem("Poisson system residual above 1e-10");
  }

  ScalarField out;
  out.mesh = mesh;
  out.values = Eigen::VectorXd::Zero(m.num_vertices());
  for (int i = 0; i < dofs.n_reduced; ++i) out.values[dofs.reduced_to_full[i]] = ui[i];
  return out;
}

namespace {

struct Extremum {
  double value;
  Point2 where;
};

// Refine a nodal extremum with a quadratic least-squares fit over the
// two-ring vertex patch; one Newton step from the extremal vertex.
Extremum refine_extremum(const TriMesh& mesh, const Eigen::VectorXd& vals, int vstar,
                         bool maximize) {
  Extremum e{vals[vstar], mesh.vertices[vstar]};
  if (mesh.is_boundary(vstar)) return e;  // boundary extremum is exactly 0

  std::set<int> ring1, patch;
  for (const auto& t : mesh.triangles) {
    if (t[0] == vstar || t[1] == vstar || t[2] == vstar)
      for (const int v : t) ring1.insert(v);
  }
  patch = ring1;
  for (const auto& t : mesh.triangles) {
    if (ring1.count(t[0]) || ring1.count(t[1]) || ring1.count(t[2]))
      for (const int v : t) patch.insert(v);
  }
  if (patch.size() < 6) return e;

  const Point2 c = mesh.vertices[vstar];
  double scale = 0.0;
  for (const int v : patch) scale = std::max(scale, dist(mesh.vertices[v], c));
  if (scale <= 0.0) return e;

  Eigen::MatrixXd A(patch.size(), 6);
  Eigen::VectorXd b(patch.size());
  int row = 0;
  for (const int v : patch) {
    const double x = (mesh.vertices[v].x1 - c.x1) / scale;
    const double y = (mesh.vertices[v].x2 - c.x2) / scale;
    A.row(row) << 1.0, x, y, x * x, x * y, y * y;
    b[row] = vals[v];
    ++row;
  }
  const Eigen::VectorXd q = A.colPivHouseholderQr().solve(b);
  Eigen::Matrix2d H;
  H << 2.0 * q[3], q[4], q[4], 2.0 * q[5];
  const Eigen::Vector2d g(q[1], q[2]);
  const double det = H.determinant();
  if (std::abs(det) < 1e-14) return e;
  const Eigen::Vector2d step = -H.inverse() * g;  // Newton from the vertex
  if (step.norm() > 1.5) return e;                // fit not trustworthy
  // Hessian signature must match the extremum type.
  const double tr = H.trace();
  if (maximize ? !(det > 0 && tr < 0) : !(det > 0 && tr > 0)) return e;
  const double value =
      q[0] + g.dot(step) + 0.5 * step.dot(H * step);
  const Point2 where{c.x1 + scale * step[0], c.x2 + scale * step[1]};
  if (mesh.domain && mesh.domain->signed_distance(where) >= 0.0) return e;
  if (maximize ? value > e.value : value < e.value) {
    e.value = value;
    e.where = where;
  }
  return e;
}

}  // namespace

PotentialSolution oscillation(const ScalarField& psi) {
  const TriMesh& m = *psi.mesh;
  int imin = 0, imax = 0;
  for (int v = 1; v < m.num_vertices(); ++v) {
    if (psi.values[v] < psi.values[imin]) imin = v;
    if (psi.values[v] > psi.values[imax]) imax = v;
  }
  const Extremum lo = refine_extremum(m, psi.values, imin, /*maximize=*/false);
  const Extremum hi = refine_extremum(m, psi.values, imax, /*maximize=*/true);

  PotentialSolution sol;
  sol.psi = psi;
  sol.psi_min = lo.value;
  sol.psi_max = hi.value;
  sol.argmin = lo.where;
  sol.argmax = hi.where;
  sol.osc = hi.value - lo.value;
  return sol;
}

std::vector<std::pair<Point2, double>> normal_derivative(const ScalarField& psi,
                                                         int arc_samples) {
  const TriMesh& m = *psi.mesh;
  const auto loop = detail::boundary_loop(m);
  const auto grads = detail::recovered_gradients(m, psi.values);

  const int nl = static_cast<int>(loop.size());
  std::vector<double> arclen(nl + 1, 0.0);
  for (int i = 0; i < nl; ++i)
    arclen[i + 1] = arclen[i] + dist(m.vertices[loop[i]], m.vertices[loop[(i + 1) % nl]]);
  const double per = arclen[nl];

  std::vector<std::pair<Point2, double>> out;
  out.reserve(arc_samples);
  int seg = 0;
  for (int k = 0; k < arc_samples; ++k) {
    const double target = per * k / arc_samples;
    while (seg + 1 <= nl && arclen[seg + 1] < target) ++seg;
    const int a = loop[seg % nl], b = loop[(seg + 1) % nl];
    const Point2 pa = m.vertices[a], pb = m.vertices[b];
    const double len = std::max(arclen[seg + 1] - arclen[seg], 1e-300);
    const double t = (target - arclen[seg]) / len;
    const Point2 p = pa + t * (pb - pa);
    // Outward normal of the CCW boundary edge.
    const Point2 tangent = (1.0 / len) * (pb - pa);
    const Point2 nrm{tangent.x2, -tangent.x1};
    const Eigen::Vector2d g = (1.0 - t) * grads.col(a) + t * grads.col(b);
    out.emplace_back(p, g[0] * nrm.x1 + g[1] * nrm.x2);
  }
  return out;
}

PotentialSolution restricted_potential(const MagneticField& field, int sign, double mesh_h,
                                       const ImplicitDomain& container) {
  if (sign != 1 && sign != -1) throw InvalidArgument("sign must be +1 or -1");
  const double s = static_cast<double>(sign);
  const auto B = field.B;

  // Seed: grid argmax of sign*B inside the container.
  const BBox box = container.bounding_box();
  Point2 seed{};
  double best = -1e300;
  const int gn = 96;
  for (int j = 1; j < gn; ++j)
    for (int i = 1; i < gn; ++i) {
      const Point2 p{box.lo.x1 + box.width() * i / gn, box.lo.x2 + box.height() * j / gn};
      if (container.signed_distance(p) >= -1e-12) continue;
      const double v = s * B(p);
      if (v > best) {
        best = v;
        seed = p;
      }
    }
  if (!(best > 0.0)) throw EmptyRegion("sign region of B is empty in the container");

  // {sign*B > 0} = {-sign*B < 0}.
  auto func = [B, s](Point2 p) { return -s * B(p); };
  ImplicitDomain region = ImplicitDomain::sublevel_in(func, 0.0, container, seed);

  const double area = 0.5 * std::abs(polygon_signed_area2(region.boundary_polyline()));
  if (area < 4.0 * mesh_h * mesh_h)
    throw EmptyRegion("sign region area is below mesh resolution");

  auto mesh = std::make_shared<const TriMesh>(generate_mesh(region, mesh_h));
  const ScalarField psi = solve_poisson(mesh, field);
  return oscillation(psi);
}

PotentialSolution restricted_potential(const MagneticField& field, int sign, double mesh_h) {
  return restricted_potential(field, sign, mesh_h,
                              ImplicitDomain::disk(Point2{0.0, 0.0}, 1.0));
}

double interpolate(const ScalarField& field, Point2 p) {
  const detail::PointLocator loc(*field.mesh);
  std::array<double, 3> bary{};
  const int t = loc.locate(p, &bary, 1e-6);
  if (t < 0) throw InvalidArgument("interpolation point outside mesh");
  const auto& tr = field.mesh->triangles[t];
  return bary[0] * field.values[tr[0]] + bary[1] * field.values[tr[1]] +
         bary[2] * field.values[tr[2]];
}

std::string scalar_field_to_json(const ScalarField& field, const std::string& mesh_ref) {
  nlohmann::json j;
  j["mesh_ref"] = mesh_ref;
  j["values"] = std::vector<double>(field.values.data(),
                                    field.values.data() + field.values.size());
  return j.dump();
}

}  // namespace pauli2d
