#include "pauli2d/morse.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "marching.hpp"

namespace pauli2d {

AnalyticScalar potential_of(const MagneticField& field) {
  if (!field.psi)
    throw NoAnalyticPotential("field '" + field.name + "' has no closed-form potential");
  AnalyticScalar f;
  f.value = field.psi;
  f.grad = field.grad_psi;
  f.hess = field.hess_psi;
  return f;
}

CritKind classify(const Eigen::Matrix2d& hess) {
  const double det = hess.determinant();
  const double frob2 = hess.squaredNorm();
  if (std::abs(det) <= 1e-8 * frob2) return CritKind::degenerate;
  if (det < 0.0) return CritKind::saddle;
  return hess.trace() > 0.0 ? CritKind::minimum : CritKind::maximum;
}

std::string to_string(CritKind kind) {
  switch (kind) {
    case CritKind::minimum: return "min";
    case CritKind::maximum: return "max";
    case CritKind::saddle: return "saddle";
    case CritKind::degenerate: return "degenerate";
  }
  return "?";
}

std::vector<CriticalPoint> find_critical_points(const AnalyticScalar& f,
                                                const ImplicitDomain& domain,
                                                int seed_grid_n) {
  if (!f.grad || !f.hess)
    throw InvalidArgument("find_critical_points needs analytic gradient and Hessian");
  const BBox box = domain.bounding_box();
  const double diam = domain.diameter();
  const double closure_tol = 1e-8 * std::max(1.0, diam);

  std::vector<CriticalPoint> found;
  for (int j = 0; j <= seed_grid_n; ++j)
    for (int i = 0; i <= seed_grid_n; ++i) {
      Point2 x{box.lo.x1 + box.width() * i / seed_grid_n,
               box.lo.x2 + box.height() * j / seed_grid_n};
      if (domain.signed_distance(x) > 0.0) continue;
      bool ok = false;
      for (int it = 0; it < 80; ++it) {
        const Eigen::Vector2d g = f.grad(x);
        if (!g.allFinite()) break;
        if (g.norm() <= 1e-13) {
          ok = true;
          break;
        }
        const Eigen::Matrix2d H = f.hess(x);
        const double det = H.determinant();
        if (!H.allFinite() || std::abs(det) < 1e-300) break;
        const Eigen::Vector2d step = H.inverse() * g;
        x = Point2{x.x1 - step[0], x.x2 - step[1]};
        if (std::abs(x.x1) > 100.0 * std::max(1.0, diam) ||
            std::abs(x.x2) > 100.0 * std::max(1.0, diam))
          break;
      }
      if (!ok) continue;
      if (f.grad(x).norm() > 1e-10) continue;
      if (domain.signed_distance(x) > closure_tol) continue;
      bool dup = false;
      for (const auto& cp : found)
        if (dist(cp.location, x) < 1e-8) {
          dup = true;
          break;
        }
      if (dup) continue;
      CriticalPoint cp;
      cp.location = x;
      cp.value = f.value(x);
      cp.hessian = f.hess(x);
      cp.kind = classify(cp.hessian);
      found.push_back(cp);
    }
  std::sort(found.begin(), found.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
    if (a.value != b.value) return a.value < b.value;
    if (a.location.x1 != b.location.x1) return a.location.x1 < b.location.x1;
    return a.location.x2 < b.location.x2;
  });
  return found;
}

// ---------------------------------------------------------------------------
// Level sets
// ---------------------------------------------------------------------------

LevelCurve extract_level_set(const ScalarField& psi, double level) {
  const TriMesh& m = *psi.mesh;
  const double vmin = psi.values.minCoeff(), vmax = psi.values.maxCoeff();
  if (!(level > vmin && level < vmax))
    throw EmptyLevel("level outside the field's nodal range");

  // Crossing point on each crossed mesh edge, then per-triangle segments
  // chained by shared edges.
  std::map<std::pair<int, int>, int> edge_id;  // mesh edge -> crossing index
  std::vector<Point2> crossings;
  auto crossing = [&](int a, int b) -> int {
    if (a > b) std::swap(a, b);
    const auto it = edge_id.find({a, b});
    if (it != edge_id.end()) return it->second;
    const double va = psi.values[a] - level, vb = psi.values[b] - level;
    const double t = va / (va - vb);
    const Point2 p = m.vertices[a] + t * (m.vertices[b] - m.vertices[a]);
    edge_id[{a, b}] = (int)crossings.size();
    crossings.push_back(p);
    return (int)crossings.size() - 1;
  };

  std::multimap<int, int> links;
  auto add_link = [&](int a, int b) {
    links.insert({a, b});
    links.insert({b, a});
  };
  for (const auto& t : m.triangles) {
    int pts[3];
    int np = 0;
    for (int e = 0; e < 3; ++e) {
      const int a = t[e], b = t[(e + 1) % 3];
      const double va = psi.values[a] - level, vb = psi.values[b] - level;
      if ((va < 0) != (vb < 0)) {
        if (np < 3) pts[np++] = crossing(a, b);
      }
    }
    if (np == 2) add_link(pts[0], pts[1]);
  }
  if (links.empty()) throw EmptyLevel("no level crossings found");

  LevelCurve out;
  out.level = level;
  std::vector<char> used(crossings.size(), 0);
  std::map<int, int> degree;
  for (const auto& kv : links) degree[kv.first]++;
  auto walk = [&](int start) {
    std::vector<int> chain{start};
    used[start] = 1;
    int prev = -1, cur = start;
    bool closed = false;
    while (true) {
      auto range = links.equal_range(cur);
      int next = -1;
      for (auto it = range.first; it != range.second; ++it) {
        if (it->second == prev) continue;
        if (it->second == start && chain.size() > 2) {
          next = start;
          break;
        }
        if (!used[it->second] && next == -1) next = it->second;
      }
      if (next == -1) break;
      if (next == start) {
        closed = true;
        break;
      }
      used[next] = 1;
      chain.push_back(next);
      prev = cur;
      cur = next;
    }
    if (chain.size() < 2) return;
    std::vector<Point2> poly;
    poly.reserve(chain.size());
    for (const int k : chain) poly.push_back(crossings[k]);
    out.polylines.push_back(std::move(poly));
    out.closed.push_back(closed);
  };
  for (const auto& [k, deg] : degree)
    if (deg == 1 && !used[k]) walk(k);
  for (size_t k = 0; k < crossings.size(); ++k)
    if (!used[k] && degree.count((int)k)) walk((int)k);
  return out;
}

LevelCurve extract_level_set(const std::function<double(Point2)>& func, BBox box,
                             double level, int grid_n) {
  auto g = [&func, level](Point2 p) { return func(p) - level; };
  const auto mc = detail::marching_squares(g, box, grid_n);
  if (mc.chains.empty()) throw EmptyLevel("no level crossings found in the search box");
  LevelCurve out;
  out.level = level;
  // Refine each vertex onto the exact level along the local gradient.
  const double cell = std::max(box.width(), box.height()) / grid_n;
  const double fd = 1e-6 * std::max(1.0, box.diameter());
  for (size_t k = 0; k < mc.chains.size(); ++k) {
    std::vector<Point2> poly = mc.chains[k];
    for (auto& p : poly) {
      const double gx = g({p.x1 + fd, p.x2}) - g({p.x1 - fd, p.x2});
      const double gy = g({p.x1, p.x2 + fd}) - g({p.x1, p.x2 - fd});
      const double gn = std::hypot(gx, gy);
      if (gn <= 0.0) continue;
      const Point2 dir{gx / gn, gy / gn};
      double lo = -cell, hi = cell;
      double glo = g(p + lo * dir), ghi = g(p + hi * dir);
      if ((glo < 0) == (ghi < 0)) continue;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(p + mid * dir);
        if ((gm < 0) == (glo < 0)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
        }
      }
      p = p + (0.5 * (lo + hi)) * dir;
    }
    out.polylines.push_back(std::move(poly));
    out.closed.push_back(mc.closed[k]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Integral curves
// ---------------------------------------------------------------------------

IntegralCurve integral_curve(const AnalyticScalar& f, Point2 start, FlowDirection dir,
                             const IntegralCurveOptions& opts) {
  if (!f.grad) throw InvalidArgument("integral_curve needs an analytic gradient");
  const double sgn = (dir == FlowDirection::ascent) ? 1.0 : -1.0;
  auto vel = [&](Point2 p) -> Eigen::Vector2d {
    Eigen::Vector2d g = f.grad(p);
    const double n = g.norm();
    if (n < 1e-300) return Eigen::Vector2d::Zero();
    return (sgn / n) * g;
  };

  IntegralCurve curve;
  curve.points.push_back(start);
  Point2 x = start;
  double h = opts.step;
  const double hmin = opts.step * 1e-6;

  for (int step_count = 0; step_count < opts.max_steps; ++step_count) {
    // Termination checks.
    double dcp = 1e300;
    for (const auto& cp : opts.critical_points) dcp = std::min(dcp, dist(x, cp));
    if (dcp <= opts.cp_radius) {
      curve.endpoint_kind = CurveEnd::critical_point;
      return curve;
    }
    if (f.grad(x).norm() < 1e-12) {
      curve.endpoint_kind = CurveEnd::critical_point;
      return curve;
    }
    if (opts.domain && opts.domain->signed_distance(x) >= 0.0) {
      curve.endpoint_kind = CurveEnd::boundary;
      return curve;
    }

    // Keep steps below half the distance to the nearest critical point so
    // the trajectory cannot jump across it.
    const double hcap = std::max(hmin, std::min(h, 0.5 * dcp));

    // RK4 on the unit-speed field.
    const Eigen::Vector2d k1 = vel(x);
    if (k1.isZero()) {
      curve.endpoint_kind = CurveEnd::critical_point;
      return curve;
    }
    const Eigen::Vector2d k2 = vel({x.x1 + 0.5 * hcap * k1[0], x.x2 + 0.5 * hcap * k1[1]});
    const Eigen::Vector2d k3 = vel({x.x1 + 0.5 * hcap * k2[0], x.x2 + 0.5 * hcap * k2[1]});
    const Eigen::Vector2d k4 = vel({x.x1 + hcap * k3[0], x.x2 + hcap * k3[1]});
    const Eigen::Vector2d dx = (hcap / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    // Step control on direction curvature.
    const double turn = std::acos(std::clamp(k1.dot(k4), -1.0, 1.0));
    if (turn > 0.35 && hcap > hmin) {
      h = 0.5 * hcap;
      continue;
    }
    x = Point2{x.x1 + dx[0], x.x2 + dx[1]};
    curve.points.push_back(x);
    h = std::min(opts.step, (turn < 0.05 ? hcap * 1.5 : hcap));
  }
  curve.endpoint_kind = CurveEnd::max_steps;
  return curve;
}

Point2 saddle_escape_start(const AnalyticScalar& f, Point2 saddle, double offset, int side) {
  if (!f.hess) throw InvalidArgument("saddle_escape_start needs an analytic Hessian");
  const Eigen::Matrix2d H = f.hess(saddle);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(H);
  // Unstable direction of the ascent flow: largest-eigenvalue eigenvector.
  const Eigen::Vector2d v = es.eigenvectors().col(1);
  const double s = (side >= 0) ? 1.0 : -1.0;
  return Point2{saddle.x1 + s * offset * v[0], saddle.x2 + s * offset * v[1]};
}

bool enclosure_test(const LevelCurve& curve, int component,
                    const std::vector<Point2>& points) {
  if (component < 0 || component >= (int)curve.polylines.size())
    throw InvalidArgument("no such level-curve component");
  if (!curve.closed[component])
    throw OpenCurve("enclosure test requires a closed component");
  const auto& poly = curve.polylines[component];
  for (const auto& p : points)
    if (!point_in_polygon(poly, p)) return false;
  return true;
}

}  // namespace pauli2d
