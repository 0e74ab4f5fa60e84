#include "pauli2d/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "delaunay.hpp"
#include "marching.hpp"

namespace pauli2d {

namespace {

double clamp(double x, double lo, double hi) { return std::min(hi, std::max(lo, x)); }

Point2 closest_on_segment(Point2 a, Point2 b, Point2 p) {
  const Point2 d = b - a;
  const double dd = dot(d, d);
  if (dd <= 0.0) return a;
  const double t = clamp(dot(p - a, d) / dd, 0.0, 1.0);
  return a + t * d;
}

bool segments_intersect(Point2 a, Point2 b, Point2 c, Point2 d) {
  const double d1 = cross(b - a, c - a);
  const double d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c);
  const double d4 = cross(d - c, b - c);
  if (((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0))) return true;
  return false;
}

}  // namespace

bool point_in_polygon(const std::vector<Point2>& v, Point2 p) {
  bool inside = false;
  const size_t n = v.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const bool cond = (v[i].x2 > p.x2) != (v[j].x2 > p.x2);
    if (cond) {
      const double xint =
          v[j].x1 + (v[i].x1 - v[j].x1) * (p.x2 - v[j].x2) / (v[i].x2 - v[j].x2);
      if (p.x1 < xint) inside = !inside;
    }
  }
  return inside;
}

bool polygon_is_simple(const std::vector<Point2>& verts) {
  const int n = static_cast<int>(verts.size());
  if (n < 3) return false;
  for (int i = 0; i < n; ++i) {
    const Point2 a = verts[i], b = verts[(i + 1) % n];
    for (int j = i + 1; j < n; ++j) {
      // Skip adjacent edges (shared vertex).
      if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
      const Point2 c = verts[j], d = verts[(j + 1) % n];
      if (segments_intersect(a, b, c, d)) return false;
    }
  }
  return true;
}

double polygon_signed_area2(const std::vector<Point2>& verts) {
  double s = 0.0;
  const size_t n = verts.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) s += cross(verts[j], verts[i]);
  return s;
}

// ---------------------------------------------------------------------------
// Segment grid accelerator for polyline distance queries
// ---------------------------------------------------------------------------

struct ImplicitDomain::SegmentGrid {
  BBox box;
  double cell = 1.0;
  int nx = 1, ny = 1;
  std::vector<std::vector<int>> cells;  // segment indices per cell
  std::vector<Point2> coarse;           // subsampled vertices: upper bound seed
  const std::vector<Point2>* pts = nullptr;

  void build(const std::vector<Point2>& v, BBox b) {
    pts = &v;
    box = b;
    const int n = static_cast<int>(v.size());
    const double target_cells = 2.0 * n;
    const double area = std::max(1e-30, box.width() * box.height());
    cell = std::max(1e-12, std::sqrt(area / std::max(1.0, target_cells)));
    nx = std::max(1, (int)std::ceil(box.width() / cell));
    ny = std::max(1, (int)std::ceil(box.height() / cell));
    cells.assign((size_t)nx * ny, {});
    for (int s = 0; s < n; ++s) {
      const Point2 a = v[s], b2 = v[(s + 1) % n];
      const int i0 = idx_x(std::min(a.x1, b2.x1)), i1 = idx_x(std::max(a.x1, b2.x1));
      const int j0 = idx_y(std::min(a.x2, b2.x2)), j1 = idx_y(std::max(a.x2, b2.x2));
      for (int j = j0; j <= j1; ++j)
        for (int i = i0; i <= i1; ++i) cells[(size_t)j * nx + i].push_back(s);
    }
    const int stride = std::max(1, n / 512);
    for (int s = 0; s < n; s += stride) coarse.push_back(v[s]);
  }
  int idx_x(double x) const { return clampi((int)std::floor((x - box.lo.x1) / cell), 0, nx - 1); }
  int idx_y(double y) const { return clampi((int)std::floor((y - box.lo.x2) / cell), 0, ny - 1); }
  static int clampi(int v, int lo, int hi) { return std::min(hi, std::max(lo, v)); }

  // Nearest distance from p to the closed polyline; optionally the segment.
  double distance(Point2 p, int* seg_out) const {
    const auto& v = *pts;
    const int n = static_cast<int>(v.size());
    // Coarse vertices lie on the polyline, so the nearest one bounds the
    // answer from above and caps the ring search for far queries.
    double best = std::numeric_limits<double>::max();
    for (const auto& q : coarse) best = std::min(best, dist(p, q));
    best += 1e-12;
    int best_seg = -1;
    const int ci = idx_x(p.x1), cj = idx_y(p.x2);
    const int rings = std::max(nx, ny);
    for (int r = 0; r <= rings; ++r) {
      // Expanding ring search: once a hit is found, one extra ring suffices.
      const double ring_min = (r > 0 ? (r - 1) * cell : 0.0);
      if (best < ring_min) break;
      bool any_cell = false;
      for (int j = cj - r; j <= cj + r; ++j) {
        if (j < 0 || j >= ny) continue;
        for (int i = ci - r; i <= ci + r; ++i) {
          if (i < 0 || i >= nx) continue;
          if (std::max(std::abs(i - ci), std::abs(j - cj)) != r) continue;
          any_cell = true;
          for (const int s : cells[(size_t)j * nx + i]) {
            const Point2 q = closest_on_segment(v[s], v[(s + 1) % n], p);
            const double d = dist(p, q);
            if (d < best) {
              best = d;
              best_seg = s;
            }
          }
        }
      }
      if (!any_cell && r > 0 && best < std::numeric_limits<double>::max() / 2) break;
    }
    if (seg_out) *seg_out = best_seg;
    return best;
  }
};

// ---------------------------------------------------------------------------
// ImplicitDomain
// ---------------------------------------------------------------------------

ImplicitDomain ImplicitDomain::disk(Point2 center, double radius) {
  if (!(radius > 0.0)) throw InvalidArgument("disk radius must be positive");
  ImplicitDomain d;
  d.kind_ = Kind::disk;
  d.center_ = center;
  d.radius_ = radius;
  d.box_ = BBox{{center.x1 - radius, center.x2 - radius},
                {center.x1 + radius, center.x2 + radius}};
  return d;
}

ImplicitDomain ImplicitDomain::half_plane_cut_disk(double beta) {
  if (!(beta > -1.0 && beta < 1.0))
    throw InvalidArgument("half-plane cut requires beta in (-1, 1)");
  ImplicitDomain d;
  d.kind_ = Kind::half_plane_cut_disk;
  d.center_ = Point2{0.0, 0.0};
  d.radius_ = 1.0;
  d.beta_ = beta;
  const double s = std::sqrt(1.0 - beta * beta);
  d.box_ = BBox{{-1.0, -s}, {beta, s}};
  return d;
}

ImplicitDomain ImplicitDomain::polygon(std::vector<Point2> vertices) {
  if (vertices.size() < 3) throw InvalidArgument("polygon needs >= 3 vertices");
  if (!polygon_is_simple(vertices)) throw NonSimplePolygon("polygon self-intersects");
  if (polygon_signed_area2(vertices) < 0.0)
    std::reverse(vertices.begin(), vertices.end());
  ImplicitDomain d;
  d.kind_ = Kind::polygon;
  d.verts_ = std::move(vertices);
  d.finish_polyline();
  return d;
}

void ImplicitDomain::finish_polyline() {
  Point2 lo{std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
  Point2 hi{std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()};
  for (const auto& p : verts_) {
    lo.x1 = std::min(lo.x1, p.x1);
    lo.x2 = std::min(lo.x2, p.x2);
    hi.x1 = std::max(hi.x1, p.x1);
    hi.x2 = std::max(hi.x2, p.x2);
  }
  box_ = BBox{lo, hi};
  arclen_.assign(verts_.size() + 1, 0.0);
  for (size_t i = 0; i < verts_.size(); ++i)
    arclen_[i + 1] = arclen_[i] + dist(verts_[i], verts_[(i + 1) % verts_.size()]);
  auto grid = std::make_shared<SegmentGrid>();
  grid->build(verts_, box_);
  seg_grid_ = grid;
}

namespace {

// Closed zero-level loops of g on a uniform grid.
std::vector<std::vector<Point2>> marching_loops(
    const std::function<double(Point2)>& g, BBox box, int n) {
  const auto mc = detail::marching_squares(g, box, n);
  std::vector<std::vector<Point2>> loops;
  for (size_t k = 0; k < mc.chains.size(); ++k)
    if (mc.closed[k] && mc.chains[k].size() >= 6) loops.push_back(mc.chains[k]);
  return loops;
}

// Move p onto {g = 0} by bisection along direction d (unit), bracketing in
// [-span, span]. Returns p unchanged if no bracket found.
Point2 bisect_to_level(const std::function<double(Point2)>& g, Point2 p, Point2 d,
                       double span) {
  double lo = -span, hi = span;
  double glo = g(p + lo * d), ghi = g(p + hi * d);
  if (glo == 0.0) return p + lo * d;
  if (ghi == 0.0) return p + hi * d;
  if ((glo < 0) == (ghi < 0)) {
    // Try to find a bracket by shrinking toward p.
    const double g0 = g(p);
    if (g0 == 0.0) return p;
    if ((g0 < 0) != (glo < 0)) {
      hi = 0.0;
      ghi = g0;
    } else if ((g0 < 0) != (ghi < 0)) {
      lo = 0.0;
      glo = g0;
    } else {
      return p;
    }
  }
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(p + mid * d);
    if (gm == 0.0 || hi - lo < 1e-16 * std::max(1.0, span)) return p + mid * d;
    if ((gm < 0) == (glo < 0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return p + 0.5 * (lo + hi) * d;
}

Point2 numeric_gradient_dir(const std::function<double(Point2)>& g, Point2 p, double step) {
  const double gx = g(Point2{p.x1 + step, p.x2}) - g(Point2{p.x1 - step, p.x2});
  const double gy = g(Point2{p.x1, p.x2 + step}) - g(Point2{p.x1, p.x2 - step});
  const double n = std::hypot(gx, gy);
  if (n <= 0.0) return Point2{1.0, 0.0};
  return Point2{gx / n, gy / n};
}

}  // namespace

ImplicitDomain ImplicitDomain::sublevel(std::function<double(Point2)> func, double level,
                                        BBox search_box, std::optional<Point2> seed,
                                        int grid_n, double sag_tol_rel) {
  auto g = [func, level](Point2 p) { return func(p) - level; };

  if (seed && !(g(*seed) < 0.0))
    throw EmptyRegion("sublevel seed point is not inside {func < level}");

  auto loops = marching_loops(g, search_box, grid_n);
  // Candidate selection: smallest-area closed loop that (a) encloses the
  // seed when one is given, or (b) has negative interior otherwise.
  int best_loop = -1;
  double best_area = std::numeric_limits<double>::max();
  for (size_t k = 0; k < loops.size(); ++k) {
    const auto& loop = loops[k];
    if (seed) {
      if (!point_in_polygon(loop, *seed)) continue;
    } else {
      // Probe a point just inside the loop near vertex 0.
      const Point2 a = loop[0], b = loop[1 % loop.size()];
      const Point2 t = b - a;
      const double tn = norm(t);
      if (tn < 1e-300) continue;
      const Point2 nrm{-t.x2 / tn, t.x1 / tn};
      const double eps = 1e-3 * search_box.diameter() / grid_n + 1e-12;
      Point2 probe = 0.5 * (a + b) + eps * nrm;
      if (!point_in_polygon(loop, probe)) probe = 0.5 * (a + b) - eps * nrm;
      if (!point_in_polygon(loop, probe) || !(g(probe) < 0.0)) continue;
    }
    const double area = 0.5 * std::abs(polygon_signed_area2(loop));
    if (area < best_area) {
      best_area = area;
      best_loop = (int)k;
    }
  }
  if (best_loop < 0)
    throw EmptyRegion(seed ? "no closed level loop encloses the sublevel seed point"
                           : "no bounded sublevel component found");

  std::vector<Point2> loop = std::move(loops[best_loop]);
  const double cell = std::max(search_box.width(), search_box.height()) / grid_n;
  const double fd_step = 1e-6 * std::max(1.0, search_box.diameter());

  // Snap every marching vertex onto the exact level set.
  for (auto& p : loop) {
    const Point2 d = numeric_gradient_dir(g, p, fd_step);
    p = bisect_to_level(g, p, d, 1.5 * cell);
  }
  // Adaptive refinement: split any chord whose midpoint deviates from the
  // level set by more than sag_tol.
  const double sag_tol = sag_tol_rel * std::max(1.0, search_box.diameter());
  const double len_floor = std::max(8.0 * sag_tol, 1e-7 * search_box.diameter());
  std::vector<Point2> refined;
  refined.reserve(loop.size() * 4);
  const size_t n0 = loop.size();
  for (size_t i = 0; i < n0; ++i) {
    const Point2 a = loop[i], b = loop[(i + 1) % n0];
    struct Item {
      Point2 a, b;
      int depth;
    };
    std::vector<Item> stack{{a, b, 0}};
    // Emit `a` then all interior subdivision points, in order.
    refined.push_back(a);
    std::vector<Point2> emit;
    while (!stack.empty()) {
      const Item it = stack.back();
      stack.pop_back();
      const Point2 mid = 0.5 * (it.a + it.b);
      const Point2 dir = numeric_gradient_dir(g, mid, fd_step);
      const Point2 snapped = bisect_to_level(g, mid, dir, dist(it.a, it.b));
      const double sag = dist(mid, snapped);
      const double seg_len = dist(it.a, it.b);
      if ((sag > sag_tol || seg_len > 64.0 * cell) && it.depth < 24 && seg_len > len_floor) {
        stack.push_back({snapped, it.b, it.depth + 1});
        stack.push_back({it.a, snapped, it.depth + 1});
      } else {
        // Leaves come off the stack left-to-right; record right endpoint.
        if (!(it.b.x1 == b.x1 && it.b.x2 == b.x2)) emit.push_back(it.b);
      }
    }
    // The stack pops left segments first, so emit is already ordered.
    for (const auto& q : emit) refined.push_back(q);
  }

  if (polygon_signed_area2(refined) < 0.0)
    std::reverse(refined.begin(), refined.end());

  ImplicitDomain d;
  d.kind_ = Kind::sublevel;
  d.func_ = std::move(func);
  d.level_ = level;
  d.verts_ = std::move(refined);
  d.finish_polyline();
  return d;
}

ImplicitDomain ImplicitDomain::sublevel_in(std::function<double(Point2)> func, double level,
                                           const ImplicitDomain& container,
                                           std::optional<Point2> seed, int grid_n,
                                           double sag_tol_rel) {
  const ImplicitDomain cont = container;  // capture by value
  auto composed = [func, level, cont](Point2 p) {
    return std::max(func(p) - level, cont.signed_distance(p));
  };
  BBox box = cont.bounding_box();
  // Small margin so loops are strictly inside the marching grid.
  const double m = 0.05 * box.diameter();
  box = BBox{{box.lo.x1 - m, box.lo.x2 - m}, {box.hi.x1 + m, box.hi.x2 + m}};
  auto d = sublevel(std::move(composed), 0.0, box, seed, grid_n, sag_tol_rel);
  return d;
}

double ImplicitDomain::polyline_distance(Point2 p, int* nearest_seg) const {
  return seg_grid_->distance(p, nearest_seg);
}

bool ImplicitDomain::point_inside_polyline(Point2 p) const {
  return point_in_polygon(verts_, p);
}

double ImplicitDomain::signed_distance(Point2 p) const {
  switch (kind_) {
    case Kind::disk:
      return dist(p, center_) - radius_;
    case Kind::half_plane_cut_disk:
      return std::max(dist(p, center_) - radius_, p.x1 - beta_);
    case Kind::polygon:
    case Kind::sublevel: {
      const double d = polyline_distance(p, nullptr);
      return point_inside_polyline(p) ? -d : d;
    }
  }
  return 0.0;
}

Point2 ImplicitDomain::project_boundary(Point2 p) const {
  switch (kind_) {
    case Kind::disk: {
      const Point2 r = p - center_;
      const double n = norm(r);
      if (n < 1e-300) return center_ + Point2{radius_, 0.0};
      return center_ + (radius_ / n) * r;
    }
    case Kind::half_plane_cut_disk: {
      const double s = std::sqrt(1.0 - beta_ * beta_);
      // Candidate on the circular arc (x1 <= beta part).
      Point2 qa;
      const double n = norm(p);
      qa = (n < 1e-300) ? Point2{-1.0, 0.0} : (1.0 / n) * p;
      if (qa.x1 > beta_) qa = Point2{beta_, qa.x2 >= 0 ? s : -s};
      // Candidate on the chord x1 = beta.
      Point2 qc{beta_, clamp(p.x2, -s, s)};
      return dist(p, qa) <= dist(p, qc) ? qa : qc;
    }
    case Kind::polygon:
    case Kind::sublevel: {
      int seg = -1;
      polyline_distance(p, &seg);
      if (seg < 0) return verts_.front();
      const size_t nseg = verts_.size();
      return closest_on_segment(verts_[seg], verts_[(seg + 1) % nseg], p);
    }
  }
  return p;
}

double ImplicitDomain::perimeter() const {
  switch (kind_) {
    case Kind::disk:
      return 2.0 * M_PI * radius_;
    case Kind::half_plane_cut_disk: {
      const double s = std::sqrt(1.0 - beta_ * beta_);
      const double theta = std::atan2(s, beta_);  // corner angle in (0, pi)
      return 2.0 * s + 2.0 * (M_PI - theta) * 1.0 + 2.0 * theta;  // arc + chord
    }
    case Kind::polygon:
    case Kind::sublevel:
      return arclen_.empty() ? 0.0 : arclen_.back();
  }
  return 0.0;
}

BBox ImplicitDomain::bounding_box() const { return box_; }

std::vector<BoundaryNode> ImplicitDomain::boundary_nodes(double spacing) const {
  std::vector<BoundaryNode> out;
  switch (kind_) {
    case Kind::disk: {
      const int n = std::max(12, (int)std::ceil(2.0 * M_PI * radius_ / spacing));
      out.reserve(n);
      for (int k = 0; k < n; ++k) {
        const double th = 2.0 * M_PI * k / n;
        out.push_back({Point2{center_.x1 + radius_ * std::cos(th),
                              center_.x2 + radius_ * std::sin(th)},
                       false});
      }
      return out;
    }
    case Kind::half_plane_cut_disk: {
      const double s = std::sqrt(1.0 - beta_ * beta_);
      const double tc = std::atan2(s, beta_);  // angle of the upper corner
      // Arc from upper corner CCW (through (-1,0)) to lower corner.
      const double arc_len = 2.0 * (M_PI - tc);
      const int na = std::max(6, (int)std::ceil(arc_len / spacing));
      for (int k = 0; k <= na; ++k) {
        const double th = tc + arc_len * k / na;
        out.push_back({Point2{std::cos(th), std::sin(th)}, k == 0 || k == na});
      }
      // Chord from lower corner up to upper corner (corners already emitted).
      const int nc = std::max(2, (int)std::ceil(2.0 * s / spacing));
      for (int k = 1; k < nc; ++k) {
        const double y = -s + 2.0 * s * k / nc;
        out.push_back({Point2{beta_, y}, false});
      }
      return out;
    }
    case Kind::polygon: {
      const size_t n = verts_.size();
      for (size_t i = 0; i < n; ++i) {
        const Point2 a = verts_[i], b = verts_[(i + 1) % n];
        out.push_back({a, true});
        const double len = dist(a, b);
        const int k = std::max(1, (int)std::ceil(len / spacing));
        for (int j = 1; j < k; ++j) out.push_back({a + (double(j) / k) * (b - a), false});
      }
      return out;
    }
    case Kind::sublevel: {
      const double per = perimeter();
      const int n = std::max(12, (int)std::ceil(per / spacing));
      out.reserve(n);
      // Arclength-uniform resampling of the dense polyline; every emitted
      // point lies exactly on a polyline segment.
      size_t seg = 0;
      for (int k = 0; k < n; ++k) {
        const double target = per * k / n;
        while (seg + 1 < verts_.size() && arclen_[seg + 1] < target) ++seg;
        const double t0 = arclen_[seg], t1 = arclen_[seg + 1];
        const double t = (t1 > t0) ? (target - t0) / (t1 - t0) : 0.0;
        const Point2 a = verts_[seg], b = verts_[(seg + 1) % verts_.size()];
        out.push_back({a + t * (b - a), false});
      }
      return out;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// TriMesh
// ---------------------------------------------------------------------------

bool TriMesh::is_boundary(int v) const {
  return std::binary_search(boundary_vertices.begin(), boundary_vertices.end(), v);
}

double TriMesh::triangle_area(int t) const {
  const auto& tr = triangles[t];
  return 0.5 * cross(vertices[tr[1]] - vertices[tr[0]], vertices[tr[2]] - vertices[tr[0]]);
}

double TriMesh::total_area() const {
  double a = 0.0;
  for (int t = 0; t < num_triangles(); ++t) a += triangle_area(t);
  return a;
}

namespace {

double tri_min_angle_deg(const Point2& a, const Point2& b, const Point2& c) {
  const double la = dist(b, c), lb = dist(a, c), lc = dist(a, b);
  auto ang = [](double opp, double s1, double s2) {
    const double cs = clamp((s1 * s1 + s2 * s2 - opp * opp) / (2.0 * s1 * s2), -1.0, 1.0);
    return std::acos(cs) * 180.0 / M_PI;
  };
  return std::min({ang(la, lb, lc), ang(lb, la, lc), ang(lc, la, lb)});
}

}  // namespace

double TriMesh::min_angle_deg() const {
  double m = 180.0;
  for (const auto& t : triangles)
    m = std::min(m, tri_min_angle_deg(vertices[t[0]], vertices[t[1]], vertices[t[2]]));
  return m;
}

// ---------------------------------------------------------------------------
// Mesh generation (distmesh-style)
// ---------------------------------------------------------------------------

namespace {

struct EdgeKey {
  int a, b;
  bool operator<(const EdgeKey& o) const { return a != o.a ? a < o.a : b < o.b; }
  bool operator==(const EdgeKey& o) const { return a == o.a && b == o.b; }
};

std::vector<EdgeKey> unique_edges(const std::vector<std::array<int, 3>>& tris) {
  std::vector<EdgeKey> edges;
  edges.reserve(tris.size() * 3);
  for (const auto& t : tris)
    for (int e = 0; e < 3; ++e) {
      int a = t[e], b = t[(e + 1) % 3];
      if (a > b) std::swap(a, b);
      edges.push_back({a, b});
    }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

}  // namespace

TriMesh generate_mesh(std::shared_ptr<const ImplicitDomain> domain, double target_h) {
  const ImplicitDomain& dom = *domain;
  const double diam = dom.diameter();
  if (!(target_h > 0.0)) throw InvalidArgument("target_h must be positive");
  if (target_h > diam / 4.0 + 1e-12)
    throw InvalidArgument("target_h must be <= domain diameter / 4");

  // Fixed boundary nodes.
  const auto bnodes = dom.boundary_nodes(target_h);
  const int nb = static_cast<int>(bnodes.size());
  std::vector<Point2> pts;
  pts.reserve(nb + 256);
  for (const auto& bn : bnodes) pts.push_back(bn.p);

  // Interior points on a hexagonal lattice, rejected near the boundary.
  const BBox box = dom.bounding_box();
  const double dy = target_h * std::sqrt(3.0) / 2.0;
  const int rows = (int)std::floor(box.height() / dy);
  for (int j = 0; j <= rows; ++j) {
    const double y = box.lo.x2 + dy * (j + 0.5);
    if (y > box.hi.x2) break;
    const double xoff = (j % 2 == 0) ? 0.5 : 0.0;
    const int cols = (int)std::floor(box.width() / target_h);
    for (int i = 0; i <= cols; ++i) {
      const double x = box.lo.x1 + target_h * (i + xoff);
      if (x > box.hi.x1) break;
      const Point2 p{x, y};
      if (dom.signed_distance(p) < -0.5 * target_h) pts.push_back(p);
    }
  }

  const int n = static_cast<int>(pts.size());
  const double geps = 1e-3 * target_h;
  const double dedup = 1e-9 * target_h;

  std::vector<std::array<int, 3>> tris;
  std::vector<EdgeKey> edges;
  std::vector<Point2> last_tri_pos(pts.size(), Point2{1e30, 1e30});

  auto retriangulate = [&]() {
    auto allineig = detail::delaunay(pts, dedup);
    tris.clear();
    for (const auto& t : allineig) {
      const Point2 c = (1.0 / 3.0) * (pts[t[0]] + pts[t[1]] + pts[t[2]]);
      if (dom.signed_distance(c) < -geps) tris.push_back(t);
    }
    edges = unique_edges(tris);
    last_tri_pos = pts;
  };

  const double Fscale = 1.2;
  const double dt = 0.2;
  const int max_iters = 220;
  std::vector<Point2> force(n);

  // Upper bound on each point's signed distance, advanced by the Lipschitz
  // property |sd(p+s) - sd(p)| <= |s|; re-queried only near the boundary.
  std::vector<double> sd_bound(n, 0.0);
  for (int i = nb; i < n; ++i) sd_bound[i] = dom.signed_distance(pts[i]);

  for (int iter = 0; iter < max_iters; ++iter) {
    double max_shift = 0.0;
    for (int i = nb; i < n; ++i) max_shift = std::max(max_shift, dist(pts[i], last_tri_pos[i]));
    if (iter == 0 || max_shift > 0.1 * target_h) retriangulate();

    double sum_l2 = 0.0;
    for (const auto& e : edges) sum_l2 += dist(pts[e.a], pts[e.b]) * dist(pts[e.a], pts[e.b]);
    const double L0 = Fscale * std::sqrt(sum_l2 / std::max<size_t>(1, edges.size()));

    std::fill(force.begin(), force.end(), Point2{0.0, 0.0});
    for (const auto& e : edges) {
      const Point2 d = pts[e.a] - pts[e.b];
      const double L = norm(d);
      const double f = std::max(L0 - L, 0.0);
      if (f <= 0.0 || L < 1e-30) continue;
      const Point2 fd = (f / L) * d;
      force[e.a] = force[e.a] + fd;
      force[e.b] = force[e.b] - fd;
    }

    double max_move = 0.0;
    for (int i = nb; i < n; ++i) {
      const Point2 step = dt * force[i];
      pts[i] = pts[i] + step;
      max_move = std::max(max_move, norm(step));
      sd_bound[i] += norm(step);
      if (sd_bound[i] <= -0.2 * target_h) continue;
      const double sd = dom.signed_distance(pts[i]);
      sd_bound[i] = sd;
      if (sd > -0.2 * target_h) {
        // Pull escapees (and points hugging the boundary) back inside.
        const Point2 q = dom.project_boundary(pts[i]);
        Point2 out_dir = pts[i] - q;
        const double dn = norm(out_dir);
        if (dn > 1e-14)
          out_dir = (sd > 0 ? 1.0 / dn : -1.0 / dn) * out_dir;
        else {
          // On the boundary: use the numerical gradient of sd.
          const double s = 1e-6 * std::max(1.0, diam);
          const double gx = dom.signed_distance({q.x1 + s, q.x2}) - dom.signed_distance({q.x1 - s, q.x2});
          const double gy = dom.signed_distance({q.x1, q.x2 + s}) - dom.signed_distance({q.x1, q.x2 - s});
          const double gn = std::hypot(gx, gy);
          out_dir = gn > 0 ? Point2{gx / gn, gy / gn} : Point2{1.0, 0.0};
        }
        pts[i] = q - (0.35 * target_h) * out_dir;
        sd_bound[i] = dom.signed_distance(pts[i]);
      }
    }
    if (max_move < 0.005 * target_h && iter > 3) break;
  }
  retriangulate();

  // Compact: drop unused vertices (duplicates skipped by delaunay, lattice
  // points in pruned corners).
  std::vector<int> remap(pts.size(), -1);
  TriMesh mesh;
  mesh.target_h = target_h;
  mesh.domain = domain;
  for (const auto& t : tris)
    for (const int v : t)
      if (remap[v] < 0) {
        remap[v] = (int)mesh.vertices.size();
        mesh.vertices.push_back(pts[v]);
      }
  for (const auto& t : tris) {
    std::array<int, 3> m{remap[t[0]], remap[t[1]], remap[t[2]]};
    // Enforce CCW.
    if (cross(mesh.vertices[m[1]] - mesh.vertices[m[0]],
              mesh.vertices[m[2]] - mesh.vertices[m[0]]) < 0.0)
      std::swap(m[1], m[2]);
    mesh.triangles.push_back(m);
  }
  for (int i = 0; i < nb; ++i)
    if (remap[i] >= 0) mesh.boundary_vertices.push_back(remap[i]);
  std::sort(mesh.boundary_vertices.begin(), mesh.boundary_vertices.end());

  // Quality improvement: smart Laplacian smoothing on interior vertices.
  {
    std::vector<std::vector<int>> v2t(mesh.vertices.size());
    for (int t = 0; t < mesh.num_triangles(); ++t)
      for (const int v : mesh.triangles[t]) v2t[v].push_back(t);
    auto local_min_angle = [&](int v) {
      double m = 180.0;
      for (const int t : v2t[v]) {
        const auto& tr = mesh.triangles[t];
        m = std::min(m, tri_min_angle_deg(mesh.vertices[tr[0]], mesh.vertices[tr[1]],
                                          mesh.vertices[tr[2]]));
      }
      return m;
    };
    for (int pass = 0; pass < 30; ++pass) {
      bool changed = false;
      for (int v = 0; v < mesh.num_vertices(); ++v) {
        if (mesh.is_boundary(v)) continue;
        const double before = local_min_angle(v);
        if (before >= 25.0) continue;
        Point2 avg{0.0, 0.0};
        std::set<int> nbrs;
        for (const int t : v2t[v])
          for (const int w : mesh.triangles[t])
            if (w != v) nbrs.insert(w);
        if (nbrs.empty()) continue;
        for (const int w : nbrs) avg = avg + mesh.vertices[w];
        avg = (1.0 / nbrs.size()) * avg;
        const Point2 old = mesh.vertices[v];
        mesh.vertices[v] = avg;
        if (local_min_angle(v) <= before + 1e-12 ||
            dom.signed_distance(avg) > -1e-12) {
          mesh.vertices[v] = old;
        } else {
          changed = true;
        }
      }
      if (!changed) break;
    }
  }

  const MeshAudit audit = audit_mesh(mesh);
  if (!audit.ok) {
    std::string msg = "mesh generation failed audit:";
    for (const auto& s : audit.issues) msg += " " + s + ";";
    throw MeshFailure(msg);
  }
  return mesh;
}

TriMesh generate_mesh(const ImplicitDomain& domain, double target_h) {
  return generate_mesh(std::make_shared<const ImplicitDomain>(domain), target_h);
}

MeshAudit audit_mesh(const TriMesh& mesh) {
  MeshAudit a;
  auto fail = [&a](const std::string& s) {
    a.ok = false;
    a.issues.push_back(s);
  };

  const int nv = mesh.num_vertices();
  if (nv < 3 || mesh.triangles.empty()) {
    fail("mesh empty");
    return a;
  }
  for (const auto& t : mesh.triangles)
    for (const int v : t)
      if (v < 0 || v >= nv) {
        fail("triangle index out of range");
        return a;
      }

  // Orientation and area.
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (mesh.triangle_area(t) <= 0.0) {
      fail("non-positive triangle area/orientation");
      break;
    }
  }

  // Conformity: every edge in exactly 1 (boundary) or 2 (interior) triangles.
  std::map<EdgeKey, int> edge_count;
  for (const auto& t : mesh.triangles)
    for (int e = 0; e < 3; ++e) {
      int p = t[e], q = t[(e + 1) % 3];
      if (p > q) std::swap(p, q);
      edge_count[{p, q}]++;
    }
  std::set<int> boundary_from_edges;
  for (const auto& [e, c] : edge_count) {
    if (c == 1) {
      boundary_from_edges.insert(e.a);
      boundary_from_edges.insert(e.b);
    } else if (c != 2) {
      fail("edge shared by " + std::to_string(c) + " triangles");
    }
  }
  // Boundary bookkeeping consistency.
  std::set<int> recorded(mesh.boundary_vertices.begin(), mesh.boundary_vertices.end());
  if (recorded != boundary_from_edges) fail("boundary vertex set inconsistent with boundary edges");

  // Geometric placement relative to the domain.
  if (mesh.domain) {
    const double tol = 1e-10 * mesh.domain->diameter();
    for (int v = 0; v < nv; ++v) {
      const double sd = mesh.domain->signed_distance(mesh.vertices[v]);
      if (mesh.is_boundary(v)) {
        if (std::abs(sd) > tol) {
          fail("boundary vertex off the zero level set");
          break;
        }
      } else if (!(sd < 0.0)) {
        fail("interior vertex not strictly inside");
        break;
      }
    }
  }

  a.min_angle_deg = mesh.min_angle_deg();
  if (a.min_angle_deg < 20.0) fail("min angle below 20 degrees");
  return a;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

std::string mesh_to_json(const TriMesh& mesh) {
  nlohmann::json j;
  auto& verts = j["vertices"] = nlohmann::json::array();
  for (const auto& p : mesh.vertices) verts.push_back({p.x1, p.x2});
  auto& tris = j["triangles"] = nlohmann::json::array();
  for (const auto& t : mesh.triangles) tris.push_back({t[0], t[1], t[2]});
  j["boundary"] = mesh.boundary_vertices;
  j["target_h"] = mesh.target_h;
  return j.dump();
}

TriMesh mesh_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  TriMesh mesh;
  for (const auto& v : j.at("vertices"))
    mesh.vertices.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
  for (const auto& t : j.at("triangles"))
    mesh.triangles.push_back({t.at(0).get<int>(), t.at(1).get<int>(), t.at(2).get<int>()});
  mesh.boundary_vertices = j.at("boundary").get<std::vector<int>>();
  mesh.target_h = j.at("target_h").get<double>();
  std::sort(mesh.boundary_vertices.begin(), mesh.boundary_vertices.end());
  return mesh;
}

}  // namespace pauli2d
