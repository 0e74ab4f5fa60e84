#include "delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_map>

namespace pauli2d::detail {
namespace {

using std::size_t;

struct Tri {
  std::array<int, 3> v;   // vertices, CCW
  std::array<int, 3> nb;  // nb[i] is across the edge opposite v[i]
  bool alive = true;
};

// Orientation predicate in long double: > 0 if (a,b,c) is CCW.
long double orient(const Point2& a, const Point2& b, const Point2& c) {
  const long double acx = (long double)a.x1 - c.x1;
  const long double acy = (long double)a.x2 - c.x2;
  const long double bcx = (long double)b.x1 - c.x1;
  const long double bcy = (long double)b.x2 - c.x2;
  return acx * bcy - acy * bcx;
}

// Incircle predicate: > 0 if d lies strictly inside the circumcircle of the
// CCW triangle (a,b,c). Ties (cocircular within roundoff) are resolved as
// "outside" by the caller's threshold.
long double incircle(const Point2& a, const Point2& b, const Point2& c,
                     const Point2& d, long double* scale_out) {
  const long double adx = (long double)a.x1 - d.x1;
  const long double ady = (long double)a.x2 - d.x2;
  const long double bdx = (long double)b.x1 - d.x1;
  const long double bdy = (long double)b.x2 - d.x2;
  const long double cdx = (long double)c.x1 - d.x1;
  const long double cdy = (long double)c.x2 - d.x2;

  const long double alift = adx * adx + ady * ady;
  const long double blift = bdx * bdx + bdy * bdy;
  const long double clift = cdx * cdx + cdy * cdy;

  const long double det = alift * (bdx * cdy - bdy * cdx) -
                          blift * (adx * cdy - ady * cdx) +
                          clift * (adx * bdy - ady * bdx);
  if (scale_out) {
    const long double m1 = std::abs(bdx * cdy) + std::abs(bdy * cdx);
    const long double m2 = std::abs(adx * cdy) + std::abs(ady * cdx);
    const long double m3 = std::abs(adx * bdy) + std::abs(ady * bdx);
    *scale_out = alift * m1 + blift * m2 + clift * m3;
  }
  return det;
}

class Triangulation {
 public:
  explicit Triangulation(const std::vector<Point2>& input, double dedup_tol)
      : pts_(input), dedup_tol_(dedup_tol) {
    const int n = static_cast<int>(pts_.size());
    // Super-triangle far outside the data.
    Point2 lo{std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
    Point2 hi{std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()};
    for (const auto& p : pts_) {
      lo.x1 = std::min(lo.x1, p.x1);
      lo.x2 = std::min(lo.x2, p.x2);
      hi.x1 = std::max(hi.x1, p.x1);
      hi.x2 = std::max(hi.x2, p.x2);
    }
    const Point2 c{0.5 * (lo.x1 + hi.x1), 0.5 * (lo.x2 + hi.x2)};
    const double r = 20.0 * std::max(1e-30, std::hypot(hi.x1 - lo.x1, hi.x2 - lo.x2)) + 1.0;
    super_ = n;
    pts_.push_back({c.x1 + 2.0 * r * std::cos(M_PI / 2), c.x2 + 2.0 * r * std::sin(M_PI / 2)});
    pts_.push_back({c.x1 + 2.0 * r * std::cos(M_PI * 7 / 6), c.x2 + 2.0 * r * std::sin(M_PI * 7 / 6)});
    pts_.push_back({c.x1 + 2.0 * r * std::cos(M_PI * 11 / 6), c.x2 + 2.0 * r * std::sin(M_PI * 11 / 6)});
    tris_.push_back(Tri{{super_, super_ + 1, super_ + 2}, {-1, -1, -1}, true});
    last_ = 0;
    for (int i = 0; i < n; ++i) insert(i);
  }

  std::vector<std::array<int, 3>> result() const {
    std::vector<std::array<int, 3>> out;
    out.reserve(tris_.size());
    for (const auto& t : tris_) {
      if (!t.alive) continue;
      if (t.v[0] >= super_ || t.v[1] >= super_ || t.v[2] >= super_) continue;
      out.push_back(t.v);
    }
    return out;
  }

 private:
  // Walk from tris_[last_] toward p; returns a triangle containing p
  // (possibly on its edge).
  int locate(const Point2& p) {
    int cur = last_;
    if (cur < 0 || cur >= (int)tris_.size() || !tris_[cur].alive) {
      cur = -1;
      for (int i = (int)tris_.size() - 1; i >= 0; --i)
        if (tris_[i].alive) { cur = i; break; }
    }
    const size_t max_steps = 4 * tris_.size() + 64;
    for (size_t step = 0; step < max_steps; ++step) {
      const Tri& t = tris_[cur];
      int next = -1;
      for (int e = 0; e < 3; ++e) {
        const Point2& a = pts_[t.v[(e + 1) % 3]];
        const Point2& b = pts_[t.v[(e + 2) % 3]];
        if (orient(a, b, p) < 0.0L) {
          next = t.nb[e];
          break;
        }
      }
      if (next < 0) return cur;
      cur = next;
    }
    // Fallback: exhaustive scan (degenerate walk cycles are rare).
    for (int i = 0; i < (int)tris_.size(); ++i) {
      const Tri& t = tris_[i];
      if (!t.alive) continue;
      bool inside = true;
      for (int e = 0; e < 3 && inside; ++e) {
        const Point2& a = pts_[t.v[(e + 1) % 3]];
        const Point2& b = pts_[t.v[(e + 2) % 3]];
        if (orient(a, b, p) < 0.0L) inside = false;
      }
      if (inside) return i;
    }
    return cur;
  }

  bool in_circum(const Tri& t, const Point2& p) const {
    long double scale = 0.0L;
    const long double det =
        incircle(pts_[t.v[0]], pts_[t.v[1]], pts_[t.v[2]], p, &scale);
    return det > 1e-14L * scale;
  }

  void insert(int ip) {
    const Point2& p = pts_[ip];
    const int start = locate(p);
    if (dedup_tol_ > 0.0) {
      // Duplicate guard against vertices of the containing triangle.
      for (int k = 0; k < 3; ++k) {
        const int v = tris_[start].v[k];
        if (v < super_ && dist(pts_[v], p) < dedup_tol_) return;
      }
    }
    // Flood-fill the cavity of triangles whose circumcircle contains p.
    std::vector<int> cavity;
    std::vector<int> stack{start};
    std::vector<char> in_cavity(tris_.size(), 0);
    in_cavity[start] = 1;
    while (!stack.empty()) {
      const int ti = stack.back();
      stack.pop_back();
      cavity.push_back(ti);
      for (int e = 0; e < 3; ++e) {
        const int nb = tris_[ti].nb[e];
        if (nb < 0 || in_cavity[nb]) continue;
        if (in_circum(tris_[nb], p)) {
          in_cavity[nb] = 1;
          stack.push_back(nb);
        }
      }
    }

    // Boundary edges of the cavity, directed so the cavity is on the left.
    struct BEdge {
      int a, b;      // directed edge
      int outside;   // neighbor triangle outside the cavity (-1 = none)
    };
    std::vector<BEdge> bedges;
    for (const int ti : cavity) {
      const Tri& t = tris_[ti];
      for (int e = 0; e < 3; ++e) {
        const int nb = t.nb[e];
        if (nb >= 0 && in_cavity[nb]) continue;
        bedges.push_back(BEdge{t.v[(e + 1) % 3], t.v[(e + 2) % 3], nb});
      }
    }
    for (const int ti : cavity) tris_[ti].alive = false;

    // Star the cavity boundary to p.
    std::unordered_map<int, int> tri_of_first;  // bedge.a -> new triangle id
    tri_of_first.reserve(bedges.size() * 2);
    std::vector<int> created;
    created.reserve(bedges.size());
    for (const auto& be : bedges) {
      const int id = (int)tris_.size();
      tris_.push_back(Tri{{ip, be.a, be.b}, {be.outside, -1, -1}, true});
      if (be.outside >= 0) {
        Tri& o = tris_[be.outside];
        for (int e = 0; e < 3; ++e) {
          const int oa = o.v[(e + 1) % 3], ob = o.v[(e + 2) % 3];
          if ((oa == be.b && ob == be.a)) o.nb[e] = id;
        }
      }
      tri_of_first[be.a] = id;
      created.push_back(id);
    }
    // Adjacency around p: for t = (p,a,b), nb[0] (across (a,b)) is the old
    // outside triangle; nb[1] (across (b,p)) is the new triangle starting at
    // b; nb[2] (across (p,a)) is the new triangle ending at a. The cavity
    // boundary is a single cycle, so each vertex starts and ends exactly one
    // boundary edge.
    std::unordered_map<int, int> tri_of_second;  // bedge.b -> new triangle id
    tri_of_second.reserve(bedges.size() * 2);
    for (const int id : created) tri_of_second[tris_[id].v[2]] = id;
    for (const int id : created) {
      Tri& t = tris_[id];
      t.nb[1] = tri_of_first.at(t.v[2]);
      t.nb[2] = tri_of_second.at(t.v[1]);
    }
    if (!created.empty()) last_ = created.back();
  }

  std::vector<Point2> pts_;
  std::vector<Tri> tris_;
  int super_ = 0;
  int last_ = 0;
  double dedup_tol_ = 0.0;
};

}  // namespace

std::vector<std::array<int, 3>> delaunay(const std::vector<Point2>& points,
                                         double dedup_tol) {
  if (points.size() < 3) return {};
  Triangulation tr(points, dedup_tol);
  return tr.result();
}

}  // namespace pauli2d::detail
