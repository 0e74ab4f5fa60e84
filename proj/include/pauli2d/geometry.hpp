#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pauli2d/errors.hpp"

namespace pauli2d {

struct Point2 {
  double x1 = 0.0;
  double x2 = 0.0;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x1 + b.x1, a.x2 + b.x2}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x1 - b.x1, a.x2 - b.x2}; }
inline Point2 operator*(double s, Point2 p) { return {s * p.x1, s * p.x2}; }
inline double dot(Point2 a, Point2 b) { return a.x1 * b.x1 + a.x2 * b.x2; }
inline double cross(Point2 a, Point2 b) { return a.x1 * b.x2 - a.x2 * b.x1; }
inline double norm(Point2 p) { return std::hypot(p.x1, p.x2); }
inline double dist(Point2 a, Point2 b) { return norm(a - b); }

struct BBox {
  Point2 lo;
  Point2 hi;
  double width() const { return hi.x1 - lo.x1; }
  double height() const { return hi.x2 - lo.x2; }
  double diameter() const { return std::hypot(width(), height()); }
  bool contains(Point2 p) const {
    return p.x1 >= lo.x1 && p.x1 <= hi.x1 && p.x2 >= lo.x2 && p.x2 <= hi.x2;
  }
};

/// One node of the discretized boundary. Pinned nodes (polygon corners,
/// half-disk corners) must appear verbatim as mesh vertices.
struct BoundaryNode {
  Point2 p;
  bool pinned = false;
};

/// Simply connected planar domain described by a signed distance function
/// (negative inside). Four kinds: disk, half-plane-cut disk
/// {|x| < 1, x1 < beta}, simple CCW polygon, and the bounded component of a
/// sublevel set {f < c} selected by a seed point.
class ImplicitDomain {
 public:
  enum class Kind { disk, half_plane_cut_disk, polygon, sublevel };

  static ImplicitDomain disk(Point2 center, double radius);
  static ImplicitDomain half_plane_cut_disk(double beta);
  static ImplicitDomain polygon(std::vector<Point2> vertices);
  /// Polygonizes the c-level of `func` inside `search_box`, keeping the
  /// smallest-area closed loop that encloses `seed` (without a seed: the
  /// smallest loop with negative interior). The boundary polyline is refined
  /// until its chords deviate from the level set by at most
  /// sag_tol_rel * diameter. Throws EmptyRegion when no loop qualifies.
  static ImplicitDomain sublevel(std::function<double(Point2)> func, double level,
                                 BBox search_box, std::optional<Point2> seed = {},
                                 int grid_n = 384, double sag_tol_rel = 1e-9);
  /// Same as sublevel but intersected with `container`:
  /// {func < level} ∩ container, polygonized as max(func-level, sd_container).
  /// The composed boundary may have corners, so a looser chord tolerance is
  /// used.
  static ImplicitDomain sublevel_in(std::function<double(Point2)> func, double level,
                                    const ImplicitDomain& container,
                                    std::optional<Point2> seed = {}, int grid_n = 384,
                                    double sag_tol_rel = 1e-6);

  Kind kind() const { return kind_; }
  double signed_distance(Point2 p) const;
  /// Nearest boundary point (exact for disk/half-disk/polygon, on the dense
  /// boundary polyline for sublevel domains).
  Point2 project_boundary(Point2 p) const;
  /// Ordered CCW boundary discretization with node spacing <= `spacing`.
  std::vector<BoundaryNode> boundary_nodes(double spacing) const;
  BBox bounding_box() const;
  double diameter() const { return bounding_box().diameter(); }
  double perimeter() const;

  // Kind-specific accessors.
  Point2 disk_center() const { return center_; }
  double disk_radius() const { return radius_; }
  double cut_beta() const { return beta_; }
  const std::vector<Point2>& polygon_vertices() const { return verts_; }
  /// Dense boundary polyline of a sublevel domain (closed, CCW, first point
  /// not repeated).
  const std::vector<Point2>& boundary_polyline() const { return verts_; }

 private:
  ImplicitDomain() = default;

  Kind kind_ = Kind::disk;
  Point2 center_{0.0, 0.0};
  double radius_ = 1.0;
  double beta_ = 0.0;                  // half_plane_cut_disk
  std::vector<Point2> verts_;          // polygon vertices / sublevel polyline
  std::vector<double> arclen_;         // cumulative arclength over verts_
  std::function<double(Point2)> func_; // sublevel implicit function
  double level_ = 0.0;
  BBox box_{{-1.0, -1.0}, {1.0, 1.0}};

  struct SegmentGrid;
  std::shared_ptr<const SegmentGrid> seg_grid_; // accelerator for polylines

  void finish_polyline();
  double polyline_distance(Point2 p, int* nearest_seg = nullptr) const;
  bool point_inside_polyline(Point2 p) const;
};

/// Conforming P1 triangulation. Triangles are CCW; `boundary_vertices` is
/// sorted ascending.
struct TriMesh {
  std::vector<Point2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<int> boundary_vertices;
  double target_h = 0.0;
  std::shared_ptr<const ImplicitDomain> domain;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
  bool is_boundary(int v) const;
  double triangle_area(int t) const;
  double total_area() const;
  double min_angle_deg() const;
};

struct MeshAudit {
  bool ok = true;
  std::vector<std::string> issues;
  double min_angle_deg = 0.0;
};

/// Distmesh-style mesh generation: fixed boundary nodes at spacing target_h,
/// interior hex lattice relaxed to force equilibrium with Delaunay
/// retriangulation. Deterministic. Throws MeshFailure when the 20 degree
/// quality floor is unreachable.
TriMesh generate_mesh(const ImplicitDomain& domain, double target_h);
TriMesh generate_mesh(std::shared_ptr<const ImplicitDomain> domain, double target_h);

/// Independent orientation/conformity/quality audit (used by tests and as
/// the generate_mesh post-check).
MeshAudit audit_mesh(const TriMesh& mesh);

/// Signed distance of `p` to `domain` (negative inside).
inline double signed_distance(const ImplicitDomain& domain, Point2 p) {
  return domain.signed_distance(p);
}

std::string mesh_to_json(const TriMesh& mesh);
TriMesh mesh_from_json(const std::string& text);

/// True if the closed polygon given by `verts` is simple (no two
/// non-adjacent edges intersect).
bool polygon_is_simple(const std::vector<Point2>& verts);
/// Twice the signed area (positive for CCW).
double polygon_signed_area2(const std::vector<Point2>& verts);
/// Even-odd ray-casting containment test against a closed polygon/polyline.
bool point_in_polygon(const std::vector<Point2>& verts, Point2 p);

}  // namespace pauli2d
