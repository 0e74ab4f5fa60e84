#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "pauli2d/fields.hpp"
#include "pauli2d/geometry.hpp"
#include "pauli2d/potential.hpp"

namespace pauli2d {

enum class CritKind { minimum, maximum, saddle, degenerate };

struct CriticalPoint {
  Point2 location;
  double value = 0.0;
  Eigen::Matrix2d hessian;
  CritKind kind = CritKind::degenerate;
};

/// Closed-form scalar function with derivatives, the search space for the
/// Morse operations. Built from a catalog field's potential or supplied
/// directly.
struct AnalyticScalar {
  std::function<double(Point2)> value;
  std::function<Eigen::Vector2d(Point2)> grad;
  std::function<Eigen::Matrix2d(Point2)> hess;
};

/// Potential of a catalog field as an AnalyticScalar. Throws
/// NoAnalyticPotential when the entry has no closed form.
AnalyticScalar potential_of(const MagneticField& field);

/// Classification by Hessian eigenvalue signs; degenerate when
/// |det H| <= 1e-8 * ||H||_F^2.
CritKind classify(const Eigen::Matrix2d& hess);
std::string to_string(CritKind kind);

/// Newton search from an n-by-n seed grid over the domain closure.
/// Converged points satisfy ||grad|| <= 1e-10; results are deduplicated at
/// 1e-8 distance and sorted by (value, x1, x2).
std::vector<CriticalPoint> find_critical_points(const AnalyticScalar& f,
                                                const ImplicitDomain& domain,
                                                int seed_grid_n);

struct LevelCurve {
  double level = 0.0;
  std::vector<std::vector<Point2>> polylines;
  std::vector<bool> closed;
};

/// Level set of a nodal P1 field: per-triangle linear crossings chained
/// into polylines. Throws EmptyLevel when the level is not crossed.
LevelCurve extract_level_set(const ScalarField& psi, double level);
/// Level set of an analytic function on a uniform grid over `box` with
/// spacing ~ box/сgrid_n; crossing points are refined onto the exact level.
LevelCurve extract_level_set(const std::function<double(Point2)>& func, BBox box,
                             double level, int grid_n);

enum class FlowDirection { ascent, descent };
enum class CurveEnd { critical_point, boundary, max_steps };

struct IntegralCurve {
  std::vector<Point2> points;
  CurveEnd endpoint_kind = CurveEnd::max_steps;
};

struct IntegralCurveOptions {
  double step = 0.01;       // base arclength step
  int max_steps = 100000;
  double cp_radius = 1e-4;  // termination distance to a known critical point
  std::vector<Point2> critical_points;
  std::optional<ImplicitDomain> domain;  // stop when leaving it
};

/// Normalized-gradient flow by adaptive RK4 with arclength steps.
IntegralCurve integral_curve(const AnalyticScalar& f, Point2 start, FlowDirection dir,
                             const IntegralCurveOptions& opts);

/// Start point for the separatrix leaving a saddle: offset along the
/// unstable (positive-eigenvalue) Hessian eigenvector; side = +1 or -1.
Point2 saddle_escape_start(const AnalyticScalar& f, Point2 saddle, double offset, int side);

/// Even-odd enclosure test of `points` against closed component `component`
/// of `curve`. Throws OpenCurve when that component is not closed.
bool enclosure_test(const LevelCurve& curve, int component,
                    const std::vector<Point2>& points);

}  // namespace pauli2d
