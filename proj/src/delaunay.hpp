#pragma once

#include <array>
#include <vector>

#include "pauli2d/geometry.hpp"

namespace pauli2d::detail {

/// Incremental Bowyer-Watson Delaunay triangulation. Returns CCW triangles
/// as index triples into `points` (convex hull coverage). Duplicate points
/// (within `dedup_tol`) are skipped. Deterministic for a fixed input order.
std::vector<std::array<int, 3>> delaunay(const std::vector<Point2>& points,
                                         double dedup_tol = 0.0);

}  // namespace pauli2d::detail
