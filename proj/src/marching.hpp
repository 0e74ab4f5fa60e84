#pragma once

#include <functional>
#include <vector>

#include "pauli2d/geometry.hpp"

namespace pauli2d::detail {

struct MarchingChains {
  std::vector<std::vector<Point2>> chains;
  std::vector<bool> closed;
};

/// Marching squares on a uniform (n+1)x(n+1) sample grid of g over box.
/// Returns the zero-level as chained polylines; open chains end on the box
/// frame. Saddle cells are disambiguated with the cell-center value.
MarchingChains marching_squares(const std::function<double(Point2)>& g, BBox box, int n);

}  // namespace pauli2d::detail
