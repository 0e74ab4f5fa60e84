#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pauli2d/geometry.hpp"

namespace pauli2d {

/// Pointwise magnetic field with optional closed-form scalar potential
/// (a function psi with laplacian(psi) = B) and its derivatives. Immutable
/// after construction.
struct MagneticField {
  std::string name;
  std::map<std::string, double> params;
  std::function<double(Point2)> B;
  std::function<double(Point2)> psi;                   // may be empty
  std::function<Eigen::Vector2d(Point2)> grad_psi;     // may be empty
  std::function<Eigen::Matrix2d(Point2)> hess_psi;     // may be empty

  bool has_analytic_psi() const { return static_cast<bool>(psi); }
  double eval_B(Point2 p) const { return B(p); }

  /// Field with B, psi, and derivatives negated exactly (IEEE sign flip).
  MagneticField negated() const;
};

/// Closed-form value of the scalar potential. Throws NoAnalyticPotential
/// when the catalog entry does not carry one.
double eval_psi_analytic(const MagneticField& field, Point2 p);

/// Construct a catalog field by name. Entries: constant(b), radial(beta),
/// affine(beta), sym72, asym73(eps), onesaddle82(c optional).
/// Throws UnknownField / MissingParam.
MagneticField make_field(const std::string& name,
                         const std::map<std::string, double>& params = {});

/// Names of the available catalog entries.
std::vector<std::string> field_catalog();

/// Natural bounding box for a catalog field's potential (the domain the
/// examples use it on), for seeding searches and level extraction.
BBox field_search_box(const MagneticField& field);

}  // namespace pauli2d
