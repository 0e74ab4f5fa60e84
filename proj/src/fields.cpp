#include "pauli2d/fields.hpp"

#include <cmath>

namespace pauli2d {

namespace {

double require_param(const std::map<std::string, double>& params, const std::string& key,
                     const std::string& field) {
  const auto it = params.find(key);
  if (it == params.end())
    throw MissingParam("field '" + field + "' requires parameter '" + key + "'");
  return it->second;
}

MagneticField make_constant(const std::map<std::string, double>& params) {
  const double b = require_param(params, "b", "constant");
  MagneticField f;
  f.name = "constant";
  f.params = {{"b", b}};
  f.B = [b](Point2) { return b; };
  return f;
}

MagneticField make_radial(const std::map<std::string, double>& params) {
  const double beta = require_param(params, "beta", "radial");
  MagneticField f;
  f.name = "radial";
  f.params = {{"beta", beta}};
  const double b2 = beta * beta;
  f.B = [b2](Point2 p) { return b2 - (p.x1 * p.x1 + p.x2 * p.x2); };
  // psi = (1/16) (r^2 + 1 - 4 beta^2)(1 - r^2), the Dirichlet solution on
  // the unit disk.
  f.psi = [b2](Point2 p) {
    const double r2 = p.x1 * p.x1 + p.x2 * p.x2;
    return (r2 + 1.0 - 4.0 * b2) * (1.0 - r2) / 16.0;
  };
  // grad psi = x * (2 beta^2 - r^2)/4
  f.grad_psi = [b2](Point2 p) {
    const double r2 = p.x1 * p.x1 + p.x2 * p.x2;
    const double c = (2.0 * b2 - r2) / 4.0;
    return Eigen::Vector2d(c * p.x1, c * p.x2);
  };
  f.hess_psi = [b2](Point2 p) {
    const double r2 = p.x1 * p.x1 + p.x2 * p.x2;
    const double c = (2.0 * b2 - r2) / 4.0;
    Eigen::Matrix2d H;
    H(0, 0) = c - p.x1 * p.x1 / 2.0;
    H(0, 1) = H(1, 0) = -p.x1 * p.x2 / 2.0;
    H(1, 1) = c - p.x2 * p.x2 / 2.0;
    return H;
  };
  return f;
}

MagneticField make_affine(const std::map<std::string, double>& params) {
  const double beta = require_param(params, "beta", "affine");
  MagneticField f;
  f.name = "affine";
  f.params = {{"beta", beta}};
  f.B = [beta](Point2 p) { return beta - p.x1; };
  // psi = (1/8)(x1 - 2 beta)(1 - x1^2 - x2^2)
  f.psi = [beta](Point2 p) {
    return (p.x1 - 2.0 * beta) * (1.0 - p.x1 * p.x1 - p.x2 * p.x2) / 8.0;
  };
  f.grad_psi = [beta](Point2 p) {
    const double g1 = (1.0 - 3.0 * p.x1 * p.x1 + 4.0 * beta * p.x1 - p.x2 * p.x2) / 8.0;
    const double g2 = -p.x2 * (p.x1 - 2.0 * beta) / 4.0;
    return Eigen::Vector2d(g1, g2);
  };
  f.hess_psi = [beta](Point2 p) {
    Eigen::Matrix2d H;
    H(0, 0) = (4.0 * beta - 6.0 * p.x1) / 8.0;
    H(0, 1) = H(1, 0) = -p.x2 / 4.0;
    H(1, 1) = -(p.x1 - 2.0 * beta) / 4.0;
    return H;
  };
  return f;
}

MagneticField make_sym72(const std::map<std::string, double>&) {
  MagneticField f;
  f.name = "sym72";
  // psi = (1 - x1^2 - x2^2)(6 x1^2 + 3 x2^2 - x2^4 - 1)
  f.psi = [](Point2 p) {
    const double x1 = p.x1, x2 = p.x2;
    return (1.0 - x1 * x1 - x2 * x2) *
           (6.0 * x1 * x1 + 3.0 * x2 * x2 - std::pow(x2, 4) - 1.0);
  };
  f.B = [](Point2 p) {
    const double x1 = p.x1, x2 = p.x2;
    const double x1sq = x1 * x1, x2sq = x2 * x2;
    return 22.0 - 90.0 * x1sq - 66.0 * x2sq + 12.0 * x1sq * x2sq + 32.0 * x2sq * x2sq;
  };
  f.grad_psi = [](Point2 p) {
    const double x1 = p.x1, x2 = p.x2;
    const double x1sq = x1 * x1, x2sq = x2 * x2;
    const double g1 = 2.0 * x1 * (7.0 - 12.0 * x1sq - 9.0 * x2sq + x2sq * x2sq);
    const double g2 =
        2.0 * x2 * (4.0 - 9.0 * x1sq - 8.0 * x2sq + 3.0 * x2sq * x2sq + 2.0 * x1sq * x2sq);
    return Eigen::Vector2d(g1, g2);
  };
  f.hess_psi = [](Point2 p) {
    const double x1 = p.x1, x2 = p.x2;
    const double x1sq = x1 * x1, x2sq = x2 * x2;
    Eigen::Matrix2d H;
    H(0, 0) = 14.0 - 72.0 * x1sq - 18.0 * x2sq + 2.0 * x2sq * x2sq;
    H(0, 1) = H(1, 0) = 4.0 * x1 * x2 * (2.0 * x2sq - 9.0);
    H(1, 1) = 8.0 - 18.0 * x1sq - 48.0 * x2sq + 30.0 * x2sq * x2sq + 12.0 * x1sq * x2sq;
    return H;
  };
  return f;
}

// Perturbed variant of sym72:
//   psi1 = (1 - r^2)(6 x1^2 + 3 x2^2 - x2^4 - 1 + eps x1 (x2 - sqrt(3/2))).
// B, grad and Hessian were obtained by symbolic differentiation offline.
MagneticField make_asym73(const std::map<std::string, double>& params) {
  const double eps = require_param(params, "eps", "asym73");
  const double s32 = std::sqrt(1.5);  // sqrt(3/2)
  const double s6 = std::sqrt(6.0);
  MagneticField f;
  f.name = "asym73";
  f.params = {{"eps", eps}};
  f.psi = [eps, s32](Point2 p) {
    const double x1 = p.x1, x2 = p.x2;
    return (1.0 - x1 * x1 - x2 * x2) *
           (6.0 * x1 * x1 + 3.0 * x2 * x2 - std::pow(x2, 4) - 1.0 +
            eps * x1 * (x2 - s32));
  };
  f.B = [eps, s6](Point2 p) {
    const double x1 = p.x1, x2 = p.x2;
    const double x1sq = x1 * x1, x2sq = x2 * x2;
    return 22.0 - 90.0 * x1sq - 66.0 * x2sq + 12.0 * x1sq * x2sq + 32.0 * x2sq * x2sq +
           eps * (4.0 * s6 * x1 - 12.0 * x1 * x2);
  };
  f.grad_psi = [eps, s6](Point2 p) {
    const double x1 = p.x1, x2 = p.x2;
    const double x1sq = x1 * x1, x2sq = x2 * x2;
    const double g1 = 2.0 * x1 * (7.0 - 12.0 * x1sq - 9.0 * x2sq + x2sq * x2sq) +
                      eps * (-3.0 * x1sq * x2 + 1.5 * s6 * x1sq - x2sq * x2 +
                             0.5 * s6 * x2sq + x2 - 0.5 * s6);
    const double g2 = 2.0 * x2 * (4.0 - 9.0 * x1sq - 8.0 * x2sq + 3.0 * x2sq * x2sq +
                                  2.0 * x1sq * x2sq) +
                      eps * x1 * (-x1sq - 3.0 * x2sq + s6 * x2 + 1.0);
    return Eigen::Vector2d(g1, g2);
  };
  f.hess_psi = [eps, s6](Point2 p) {
    const double x1 = p.x1, x2 = p.x2;
    const double x1sq = x1 * x1, x2sq = x2 * x2;
    Eigen::Matrix2d H;
    H(0, 0) = 14.0 - 72.0 * x1sq - 18.0 * x2sq + 2.0 * x2sq * x2sq +
              eps * (-6.0 * x1 * x2 + 3.0 * s6 * x1);
    H(0, 1) = H(1, 0) = 8.0 * x1 * x2 * x2sq - 36.0 * x1 * x2 +
                        eps * (-3.0 * x1sq - 3.0 * x2sq + s6 * x2 + 1.0);
    H(1, 1) = 12.0 * x1sq * x2sq - 18.0 * x1sq + 30.0 * x2sq * x2sq - 48.0 * x2sq + 8.0 +
              eps * (-6.0 * x1 * x2 + s6 * x1);
    return H;
  };
  return f;
}

// psi = -(x1^2 + x2^2 - 2 x1)^2 + (x1^2 + x2^2); B = 16(3/4 - (x1-1)^2 - x2^2).
// The optional parameter c selects a sublevel domain {psi < c} and must lie
// strictly between psi(x_min) = -(3/4)(2 sqrt(3) - 3) and 0.
MagneticField make_onesaddle82(const std::map<std::string, double>& params) {
  MagneticField f;
  f.name = "onesaddle82";
  if (params.count("c")) {
    const double c = params.at("c");
    const double psi_min = -0.75 * (2.0 * std::sqrt(3.0) - 3.0);
    if (!(c > psi_min && c < 0.0))
      throw InvalidArgument("onesaddle82: parameter c must satisfy " +
                            std::to_string(psi_min) + " < c < 0");
    f.params["c"] = c;
  }
  f.psi = [](Point2 p) {
    const double r2 = p.x1 * p.x1 + p.x2 * p.x2;
    const double u = r2 - 2.0 * p.x1;
    return -u * u + r2;
  };
  f.B = [](Point2 p) {
    const double d1 = p.x1 - 1.0;
    return 16.0 * (0.75 - d1 * d1 - p.x2 * p.x2);
  };
  f.grad_psi = [](Point2 p) {
    const double r2 = p.x1 * p.x1 + p.x2 * p.x2;
    const double u = r2 - 2.0 * p.x1;
    const double g1 = -2.0 * u * (2.0 * p.x1 - 2.0) + 2.0 * p.x1;
    const double g2 = -2.0 * u * (2.0 * p.x2) + 2.0 * p.x2;
    return Eigen::Vector2d(g1, g2);
  };
  f.hess_psi = [](Point2 p) {
    const double r2 = p.x1 * p.x1 + p.x2 * p.x2;
    const double u = r2 - 2.0 * p.x1;
    const double du1 = 2.0 * p.x1 - 2.0, du2 = 2.0 * p.x2;
    Eigen::Matrix2d H;
    H(0, 0) = -2.0 * du1 * du1 - 4.0 * u + 2.0;
    H(0, 1) = H(1, 0) = -2.0 * du1 * du2;
    H(1, 1) = -2.0 * du2 * du2 - 4.0 * u + 2.0;
    return H;
  };
  return f;
}

}  // namespace

MagneticField MagneticField::negated() const {
  MagneticField f;
  f.name = "-" + name;
  f.params = params;
  const auto b0 = B;
  f.B = [b0](Point2 p) { return -b0(p); };
  if (psi) {
    const auto p0 = psi;
    f.psi = [p0](Point2 p) { return -p0(p); };
  }
  if (grad_psi) {
    const auto g0 = grad_psi;
    f.grad_psi = [g0](Point2 p) { return Eigen::Vector2d(-g0(p)); };
  }
  if (hess_psi) {
    const auto h0 = hess_psi;
    f.hess_psi = [h0](Point2 p) { return Eigen::Matrix2d(-h0(p)); };
  }
  return f;
}

double eval_psi_analytic(const MagneticField& field, Point2 p) {
  if (!field.psi)
    throw NoAnalyticPotential("field '" + field.name + "' has no closed-form potential");
  return field.psi(p);
}

MagneticField make_field(const std::string& name,
                         const std::map<std::string, double>& params) {
  if (name == "constant") return make_constant(params);
  if (name == "radial") return make_radial(params);
  if (name == "affine") return make_affine(params);
  if (name == "sym72") return make_sym72(params);
  if (name == "asym73") return make_asym73(params);
  if (name == "onesaddle82") return make_onesaddle82(params);
  throw UnknownField("unknown field '" + name + "'");
}

std::vector<std::string> field_catalog() {
  return {"constant", "radial", "affine", "sym72", "asym73", "onesaddle82"};
}

BBox field_search_box(const MagneticField& field) {
  if (field.name == "onesaddle82" || field.name == "-onesaddle82")
    return BBox{{-1.5, -2.5}, {3.5, 2.5}};
  return BBox{{-1.05, -1.05}, {1.05, 1.05}};
}

}  // namespace pauli2d
