#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>

#include "craterid/error.hpp"

namespace craterid {

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Ellipse in some 2D frame. psi is counterclockwise from +x, in [0, pi).
struct EllipseParams {
    double a = 1.0;
    double b = 1.0;
    double xc = 0.0;
    double yc = 0.0;
    double psi = 0.0;
};

/// Implicit coefficients without the a >= b check. Used where axis order
/// does not matter (e.g. the disk quadric symmetry test).
Mat3 ellipse_conic_raw(double a, double b, double xc, double yc, double psi);

Mat3 ellipse_to_conic(const EllipseParams& e);
EllipseParams conic_to_ellipse(const Mat3& c);

Mat3 adjugate(const Mat3& m);
Mat3 normalize_unit_det(const Mat3& c);

/// Center of a central conic, -U^-1 w.
Vec2 conic_center(const Mat3& c);

/// Eigenvalues of aj * (-ai)^-1, each a root of det(lambda ai + aj) = 0.
std::array<std::complex<double>, 3> degenerate_pencil_eigenvalues(const Mat3& ai, const Mat3& aj);

/// Real degenerate member lambda ai + aj that splits into two real lines.
/// Tries roots in order of decreasing |lambda| among those whose adjugate
/// diagonal is sign-admissible.
Mat3 select_line_pair_conic(const Mat3& ai, const Mat3& aj, double* lambda_out = nullptr);

struct LinePair {
    Vec3 g;
    Vec3 h;
};
LinePair split_degenerate_conic(const Mat3& b);

Vec3 line_between_conics(const Vec3& g, const Vec3& h, const Mat3& ai, const Mat3& aj);

/// select + split + pick, the full route from two disjoint ellipses to the
/// line that separates them.
Vec3 separating_line(const Mat3& ai, const Mat3& aj);

Mat3 cross_matrix(const Vec3& z);

}  // namespace craterid
