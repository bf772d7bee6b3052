#include "craterid/conic2d.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace craterid {

Mat3 ellipse_conic_raw(double a, double b, double xc, double yc, double psi) {
    const double s = std::sin(psi), c = std::cos(psi);
    const double a2 = a * a, b2 = b * b;
    const double A = a2 * s * s + b2 * c * c;
    const double B = 2.0 * (b2 - a2) * c * s;
    const double C = a2 * c * c + b2 * s * s;
    const double D = -2.0 * A * xc - B * yc;
    const double F = -B * xc - 2.0 * C * yc;
    const double G = A * xc * xc + B * xc * yc + C * yc * yc - a2 * b2;
    Mat3 m;
    m << A, B / 2, D / 2,
         B / 2, C, F / 2,
         D / 2, F / 2, G;
    return m;
}

Mat3 ellipse_to_conic(const EllipseParams& e) {
    if (!(e.b > 0.0) || e.a < e.b || !std::isfinite(e.a))
        throw Error(ErrorCode::invalid_axes, "need a >= b > 0");
    return ellipse_conic_raw(e.a, e.b, e.xc, e.yc, e.psi);
}

Vec2 conic_center(const Mat3& c) {
    const Mat2 U = c.topLeftCorner<2, 2>();
    const double det = U.determinant();
    if (det <= 0.0 || !std::isfinite(det))
        throw Error(ErrorCode::not_an_ellipse, "no finite center");
    const Vec2 w = c.topRightCorner<2, 1>();
    return -U.inverse() * w;
}

EllipseParams conic_to_ellipse(const Mat3& c) {
    const double scale = c.cwiseAbs().maxCoeff();
    if (!(scale > 0.0) || !std::isfinite(scale))
        throw Error(ErrorCode::not_an_ellipse, "zero or non-finite matrix");
    const Mat3 m = c / scale;
    const Mat2 U = 0.5 * (m.topLeftCorner<2, 2>() + m.topLeftCorner<2, 2>().transpose());
    const double detU = U.determinant();
    // B^2 - 4AC = -4 det U
    if (!(detU > 1e-14 * U.squaredNorm()))
        throw Error(ErrorCode::not_an_ellipse, "discriminant not negative");
    const Vec2 w = m.topRightCorner<2, 1>();
    const Vec2 ctr = -U.inverse() * w;
    const double g = m(2, 2) + w.dot(ctr);
    // (x - c)^T U (x - c) = -g; need -g to share the sign of U
    const double tr = U.trace();
    if (!(-g * tr > 0.0) || std::abs(g) < 1e-14 * std::abs(tr))
        throw Error(ErrorCode::not_an_ellipse, "empty or degenerate locus");
    const Mat2 Y = U / (-g);
    const double mean = 0.5 * (Y(0, 0) + Y(1, 1));
    const double half = 0.5 * (Y(1, 1) - Y(0, 0));
    const double r = std::hypot(half, Y(0, 1));
    const double pmin = mean - r, pmax = mean + r;
    if (!(pmin > 0.0))
        throw Error(ErrorCode::not_an_ellipse, "not positive definite");
    EllipseParams e;
    e.a = 1.0 / std::sqrt(pmin);
    e.b = 1.0 / std::sqrt(pmax);
    e.xc = ctr.x();
    e.yc = ctr.y();
    if (r <= 1e-15 * mean) {
        e.psi = 0.0;
    } else {
        double psi = 0.5 * std::atan2(-2.0 * Y(0, 1), Y(1, 1) - Y(0, 0));
        if (psi < 0.0) psi += M_PI;
        if (psi >= M_PI) psi -= M_PI;
        e.psi = psi;
    }
    return e;
}

Mat3 adjugate(const Mat3& m) {
    Mat3 r;
    r(0, 0) = m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
    r(0, 1) = m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2);
    r(0, 2) = m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1);
    r(1, 0) = m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2);
    r(1, 1) = m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0);
    r(1, 2) = m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2);
    r(2, 0) = m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0);
    r(2, 1) = m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1);
    r(2, 2) = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    return r;
}

Mat3 normalize_unit_det(const Mat3& c) {
    const double det = c.determinant();
    const double n = c.norm();
    if (det == 0.0 || !std::isfinite(det) || std::abs(det) <= 1e-300 * n * n * n)
        throw Error(ErrorCode::singular_conic, "determinant is zero");
    Mat3 r = c * std::cbrt(1.0 / det);
    // one refinement step keeps det within a few ulps of 1
    r *= std::cbrt(1.0 / r.determinant());
    return r;
}

std::array<std::complex<double>, 3> degenerate_pencil_eigenvalues(const Mat3& ai, const Mat3& aj) {
    const double det = ai.determinant();
    if (det == 0.0 || !std::isfinite(det) ||
        std::abs(det) < 1e-14 * std::pow(ai.norm(), 3))
        throw Error(ErrorCode::singular_first_conic, "first conic is singular");
    const Mat3 m = aj * (-ai).inverse();
    Eigen::EigenSolver<Mat3> es(m, false);
    std::array<std::complex<double>, 3> out;
    for (int i = 0; i < 3; ++i) out[i] = es.eigenvalues()(i);
    return out;
}

namespace {

// adjugate diagonal admissible for a real line pair: all <= 0 with one < 0
bool real_line_pair(const Mat3& b) {
    const Mat3 s = adjugate(b);
    const double mx = s.diagonal().cwiseAbs().maxCoeff();
    if (!(mx > 0.0)) return false;
    const double tol = 1e-12 * mx;
    for (int i = 0; i < 3; ++i)
        if (s(i, i) > tol) return false;
    return s.diagonal().minCoeff() < 0.0;
}

}  // namespace

Mat3 select_line_pair_conic(const Mat3& ai, const Mat3& aj, double* lambda_out) {
    const auto ev = degenerate_pencil_eigenvalues(ai, aj);
    std::vector<double> real;
    for (const auto& z : ev)
        if (std::abs(z.imag()) <= 1e-10 * std::max(1.0, std::abs(z))) real.push_back(z.real());
    std::sort(real.begin(), real.end(), [](double x, double y) { return std::abs(x) > std::abs(y); });
    for (double lam : real) {
        const Mat3 b = lam * ai + aj;
        if (real_line_pair(b)) {
            if (lambda_out) *lambda_out = lam;
            return b;
        }
    }
    throw Error(ErrorCode::wrong_eigenvalue_branch, "no real line pair in pencil");
}

Mat3 cross_matrix(const Vec3& z) {
    Mat3 m;
    m << 0, -z.z(), z.y(),
         z.z(), 0, -z.x(),
         -z.y(), z.x(), 0;
    return m;
}

LinePair split_degenerate_conic(const Mat3& b) {
    const Mat3 bs = adjugate(b);
    int k = 0;
    bs.diagonal().cwiseAbs().maxCoeff(&k);
    if (bs.diagonal().minCoeff() >= 0.0)
        throw Error(ErrorCode::wrong_eigenvalue_branch, "adjugate diagonal is non-negative");
    if (!(bs(k, k) < 0.0))
        throw Error(ErrorCode::wrong_eigenvalue_branch, "dominant adjugate entry is non-negative");
    const Vec3 z = -bs.col(k) / std::sqrt(-bs(k, k));
    const Mat3 d = b + cross_matrix(z);
    Eigen::Index r = 0, c = 0;
    d.cwiseAbs().maxCoeff(&r, &c);
    LinePair lp;
    lp.g = d.col(c);
    lp.h = d.row(r).transpose();
    return lp;
}

Vec3 line_between_conics(const Vec3& g, const Vec3& h, const Mat3& ai, const Mat3& aj) {
    const Vec2 ci = conic_center(ai), cj = conic_center(aj);
    const Vec3 hi(ci.x(), ci.y(), 1.0), hj(cj.x(), cj.y(), 1.0);
    auto separates = [&](const Vec3& l) {
        const double si = l.dot(hi), sj = l.dot(hj);
        const double band_i = 1e-12 * l.norm() * hi.norm();
        const double band_j = 1e-12 * l.norm() * hj.norm();
        if (std::abs(si) <= band_i || std::abs(sj) <= band_j) return false;
        return (si > 0.0) != (sj > 0.0);
    };
    const bool sg = separates(g), sh = separates(h);
    if (sg == sh) throw Error(ErrorCode::ambiguous_separation, "need exactly one separating line");
    return sg ? g : h;
}

Vec3 separating_line(const Mat3& ai, const Mat3& aj) {
    const Mat3 b = select_line_pair_conic(ai, aj);
    const LinePair lp = split_degenerate_conic(b);
    return line_between_conics(lp.g, lp.h, ai, aj);
}

}  // namespace craterid
