#include "craterid/crater3d.hpp"

#include <cmath>

namespace craterid {

namespace {
constexpr double kMaxLatDeg = 89.99;
}

void validate_record(const CraterRecord& rec) {
    if (!(rec.b > 0.0) || rec.a < rec.b || !std::isfinite(rec.a))
        throw Error(ErrorCode::invalid_axes, rec.id + ": need a >= b > 0");
    if (!std::isfinite(rec.lat) || !std::isfinite(rec.lon) || !std::isfinite(rec.psi))
        throw Error(ErrorCode::invalid_argument, rec.id + ": non-finite angle");
    if (std::abs(rec.lat) > M_PI / 2)
        throw Error(ErrorCode::invalid_argument, rec.id + ": latitude out of range");
    if (!(rec.arc_fraction >= 0.0 && rec.arc_fraction <= 1.0))
        throw Error(ErrorCode::invalid_argument, rec.id + ": arc fraction outside [0,1]");
    if (std::abs(rec.lat) > kMaxLatDeg * M_PI / 180.0)
        throw Error(ErrorCode::polar_singularity, rec.id + ": crater too close to a pole");
}

Vec3 unit_direction(double lat, double lon) {
    return Vec3(std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon), std::sin(lat));
}

Vec3 crater_center(double lat, double lon, double rho) {
    return rho * unit_direction(lat, lon);
}

CraterFrame enu_frame(const Vec3& p_c) {
    CraterFrame f;
    f.u = p_c.normalized();
    const Vec3 k(0, 0, 1);
    const Vec3 ku = k.cross(f.u);
    if (ku.norm() < 1e-9) throw Error(ErrorCode::polar_singularity, "center parallel to pole");
    f.e = ku.normalized();
    f.n = f.u.cross(f.e).normalized();
    f.T_EM.col(0) = f.e;
    f.T_EM.col(1) = f.n;
    f.T_EM.col(2) = f.u;
    return f;
}

Vec4 crater_plane(const Vec3& u, double rho) {
    return Vec4(u.x(), u.y(), u.z(), -rho);
}

double default_plane_distance(const CraterRecord& rec, double R) {
    const double r2 = rec.a * rec.b;
    if (!(r2 < R * R)) throw Error(ErrorCode::invalid_axes, rec.id + ": rim larger than the sphere");
    return std::sqrt(R * R - r2);
}

CraterFrame crater_frame(const CraterRecord& rec, double rho) {
    validate_record(rec);
    const Vec3 p = crater_center(rec.lat, rec.lon, rho);
    CraterFrame f = enu_frame(p);
    f.p_c = p;
    f.plane = crater_plane(f.u, rho);
    f.H_M.col(0) = f.e;
    f.H_M.col(1) = f.n;
    f.H_M.col(2) = p;
    return f;
}

Mat3 crater_plane_conic(const CraterRecord& rec) {
    return ellipse_to_conic({rec.a, rec.b, 0.0, 0.0, rec.psi});
}

Mat4 disk_quadric_from_conic(const CraterFrame& f, const Mat3& plane_conic) {
    Eigen::Matrix<double, 4, 3> G;
    G.topRows<3>() = f.H_M;
    G.row(3) << 0, 0, 1;
    const Mat3 cs = adjugate(plane_conic);
    Mat4 q = G * cs * G.transpose();
    return 0.5 * (q + q.transpose());
}

Mat4 disk_quadric(const CraterRecord& rec, double rho) {
    return disk_quadric_from_conic(crater_frame(rec, rho), crater_plane_conic(rec));
}

Mat4 sphere_quadric(double R) {
    Mat4 q = Mat4::Zero();
    const double r2 = 1.0 / (R * R);
    q(0, 0) = q(1, 1) = q(2, 2) = r2;
    q(3, 3) = -1.0;
    return q;
}

Vec3 rim_point(const CraterRecord& rec, const CraterFrame& f, double t) {
    const double c = std::cos(rec.psi), s = std::sin(rec.psi);
    const double x = rec.a * std::cos(t) * c - rec.b * std::sin(t) * s;
    const double y = rec.a * std::cos(t) * s + rec.b * std::sin(t) * c;
    return f.p_c + x * f.e + y * f.n;
}

}  // namespace craterid
