#pragma once

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "craterid/camera.hpp"
#include "craterid/synth.hpp"

namespace th {

using namespace craterid;

inline double rel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return (a - b).norm() / std::max(1e-300, b.norm());
}

/// Relative distance between matrices equal up to scale.
inline double rel_proj(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    const double s = (a.array() * b.array()).sum() / (b.array() * b.array()).sum();
    return (a - s * b).norm() / a.norm();
}

inline EllipseParams rand_ellipse(Rng& r, double amin = 0.5, double amax = 5.0, double box = 10.0) {
    EllipseParams e;
    e.a = r.uniform(amin, amax);
    e.b = e.a * r.uniform(0.2, 1.0);
    e.xc = r.uniform(-box, box);
    e.yc = r.uniform(-box, box);
    e.psi = r.uniform(0.0, M_PI);
    return e;
}

inline Mat3 rand_homography(Rng& r) {
    for (;;) {
        Mat3 H;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) H(i, j) = r.normal();
        H += 2.0 * Mat3::Identity();
        if (std::abs(H.determinant()) > 0.2) return H;
    }
}

inline Mat3 map_conic(const Mat3& H, const Mat3& A) {
    const Mat3 Hi = H.inverse();
    Mat3 r = Hi.transpose() * A * Hi;
    return 0.5 * (r + r.transpose());
}

inline CraterRecord crater(double lat_deg, double lon_deg, double a, double b, double psi, const char* id = "c") {
    CraterRecord c;
    c.id = id;
    c.lat = lat_deg * M_PI / 180.0;
    c.lon = lon_deg * M_PI / 180.0;
    c.a = a;
    c.b = b;
    c.psi = psi;
    return c;
}

}  // namespace th

namespace th {

/// Attitude with the boresight from `pos` toward `target`, rolled by `roll`.
inline Mat3 look_at(const Vec3& pos, const Vec3& target, double roll = 0.0) {
    const Vec3 z = (target - pos).normalized();
    Vec3 x = Vec3(0, 0, 1).cross(z);
    if (x.norm() < 1e-6) x = Vec3(1, 0, 0).cross(z);
    x.normalize();
    const Vec3 y = z.cross(x);
    Mat3 T;
    T.row(0) = (std::cos(roll) * x + std::sin(roll) * y).transpose();
    T.row(1) = (-std::sin(roll) * x + std::cos(roll) * y).transpose();
    T.row(2) = z.transpose();
    return T;
}

/// n non-overlapping craters within `spread_km` of a random surface point.
inline std::vector<CraterRecord> cluster(Rng& r, int n, double spread_km, double rmin, double rmax, bool circular,
                                         Vec3* centre = nullptr) {
    const double R = kMoonRadiusKm;
    Vec3 c;
    do {
        c = r.unit_vector();
    } while (std::abs(c.z()) > 0.9);
    if (centre) *centre = c;
    const CraterFrame f = enu_frame(c);
    std::vector<CraterRecord> out;
    while (int(out.size()) < n) {
        const double a = r.uniform(rmin, rmax);
        const double b = circular ? a : a * r.uniform(0.6, 1.0);
        const Vec3 d = (R * c + r.uniform(-spread_km, spread_km) * f.e + r.uniform(-spread_km, spread_km) * f.n).normalized();
        CraterRecord rec;
        rec.id = "t" + std::to_string(out.size());
        rec.lat = std::asin(d.z());
        rec.lon = std::atan2(d.y(), d.x());
        rec.a = a;
        rec.b = b;
        rec.psi = r.uniform(0, M_PI);
        bool ok = true;
        for (const auto& o : out) {
            const double g = R * std::acos(std::clamp(unit_direction(o.lat, o.lon).dot(d), -1.0, 1.0));
            if (g < 1.3 * (o.a + a)) ok = false;
        }
        if (ok) out.push_back(rec);
    }
    return out;
}

/// Random camera above `target` (selenographic km), looking at it.
inline CameraPose random_view(Rng& r, const Vec3& target, double hmin, double hmax, double max_off = 0.5) {
    const Vec3 up = target.normalized();
    const CraterFrame f = enu_frame(target);
    Vec3 dir = (up + r.uniform(-max_off, max_off) * f.e + r.uniform(-max_off, max_off) * f.n).normalized();
    CameraPose p;
    p.r_M = target + r.uniform(hmin, hmax) * dir;
    p.T_MC = look_at(p.r_M, target, r.uniform(0, 2 * M_PI));
    return p;
}

inline Intrinsics pinhole(double f = 1500, double c = 1100) {
    Intrinsics k;
    k.dx = k.dy = f;
    k.up = k.vp = c;
    return k;
}

inline Mat3 image_of(const CraterRecord& c, const Mat34& P) {
    return project_disk_quadric(P, disk_quadric(c));
}

}  // namespace th

namespace th {

/// Circle cut from the unit sphere by the plane x_axis = t, as a disk quadric.
inline Mat4 sphere_model_disk(int axis, double t) {
    CraterFrame f;
    const Vec3 u = Vec3::Unit(axis);
    f.p_c = t * u;
    f.e = Vec3::Unit((axis + 1) % 3);
    f.n = Vec3::Unit((axis + 2) % 3);
    f.u = u;
    f.H_M.col(0) = f.e;
    f.H_M.col(1) = f.n;
    f.H_M.col(2) = f.p_c;
    const double r = std::sqrt(1.0 - t * t);
    return disk_quadric_from_conic(f, ellipse_to_conic({r, r, 0, 0, 0}));
}

/// Closed-form squared cosh of the sphere-model invariants.
inline std::array<double, 3> sphere_model_alpha2(double t1, double t2, double t3) {
    const double a = t1 * t1, b = t2 * t2, c = t3 * t3;
    return {b * c / ((a + b - 1) * (a + c - 1)), a * c / ((a + b - 1) * (b + c - 1)),
            a * b / ((a + c - 1) * (b + c - 1))};
}

}  // namespace th
