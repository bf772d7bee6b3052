#pragma once

#include <Eigen/Dense>
#include <string>

#include "craterid/conic2d.hpp"

namespace craterid {

using Mat4 = Eigen::Matrix4d;
using Vec4 = Eigen::Vector4d;

constexpr double kMoonRadiusKm = 1737.4;

/// Catalog crater. Angles in radians, lengths in km, psi from local East.
struct CraterRecord {
    std::string id;
    double lat = 0.0;
    double lon = 0.0;
    double a = 1.0;
    double b = 1.0;
    double psi = 0.0;
    double arc_fraction = 1.0;
};

struct CraterFrame {
    Vec3 p_c;
    Vec3 e, n, u;
    Mat3 T_EM;  // columns e n u
    Vec4 plane;
    Mat3 H_M;   // [e n p_c]
};

/// Throws invalid-axes / invalid-argument for records that break the
/// documented invariants, polar-singularity for |lat| > 89.99 deg.
void validate_record(const CraterRecord& rec);

Vec3 crater_center(double lat, double lon, double rho);
Vec3 unit_direction(double lat, double lon);

/// Fills e, n, u, T_EM only.
CraterFrame enu_frame(const Vec3& p_c);
Vec4 crater_plane(const Vec3& u, double rho);

double default_plane_distance(const CraterRecord& rec, double R = kMoonRadiusKm);

CraterFrame crater_frame(const CraterRecord& rec, double rho);
inline CraterFrame crater_frame(const CraterRecord& rec) {
    return crater_frame(rec, default_plane_distance(rec));
}

/// Rim conic in the ENU plane, centered at the plane origin.
Mat3 crater_plane_conic(const CraterRecord& rec);

Mat4 disk_quadric_from_conic(const CraterFrame& f, const Mat3& plane_conic);
Mat4 disk_quadric(const CraterRecord& rec, double rho);
inline Mat4 disk_quadric(const CraterRecord& rec) { return disk_quadric(rec, default_plane_distance(rec)); }

Mat4 sphere_quadric(double R = kMoonRadiusKm);

/// Point on the rim at parameter t, selenographic km.
Vec3 rim_point(const CraterRecord& rec, const CraterFrame& f, double t);

}  // namespace craterid
