#pragma once

#include <Eigen/Dense>
#include <string>

#include "craterid/crater3d.hpp"

namespace craterid {

using Mat34 = Eigen::Matrix<double, 3, 4>;

struct Intrinsics {
    double dx = 1.0;
    double dy = 1.0;
    double skew = 0.0;
    double up = 0.0;
    double vp = 0.0;

    Mat3 K() const;
};

struct Camera {
    Intrinsics k;
    int rows = 0;
    int cols = 0;
};

/// Square-pixel camera with the given full field of view; principal
/// point at the image center.
Camera camera_from_fov(double fov_deg, int rows, int cols);

struct CameraPose {
    Mat3 T_MC = Mat3::Identity();  // selenographic -> camera
    Vec3 r_M = Vec3::Zero();       // km
};

Mat34 projection_matrix(const Intrinsics& k, const CameraPose& pose);
Vec4 camera_center(const Mat34& P);
Vec2 project_point(const Mat34& P, const Vec3& x);

/// Locus of the projected rim, normalized to det +1.
Mat3 project_disk_quadric(const Mat34& P, const Mat4& q);

Mat3 crater_homography(const Mat34& P, const CraterFrame& f);

/// Locus via the plane homography, H^-T C H^-1, normalized to det +1.
Mat3 project_plane_conic(const Mat3& H, const Mat3& plane_conic);

/// Nadir attitude: boresight to the Moon center, image +u east, +v south.
Mat3 nadir_attitude(const Vec3& r_M);

/// Tilt the boresight by `angle` radians toward in-image direction `azimuth`.
Mat3 tilt_attitude(const Mat3& T_MC, double angle, double azimuth);

bool crater_faces_camera(const CraterFrame& f, const Vec3& r_M);

/// Near side, center in the image, full bounding box in the image.
bool crater_visible(const Camera& cam, const CameraPose& pose, const CraterFrame& f, const Mat4& q,
                    Mat3* locus_out = nullptr);

/// Axis-aligned half extents of an ellipse.
Vec2 ellipse_half_extent(const EllipseParams& e);

}  // namespace craterid
