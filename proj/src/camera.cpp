#include "craterid/camera.hpp"

#include <cmath>

namespace craterid {

Mat3 Intrinsics::K() const {
    Mat3 m;
    m << dx, skew, up,
         0, dy, vp,
         0, 0, 1;
    return m;
}

Camera camera_from_fov(double fov_deg, int rows, int cols) {
    Camera c;
    const double half = 0.5 * fov_deg * M_PI / 180.0;
    c.k.dx = 0.5 * cols / std::tan(half);
    c.k.dy = c.k.dx;
    c.k.up = 0.5 * (cols - 1);
    c.k.vp = 0.5 * (rows - 1);
    c.rows = rows;
    c.cols = cols;
    return c;
}

Mat34 projection_matrix(const Intrinsics& k, const CameraPose& pose) {
    Mat34 ir;
    ir.leftCols<3>() = Mat3::Identity();
    ir.col(3) = -pose.r_M;
    return k.K() * pose.T_MC * ir;
}

Vec2 project_point(const Mat34& P, const Vec3& x) {
    const Vec3 h = P * x.homogeneous();
    if (!(h.z() > 0.0)) throw Error(ErrorCode::behind_camera, "point not in front of camera");
    return h.head<2>() / h.z();
}

Vec4 camera_center(const Mat34& P) {
    const Mat3 M = P.leftCols<3>();
    const double n = M.norm();
    if (std::abs(M.determinant()) > 1e-12 * n * n * n) {
        Vec4 c;
        c.head<3>() = -M.inverse() * P.col(3);
        c(3) = 1.0;
        return c;
    }
    Eigen::JacobiSVD<Mat34> svd(P, Eigen::ComputeFullV);
    return svd.matrixV().col(3);
}

Mat3 project_disk_quadric(const Mat34& P, const Mat4& q) {
    // rank(P Q* P^T) < 3 exactly when the camera center lies on the disk plane
    Eigen::SelfAdjointEigenSolver<Mat4> es(q);
    int k = 0;
    es.eigenvalues().cwiseAbs().minCoeff(&k);
    const Vec4 plane = es.eigenvectors().col(k);
    const Vec4 c = camera_center(P);
    if (std::abs(plane.dot(c)) <= 1e-12 * plane.norm() * c.norm())
        throw Error(ErrorCode::degenerate_view, "camera lies in the crater plane");
    // work in coordinates centered on the projected disk center
    const Vec3 x = P * q.col(3);
    Mat3 shift = Mat3::Identity();
    if (std::abs(x.z()) > 0.0) {
        shift(0, 2) = -x.x() / x.z();
        shift(1, 2) = -x.y() / x.z();
    }
    Mat3 as = shift * P * q * P.transpose() * shift.transpose();
    as = 0.5 * (as + as.transpose());
    const Mat3 local = adjugate(as);
    Mat3 a = shift.transpose() * local * shift;
    a = 0.5 * (a + a.transpose());
    const double det = a.determinant();
    if (!(det > 0.0) || !std::isfinite(det))
        throw Error(ErrorCode::degenerate_view, "projected envelope is rank deficient");
    return normalize_unit_det(a);
}

Mat3 crater_homography(const Mat34& P, const CraterFrame& f) {
    Eigen::Matrix<double, 4, 3> G;
    G.topRows<3>() = f.H_M;
    G.row(3) << 0, 0, 1;
    const Mat3 H = P * G;
    const double n = H.norm();
    if (!(n > 0.0) || std::abs(H.determinant()) <= 1e-12 * n * n * n)
        throw Error(ErrorCode::singular_homography, "crater plane homography is singular");
    return H;
}

Mat3 project_plane_conic(const Mat3& H, const Mat3& plane_conic) {
    const Mat3 hi = H.inverse();
    Mat3 a = hi.transpose() * plane_conic * hi;
    return normalize_unit_det(0.5 * (a + a.transpose()));
}

Mat3 nadir_attitude(const Vec3& r_M) {
    const Vec3 z = -r_M.normalized();
    Vec3 east = Vec3(0, 0, 1).cross(-z);
    if (east.norm() < 1e-9) east = Vec3(0, 1, 0);
    const Vec3 x = east.normalized();
    const Vec3 y = z.cross(x);
    Mat3 T;
    T.row(0) = x.transpose();
    T.row(1) = y.transpose();
    T.row(2) = z.transpose();
    return T;
}

Mat3 tilt_attitude(const Mat3& T_MC, double angle, double azimuth) {
    // rotation axis in the image plane, perpendicular to the tilt direction
    const Vec3 axis_c(-std::sin(azimuth), std::cos(azimuth), 0.0);
    const Mat3 R = Eigen::AngleAxisd(angle, axis_c).toRotationMatrix();
    return R.transpose() * T_MC;
}

bool crater_faces_camera(const CraterFrame& f, const Vec3& r_M) {
    return f.u.dot(r_M - f.p_c) > 0.0;
}

Vec2 ellipse_half_extent(const EllipseParams& e) {
    const double c = std::cos(e.psi), s = std::sin(e.psi);
    return Vec2(std::sqrt(e.a * e.a * c * c + e.b * e.b * s * s),
                std::sqrt(e.a * e.a * s * s + e.b * e.b * c * c));
}

bool crater_visible(const Camera& cam, const CameraPose& pose, const CraterFrame& f, const Mat4& q,
                    Mat3* locus_out) {
    if (!crater_faces_camera(f, pose.r_M)) return false;
    const Mat34 P = projection_matrix(cam.k, pose);
    const Vec3 h = P * f.p_c.homogeneous();
    if (!(h.z() > 0.0)) return false;
    const Vec2 c = h.head<2>() / h.z();
    const double lo = -0.5, umax = cam.cols - 0.5, vmax = cam.rows - 0.5;
    if (c.x() < lo || c.x() > umax || c.y() < lo || c.y() > vmax) return false;
    // every rim point must be in front, else the image conic is not an ellipse
    Mat3 A;
    EllipseParams e;
    try {
        A = project_disk_quadric(P, q);
        e = conic_to_ellipse(A);
    } catch (const Error&) {
        return false;
    }
    const Vec2 he = ellipse_half_extent(e);
    if (e.xc - he.x() < lo || e.xc + he.x() > umax || e.yc - he.y() < lo || e.yc + he.y() > vmax)
        return false;
    if (locus_out) *locus_out = A;
    return true;
}

}  // namespace craterid
