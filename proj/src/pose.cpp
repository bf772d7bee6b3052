#include "craterid/pose.hpp"

#include <cmath>

namespace craterid {

ConicCorrespondence make_correspondence(const Mat3& observed, const CraterRecord& rec) {
    ConicCorrespondence c;
    c.observed = observed;
    c.crater = rec;
    c.frame = crater_frame(rec);
    c.plane_conic = crater_plane_conic(rec);
    return c;
}

namespace {

Mat3 back_projected(const ConicCorrespondence& c, const Mat3& T_MC, const Intrinsics& k) {
    const Mat3 K = k.K();
    return T_MC.transpose() * K.transpose() * c.observed * K * T_MC;
}

}  // namespace

double estimate_scale(const ConicCorrespondence& c, const Mat3& T_MC, const Intrinsics& k) {
    const Mat3 B = back_projected(c, T_MC, k);
    const Mat2 lhs = c.plane_conic.topLeftCorner<2, 2>();
    const Mat2 rhs = (c.frame.T_EM.transpose() * B * c.frame.T_EM).topLeftCorner<2, 2>();
    const double den = lhs.cwiseProduct(lhs).sum();
    if (den < 1e-14) throw Error(ErrorCode::degenerate_block, "plane conic block is degenerate");
    return lhs.cwiseProduct(rhs).sum() / den;
}

PositionEstimate solve_position(const std::vector<ConicCorrespondence>& corrs, const Mat3& T_MC,
                                const Intrinsics& k, double R) {
    if (corrs.size() < 2) throw Error(ErrorCode::rank_deficient_geometry, "need at least two craters");
    const int rows = int(2 * corrs.size());
    Eigen::MatrixXd A(rows, 3);
    Eigen::VectorXd y(rows);
    PositionEstimate est;
    for (size_t i = 0; i < corrs.size(); ++i) {
        const auto& c = corrs[i];
        const Mat3 B = back_projected(c, T_MC, k);
        const double s = estimate_scale(c, T_MC, k);
        est.scales.push_back(s);
        const Eigen::Matrix<double, 2, 3> M = (c.frame.T_EM.transpose() * B).topRows<2>();
        A.middleRows<2>(2 * i) = M;
        y.segment<2>(2 * i) = M * c.frame.p_c - s * c.plane_conic.topRightCorner<2, 1>();
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    qr.setThreshold(1e-10);
    if (qr.rank() < 3) throw Error(ErrorCode::rank_deficient_geometry, "crater geometry does not fix position");
    est.r_M = qr.solve(y);
    est.residual = std::sqrt((A * est.r_M - y).squaredNorm() / rows);
    est.inside_moon = est.r_M.norm() <= R + 1.0;
    return est;
}

}  // namespace craterid
