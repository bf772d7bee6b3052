#pragma once

#include <vector>

#include "craterid/camera.hpp"

namespace craterid {

struct ConicCorrespondence {
    Mat3 observed;  // image locus, any scale
    CraterRecord crater;
    CraterFrame frame;
    Mat3 plane_conic;  // C_i in the ENU plane
};

ConicCorrespondence make_correspondence(const Mat3& observed, const CraterRecord& rec);

struct PositionEstimate {
    Vec3 r_M = Vec3::Zero();
    double residual = 0.0;
    std::vector<double> scales;
    bool inside_moon = false;
};

double estimate_scale(const ConicCorrespondence& c, const Mat3& T_MC, const Intrinsics& k);

PositionEstimate solve_position(const std::vector<ConicCorrespondence>& corrs, const Mat3& T_MC,
                                const Intrinsics& k, double R = kMoonRadiusKm);

}  // namespace craterid
