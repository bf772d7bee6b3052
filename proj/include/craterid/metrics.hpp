#pragma once

#include "craterid/conic2d.hpp"
#include "craterid/exec.hpp"

namespace craterid {

/// Ellipse read as a Gaussian 1-sigma contour: (x - y)^T Y (x - y) = 1.
struct GaussianForm {
    Vec2 y;
    Mat2 Y;
};
GaussianForm conic_to_gaussian(const Mat3& c);

double gaussian_angle(const Mat3& ci, const Mat3& cj);

/// Grid-count Jaccard distance. The grid is attached to the pair (origin at
/// the midpoint of the centers, axis along the center offset) and `pitch` is
/// relative to the pair length scale (a_i b_i a_j b_j)^(1/4), so the value is
/// unchanged by similarity transforms.
double jaccard_distance(const Mat3& ci, const Mat3& cj, double pitch = 1.0 / 256, Exec exec = Exec::parallel);

struct GateConfig {
    double sigma_img = 1.0;  // px
    double tau = 13.277;     // chi2_4 99th percentile
    double factor = 0.85;
};

struct GateResult {
    bool accept = false;
    double statistic = 0.0;  // d^2 / sigma^2
    double sigma = 0.0;
};

GateResult chi2_gate(double d, double a, double b, const GateConfig& cfg);

}  // namespace craterid
