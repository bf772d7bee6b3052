#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "craterid/metrics.hpp"
#include "craterid/synth.hpp"

namespace craterid {

struct AxiomCheck {
    std::string name;
    bool pass = false;
    double worst = 0.0;  // largest violation seen
    int cases = 0;
};

/// Random ellipse with axes in [0.5, 3] and center in [-2, 2]^2, so random
/// triples overlap often enough to make the triangle test bite.
EllipseParams random_ellipse(Rng& rng);

/// Common similarity: scale s, rotation theta, translation t.
EllipseParams similarity(const EllipseParams& e, double s, double theta, const Vec2& t);

/// Minimality, symmetry, triangle inequality, similarity invariance and
/// range for both metrics, plus the unit-circle lens value.
std::vector<AxiomCheck> metrics_selftest(int cases, uint64_t seed, double jaccard_pitch = 1.0 / 64,
                                         double tol = 1e-9);

}  // namespace craterid
