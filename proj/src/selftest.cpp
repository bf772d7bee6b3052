#include "craterid/selftest.hpp"

#include <cmath>
#include <functional>

namespace craterid {

EllipseParams random_ellipse(Rng& rng) {
    EllipseParams e;
    e.a = rng.uniform(0.5, 3.0);
    e.b = e.a * rng.uniform(0.3, 1.0);
    e.xc = rng.uniform(-2.0, 2.0);
    e.yc = rng.uniform(-2.0, 2.0);
    e.psi = rng.uniform(0.0, M_PI);
    return e;
}

EllipseParams similarity(const EllipseParams& e, double s, double theta, const Vec2& t) {
    const Eigen::Rotation2Dd R(theta);
    const Vec2 c = s * (R * Vec2(e.xc, e.yc)) + t;
    EllipseParams o;
    o.a = s * e.a;
    o.b = s * e.b;
    o.xc = c.x();
    o.yc = c.y();
    o.psi = std::fmod(e.psi + theta, M_PI);
    if (o.psi < 0.0) o.psi += M_PI;
    return o;
}

std::vector<AxiomCheck> metrics_selftest(int cases, uint64_t seed, double jaccard_pitch, double tol) {
    using Metric = std::function<double(const Mat3&, const Mat3&)>;
    const std::pair<std::string, Metric> metrics[2] = {
        {"gaussian_angle", [](const Mat3& a, const Mat3& b) { return gaussian_angle(a, b); }},
        {"jaccard", [jaccard_pitch](const Mat3& a, const Mat3& b) {
             return jaccard_distance(a, b, jaccard_pitch, Exec::serial);
         }}};
    std::vector<AxiomCheck> out;
    for (int m = 0; m < 2; ++m) {
        const auto& [name, d] = metrics[m];
        const double hi = m == 0 ? M_PI / 2 : 1.0;
        AxiomCheck mini{name + " minimality", true, 0.0, cases};
        AxiomCheck sym{name + " symmetry", true, 0.0, cases};
        AxiomCheck tri{name + " triangle", true, 0.0, cases};
        AxiomCheck simi{name + " similarity", true, 0.0, cases};
        AxiomCheck range{name + " range", true, 0.0, cases};
        Rng rng(seed + 7919 * uint64_t(m));
        for (int c = 0; c < cases; ++c) {
            const EllipseParams pa = random_ellipse(rng), pb = random_ellipse(rng), pc = random_ellipse(rng);
            const Mat3 A = ellipse_to_conic(pa), B = ellipse_to_conic(pb), C = ellipse_to_conic(pc);
            const double aa = d(A, A);
            mini.worst = std::max(mini.worst, std::abs(aa));
            const double ab = d(A, B), ba = d(B, A);
            sym.worst = std::max(sym.worst, std::abs(ab - ba));
            const double bc = d(B, C), ac = d(A, C);
            tri.worst = std::max(tri.worst, ac - (ab + bc));
            for (double v : {ab, bc, ac}) range.worst = std::max(range.worst, std::max(-v, v - hi));
            const double s = std::exp(rng.uniform(-2.0, 2.0));
            const double th = rng.uniform(-M_PI, M_PI);
            const Vec2 t(rng.uniform(-100.0, 100.0), rng.uniform(-100.0, 100.0));
            const double ab2 = d(ellipse_to_conic(similarity(pa, s, th, t)), ellipse_to_conic(similarity(pb, s, th, t)));
            simi.worst = std::max(simi.worst, std::abs(ab2 - ab));
        }
        mini.pass = mini.worst == 0.0;
        sym.pass = sym.worst == 0.0;
        tri.pass = tri.worst <= tol;
        simi.pass = simi.worst <= tol;
        range.pass = range.worst <= 0.0;
        out.insert(out.end(), {mini, sym, tri, simi, range});
    }
    // two unit circles one apart: lens 2 acos(1/2) - sqrt(3)/2 over union 2 pi - lens
    const double lens = 2.0 * std::acos(0.5) - 0.5 * std::sqrt(3.0);
    const double exact = 1.0 - lens / (2.0 * M_PI - lens);
    const double grid = jaccard_distance(ellipse_to_conic({1, 1, 0, 0, 0}), ellipse_to_conic({1, 1, 1, 0, 0}),
                                         1.0 / 512);
    AxiomCheck lc{"jaccard unit-circle lens", std::abs(grid - exact) <= 1e-3, std::abs(grid - exact), 1};
    out.push_back(lc);
    return out;
}

}  // namespace craterid
