#include "craterid/invariants.hpp"

#include <algorithm>
#include <cmath>

namespace craterid {

namespace {

void check_unit_det(const Mat3& a) {
    // the determinant itself carries roundoff of order eps * |a|^3
    const double n = a.norm();
    if (!(std::abs(a.determinant() - 1.0) <= 1e-9 + 1e-13 * n * n * n))
        throw Error(ErrorCode::not_normalized, "conic must have det = 1");
}

// Similarity that moves the center centroid to the origin and the spread to
// unit scale. Invariants are unchanged by any homography; this only improves
// conditioning for pixel-sized coordinates.
Mat3 conditioning(const std::array<const Mat3*, 3>& cs) {
    Vec2 c[3];
    Vec2 m = Vec2::Zero();
    for (int i = 0; i < 3; ++i) {
        try {
            c[i] = conic_center(*cs[i]);
        } catch (const Error&) {
            return Mat3::Identity();
        }
        m += c[i];
    }
    m /= 3.0;
    double s = 0.0;
    for (int i = 0; i < 3; ++i) s += (c[i] - m).norm();
    s /= 3.0;
    if (!(s > 0.0) || !std::isfinite(s)) s = 1.0;
    // H maps x -> (x - m)/s; loci transform as H^-T A H^-1, H^-1 = [s I, m; 0 1]
    Mat3 hinv;
    hinv << s, 0, m.x(),
            0, s, m.y(),
            0, 0, 1;
    return hinv;
}

Mat3 apply(const Mat3& hinv, const Mat3& a) {
    Mat3 r = hinv.transpose() * a * hinv;
    return 0.5 * (r + r.transpose());
}

}  // namespace

std::pair<double, double> coplanar_pair(const Mat3& ai, const Mat3& aj) {
    check_unit_det(ai);
    check_unit_det(aj);
    return {(adjugate(ai) * aj).trace(), (adjugate(aj) * ai).trace()};
}

CoplanarInvariants7 coplanar_triad(const Mat3& ai0, const Mat3& aj0, const Mat3& ak0) {
    check_unit_det(ai0);
    check_unit_det(aj0);
    check_unit_det(ak0);
    const Mat3 hinv = conditioning({&ai0, &aj0, &ak0});
    const Mat3 ai = normalize_unit_det(apply(hinv, ai0));
    const Mat3 aj = normalize_unit_det(apply(hinv, aj0));
    const Mat3 ak = normalize_unit_det(apply(hinv, ak0));
    const Mat3 si = adjugate(ai), sj = adjugate(aj), sk = adjugate(ak);
    CoplanarInvariants7 v;
    v.I_ij = (si * aj).trace();
    v.I_ji = (sj * ai).trace();
    v.I_jk = (sj * ak).trace();
    v.I_kj = (sk * aj).trace();
    v.I_ki = (sk * ai).trace();
    v.I_ik = (si * ak).trace();
    v.I_ijk = ((adjugate(aj + ak) - adjugate(aj - ak)) * ai).trace();
    return v;
}

double cayley_klein_angle(const Mat3& locus, const Vec3& l1, const Vec3& l2) {
    const Mat3 env = adjugate(locus);
    const double q12 = l1.dot(env * l2);
    const double q11 = l1.dot(env * l1);
    const double q22 = l2.dot(env * l2);
    const double d = q11 * q22;
    if (!(d > 0.0)) throw Error(ErrorCode::acosh_domain, "envelope forms have opposite signs");
    double r = std::abs(q12) / std::sqrt(d);
    if (!std::isfinite(r)) throw Error(ErrorCode::acosh_domain, "non-finite ratio");
    if (r < 1.0 - 1e-9) throw Error(ErrorCode::acosh_domain, "ratio below 1");
    if (r < 1.0) r = 1.0;
    return std::acosh(r);
}

namespace {

// line misses both ellipses and has their centers on opposite sides
bool separates(const Vec3& l, const Mat3& a, const Mat3& b) {
    for (const Mat3* m : {&a, &b}) {
        const Mat3 env = adjugate(*m);
        if (!(l.dot(env * l) * env(2, 2) > 0.0)) return false;
    }
    const Vec2 ca = conic_center(a), cb = conic_center(b);
    return (l.dot(ca.homogeneous()) > 0.0) != (l.dot(cb.homogeneous()) > 0.0);
}

}  // namespace

NoncoplanarInvariants3 noncoplanar_triad(const Mat3& ai0, const Mat3& aj0, const Mat3& ak0) {
    const Mat3 hinv = conditioning({&ai0, &aj0, &ak0});
    Mat3 a[3];
    try {
        a[0] = normalize_unit_det(apply(hinv, ai0));
        a[1] = normalize_unit_det(apply(hinv, aj0));
        a[2] = normalize_unit_det(apply(hinv, ak0));
    } catch (const Error& e) {
        throw Error(ErrorCode::overlap_detected, e.what());
    }
    Vec3 l_ij, l_jk, l_ki;
    try {
        l_ij = separating_line(a[0], a[1]).normalized();
        l_jk = separating_line(a[1], a[2]).normalized();
        l_ki = separating_line(a[2], a[0]).normalized();
    } catch (const Error& e) {
        throw Error(ErrorCode::overlap_detected, e.what());
    }
    // intersecting ellipses still give a real line pair; its line need not separate them
    if (!separates(l_ij, a[0], a[1]) || !separates(l_jk, a[1], a[2]) || !separates(l_ki, a[2], a[0]))
        throw Error(ErrorCode::overlap_detected, "no line separates the ellipses");
    NoncoplanarInvariants3 v;
    v.J_i = cayley_klein_angle(a[0], l_ij, l_ki);
    v.J_j = cayley_klein_angle(a[1], l_jk, l_ij);
    v.J_k = cayley_klein_angle(a[2], l_ki, l_jk);
    return v;
}

namespace {

// Sum and product in sorted order: the result depends only on the multiset,
// which keeps cyclic relabelings bit-identical.
double sum3(double a, double b, double c) {
    std::array<double, 3> v{a, b, c};
    std::sort(v.begin(), v.end());
    return (v[0] + v[1]) + v[2];
}

double prod3(double a, double b, double c) {
    std::array<double, 3> v{a, b, c};
    std::sort(v.begin(), v.end());
    return (v[0] * v[1]) * v[2];
}

}  // namespace

CyclicF cyclic_F(double x0, double y0, double z0) {
    // both rational forms are translation invariant; centering limits cancellation
    const double m = sum3(x0, y0, z0) / 3.0;
    const double x = x0 - m, y = y0 - m, z = z0 - m;
    CyclicF f;
    f.F1 = sum3(x0, y0, z0);
    const double den = sum3(x * x, y * y, z * z) - sum3(x * y, y * z, z * x);
    if (!(den > 0.0)) return f;
    const double num2 = 2.0 * sum3(x * x * x, y * y * y, z * z * z) + 12.0 * prod3(x, y, z) -
                        3.0 * (sum3(x * x * y, y * y * z, z * z * x) + sum3(y * y * x, z * z * y, x * x * z));
    f.F2 = num2 / den;
    f.F3 = -3.0 * std::sqrt(3.0) * prod3(x - y, y - z, z - x) / den;
    return f;
}

PairG pair_G(double x1, double y1, double z1, double x2, double y2, double z2) {
    const double m1 = sum3(x1, y1, z1) / 3.0, m2 = sum3(x2, y2, z2) / 3.0;
    const double a1 = x1 - m1, b1 = y1 - m1, c1 = z1 - m1;
    const double a2 = x2 - m2, b2 = y2 - m2, c2 = z2 - m2;
    PairG g;
    // centered sums vanish, so the (sum)(sum) term drops
    g.G1 = 1.5 * sum3(a1 * a2, b1 * b2, c1 * c2);
    const double det = sum3(b1 * c2 - c1 * b2, c1 * a2 - a1 * c2, a1 * b2 - b1 * a2);
    g.G2 = -0.5 * std::sqrt(3.0) * det;
    const double d1 = sum3((a1 - b1) * (a1 - b1), (b1 - c1) * (b1 - c1), (c1 - a1) * (c1 - a1));
    const double d2 = sum3((a2 - b2) * (a2 - b2), (b2 - c2) * (b2 - c2), (c2 - a2) * (c2 - a2));
    if (d1 > 0.0 && d2 > 0.0) {
        const double s = std::sqrt(std::sqrt(d1 * d2));
        g.G1n = g.G1 / s;
        g.G2n = g.G2 / s;
    }
    return g;
}

const char* convention_name(Convention c) {
    switch (c) {
    case Convention::ordered: return "ordered";
    case Convention::sorted: return "sorted";
    case Convention::p2: return "p2";
    case Convention::p2_nine: return "p2_nine";
    }
    return "?";
}

const char* kind_name(DescriptorKind k) {
    return k == DescriptorKind::coplanar7 ? "coplanar7" : "noncoplanar3";
}

int descriptor_dim(DescriptorKind k, Convention c) {
    if (k == DescriptorKind::noncoplanar3) return 3;
    return c == Convention::p2_nine ? 9 : 7;
}

CoplanarInvariants7 rotate_labels(const CoplanarInvariants7& v, int r) {
    CoplanarInvariants7 o = v;
    for (int s = 0; s < ((r % 3) + 3) % 3; ++s) {
        const CoplanarInvariants7 p = o;
        o.I_ij = p.I_jk;
        o.I_jk = p.I_ki;
        o.I_ki = p.I_ij;
        o.I_ji = p.I_kj;
        o.I_kj = p.I_ik;
        o.I_ik = p.I_ji;
    }
    return o;
}

NoncoplanarInvariants3 rotate_labels(const NoncoplanarInvariants3& v, int r) {
    const std::array<double, 3> j = v.as_array();
    const int s = ((r % 3) + 3) % 3;
    return {j[s], j[(s + 1) % 3], j[(s + 2) % 3]};
}

namespace {

template <size_t N>
int argmin_first(const std::array<double, N>& x) {
    return static_cast<int>(std::min_element(x.begin(), x.end()) - x.begin());
}

}  // namespace

TriadDescriptor make_descriptor(const CoplanarInvariants7& inv, Convention c) {
    TriadDescriptor d;
    d.convention = c;
    switch (c) {
    case Convention::ordered: {
        const auto a = inv.as_array();
        d.values.assign(a.begin(), a.end());
        break;
    }
    case Convention::sorted: {
        d.rotation = argmin_first(std::array<double, 3>{inv.I_ij, inv.I_jk, inv.I_ki});
        const auto a = rotate_labels(inv, d.rotation).as_array();
        d.values.assign(a.begin(), a.end());
        break;
    }
    case Convention::p2:
    case Convention::p2_nine: {
        const CyclicF f1 = cyclic_F(inv.I_ij, inv.I_jk, inv.I_ki);
        const CyclicF f2 = cyclic_F(inv.I_ji, inv.I_kj, inv.I_ik);
        const PairG g = pair_G(inv.I_ij, inv.I_jk, inv.I_ki, inv.I_ji, inv.I_kj, inv.I_ik);
        if (c == Convention::p2)
            d.values = {f1.F1, f1.F2, f1.F3, f2.F1, g.G1n, g.G2n, inv.I_ijk};
        else
            d.values = {f1.F1, f1.F2, f1.F3, f2.F1, f2.F2, f2.F3, g.G1n, g.G2n, inv.I_ijk};
        break;
    }
    }
    return d;
}

TriadDescriptor make_descriptor(const NoncoplanarInvariants3& inv, Convention c) {
    TriadDescriptor d;
    d.convention = c;
    switch (c) {
    case Convention::ordered:
        d.values = {inv.J_i, inv.J_j, inv.J_k};
        break;
    case Convention::sorted: {
        d.rotation = argmin_first(inv.as_array());
        const auto a = rotate_labels(inv, d.rotation).as_array();
        d.values.assign(a.begin(), a.end());
        break;
    }
    case Convention::p2:
    case Convention::p2_nine: {
        const CyclicF f = cyclic_F(inv.J_i, inv.J_j, inv.J_k);
        d.values = {f.F1, f.F2, f.F3};
        break;
    }
    }
    return d;
}

}  // namespace craterid
