#include "helpers.hpp"

#include "craterid/conic2d.hpp"

using namespace craterid;
using th::rel;
using th::rel_proj;

namespace {

// coefficients A..G from the matrix
struct Coef {
    double A, B, C, D, F, G;
};
Coef coef(const Mat3& m) {
    return {m(0, 0), 2 * m(0, 1), m(1, 1), 2 * m(0, 2), 2 * m(1, 2), m(2, 2)};
}

double on_conic(const Mat3& m, double x, double y) {
    const Vec3 p(x, y, 1.0);
    return p.dot(m * p);
}

std::pair<EllipseParams, EllipseParams> disjoint_pair(Rng& r) {
    EllipseParams a = th::rand_ellipse(r, 0.5, 3.0, 0.0);
    EllipseParams b = th::rand_ellipse(r, 0.5, 3.0, 0.0);
    const double ang = r.uniform(0, 2 * M_PI);
    const double d = (a.a + b.a) * r.uniform(1.05, 3.0);
    a.xc = r.uniform(-5, 5);
    a.yc = r.uniform(-5, 5);
    b.xc = a.xc + d * std::cos(ang);
    b.yc = a.yc + d * std::sin(ang);
    return {a, b};
}

}  // namespace

TEST_CASE("ellipse_to_conic coefficients") {
    auto c = coef(ellipse_to_conic({1, 1, 0, 0, 0}));
    CHECK(c.A == doctest::Approx(1));
    CHECK(c.C == doctest::Approx(1));
    CHECK(c.G == doctest::Approx(-1));
    CHECK(c.B == 0);
    c = coef(ellipse_to_conic({2, 1, 0, 0, 0}));
    CHECK(c.A == doctest::Approx(1));
    CHECK(c.C == doctest::Approx(4));
    CHECK(c.G == doctest::Approx(-4));
    c = coef(ellipse_to_conic({2, 1, 0, 0, M_PI / 2}));
    CHECK(c.A == doctest::Approx(4));
    CHECK(c.C == doctest::Approx(1));
    CHECK(c.G == doctest::Approx(-4));
    CHECK(std::abs(c.B) < 1e-12);
    // boundary points of the a=2, b=1 ellipse
    const Mat3 m = ellipse_to_conic({2, 1, 0, 0, 0});
    for (auto [x, y] : {std::pair{2.0, 0.0}, {-2.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}})
        CHECK(std::abs(on_conic(m, x, y)) < 1e-12);
}

TEST_CASE("ellipse_to_conic rejects bad axes") {
    CHECK_THROWS_AS(ellipse_to_conic({1, 2, 0, 0, 0}), Error);
    CHECK_THROWS_AS(ellipse_to_conic({1, 0, 0, 0, 0}), Error);
    try {
        ellipse_to_conic({1, -1, 0, 0, 0});
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::invalid_axes);
    }
}

TEST_CASE("rim points satisfy the implicit form and the discriminant identity") {
    Rng r(11);
    for (int i = 0; i < 10000; ++i) {
        const EllipseParams e = th::rand_ellipse(r);
        const Mat3 m = ellipse_to_conic(e);
        const Coef c = coef(m);
        const double disc = c.B * c.B - 4 * c.A * c.C + 4 * e.a * e.a * e.b * e.b;
        REQUIRE(std::abs(disc) <= 1e-12 * 4 * e.a * e.a * e.b * e.b * 4);
        const double t = r.uniform(0, 2 * M_PI);
        const double x = e.xc + e.a * std::cos(t) * std::cos(e.psi) - e.b * std::sin(t) * std::sin(e.psi);
        const double y = e.yc + e.a * std::cos(t) * std::sin(e.psi) + e.b * std::sin(t) * std::cos(e.psi);
        REQUIRE(std::abs(on_conic(m, x, y)) <= 1e-10 * m.norm() * (1 + x * x + y * y));
    }
}

TEST_CASE("conic_to_ellipse round trip") {
    EllipseParams e = conic_to_ellipse(Vec3(1, 1, -1).asDiagonal().toDenseMatrix());
    CHECK(e.a == doctest::Approx(1));
    CHECK(e.b == doctest::Approx(1));
    CHECK(e.psi == 0.0);
    const EllipseParams ref{3, 2, 5, -1, 0.7};
    for (double s : {1.0, 7.0, -3.0}) {
        e = conic_to_ellipse(s * ellipse_to_conic(ref));
        CHECK(std::abs(e.a - 3) < 1e-12 * 3);
        CHECK(std::abs(e.b - 2) < 1e-12 * 3);
        CHECK(std::abs(e.xc - 5) < 1e-12 * 5);
        CHECK(std::abs(e.yc + 1) < 1e-12 * 5);
        CHECK(std::abs(e.psi - 0.7) < 1e-12);
    }
    Rng r(3);
    for (int i = 0; i < 10000; ++i) {
        const EllipseParams p = th::rand_ellipse(r);
        if (p.a / p.b < 1.001) continue;  // psi is ill-defined near circles
        const EllipseParams q = conic_to_ellipse(ellipse_to_conic(p));
        const double L = std::max({1.0, std::abs(p.xc), std::abs(p.yc)});
        REQUIRE(std::abs(q.a - p.a) <= 1e-10 * L);
        REQUIRE(std::abs(q.b - p.b) <= 1e-10 * L);
        REQUIRE(std::abs(q.xc - p.xc) <= 1e-10 * L);
        REQUIRE(std::abs(q.yc - p.yc) <= 1e-10 * L);
        const double dpsi = std::remainder(q.psi - p.psi, M_PI);
        REQUIRE(std::abs(dpsi) <= 1e-8);
        REQUIRE(q.psi >= 0.0);
        REQUIRE(q.psi < M_PI);
    }
}

TEST_CASE("conic_to_ellipse rejects non-ellipses") {
    Mat3 hyp = Vec3(1, -1, -1).asDiagonal();
    CHECK_THROWS_AS(conic_to_ellipse(hyp), Error);
    Mat3 empty = Vec3(1, 1, 1).asDiagonal();
    CHECK_THROWS_AS(conic_to_ellipse(empty), Error);
    Mat3 par = Mat3::Zero();
    par(0, 0) = 1;
    par(1, 2) = par(2, 1) = -0.5;
    CHECK_THROWS_AS(conic_to_ellipse(par), Error);
    try {
        conic_to_ellipse(Mat3::Zero());
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::not_an_ellipse);
    }
}

TEST_CASE("adjugate") {
    CHECK(rel(adjugate(Mat3::Identity()), Mat3::Identity()) == 0.0);
    CHECK(rel(adjugate(Vec3(1, 2, 3).asDiagonal()), Vec3(6, 3, 2).asDiagonal().toDenseMatrix()) == 0.0);
    Rng r(5);
    for (int i = 0; i < 1000; ++i) {
        Mat3 m;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b <= a; ++b) m(a, b) = m(b, a) = r.normal();
        if (std::abs(m.determinant()) < 1e-3) continue;
        REQUIRE(rel(adjugate(m), m.determinant() * m.inverse()) < 1e-10);
        REQUIRE(rel(m * adjugate(m), m.determinant() * Mat3::Identity()) < 1e-10);
        REQUIRE(rel(adjugate(adjugate(m)), m.determinant() * m) < 1e-10);
    }
    // rank 2 input still has a meaningful adjugate
    Mat3 s = Vec3(1, 2, 0).asDiagonal();
    CHECK(rel(adjugate(s), Vec3(0, 0, 2).asDiagonal().toDenseMatrix()) == 0.0);
}

TEST_CASE("normalize_unit_det") {
    Mat3 m = normalize_unit_det(Vec3(1, 1, -1).asDiagonal().toDenseMatrix());
    CHECK(rel(m, Vec3(-1, -1, 1).asDiagonal().toDenseMatrix()) < 1e-15);
    m = normalize_unit_det(Vec3(2, 2, -2).asDiagonal().toDenseMatrix());
    CHECK(rel(m, Vec3(-1, -1, 1).asDiagonal().toDenseMatrix()) < 1e-15);
    Rng r(9);
    for (int i = 0; i < 1000; ++i) {
        const double s = std::exp(r.uniform(-20, 20)) * (r.uniform() < 0.5 ? -1 : 1);
        const Mat3 c = s * ellipse_to_conic(th::rand_ellipse(r, 1, 1000, 2000));
        const Mat3 n = normalize_unit_det(c);
        REQUIRE(std::abs(n.determinant() - 1.0) < 1e-9);
        REQUIRE(rel_proj(n, c) < 1e-13);
    }
    CHECK_THROWS_AS(normalize_unit_det(Vec3(1, 1, 0).asDiagonal().toDenseMatrix()), Error);
}

TEST_CASE("degenerate pencil eigenvalues") {
    const Mat3 u = ellipse_to_conic({1, 1, 0, 0, 0});
    for (auto z : degenerate_pencil_eigenvalues(u, u)) {
        CHECK(std::abs(z.real() + 1.0) < 1e-6);
        CHECK(std::abs(z.imag()) < 1e-6);
    }
    const Mat3 v = ellipse_to_conic({1, 1, 3, 0, 0});
    for (auto z : degenerate_pencil_eigenvalues(u, v)) {
        REQUIRE(std::abs(z.imag()) < 1e-12);
        CHECK(std::abs((z.real() * u + v).determinant()) < 1e-10 * u.norm() * v.norm() * v.norm());
    }
    CHECK_THROWS_AS(degenerate_pencil_eigenvalues(Vec3(1, 1, 0).asDiagonal(), u), Error);

    Rng r(21);
    for (int i = 0; i < 10000; ++i) {
        const auto [pa, pb] = disjoint_pair(r);
        const Mat3 a = normalize_unit_det(ellipse_to_conic(pa)), b = normalize_unit_det(ellipse_to_conic(pb));
        int admissible = 0;
        for (auto z : degenerate_pencil_eigenvalues(a, b)) {
            if (std::abs(z.imag()) > 1e-10 * std::max(1.0, std::abs(z))) continue;
            const Mat3 m = z.real() * a + b;
            REQUIRE(std::abs(m.determinant()) <= 1e-10 * std::pow(std::abs(z) * a.norm() + b.norm(), 3));
            const Mat3 s = adjugate(m);
            const double tol = 1e-12 * s.diagonal().cwiseAbs().maxCoeff();
            if ((s.diagonal().array() <= tol).all() && s.diagonal().minCoeff() < 0) ++admissible;
        }
        REQUIRE(admissible == 1);
    }
}

TEST_CASE("split_degenerate_conic round trips") {
    auto check = [](const Vec3& g, const Vec3& h) {
        const Mat3 b = g * h.transpose() + h * g.transpose();
        const LinePair lp = split_degenerate_conic(b);
        const Mat3 rec = lp.g * lp.h.transpose() + lp.h * lp.g.transpose();
        CHECK(rel_proj(rec, b) < 1e-8);
        // recovered lines equal the input pair up to scale and swap
        auto same = [](const Vec3& x, const Vec3& y) { return x.normalized().cross(y.normalized()).norm() < 1e-10; };
        CHECK(((same(lp.g, g) && same(lp.h, h)) || (same(lp.g, h) && same(lp.h, g))));
    };
    check(Vec3(1, 0, 0), Vec3(0, 1, 0));
    check(Vec3(1, 1, -2), Vec3(2, -1, 0));
    Rng r(4);
    for (int i = 0; i < 1000; ++i) check(Vec3(r.normal(), r.normal(), r.normal()), Vec3(r.normal(), r.normal(), r.normal()));
    // complex pair: x^2 + y^2 has no real factors
    CHECK_THROWS_AS(split_degenerate_conic(Vec3(1, 1, 0).asDiagonal()), Error);
}

TEST_CASE("line pair through the four intersections") {
    const Mat3 a = Vec3(1, 2, -1).asDiagonal(), b = Vec3(2, 1, -1).asDiagonal();
    const Mat3 m = select_line_pair_conic(a, b);
    const LinePair lp = split_degenerate_conic(m);
    const double s = 1.0 / std::sqrt(3.0);
    for (double x : {-s, s})
        for (double y : {-s, s}) {
            const Vec3 p(x, y, 1);
            // oracle: the point is on both ellipses
            REQUIRE(std::abs(p.dot(a * p)) < 1e-14);
            REQUIRE(std::abs(p.dot(b * p)) < 1e-14);
            const double dg = std::abs(lp.g.dot(p)) / lp.g.head<2>().norm();
            const double dh = std::abs(lp.h.dot(p)) / lp.h.head<2>().norm();
            CHECK(std::min(dg, dh) < 1e-10);
        }
}

TEST_CASE("separating line") {
    const Mat3 a = ellipse_to_conic({1, 1, 0, 0, 0}), b = ellipse_to_conic({1, 1, 4, 0, 0});
    const LinePair lp = split_degenerate_conic(select_line_pair_conic(a, b));
    const Vec3 l = line_between_conics(lp.g, lp.h, a, b);
    CHECK(l.normalized().cross(Vec3(1, 0, -2).normalized()).norm() < 1e-10);
    const Vec3 other = (l == lp.g) ? lp.h : lp.g;
    const double s0 = other.dot(Vec3(0, 0, 1)), s1 = other.dot(Vec3(4, 0, 1));
    CHECK((s0 > 0) == (s1 > 0));
    CHECK_THROWS_AS(line_between_conics(Vec3(0, 1, 0), Vec3(0, 1, 5), a, b), Error);

    Rng r(8);
    for (int i = 0; i < 10000; ++i) {
        const auto [pa, pb] = disjoint_pair(r);
        const Mat3 ai = normalize_unit_det(ellipse_to_conic(pa)), aj = normalize_unit_det(ellipse_to_conic(pb));
        const LinePair q = split_degenerate_conic(select_line_pair_conic(ai, aj));
        const Vec3 ci(pa.xc, pa.yc, 1), cj(pb.xc, pb.yc, 1);
        const int n = int(((q.g.dot(ci) > 0) != (q.g.dot(cj) > 0))) + int(((q.h.dot(ci) > 0) != (q.h.dot(cj) > 0)));
        REQUIRE(n == 1);
        const Vec3 sl = separating_line(ai, aj);
        // the separating line misses both ellipses: l^T A* l has the sign of a line outside
        for (const Mat3* m : {&ai, &aj}) {
            const Mat3 env = adjugate(normalize_unit_det(*m));
            REQUIRE(sl.dot(env * sl) * env(2, 2) > 0.0);
        }
    }
}
