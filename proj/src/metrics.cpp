#include "craterid/metrics.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace craterid {

GaussianForm conic_to_gaussian(const Mat3& c) {
    const Mat2 U = 0.5 * (c.topLeftCorner<2, 2>() + c.topLeftCorner<2, 2>().transpose());
    const Vec2 w = c.topRightCorner<2, 1>();
    if (!(U.determinant() > 0.0)) throw Error(ErrorCode::not_an_ellipse, "conic is not an ellipse");
    GaussianForm g;
    g.y = -U.ldlt().solve(w);
    const double k = g.y.dot(U * g.y) - c(2, 2);
    g.Y = U / k;
    if (!(g.Y(0, 0) > 0.0) || !(g.Y.determinant() > 0.0) || !std::isfinite(k))
        throw Error(ErrorCode::not_an_ellipse, "empty or imaginary ellipse");
    return g;
}

namespace {

Mat2 inv2(const Mat2& m) {
    const double d = m.determinant();
    Mat2 r;
    r << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
    return r / d;
}

// fixed argument order so d(A,B) and d(B,A) run the same arithmetic
bool before(const GaussianForm& p, const GaussianForm& q) {
    const double a[5] = {p.y.x(), p.y.y(), p.Y(0, 0), p.Y(0, 1), p.Y(1, 1)};
    const double b[5] = {q.y.x(), q.y.y(), q.Y(0, 0), q.Y(0, 1), q.Y(1, 1)};
    return std::lexicographical_compare(a, a + 5, b, b + 5);
}

void canonical_pair(GaussianForm& p, GaussianForm& q) {
    if (before(q, p)) std::swap(p, q);
}

}  // namespace

double gaussian_angle(const Mat3& ci, const Mat3& cj) {
    GaussianForm gi = conic_to_gaussian(ci), gj = conic_to_gaussian(cj);
    canonical_pair(gi, gj);
    if (gi.y == gj.y && gi.Y == gj.Y) return 0.0;
    const Mat2 Si = inv2(gi.Y), Sj = inv2(gj.Y);
    // 4 sqrt(|Yi||Yj|)/|Yi+Yj| = 4 sqrt(delta)/(1 + t + delta) with t, delta the
    // trace and determinant of N = L^-1 Yj L^-T (Yi = L L^T); 1 - that ratio is
    // (1 - sqrt(delta))^2 + (sqrt(mu1) - sqrt(mu2))^2 over the same denominator,
    // and both squares are formed from differences so small distances survive
    const Eigen::LLT<Mat2> llt(gi.Y);
    const Mat2 Li = llt.matrixL().solve(Mat2::Identity());
    Mat2 N = Li * gj.Y * Li.transpose();
    N(0, 1) = N(1, 0) = 0.5 * (N(0, 1) + N(1, 0));
    const double t = N.trace();
    const double delta = gj.Y.determinant() / gi.Y.determinant();
    const double sd = std::sqrt(delta);
    const double den = 1.0 + t + delta;
    const double split = (N(0, 0) - N(1, 1)) * (N(0, 0) - N(1, 1)) + 4.0 * N(0, 1) * N(0, 1);
    const double h = (1.0 - sd) * (1.0 - sd) + split / (t + 2.0 * sd);
    const Vec2 dy = gi.y - gj.y;
    const double q = 0.5 * dy.dot(inv2(Si + Sj) * dy);
    if (q < 0.0) {
        if (q < -1e-12) throw Error(ErrorCode::numeric_anomaly, "negative Mahalanobis term");
    }
    const double one_minus_f = -std::expm1(std::log1p(-h / den) - std::max(q, 0.0));
    if (one_minus_f < -1e-12) throw Error(ErrorCode::numeric_anomaly, "overlap coefficient exceeds 1");
    const double x = std::min(1.0, std::max(0.0, one_minus_f));
    return std::min(M_PI / 2, 2.0 * std::asin(std::sqrt(0.5 * x)));
}

namespace {

struct PairEllipse {
    Vec2 c;
    Mat2 Y;
    double hx, hy;  // bounding half extents
};

bool inside(const PairEllipse& e, double x, double y) {
    const double dx = x - e.c.x(), dy = y - e.c.y();
    return e.Y(0, 0) * dx * dx + 2.0 * e.Y(0, 1) * dx * dy + e.Y(1, 1) * dy * dy < 1.0;
}

// half-open column range of cell centers whose x lies within the ellipse row chord
void row_span(const PairEllipse& e, double y, double pitch, int64_t& lo, int64_t& hi) {
    const double dy = y - e.c.y();
    const double a = e.Y(0, 0), b = e.Y(0, 1) * dy, c = e.Y(1, 1) * dy * dy - 1.0;
    const double disc = b * b - a * c;
    if (disc <= 0.0) {
        lo = hi = 0;
        return;
    }
    const double r = std::sqrt(disc) / a;
    const double mid = e.c.x() - b / a;
    // one cell of slack; the per-point test decides
    lo = int64_t(std::floor((mid - r) / pitch - 0.5)) - 1;
    hi = int64_t(std::ceil((mid + r) / pitch - 0.5)) + 2;
}

}  // namespace

double jaccard_distance(const Mat3& ci, const Mat3& cj, double pitch, Exec exec) {
    if (!(pitch > 0.0)) throw Error(ErrorCode::invalid_argument, "pitch must be positive");
    GaussianForm gi = conic_to_gaussian(ci), gj = conic_to_gaussian(cj);
    canonical_pair(gi, gj);
    // |Y| = 1/(ab)^2, so this is (a_i b_i a_j b_j)^(1/4)
    const double L = std::pow(gi.Y.determinant() * gj.Y.determinant(), -0.125);
    const Vec2 o = 0.5 * (gi.y + gj.y);
    Vec2 ex = gj.y - gi.y;
    if (ex.norm() > 1e-9 * L) {
        ex.normalize();
    } else {
        Eigen::SelfAdjointEigenSolver<Mat2> es(inv2(gi.Y) + inv2(gj.Y));
        ex = es.eigenvectors().col(1);
    }
    Mat2 R;
    R << ex.x(), ex.y(), -ex.y(), ex.x();
    PairEllipse e[2];
    const GaussianForm* g[2] = {&gi, &gj};
    for (int k = 0; k < 2; ++k) {
        e[k].c = R * (g[k]->y - o) / L;
        e[k].Y = R * g[k]->Y * R.transpose() * (L * L);
        const Mat2 S = inv2(e[k].Y);
        e[k].hx = std::sqrt(S(0, 0));
        e[k].hy = std::sqrt(S(1, 1));
    }
    const double ymin = std::min(e[0].c.y() - e[0].hy, e[1].c.y() - e[1].hy);
    const double ymax = std::max(e[0].c.y() + e[0].hy, e[1].c.y() + e[1].hy);
    const int64_t j0 = int64_t(std::floor(ymin / pitch - 0.5)) - 1;
    const int64_t j1 = int64_t(std::ceil(ymax / pitch - 0.5)) + 2;

    auto count_row = [&](int64_t j, int64_t& both, int64_t& either) {
        const double y = (double(j) + 0.5) * pitch;
        int64_t lo0, hi0, lo1, hi1;
        row_span(e[0], y, pitch, lo0, hi0);
        row_span(e[1], y, pitch, lo1, hi1);
        if (lo0 >= hi0 && lo1 >= hi1) return;
        const int64_t lo = lo0 >= hi0 ? lo1 : lo1 >= hi1 ? lo0 : std::min(lo0, lo1);
        const int64_t hi = lo0 >= hi0 ? hi1 : lo1 >= hi1 ? hi0 : std::max(hi0, hi1);
        for (int64_t i = lo; i < hi; ++i) {
            const double x = (double(i) + 0.5) * pitch;
            const bool a = inside(e[0], x, y), b = inside(e[1], x, y);
            both += a && b;
            either += a || b;
        }
    };

    int64_t both = 0, either = 0;
    if (exec == Exec::parallel) {
#pragma omp parallel for reduction(+ : both, either) schedule(static)
        for (int64_t j = j0; j < j1; ++j) count_row(j, both, either);
    } else {
        for (int64_t j = j0; j < j1; ++j) count_row(j, both, either);
    }
    if (either == 0) throw Error(ErrorCode::numeric_anomaly, "grid too coarse for these ellipses");
    return 1.0 - double(both) / double(either);
}

GateResult chi2_gate(double d, double a, double b, const GateConfig& cfg) {
    if (!(cfg.sigma_img > 0.0) || !(a > 0.0) || !(b > 0.0))
        throw Error(ErrorCode::invalid_argument, "gate needs positive sigma and axes");
    GateResult r;
    r.sigma = cfg.factor * cfg.sigma_img / std::sqrt(a * b);
    r.statistic = d * d / (r.sigma * r.sigma);
    r.accept = r.statistic <= cfg.tau;
    return r;
}

}  // namespace craterid
