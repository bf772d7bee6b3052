#include "craterid/index.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>

#include "craterid/healpix.hpp"

namespace craterid {

IndexScale local_scale() {
    return IndexScale{};
}

IndexScale regional_scale() {
    IndexScale s;
    s.name = "regional";
    s.k = 3;
    s.d_min = 25.0;
    s.d_max = 125.0;
    s.max_ellipticity = 1.1;
    s.kind = DescriptorKind::noncoplanar3;
    return s;
}

IndexScale global_scale() {
    IndexScale s = regional_scale();
    s.name = "global";
    s.k = 1;
    s.d_min = 100.0;
    s.d_max = std::numeric_limits<double>::infinity();
    return s;
}

IndexScale scale_by_name(const std::string& name) {
    if (name == "local") return local_scale();
    if (name == "regional") return regional_scale();
    if (name == "global") return global_scale();
    throw Error(ErrorCode::invalid_argument, "unknown scale '" + name + "'");
}

void validate_scale(const IndexScale& s) {
    if (!(s.d_min < s.d_max)) throw Error(ErrorCode::invalid_argument, "need d_min < d_max");
    if (!(s.max_ellipticity >= 1.0)) throw Error(ErrorCode::invalid_argument, "need max_ellipticity >= 1");
    if (s.k < 0 || s.k > 12) throw Error(ErrorCode::invalid_argument, "HEALPix order out of range");
    if (!(s.moon_radius > 0.0) || !(s.canonical_altitude > 0.0) || !(s.separation_margin >= 0.0))
        throw Error(ErrorCode::invalid_argument, "bad scale geometry parameters");
}

std::vector<CraterRecord> filter_catalog(const std::vector<CraterRecord>& records, const IndexScale& s) {
    std::vector<CraterRecord> out;
    for (const auto& r : records) {
        const double d = 2.0 * r.a;
        if (d < s.d_min || d > s.d_max) continue;
        if (!(r.b > 0.0) || r.a / r.b > s.max_ellipticity) continue;
        if (!(r.arc_fraction > s.min_arc_fraction)) continue;
        try {
            validate_record(r);
        } catch (const Error&) {
            continue;
        }
        out.push_back(r);
    }
    return out;
}

namespace {

void tangent_basis(const Vec3& m, Vec3& e, Vec3& n) {
    Vec3 k = Vec3(0, 0, 1).cross(m);
    if (k.norm() < 1e-9) k = Vec3(0, 1, 0).cross(m);
    e = k.normalized();
    n = m.cross(e).normalized();
}

std::array<int, 3> order_by_angle(const std::array<double, 3>& ang) {
    std::array<int, 3> o{0, 1, 2};
    std::sort(o.begin(), o.end(), [&](int a, int b) { return ang[a] < ang[b] || (ang[a] == ang[b] && a < b); });
    return o;
}

}  // namespace

std::array<int, 3> clockwise_on_sphere(const std::array<Vec3, 3>& dirs) {
    const Vec3 m = (dirs[0] + dirs[1] + dirs[2]).normalized();
    Vec3 e, n;
    tangent_basis(m, e, n);
    std::array<double, 3> ang;
    for (int i = 0; i < 3; ++i) {
        const Vec3 d = dirs[i] - m;
        ang[i] = std::atan2(-d.dot(n), d.dot(e));
    }
    return order_by_angle(ang);
}

std::array<int, 3> clockwise_in_image(const std::array<Vec2, 3>& c) {
    const Vec2 m = (c[0] + c[1] + c[2]) / 3.0;
    std::array<double, 3> ang;
    for (int i = 0; i < 3; ++i) ang[i] = std::atan2(c[i].y() - m.y(), c[i].x() - m.x());
    return order_by_angle(ang);
}

bool separated(const CraterRecord& a, const Vec3& ua, const CraterRecord& b, const Vec3& ub, const IndexScale& s) {
    const double ang = std::atan2(ua.cross(ub).norm(), ua.dot(ub));
    return ang > (a.a + b.a) * (1.0 + s.separation_margin) / s.moon_radius;
}

std::vector<TriadEntry> enumerate_triads(const std::vector<CraterRecord>& records, const IndexScale& s, Exec exec) {
    validate_scale(s);
    const HealpixGrid grid(s.k);
    const size_t n = records.size();
    std::vector<Vec3> dir(n);
    std::vector<std::vector<uint32_t>> bucket(grid.npix());
    for (size_t i = 0; i < n; ++i) {
        dir[i] = unit_direction(records[i].lat, records[i].lon);
        bucket[grid.ang2pix(dir[i])].push_back(uint32_t(i));
    }
    const int64_t npix = grid.npix();
    std::vector<std::vector<TriadEntry>> per_pixel(npix);

    auto work = [&](int64_t p) {
        std::vector<uint32_t> cand = bucket[p];
        for (int64_t q : grid.neighbors(p)) cand.insert(cand.end(), bucket[q].begin(), bucket[q].end());
        if (cand.size() < 3) return;
        std::sort(cand.begin(), cand.end());
        cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
        const size_t L = cand.size();
        std::vector<char> sep(L * L, 0);
        for (size_t x = 0; x < L; ++x)
            for (size_t y = x + 1; y < L; ++y)
                sep[x * L + y] = separated(records[cand[x]], dir[cand[x]], records[cand[y]], dir[cand[y]], s);
        auto& out = per_pixel[p];
        for (size_t x = 0; x < L; ++x)
            for (size_t y = x + 1; y < L; ++y) {
                if (!sep[x * L + y]) continue;
                for (size_t z = y + 1; z < L; ++z) {
                    if (!sep[x * L + z] || !sep[y * L + z]) continue;
                    const uint32_t ids[3] = {cand[x], cand[y], cand[z]};
                    const Vec3 m = dir[ids[0]] + dir[ids[1]] + dir[ids[2]];
                    if (grid.ang2pix(m) != p) continue;
                    const auto o = clockwise_on_sphere({dir[ids[0]], dir[ids[1]], dir[ids[2]]});
                    out.push_back({{ids[o[0]], ids[o[1]], ids[o[2]]}, p});
                }
            }
    };

    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 16)
        for (int64_t p = 0; p < npix; ++p) work(p);
    } else {
        for (int64_t p = 0; p < npix; ++p) work(p);
    }

    size_t total = 0;
    for (const auto& v : per_pixel) total += v.size();
    std::vector<TriadEntry> all;
    all.reserve(total);
    for (const auto& v : per_pixel) all.insert(all.end(), v.begin(), v.end());
    return all;
}

CoplanarInvariants7 catalog_coplanar_invariants(const std::array<const CraterRecord*, 3>& c, double R) {
    std::array<Vec3, 3> u;
    for (int i = 0; i < 3; ++i) u[i] = unit_direction(c[i]->lat, c[i]->lon);
    const Vec3 m = (u[0] + u[1] + u[2]).normalized();
    Vec3 e, n;
    tangent_basis(m, e, n);
    const Vec3 o = R * m;
    // orthographic map onto the tangent plane, image-like axes (east, south)
    Mat34 P;
    P.row(0) << e.transpose(), -e.dot(o);
    P.row(1) << -n.transpose(), n.dot(o);
    P.row(2) << 0, 0, 0, 1;
    Mat3 A[3];
    for (int i = 0; i < 3; ++i) {
        const double rho = default_plane_distance(*c[i], R);
        A[i] = project_disk_quadric(P, disk_quadric(*c[i], rho));
    }
    return coplanar_triad(A[0], A[1], A[2]);
}

NoncoplanarInvariants3 catalog_noncoplanar_invariants(const std::array<const CraterRecord*, 3>& c, double R,
                                                      double altitude, const Vec3* view_dir) {
    std::array<Vec3, 3> u;
    for (int i = 0; i < 3; ++i) u[i] = unit_direction(c[i]->lat, c[i]->lon);
    const Vec3 m = view_dir ? view_dir->normalized() : (u[0] + u[1] + u[2]).normalized();
    CameraPose pose;
    pose.r_M = (R + altitude) * m;
    pose.T_MC = nadir_attitude(pose.r_M);
    Intrinsics k;
    k.dx = k.dy = 1000.0;
    const Mat34 P = projection_matrix(k, pose);
    Mat3 A[3];
    for (int i = 0; i < 3; ++i) {
        const double rho = default_plane_distance(*c[i], R);
        const CraterFrame f = crater_frame(*c[i], rho);
        if (!crater_faces_camera(f, pose.r_M))
            throw Error(ErrorCode::degenerate_view, "canonical camera sees the back of a crater");
        A[i] = project_disk_quadric(P, disk_quadric_from_conic(f, crater_plane_conic(*c[i])));
    }
    return noncoplanar_triad(A[0], A[1], A[2]);
}

DescriptorIndex build_index(const std::vector<CraterRecord>& filtered, const IndexScale& s, Exec exec) {
    validate_scale(s);
    DescriptorIndex idx;
    idx.scale = s;
    idx.craters = filtered;
    idx.dim = descriptor_dim(s.kind, s.convention);
    const int dim = idx.dim;
    std::vector<TriadEntry> cand = enumerate_triads(idx.craters, s, exec);
    const int64_t nc = int64_t(cand.size());
    std::vector<double> vals(size_t(nc) * dim);
    std::vector<int8_t> status(nc, 0);  // 0 ok, 1 overlap, 2 acosh, 3 other

    auto work = [&](int64_t t) {
        TriadEntry& te = cand[t];
        const std::array<const CraterRecord*, 3> c{&idx.craters[te.ids[0]], &idx.craters[te.ids[1]],
                                                   &idx.craters[te.ids[2]]};
        try {
            TriadDescriptor d;
            if (s.kind == DescriptorKind::coplanar7)
                d = make_descriptor(catalog_coplanar_invariants(c, s.moon_radius), s.convention);
            else
                d = make_descriptor(catalog_noncoplanar_invariants(c, s.moon_radius, s.canonical_altitude),
                                    s.convention);
            for (int q = 0; q < dim; ++q)
                if (!std::isfinite(d.values[q])) throw Error(ErrorCode::numeric_anomaly, "non-finite descriptor");
            if (d.rotation) {
                const auto ids = te.ids;
                for (int q = 0; q < 3; ++q) te.ids[q] = ids[(q + d.rotation) % 3];
            }
            std::copy(d.values.begin(), d.values.end(), vals.begin() + t * dim);
        } catch (const Error& e) {
            status[t] = e.code() == ErrorCode::overlap_detected ? 1 : e.code() == ErrorCode::acosh_domain ? 2 : 3;
        }
    };
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 256)
        for (int64_t t = 0; t < nc; ++t) work(t);
    } else {
        for (int64_t t = 0; t < nc; ++t) work(t);
    }

    idx.diag.candidates = uint64_t(nc);
    for (int64_t t = 0; t < nc; ++t) {
        if (status[t] == 0) {
            idx.entries.push_back(cand[t]);
            idx.descriptors.insert(idx.descriptors.end(), vals.begin() + t * dim, vals.begin() + (t + 1) * dim);
        } else if (status[t] == 1) {
            ++idx.diag.skipped_overlap;
        } else if (status[t] == 2) {
            ++idx.diag.skipped_acosh;
        } else {
            ++idx.diag.skipped_other;
        }
    }

    idx.whiten_scale.assign(dim, 1.0);
    const size_t n = idx.entries.size();
    if (s.whiten && n > 1) {
        for (int q = 0; q < dim; ++q) {
            double mean = 0.0;
            for (size_t i = 0; i < n; ++i) mean += idx.descriptors[i * dim + q];
            mean /= double(n);
            double var = 0.0;
            for (size_t i = 0; i < n; ++i) {
                const double d = idx.descriptors[i * dim + q] - mean;
                var += d * d;
            }
            const double sd = std::sqrt(var / double(n));
            idx.whiten_scale[q] = sd > 0.0 ? sd : 1.0;
        }
    }
    std::vector<double> pts(idx.descriptors.size());
    for (size_t i = 0; i < n; ++i)
        for (int q = 0; q < dim; ++q) pts[i * dim + q] = idx.descriptors[i * dim + q] / idx.whiten_scale[q];
    idx.tree.build(pts, dim);
    return idx;
}

namespace {

std::vector<double> scaled_query(const DescriptorIndex& idx, const std::vector<double>& desc) {
    if (int(desc.size()) != idx.dim)
        throw Error(ErrorCode::dimension_mismatch, "descriptor has " + std::to_string(desc.size()) +
                                                       " values, index expects " + std::to_string(idx.dim));
    std::vector<double> q(desc.size());
    for (size_t i = 0; i < desc.size(); ++i) q[i] = desc[i] / idx.whiten_scale[i];
    return q;
}

std::vector<QueryHit> to_hits(const std::vector<Hit>& h) {
    std::vector<QueryHit> out;
    out.reserve(h.size());
    for (const auto& x : h) out.push_back({x.index, x.distance});
    return out;
}

}  // namespace

std::vector<QueryHit> query(const DescriptorIndex& idx, const std::vector<double>& desc, size_t n) {
    const auto q = scaled_query(idx, desc);
    return to_hits(idx.tree.knn(q.data(), n));
}

std::vector<QueryHit> query_brute_force(const DescriptorIndex& idx, const std::vector<double>& desc, size_t n) {
    const auto q = scaled_query(idx, desc);
    return to_hits(brute_force_knn(idx.tree.points(), idx.dim, q.data(), n));
}

}  // namespace craterid
