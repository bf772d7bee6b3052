#include "helpers.hpp"

#include <cstdio>
#include <fstream>
#include <set>

#include <unistd.h>

#include "craterid/healpix.hpp"
#include "craterid/index.hpp"

using namespace craterid;

namespace {

std::vector<CraterRecord> patch(Rng& r, int n, double spread_km, double rmin, double rmax) {
    auto v = th::cluster(r, n, spread_km, rmin, rmax, false);
    for (auto& c : v) c.arc_fraction = 0.95;
    return v;
}

using Key = std::array<uint32_t, 3>;

Key sorted_key(const std::array<uint32_t, 3>& ids) {
    Key k = ids;
    std::sort(k.begin(), k.end());
    return k;
}

// every separated triple whose members all sit in the 3x3 block around the
// pixel of their mean direction
std::set<Key> brute_force_triads(const std::vector<CraterRecord>& rec, const IndexScale& s) {
    const HealpixGrid g(s.k);
    std::vector<Vec3> u;
    std::vector<int64_t> pix;
    for (const auto& c : rec) {
        u.push_back(unit_direction(c.lat, c.lon));
        pix.push_back(g.ang2pix(u.back()));
    }
    std::set<Key> out;
    const uint32_t n = uint32_t(rec.size());
    for (uint32_t i = 0; i < n; ++i)
        for (uint32_t j = i + 1; j < n; ++j) {
            if (!separated(rec[i], u[i], rec[j], u[j], s)) continue;
            for (uint32_t k = j + 1; k < n; ++k) {
                if (!separated(rec[i], u[i], rec[k], u[k], s) || !separated(rec[j], u[j], rec[k], u[k], s)) continue;
                const int64_t home = g.ang2pix(u[i] + u[j] + u[k]);
                auto block = g.neighbors(home);
                block.push_back(home);
                auto in = [&](uint32_t x) { return std::find(block.begin(), block.end(), pix[x]) != block.end(); };
                if (in(i) && in(j) && in(k)) out.insert({i, j, k});
            }
        }
    return out;
}

std::string tmp_path(const char* name) {
    return std::string("/tmp/craterid_") + name + "_" + std::to_string(::getpid());
}

}  // namespace

TEST_CASE("scale presets and filtering") {
    const IndexScale l = local_scale(), r = regional_scale(), g = global_scale();
    CHECK(l.k == 5);
    CHECK(r.k == 3);
    CHECK(g.k == 1);
    CHECK(l.d_min == 4.0);
    CHECK(l.d_max == 30.0);
    CHECK(r.d_min == 25.0);
    CHECK(r.d_max == 125.0);
    CHECK(g.d_min == 100.0);
    CHECK(std::isinf(l.max_ellipticity));
    CHECK(r.max_ellipticity == 1.1);

    CraterRecord c = th::crater(0, 0, 2.5, 2.5, 0);
    c.arc_fraction = 0.95;
    CHECK(filter_catalog({c}, l).size() == 1);
    CHECK(filter_catalog({c}, r).empty());
    CraterRecord e = th::crater(0, 0, 30, 25, 0);
    e.arc_fraction = 0.95;
    CHECK(filter_catalog({e}, r).empty());
    CraterRecord arc = th::crater(0, 0, 5, 5, 0);
    arc.arc_fraction = 0.85;
    CHECK(filter_catalog({arc}, l).empty());

    IndexScale bad = l;
    bad.d_min = 40;
    CHECK_THROWS_AS(validate_scale(bad), Error);
    bad = l;
    bad.max_ellipticity = 0.5;
    CHECK_THROWS_AS(validate_scale(bad), Error);
    CHECK(scale_hash(l) != scale_hash(r));
    CHECK(scale_hash(l) == scale_hash(local_scale()));
}

TEST_CASE("separation gate") {
    const IndexScale s = local_scale();
    const CraterRecord a = th::crater(0, 0, 10, 10, 0);
    const double R = s.moon_radius;
    for (double gap : {15.0, 21.9, 22.1, 40.0}) {
        const CraterRecord b = th::crater(0, gap / R * 180 / M_PI, 10, 10, 0);
        CHECK(separated(a, unit_direction(a.lat, a.lon), b, unit_direction(b.lat, b.lon), s) == (gap > 22.0));
    }
}

TEST_CASE("clockwise ordering") {
    // seen from outside above (1,0,0): +y points right (east), +z up (north)
    const std::array<Vec3, 3> d{Vec3(1, 0, 0.01).normalized(), Vec3(1, 0.01, -0.01).normalized(),
                                Vec3(1, -0.01, -0.01).normalized()};
    const auto o = clockwise_on_sphere(d);
    std::array<int, 3> p = o;
    std::sort(p.begin(), p.end());
    CHECK(p == std::array<int, 3>{0, 1, 2});
    // nadir camera: the image ordering of the projected centers is the same cycle
    const Vec3 cam = 1.2 * Vec3(1, 0, 0);
    const Mat34 P = projection_matrix(th::pinhole(), CameraPose{nadir_attitude(cam), cam});
    std::array<Vec2, 3> img;
    for (int i = 0; i < 3; ++i) img[i] = project_point(P, d[i]);
    const auto oi = clockwise_in_image(img);
    int shift = -1;
    for (int r = 0; r < 3; ++r)
        if (oi[0] == o[r] && oi[1] == o[(r + 1) % 3] && oi[2] == o[(r + 2) % 3]) shift = r;
    CHECK(shift >= 0);
    CHECK(clockwise_in_image({Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)}) != std::array<int, 3>{0, 2, 1});
}

TEST_CASE("triads are emitted exactly once") {
    Rng r(5);
    IndexScale s = local_scale();
    for (int rep = 0; rep < 3; ++rep) {
        const auto rec = patch(r, 200, 250, 2, 12);
        const auto got = enumerate_triads(rec, s, Exec::serial);
        std::set<Key> seen;
        const HealpixGrid g(s.k);
        for (const auto& t : got) {
            REQUIRE(t.ids[0] != t.ids[1]);
            REQUIRE(t.ids[1] != t.ids[2]);
            REQUIRE(t.ids[0] != t.ids[2]);
            const Vec3 m = unit_direction(rec[t.ids[0]].lat, rec[t.ids[0]].lon) +
                           unit_direction(rec[t.ids[1]].lat, rec[t.ids[1]].lon) +
                           unit_direction(rec[t.ids[2]].lat, rec[t.ids[2]].lon);
            REQUIRE(g.ang2pix(m) == t.home);
            REQUIRE(seen.insert(sorted_key(t.ids)).second);
        }
        CHECK(seen == brute_force_triads(rec, s));
        CHECK(seen.size() > 100);

        const auto par = enumerate_triads(rec, s, Exec::parallel);
        REQUIRE(par.size() == got.size());
        for (size_t i = 0; i < got.size(); ++i) REQUIRE(par[i].ids == got[i].ids);
    }
}

TEST_CASE("single pixel triad") {
    IndexScale s = local_scale();
    const HealpixGrid g(s.k);
    std::vector<CraterRecord> rec{th::crater(20, 30, 3, 3, 0, "a"), th::crater(20.3, 30, 3, 3, 0, "b"),
                                  th::crater(20.15, 30.3, 3, 3, 0, "c")};
    for (auto& c : rec) c.arc_fraction = 1;
    REQUIRE(g.ang2pix(unit_direction(rec[0].lat, rec[0].lon)) == g.ang2pix(unit_direction(rec[1].lat, rec[1].lon)));
    const auto t = enumerate_triads(rec, s);
    REQUIRE(t.size() == 1);
    CHECK(t[0].home == g.ang2pix(unit_direction(rec[0].lat, rec[0].lon)));
    // push two craters into overlap: no triad
    rec[1] = th::crater(20.1, 30, 3, 3, 0, "b");
    CHECK(enumerate_triads(rec, s).empty());
}

TEST_CASE("build, query and persistence") {
    Rng r(6);
    const auto rec = patch(r, 150, 200, 2, 12);
    for (Convention c : {Convention::ordered, Convention::sorted, Convention::p2}) {
        IndexScale s = local_scale();
        s.convention = c;
        s.whiten = c == Convention::p2;
        const DescriptorIndex idx = build_index(rec, s, Exec::serial);
        REQUIRE(idx.size() > 50);
        REQUIRE(idx.dim == descriptor_dim(s.kind, c));
        for (size_t i = 0; i < idx.size(); ++i) {
            const std::vector<double> d(idx.descriptor(i), idx.descriptor(i) + idx.dim);
            const auto h = query(idx, d, 1);
            REQUIRE(h.size() == 1);
            REQUIRE(h[0].distance == 0.0);
            REQUIRE(idx.descriptor(h[0].entry)[0] == d[0]);
        }
        std::vector<double> q(idx.dim);
        for (int i = 0; i < 10000; ++i) {
            const size_t base = size_t(r.uniform() * idx.size());
            for (int k = 0; k < idx.dim; ++k) q[k] = idx.descriptor(base)[k] * (1 + r.normal(0, 0.05));
            const auto a = query(idx, q, 5), b = query_brute_force(idx, q, 5);
            REQUIRE(a.size() == b.size());
            for (size_t k = 0; k < a.size(); ++k) {
                REQUIRE(a[k].entry == b[k].entry);
                REQUIRE(a[k].distance == b[k].distance);
            }
        }
        CHECK(query(idx, q, idx.size() + 10).size() == idx.size());
        CHECK_THROWS_AS(query(idx, std::vector<double>(idx.dim + 1), 1), Error);

        const DescriptorIndex par = build_index(rec, s, Exec::parallel);
        CHECK(serialize_index(par) == serialize_index(idx));

        const std::string path = tmp_path("idx");
        save_index(idx, path);
        const DescriptorIndex back = load_index(path);
        CHECK(serialize_index(back) == serialize_index(idx));
        REQUIRE(back.descriptors == idx.descriptors);
        for (int i = 0; i < 200; ++i) {
            for (int k = 0; k < idx.dim; ++k) q[k] = r.normal(3, 2);
            const auto a = query(idx, q, 3), b = query(back, q, 3);
            for (size_t k = 0; k < a.size(); ++k) REQUIRE(a[k].entry == b[k].entry);
        }

        std::vector<uint8_t> bytes = serialize_index(idx);
        auto code_of = [](const std::vector<uint8_t>& b) {
            try {
                deserialize_index(b);
            } catch (const Error& e) {
                return e.code();
            }
            return ErrorCode::invalid_argument;
        };
        CHECK(code_of({bytes.begin(), bytes.begin() + bytes.size() / 2}) == ErrorCode::io_error);
        CHECK(code_of({bytes.begin(), bytes.begin() + 10}) == ErrorCode::io_error);
        auto v = bytes;
        v[8] ^= 0x7f;  // format version
        CHECK(code_of(v) == ErrorCode::version_mismatch);
        v = bytes;
        v[12] ^= 0x01;  // scale hash
        CHECK(code_of(v) == ErrorCode::version_mismatch);
        v = bytes;
        v[v.size() / 2] ^= 0x10;
        CHECK(code_of(v) != ErrorCode::invalid_argument);
        {
            std::ofstream f(path, std::ios::binary | std::ios::trunc);
            f.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size() - 7));
        }
        CHECK_THROWS_AS(load_index(path), Error);
        std::remove(path.c_str());
        CHECK_THROWS_AS(load_index(path), Error);
    }
}

TEST_CASE("noncoplanar descriptors do not depend on the canonical view") {
    Rng r(7);
    IndexScale s = regional_scale();
    s.max_ellipticity = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 200; ++i) {
        auto c = th::cluster(r, 3, 600, 15, 60, true);
        const std::array<const CraterRecord*, 3> p{&c[0], &c[1], &c[2]};
        const Vec3 m = (unit_direction(c[0].lat, c[0].lon) + unit_direction(c[1].lat, c[1].lon) +
                        unit_direction(c[2].lat, c[2].lon)).normalized();
        const CraterFrame f = enu_frame(m);
        const Vec3 other = (m + 0.2 * f.e - 0.1 * f.n).normalized();
        try {
            const auto a = catalog_noncoplanar_invariants(p, s.moon_radius, s.canonical_altitude).as_array();
            const auto b = catalog_noncoplanar_invariants(p, s.moon_radius, 3000.0, &other).as_array();
            for (int k = 0; k < 3; ++k) REQUIRE(std::abs(a[k] - b[k]) < 1e-8);
        } catch (const Error&) {
        }
    }
}

TEST_CASE("global scale prunes combinations") {
    SynthCatalogConfig cfg;
    cfg.n_local = 0;
    cfg.n_regional = 0;
    cfg.n_global = 31;
    const auto rec = filter_catalog(synth_catalog(cfg), global_scale());
    const auto t = enumerate_triads(rec, global_scale());
    MESSAGE("global craters " << rec.size() << ", triads " << t.size());
    CHECK(rec.size() >= 20);
    const double comb = double(rec.size()) * (rec.size() - 1) * (rec.size() - 2) / 6;
    CHECK(t.size() > 0);
    CHECK(5.0 * double(t.size()) <= comb);
}
