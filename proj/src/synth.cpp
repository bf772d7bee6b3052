#include "craterid/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_map>

#include "craterid/healpix.hpp"

namespace craterid {

uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

uint64_t trial_seed(uint64_t seed, uint64_t trial) {
    return splitmix64(splitmix64(seed) ^ (trial * 0xd1b54a32d192ed03ULL));
}

double Rng::uniform() {
    return double(eng_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1;
    do {
        u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * M_PI * u2);
}

Vec3 Rng::unit_vector() {
    for (;;) {
        Vec3 v(normal(), normal(), normal());
        const double n = v.norm();
        if (n > 1e-12) return v / n;
    }
}

namespace {

struct Draw {
    double a, b, psi, arc;
};

// N(>D) ~ D^-2 between dmin and dmax
double power_law_diameter(Rng& rng, double dmin, double dmax) {
    const double r = dmin / dmax;
    return dmin / std::sqrt(1.0 - rng.uniform() * (1.0 - r * r));
}

Draw draw_shape(Rng& rng, double d, const SynthCatalogConfig& cfg) {
    Draw s;
    const double sd = rng.uniform() < cfg.elliptical_share ? 0.15 : 0.04;
    const double ell = 1.0 + std::abs(rng.normal(0.0, sd));
    s.a = 0.5 * d;
    s.b = s.a / ell;
    s.psi = rng.uniform(0.0, M_PI);
    s.arc = rng.uniform() < cfg.degraded_share ? rng.uniform(0.6, 0.9) : rng.uniform(0.92, 1.0);
    return s;
}

}  // namespace

std::vector<CraterRecord> synth_catalog(const SynthCatalogConfig& cfg) {
    Rng rng(cfg.seed);
    std::vector<Draw> draws;
    auto add = [&](int n, double dmin, double dmax) {
        for (int i = 0; i < n; ++i) draws.push_back(draw_shape(rng, power_law_diameter(rng, dmin, dmax), cfg));
    };
    add(cfg.n_global, 100.0, 500.0);
    add(cfg.n_regional, 25.0, 125.0);
    add(cfg.n_local, 4.0, 30.0);
    std::stable_sort(draws.begin(), draws.end(), [](const Draw& x, const Draw& y) { return x.a > y.a; });

    const double R = cfg.moon_radius;
    const double max_lat = 89.0 * M_PI / 180.0;
    // small craters live in pixel buckets, big ones in a flat list
    const double bucket_a = 15.0;
    const HealpixGrid grid(5);
    std::unordered_map<int64_t, std::vector<int>> buckets;
    std::vector<int> big;
    std::vector<Vec3> dirs;
    std::vector<CraterRecord> out;

    auto clear = [&](const Vec3& u, double a, int j) {
        const double need = (1.0 + cfg.spacing) * (a + out[j].a) / R;
        return std::acos(std::clamp(u.dot(dirs[j]), -1.0, 1.0)) >= need;
    };

    for (const Draw& d : draws) {
        for (int attempt = 0; attempt < 50; ++attempt) {
            const Vec3 u = rng.unit_vector();
            if (std::abs(std::asin(std::clamp(u.z(), -1.0, 1.0))) > max_lat) continue;
            bool ok = true;
            for (int j : big)
                if (!clear(u, d.a, j)) {
                    ok = false;
                    break;
                }
            const int64_t pix = grid.ang2pix(u);
            if (ok && d.a <= bucket_a) {
                std::vector<int64_t> near = grid.neighbors(pix);
                near.push_back(pix);
                for (int64_t p : near) {
                    auto it = buckets.find(p);
                    if (it == buckets.end()) continue;
                    for (int j : it->second)
                        if (!clear(u, d.a, j)) {
                            ok = false;
                            break;
                        }
                    if (!ok) break;
                }
            }
            if (!ok) continue;
            CraterRecord r;
            char id[32];
            std::snprintf(id, sizeof id, "SYN-%06zu", out.size() + 1);
            r.id = id;
            r.lat = std::asin(std::clamp(u.z(), -1.0, 1.0));
            r.lon = std::atan2(u.y(), u.x());
            r.a = d.a;
            r.b = d.b;
            r.psi = d.psi;
            r.arc_fraction = d.arc;
            const int j = int(out.size());
            out.push_back(r);
            dirs.push_back(u);
            if (d.a <= bucket_a)
                buckets[pix].push_back(j);
            else
                big.push_back(j);
            break;
        }
    }
    return out;
}

SceneCatalog make_scene_catalog(const std::vector<CraterRecord>& records, double d_min, double d_max) {
    SceneCatalog c;
    for (const auto& r : records) {
        const double d = 2.0 * r.a;
        if (d < d_min || d > d_max) continue;
        try {
            const CraterFrame f = crater_frame(r);
            c.quadrics.push_back(disk_quadric_from_conic(f, crater_plane_conic(r)));
            c.frames.push_back(f);
        } catch (const Error&) {
            continue;
        }
        c.records.push_back(r);
        c.dirs.push_back(unit_direction(r.lat, r.lon));
        c.max_radius_km = std::max(c.max_radius_km, r.a);
    }
    return c;
}

Scene synth_scene(const SceneCatalog& cat, const Camera& cam, const CameraPose& pose, const NoiseConfig& noise,
                  uint64_t seed) {
    Scene s;
    Rng rng(seed);
    const double rn = pose.r_M.norm();
    const Vec3 sub = pose.r_M / rn;
    const double R = kMoonRadiusKm;
    // horizon cone plus the largest crater radius, a cheap prefilter
    const double horizon = rn > R ? std::acos(std::min(1.0, R / rn)) : 0.0;
    const double cos_lim = std::cos(std::min(M_PI, horizon + cat.max_radius_km / R));
    for (size_t i = 0; i < cat.records.size(); ++i) {
        if (cat.dirs[i].dot(sub) < cos_lim) continue;
        Mat3 A;
        if (!crater_visible(cam, pose, cat.frames[i], cat.quadrics[i], &A)) continue;
        SceneDetection d;
        d.crater = int(i);
        d.truth = conic_to_ellipse(A);
        d.observed = d.truth;
        s.detections.push_back(d);
    }
    // noise after the visibility pass so the draw order follows the catalog order
    for (SceneDetection& d : s.detections) {
        if (noise.sigma_px > 0.0) {
            EllipseParams& e = d.observed;
            e.a += rng.normal(0.0, noise.sigma_px);
            e.b += rng.normal(0.0, noise.sigma_px);
            e.xc += rng.normal(0.0, noise.sigma_px);
            e.yc += rng.normal(0.0, noise.sigma_px);
            e.a = std::max(e.a, 0.5);
            e.b = std::max(e.b, 0.5);
        }
        if (noise.perturb_psi && noise.sigma_psi > 0.0) d.observed.psi += rng.normal(0.0, noise.sigma_psi);
        EllipseParams& e = d.observed;
        if (e.b > e.a) {
            std::swap(e.a, e.b);
            e.psi += M_PI / 2;
        }
        e.psi = std::fmod(e.psi, M_PI);
        if (e.psi < 0.0) e.psi += M_PI;
    }
    s.no_visible = s.detections.empty();
    return s;
}

}  // namespace craterid
