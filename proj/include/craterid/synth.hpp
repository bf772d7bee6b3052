#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "craterid/camera.hpp"

namespace craterid {

uint64_t splitmix64(uint64_t x);
/// Independent per-trial stream seed.
uint64_t trial_seed(uint64_t seed, uint64_t trial);

/// mt19937_64 with a fixed uniform/normal construction, so streams are
/// identical across standard libraries.
class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(seed) {}
    double uniform();  // [0, 1), 53 bits
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal();   // Box-Muller
    double normal(double mu, double sd) { return mu + sd * normal(); }
    uint64_t bits() { return eng_(); }
    Vec3 unit_vector();

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

struct SynthCatalogConfig {
    uint64_t seed = 20240101;
    int n_local = 20000;     // 4-30 km diameter
    int n_regional = 900;    // 25-125 km
    int n_global = 31;       // > 100 km
    double moon_radius = kMoonRadiusKm;
    /// share of craters with a wider ellipticity spread
    double elliptical_share = 0.10;
    double degraded_share = 0.15;
    double spacing = 0.1;    // min center gap beyond a_i + a_j, as a fraction of it
};

/// Non-overlapping random crater field with power-law sizes.
std::vector<CraterRecord> synth_catalog(const SynthCatalogConfig& cfg);

/// Precomputed geometry for the craters a simulated camera may see.
struct SceneCatalog {
    std::vector<CraterRecord> records;
    std::vector<CraterFrame> frames;
    std::vector<Mat4> quadrics;
    std::vector<Vec3> dirs;
    double max_radius_km = 0.0;
};
SceneCatalog make_scene_catalog(const std::vector<CraterRecord>& records, double d_min = 0.0,
                                double d_max = std::numeric_limits<double>::infinity());

struct NoiseConfig {
    double sigma_px = 0.0;
    bool perturb_psi = false;
    double sigma_psi = 0.0;  // rad
};

struct SceneDetection {
    EllipseParams observed;
    EllipseParams truth;
    int crater = -1;  // index into the scene catalog
};

struct Scene {
    std::vector<SceneDetection> detections;
    bool no_visible = false;
};

/// Projects every visible crater and perturbs (a, b, u_c, v_c); psi only
/// when asked.
Scene synth_scene(const SceneCatalog& cat, const Camera& cam, const CameraPose& pose, const NoiseConfig& noise,
                  uint64_t seed);

}  // namespace craterid
