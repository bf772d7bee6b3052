#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "craterid/camera.hpp"
#include "craterid/exec.hpp"
#include "craterid/invariants.hpp"
#include "craterid/kdtree.hpp"

namespace craterid {

struct IndexScale {
    std::string name = "local";
    int k = 5;
    double d_min = 4.0;
    double d_max = 30.0;
    double max_ellipticity = std::numeric_limits<double>::infinity();
    double min_arc_fraction = 0.9;
    DescriptorKind kind = DescriptorKind::coplanar7;
    Convention convention = Convention::ordered;
    bool whiten = false;
    double moon_radius = kMoonRadiusKm;
    /// separation gate margin as a fraction of (a_i + a_j)
    double separation_margin = 0.1;
    /// canonical camera altitude (km) for noncoplanar catalog descriptors
    double canonical_altitude = 5.0 * kMoonRadiusKm;
};

IndexScale local_scale();
IndexScale regional_scale();
IndexScale global_scale();
IndexScale scale_by_name(const std::string& name);

void validate_scale(const IndexScale& s);
std::vector<uint8_t> serialize_scale(const IndexScale& s);
uint64_t scale_hash(const IndexScale& s);

std::vector<CraterRecord> filter_catalog(const std::vector<CraterRecord>& records, const IndexScale& s);

struct TriadEntry {
    std::array<uint32_t, 3> ids{};  // indices into the index crater table, clockwise
    int64_t home = -1;
};

/// Clockwise as seen from outside, looking down -mean. Returns a permutation
/// of {0,1,2}; the start is the element with the smallest angle.
std::array<int, 3> clockwise_on_sphere(const std::array<Vec3, 3>& dirs);

/// Ascending atan2 about the centroid in the +v-down image frame.
std::array<int, 3> clockwise_in_image(const std::array<Vec2, 3>& centers);

bool separated(const CraterRecord& a, const Vec3& ua, const CraterRecord& b, const Vec3& ub,
               const IndexScale& s);

std::vector<TriadEntry> enumerate_triads(const std::vector<CraterRecord>& records, const IndexScale& s,
                                         Exec exec = Exec::parallel);

/// Catalog-side projective invariants for one triad (ids in label order).
CoplanarInvariants7 catalog_coplanar_invariants(const std::array<const CraterRecord*, 3>& c, double R);
NoncoplanarInvariants3 catalog_noncoplanar_invariants(const std::array<const CraterRecord*, 3>& c, double R,
                                                      double altitude, const Vec3* view_dir = nullptr);

struct BuildDiagnostics {
    uint64_t candidates = 0;
    uint64_t skipped_overlap = 0;
    uint64_t skipped_acosh = 0;
    uint64_t skipped_other = 0;
};

struct QueryHit {
    uint32_t entry = 0;
    double distance = 0.0;
};

struct DescriptorIndex {
    IndexScale scale;
    std::vector<CraterRecord> craters;
    std::vector<TriadEntry> entries;
    int dim = 0;
    std::vector<double> descriptors;   // entries.size() x dim, raw values
    std::vector<double> whiten_scale;  // dim; all 1 when whitening is off
    KdTree tree;                       // over descriptors / whiten_scale
    BuildDiagnostics diag;

    size_t size() const { return entries.size(); }
    const double* descriptor(size_t i) const { return &descriptors[i * dim]; }
};

DescriptorIndex build_index(const std::vector<CraterRecord>& filtered, const IndexScale& s,
                            Exec exec = Exec::parallel);

std::vector<QueryHit> query(const DescriptorIndex& idx, const std::vector<double>& desc, size_t n);
std::vector<QueryHit> query_brute_force(const DescriptorIndex& idx, const std::vector<double>& desc, size_t n);

void save_index(const DescriptorIndex& idx, const std::string& path);
DescriptorIndex load_index(const std::string& path);
std::vector<uint8_t> serialize_index(const DescriptorIndex& idx);
DescriptorIndex deserialize_index(const std::vector<uint8_t>& bytes);

inline constexpr uint32_t kIndexFormatVersion = 1;

}  // namespace craterid
