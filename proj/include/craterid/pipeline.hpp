#pragma once

#include <array>
#include <string>
#include <vector>

#include "craterid/index.hpp"
#include "craterid/metrics.hpp"
#include "craterid/pose.hpp"

namespace craterid {

struct Detection {
    EllipseParams e;
    Mat3 locus;  // det +1
};
Detection make_detection(const EllipseParams& e);
Detection make_detection(const Mat3& locus);

/// Pattern-shifting order over all 3-combinations of {0..m-1}: for each
/// outer span s, each inner gap g, every start i gives (i, i+g, i+s).
class EpsSchedule {
public:
    explicit EpsSchedule(int m);
    bool next(std::array<int, 3>& out);
    uint64_t total() const;

private:
    int m_, s_ = 2, g_ = 1, i_ = 0;
};
std::vector<std::array<int, 3>> eps_enumerate(int m);

struct IdentifyConfig {
    size_t candidates = 3;
    size_t triad_budget = 5000;
    GateConfig gate;
    /// negative control: accept the first nearest-neighbor hit unverified
    bool verify = true;
};

struct IdentifyRequest {
    std::vector<Detection> detections;
    Intrinsics intrinsics;
    Mat3 T_MC = Mat3::Identity();
    std::vector<const DescriptorIndex*> indexes;  // priority order
    IdentifyConfig cfg;
};

enum class MatchStatus { matched, no_match, insufficient_craters };
const char* status_name(MatchStatus s);

struct MatchedCrater {
    int detection = -1;  // index into the request's detections
    uint32_t crater = 0; // index into the winning index's crater table
    std::string crater_id;
    double d_ga = 0.0;
    double statistic = 0.0;
};

struct MatchResult {
    MatchStatus status = MatchStatus::no_match;
    std::vector<MatchedCrater> matches;
    Vec3 r_M = Vec3::Zero();
    std::string index_name;
    uint64_t triads_attempted = 0;
    uint64_t hypotheses_tested = 0;
    std::string reason;
};

MatchResult identify(const IdentifyRequest& req);

}  // namespace craterid
