#include "craterid/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

namespace craterid {

Detection make_detection(const EllipseParams& e) {
    Detection d;
    d.e = e;
    d.locus = normalize_unit_det(ellipse_to_conic(e));
    return d;
}

Detection make_detection(const Mat3& locus) {
    Detection d;
    d.e = conic_to_ellipse(locus);
    d.locus = normalize_unit_det(locus);
    return d;
}

EpsSchedule::EpsSchedule(int m) : m_(m) {
    if (m < 3) throw Error(ErrorCode::invalid_argument, "EPS needs at least three detections");
}

bool EpsSchedule::next(std::array<int, 3>& out) {
    if (s_ > m_ - 1) return false;
    out = {i_, i_ + g_, i_ + s_};
    if (++i_ > m_ - 1 - s_) {
        i_ = 0;
        if (++g_ > s_ - 1) {
            g_ = 1;
            ++s_;
        }
    }
    return true;
}

uint64_t EpsSchedule::total() const {
    const uint64_t m = uint64_t(m_);
    return m * (m - 1) * (m - 2) / 6;
}

std::vector<std::array<int, 3>> eps_enumerate(int m) {
    EpsSchedule s(m);
    std::vector<std::array<int, 3>> out;
    out.reserve(s.total());
    std::array<int, 3> t;
    while (s.next(t)) out.push_back(t);
    return out;
}

const char* status_name(MatchStatus s) {
    switch (s) {
    case MatchStatus::matched: return "matched";
    case MatchStatus::no_match: return "no-match";
    case MatchStatus::insufficient_craters: return "insufficient-craters";
    }
    return "?";
}

namespace {

struct Hypothesis {
    const DescriptorIndex* idx;
    std::array<int, 3> det;       // detection indices
    std::array<uint32_t, 3> cat;  // crater indices in idx
};

std::optional<MatchResult> verify(const IdentifyRequest& req, const Hypothesis& h) {
    try {
        std::vector<ConicCorrespondence> corrs;
        for (int q = 0; q < 3; ++q)
            corrs.push_back(make_correspondence(req.detections[h.det[q]].locus, h.idx->craters[h.cat[q]]));
        const PositionEstimate est = solve_position(corrs, req.T_MC, req.intrinsics, h.idx->scale.moon_radius);
        if (est.inside_moon || !est.r_M.allFinite()) return std::nullopt;
        CameraPose pose{req.T_MC, est.r_M};
        const Mat34 P = projection_matrix(req.intrinsics, pose);
        MatchResult r;
        for (int q = 0; q < 3; ++q) {
            const auto& c = corrs[q];
            if (!crater_faces_camera(c.frame, est.r_M)) return std::nullopt;
            const Mat3 pred = project_disk_quadric(P, disk_quadric_from_conic(c.frame, c.plane_conic));
            const Detection& d = req.detections[h.det[q]];
            const double dga = gaussian_angle(pred, d.locus);
            const GateResult g = chi2_gate(dga, d.e.a, d.e.b, req.cfg.gate);
            if (!g.accept) return std::nullopt;
            r.matches.push_back({h.det[q], h.cat[q], h.idx->craters[h.cat[q]].id, dga, g.statistic});
        }
        r.status = MatchStatus::matched;
        r.r_M = est.r_M;
        r.index_name = h.idx->scale.name;
        return r;
    } catch (const Error&) {
        return std::nullopt;
    }
}

MatchResult unverified(const IdentifyRequest& req, const Hypothesis& h) {
    MatchResult r;
    r.status = MatchStatus::matched;
    r.index_name = h.idx->scale.name;
    r.reason = "unverified";
    for (int q = 0; q < 3; ++q) r.matches.push_back({h.det[q], h.cat[q], h.idx->craters[h.cat[q]].id, 0.0, 0.0});
    try {
        std::vector<ConicCorrespondence> corrs;
        for (int q = 0; q < 3; ++q)
            corrs.push_back(make_correspondence(req.detections[h.det[q]].locus, h.idx->craters[h.cat[q]]));
        r.r_M = solve_position(corrs, req.T_MC, req.intrinsics, h.idx->scale.moon_radius).r_M;
    } catch (const Error&) {
    }
    return r;
}

struct QuerySpec {
    std::vector<double> values;
    std::vector<int> rotations;
};

}  // namespace

MatchResult identify(const IdentifyRequest& req) {
    MatchResult res;
    const int m = int(req.detections.size());
    if (m < 3) {
        res.status = MatchStatus::insufficient_craters;
        res.reason = "fewer than three detections";
        return res;
    }
    // canonical order: input order must not change the outcome
    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int x, int y) {
        const auto& a = req.detections[x].e;
        const auto& b = req.detections[y].e;
        if (a.a != b.a) return a.a > b.a;
        if (a.xc != b.xc) return a.xc < b.xc;
        if (a.yc != b.yc) return a.yc < b.yc;
        if (a.b != b.b) return a.b < b.b;
        return a.psi < b.psi;
    });

    EpsSchedule sched(m);
    std::array<int, 3> t;
    while (res.triads_attempted < req.cfg.triad_budget && sched.next(t)) {
        ++res.triads_attempted;
        const std::array<int, 3> d{order[t[0]], order[t[1]], order[t[2]]};
        const auto cw = clockwise_in_image({Vec2(req.detections[d[0]].e.xc, req.detections[d[0]].e.yc),
                                            Vec2(req.detections[d[1]].e.xc, req.detections[d[1]].e.yc),
                                            Vec2(req.detections[d[2]].e.xc, req.detections[d[2]].e.yc)});
        const std::array<int, 3> lab{d[cw[0]], d[cw[1]], d[cw[2]]};
        const Mat3& A0 = req.detections[lab[0]].locus;
        const Mat3& A1 = req.detections[lab[1]].locus;
        const Mat3& A2 = req.detections[lab[2]].locus;

        std::optional<CoplanarInvariants7> inv7;
        std::optional<NoncoplanarInvariants3> inv3;
        bool fail7 = false, fail3 = false;

        for (const DescriptorIndex* idx : req.indexes) {
            if (!idx || idx->size() == 0) continue;
            const DescriptorKind kind = idx->scale.kind;
            if (kind == DescriptorKind::coplanar7 && !inv7 && !fail7) {
                try {
                    inv7 = coplanar_triad(A0, A1, A2);
                } catch (const Error&) {
                    fail7 = true;
                }
            }
            if (kind == DescriptorKind::noncoplanar3 && !inv3 && !fail3) {
                try {
                    inv3 = noncoplanar_triad(A0, A1, A2);
                } catch (const Error&) {
                    fail3 = true;
                }
            }
            if ((kind == DescriptorKind::coplanar7 && !inv7) || (kind == DescriptorKind::noncoplanar3 && !inv3))
                continue;

            auto desc = [&](int r, Convention c) {
                return kind == DescriptorKind::coplanar7 ? make_descriptor(rotate_labels(*inv7, r), c)
                                                         : make_descriptor(rotate_labels(*inv3, r), c);
            };
            std::vector<QuerySpec> specs;
            const Convention conv = idx->scale.convention;
            if (conv == Convention::ordered) {
                for (int r = 0; r < 3; ++r) specs.push_back({desc(r, conv).values, {r}});
            } else if (conv == Convention::sorted) {
                const TriadDescriptor s = desc(0, conv);
                specs.push_back({s.values, {s.rotation}});
                // cyclic retries: the minimum may have moved under noise
                for (int k = 1; k < 3; ++k) {
                    const int r = (s.rotation + k) % 3;
                    specs.push_back({desc(r, Convention::ordered).values, {r}});
                }
            } else {
                specs.push_back({desc(0, conv).values, {0, 1, 2}});
            }

            for (const QuerySpec& qs : specs) {
                for (const QueryHit& hit : query(*idx, qs.values, req.cfg.candidates)) {
                    const TriadEntry& e = idx->entries[hit.entry];
                    for (int r : qs.rotations) {
                        Hypothesis h{idx, {lab[r % 3], lab[(1 + r) % 3], lab[(2 + r) % 3]}, e.ids};
                        ++res.hypotheses_tested;
                        if (!req.cfg.verify) {
                            MatchResult u = unverified(req, h);
                            u.triads_attempted = res.triads_attempted;
                            u.hypotheses_tested = res.hypotheses_tested;
                            return u;
                        }
                        if (auto ok = verify(req, h)) {
                            ok->triads_attempted = res.triads_attempted;
                            ok->hypotheses_tested = res.hypotheses_tested;
                            return *ok;
                        }
                    }
                }
            }
        }
    }
    res.status = MatchStatus::no_match;
    res.reason = res.triads_attempted >= req.cfg.triad_budget ? "triad budget exhausted" : "no verified hypothesis";
    return res;
}

}  // namespace craterid
