#include "craterid/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace craterid {

const char* outcome_name(TrialOutcome o) {
    switch (o) {
    case TrialOutcome::correct: return "correct";
    case TrialOutcome::incorrect: return "incorrect";
    case TrialOutcome::no_match: return "no-match";
    case TrialOutcome::insufficient: return "insufficient";
    }
    return "?";
}

TrialResult run_trial(const MonteCarloConfig& cfg, const SceneCatalog& scene,
                      const std::vector<const DescriptorIndex*>& indexes, int trial) {
    TrialResult tr;
    tr.trial = trial;
    Rng rng(trial_seed(cfg.seed, uint64_t(trial)));
    const Vec3 sub = rng.unit_vector();
    CameraPose pose;
    pose.r_M = (kMoonRadiusKm + cfg.altitude_km) * sub;
    pose.T_MC = nadir_attitude(pose.r_M);
    const double az = rng.uniform(0.0, 2.0 * M_PI);
    if (cfg.off_nadir_deg != 0.0) pose.T_MC = tilt_attitude(pose.T_MC, cfg.off_nadir_deg * M_PI / 180.0, az);
    tr.r_true = pose.r_M;

    const Camera cam = camera_from_fov(cfg.fov_deg, cfg.rows, cfg.cols);
    NoiseConfig nc;
    nc.sigma_px = cfg.noise_px;
    nc.perturb_psi = cfg.perturb_psi;
    nc.sigma_psi = cfg.sigma_psi;
    const Scene sc = synth_scene(scene, cam, pose, nc, rng.bits());
    tr.detections = int(sc.detections.size());

    IdentifyRequest req;
    req.intrinsics = cam.k;
    req.T_MC = pose.T_MC;
    req.indexes = indexes;
    req.cfg = cfg.identify;
    req.cfg.gate.sigma_img = std::max(cfg.noise_px, cfg.gate_sigma_floor);
    for (const auto& d : sc.detections) req.detections.push_back(make_detection(d.observed));

    const MatchResult m = identify(req);
    tr.triads = m.triads_attempted;
    tr.hypotheses = m.hypotheses_tested;
    tr.index_name = m.index_name;
    if (m.status == MatchStatus::insufficient_craters) {
        tr.outcome = TrialOutcome::insufficient;
        return tr;
    }
    if (m.status == MatchStatus::no_match) {
        tr.outcome = TrialOutcome::no_match;
        return tr;
    }
    bool ok = !m.matches.empty();
    for (const auto& mc : m.matches)
        if (mc.crater_id != scene.records[sc.detections[mc.detection].crater].id) ok = false;
    tr.outcome = ok ? TrialOutcome::correct : TrialOutcome::incorrect;
    tr.r_est = m.r_M;
    if (m.r_M.allFinite() && m.r_M.norm() > 0.0) tr.position_error_km = (m.r_M - pose.r_M).norm();
    return tr;
}

MonteCarloSummary run_monte_carlo(const MonteCarloConfig& cfg, const SceneCatalog& scene,
                                  const std::vector<const DescriptorIndex*>& indexes, Exec exec) {
    MonteCarloSummary s;
    s.cfg = cfg;
    s.trials.resize(std::max(0, cfg.trials));
    const int n = int(s.trials.size());
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (int t = 0; t < n; ++t) s.trials[t] = run_trial(cfg, scene, indexes, t);
    } else {
        for (int t = 0; t < n; ++t) s.trials[t] = run_trial(cfg, scene, indexes, t);
    }
    std::vector<double> err;
    for (const auto& t : s.trials) {
        switch (t.outcome) {
        case TrialOutcome::correct:
            ++s.correct;
            if (t.position_error_km >= 0.0) err.push_back(t.position_error_km);
            break;
        case TrialOutcome::incorrect: ++s.incorrect; break;
        case TrialOutcome::no_match: ++s.no_match; break;
        case TrialOutcome::insufficient: ++s.insufficient; break;
        }
    }
    if (!err.empty()) {
        double sum = 0.0;
        for (double e : err) sum += e;
        s.mean_error_km = sum / double(err.size());
        std::sort(err.begin(), err.end());
        const size_t h = err.size() / 2;
        s.median_error_km = err.size() % 2 ? err[h] : 0.5 * (err[h - 1] + err[h]);
    }
    return s;
}

namespace {

std::string meters(double km) {
    if (km < 0.0) return "-";
    char buf[32];
    const double m = km * 1000.0;
    if (m != 0.0 && (m < 1e-2 || m >= 1e6))
        std::snprintf(buf, sizeof buf, "%.2e", m);
    else
        std::snprintf(buf, sizeof buf, "%.2f", m);
    return buf;
}

}  // namespace

std::string format_table(const std::vector<MonteCarloSummary>& rows, const std::string& first_column) {
    std::ostringstream o;
    char line[256];
    std::snprintf(line, sizeof line, "%-14s %8s %10s %9s %11s %14s %14s\n", first_column.c_str(), "Correct",
                  "Incorrect", "No Match", "< 3 Craters", "Median err (m)", "Mean err (m)");
    o << line;
    for (const auto& r : rows) {
        std::snprintf(line, sizeof line, "%-14s %8d %10d %9d %11d %14s %14s\n", r.cfg.label.c_str(), r.correct,
                      r.incorrect, r.no_match, r.insufficient, meters(r.median_error_km).c_str(),
                      meters(r.mean_error_km).c_str());
        o << line;
    }
    return o.str();
}

void write_jsonl(std::ostream& out, const MonteCarloSummary& s) {
    using nlohmann::json;
    const auto& c = s.cfg;
    json head = {{"type", "summary"},
                 {"label", c.label},
                 {"trials", c.trials},
                 {"seed", c.seed},
                 {"altitude_km", c.altitude_km},
                 {"noise_px", c.noise_px},
                 {"off_nadir_deg", c.off_nadir_deg},
                 {"verify", c.identify.verify},
                 {"candidates", c.identify.candidates},
                 {"triad_budget", c.identify.triad_budget},
                 {"correct", s.correct},
                 {"incorrect", s.incorrect},
                 {"no_match", s.no_match},
                 {"insufficient", s.insufficient},
                 {"median_error_km", s.median_error_km},
                 {"mean_error_km", s.mean_error_km}};
    out << head.dump() << '\n';
    for (const auto& t : s.trials) {
        json j = {{"type", "trial"},
                  {"label", c.label},
                  {"trial", t.trial},
                  {"outcome", outcome_name(t.outcome)},
                  {"detections", t.detections},
                  {"triads", t.triads},
                  {"hypotheses", t.hypotheses},
                  {"index", t.index_name},
                  {"position_error_km", t.position_error_km},
                  {"r_true", {t.r_true.x(), t.r_true.y(), t.r_true.z()}},
                  {"r_est", {t.r_est.x(), t.r_est.y(), t.r_est.z()}}};
        out << j.dump() << '\n';
    }
}

}  // namespace craterid
