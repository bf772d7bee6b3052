// craterid: index building, identification, simulation and Monte Carlo.
#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "craterid/catalog.hpp"
#include "craterid/montecarlo.hpp"
#include "craterid/selftest.hpp"
#include "craterid/textio.hpp"

using namespace craterid;

namespace {

constexpr int kExitOk = 0, kExitError = 1, kExitNoMatch = 2, kExitInsufficient = 3;

std::vector<CraterRecord> read_catalog(const std::string& path) {
    CatalogLoad c = load_catalog(path);
    for (const auto& e : c.errors)
        std::fprintf(stderr, "%s:%d: %s: %s\n", path.c_str(), e.line, error_name(e.code), e.message.c_str());
    return c.records;
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> v;
    std::stringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        tok = trim(tok);
        if (!tok.empty()) v.push_back(std::stod(tok));
    }
    return v;
}

std::string fmt(double x) {
    char b[32];
    std::snprintf(b, sizeof b, "%g", x);
    return b;
}

int cmd_synth_catalog(const std::string& out, const SynthCatalogConfig& cfg) {
    const auto cat = synth_catalog(cfg);
    save_catalog(out, cat);
    std::printf("wrote %zu craters to %s\n", cat.size(), out.c_str());
    return kExitOk;
}

int cmd_build_index(const std::string& catalog, const std::string& scale_cfg, const std::string& scale_name,
                    const std::string& out) {
    IndexScale s;
    if (!scale_cfg.empty())
        s = scale_from_kv(load_kv(scale_cfg));
    else
        s = scale_by_name(scale_name);
    const auto recs = filter_catalog(read_catalog(catalog), s);
    const DescriptorIndex idx = build_index(recs, s);
    save_index(idx, out);
    std::printf("%s: %zu craters, %zu triads (%s/%s), skipped overlap %llu acosh %llu other %llu\n",
                s.name.c_str(), idx.craters.size(), idx.size(), kind_name(s.kind), convention_name(s.convention),
                (unsigned long long)idx.diag.skipped_overlap, (unsigned long long)idx.diag.skipped_acosh,
                (unsigned long long)idx.diag.skipped_other);
    return kExitOk;
}

struct IdentifyArgs {
    std::string detections, camera, attitude, jsonl;
    std::vector<std::string> indexes;
    double sigma_img = 1.0;
    size_t candidates = 3;
    size_t budget = 5000;
    bool no_verify = false;
};

int cmd_identify(const IdentifyArgs& a) {
    std::vector<DescriptorIndex> loaded;
    loaded.reserve(a.indexes.size());
    for (const auto& p : a.indexes) loaded.push_back(load_index(p));
    const Camera cam = camera_from_kv(load_kv(a.camera));
    IdentifyRequest req;
    req.intrinsics = cam.k;
    req.T_MC = load_attitude(a.attitude);
    for (const auto& idx : loaded) req.indexes.push_back(&idx);
    for (const auto& e : load_detections(a.detections)) req.detections.push_back(make_detection(e));
    req.cfg.gate.sigma_img = a.sigma_img;
    req.cfg.candidates = a.candidates;
    req.cfg.triad_budget = a.budget;
    req.cfg.verify = !a.no_verify;

    const MatchResult m = identify(req);
    std::printf("status: %s\n", status_name(m.status));
    if (!m.reason.empty()) std::printf("reason: %s\n", m.reason.c_str());
    std::printf("triads attempted: %llu, hypotheses: %llu\n", (unsigned long long)m.triads_attempted,
                (unsigned long long)m.hypotheses_tested);
    if (m.status == MatchStatus::matched) {
        std::printf("index: %s\nr_M (km): %.6f %.6f %.6f\n", m.index_name.c_str(), m.r_M.x(), m.r_M.y(), m.r_M.z());
        std::printf("%-10s %-16s %14s %12s\n", "detection", "crater", "d_GA", "d2/sigma2");
        for (const auto& c : m.matches)
            std::printf("%-10d %-16s %14.6e %12.4f\n", c.detection, c.crater_id.c_str(), c.d_ga, c.statistic);
    }
    if (!a.jsonl.empty()) {
        std::ofstream out(a.jsonl);
        if (!out) throw Error(ErrorCode::io_error, "cannot write " + a.jsonl);
        nlohmann::json j = {{"status", status_name(m.status)},
                            {"reason", m.reason},
                            {"triads", m.triads_attempted},
                            {"hypotheses", m.hypotheses_tested},
                            {"index", m.index_name},
                            {"r_M", {m.r_M.x(), m.r_M.y(), m.r_M.z()}}};
        for (const auto& c : m.matches)
            j["matches"].push_back(
                {{"detection", c.detection}, {"crater", c.crater_id}, {"d_ga", c.d_ga}, {"statistic", c.statistic}});
        out << j.dump() << '\n';
    }
    switch (m.status) {
    case MatchStatus::matched: return kExitOk;
    case MatchStatus::no_match: return kExitNoMatch;
    case MatchStatus::insufficient_craters: return kExitInsufficient;
    }
    return kExitError;
}

struct PoseSpec {
    double lat = 0, lon = 0, alt = 150;
};

int cmd_simulate(const std::string& config, const std::string& out, const std::string& truth_out,
                 const std::string& camera_out, const std::string& attitude_out) {
    const KeyValues kv = load_kv(config);
    const std::string catalog = kv_string(kv, "catalog", "");
    if (catalog.empty()) throw Error(ErrorCode::schema_error, "simulate config needs catalog = <path>");
    const SceneCatalog scene = make_scene_catalog(read_catalog(catalog), kv_double(kv, "d_min", 0.0),
                                                  kv_double(kv, "d_max", std::numeric_limits<double>::infinity()));
    const Camera cam = camera_from_kv(kv);
    NoiseConfig nc;
    nc.sigma_px = kv_double(kv, "noise_px", 0.0);
    nc.sigma_psi = kv_double(kv, "noise_psi_rad", 0.0);
    nc.perturb_psi = nc.sigma_psi > 0.0;
    const uint64_t seed = uint64_t(kv_double(kv, "seed", 1));
    const double tilt = kv_double(kv, "off_nadir_deg", 0.0) * M_PI / 180.0;
    const double az = kv_double(kv, "azimuth_deg", 0.0) * M_PI / 180.0;

    std::vector<PoseSpec> poses;
    const std::string traj = kv_string(kv, "trajectory", "");
    if (traj.empty()) {
        poses.push_back({kv_double(kv, "lat_deg", 0.0), kv_double(kv, "lon_deg", 0.0), kv_double(kv, "altitude_km", 150.0)});
    } else {
        std::ifstream in(traj);
        if (!in) throw Error(ErrorCode::io_error, "cannot open " + traj);
        std::string line;
        while (std::getline(in, line)) {
            line = trim(line.substr(0, line.find('#')));
            if (line.empty()) continue;
            for (char& c : line)
                if (c == ',') c = ' ';
            std::istringstream ls(line);
            PoseSpec p;
            if (!(ls >> p.lat >> p.lon >> p.alt)) throw Error(ErrorCode::schema_error, traj + ": need lat lon altitude");
            poses.push_back(p);
        }
    }
    auto name = [&](const std::string& base, size_t i) {
        if (poses.size() == 1 || base.empty()) return base;
        char suffix[16];
        std::snprintf(suffix, sizeof suffix, "_%03zu", i);
        const auto dot = base.rfind('.');
        return dot == std::string::npos ? base + suffix : base.substr(0, dot) + suffix + base.substr(dot);
    };
    if (!camera_out.empty()) {
        std::ofstream c(camera_out);
        if (!c) throw Error(ErrorCode::io_error, "cannot write " + camera_out);
        write_camera(c, cam);
    }
    for (size_t i = 0; i < poses.size(); ++i) {
        CameraPose pose;
        pose.r_M = (kMoonRadiusKm + poses[i].alt) * unit_direction(poses[i].lat * M_PI / 180.0, poses[i].lon * M_PI / 180.0);
        pose.T_MC = nadir_attitude(pose.r_M);
        if (tilt != 0.0) pose.T_MC = tilt_attitude(pose.T_MC, tilt, az);
        const Scene s = synth_scene(scene, cam, pose, nc, trial_seed(seed, i));
        std::vector<EllipseParams> obs;
        for (const auto& d : s.detections) obs.push_back(d.observed);
        std::ofstream o(name(out, i));
        if (!o) throw Error(ErrorCode::io_error, "cannot write " + name(out, i));
        o << "# r_M km: " << std::setprecision(17) << pose.r_M.x() << ' ' << pose.r_M.y() << ' ' << pose.r_M.z() << '\n';
        write_detections(o, obs);
        if (!truth_out.empty()) {
            std::ofstream t(name(truth_out, i));
            t << "detection,crater_id\n";
            for (size_t k = 0; k < s.detections.size(); ++k)
                t << k << ',' << scene.records[s.detections[k].crater].id << '\n';
        }
        if (!attitude_out.empty()) {
            std::ofstream t(name(attitude_out, i));
            t << format_attitude(pose.T_MC);
        }
        std::printf("pose %zu: %zu detections -> %s\n", i, s.detections.size(), name(out, i).c_str());
    }
    return kExitOk;
}

int cmd_montecarlo(const std::string& config, const std::string& jsonl, Exec exec) {
    const KeyValues kv = load_kv(config);
    const IndexScale s = scale_from_kv(kv);
    std::vector<CraterRecord> recs;
    const std::string catalog = kv_string(kv, "catalog", "");
    if (catalog.empty()) {
        SynthCatalogConfig sc;
        sc.seed = uint64_t(kv_double(kv, "catalog_seed", double(sc.seed)));
        recs = synth_catalog(sc);
    } else {
        recs = read_catalog(catalog);
    }
    DescriptorIndex idx;
    const std::string index_path = kv_string(kv, "index", "");
    if (!index_path.empty())
        idx = load_index(index_path);
    else
        idx = build_index(filter_catalog(recs, s), s);
    const SceneCatalog scene = make_scene_catalog(recs, idx.scale.d_min, idx.scale.d_max);

    MonteCarloConfig base;
    base.trials = kv_int(kv, "trials", base.trials);
    base.seed = uint64_t(kv_double(kv, "seed", double(base.seed)));
    base.altitude_km = kv_double(kv, "altitude_km", base.altitude_km);
    base.fov_deg = kv_double(kv, "fov_deg", base.fov_deg);
    base.rows = kv_int(kv, "rows", base.rows);
    base.cols = kv_int(kv, "cols", base.rows);
    base.identify.candidates = size_t(kv_int(kv, "candidates", int(base.identify.candidates)));
    base.identify.triad_budget = size_t(kv_int(kv, "triad_budget", int(base.identify.triad_budget)));
    base.identify.verify = kv_bool(kv, "verify", true);
    base.gate_sigma_floor = kv_double(kv, "gate_sigma_floor", base.gate_sigma_floor);
    base.sigma_psi = kv_double(kv, "noise_psi_rad", 0.0);
    base.perturb_psi = base.sigma_psi > 0.0;
    const auto noise = parse_list(kv_string(kv, "noise_px", "0"));
    const auto tilt = parse_list(kv_string(kv, "off_nadir_deg", "0"));

    std::vector<MonteCarloSummary> rows;
    std::ofstream js;
    if (!jsonl.empty()) {
        js.open(jsonl);
        if (!js) throw Error(ErrorCode::io_error, "cannot write " + jsonl);
    }
    for (double t : tilt)
        for (double n : noise) {
            MonteCarloConfig c = base;
            c.noise_px = n;
            c.off_nadir_deg = t;
            c.label = fmt(n) + " px";
            if (tilt.size() > 1 || t != 0.0) c.label += " " + fmt(t) + " deg";
            rows.push_back(run_monte_carlo(c, scene, {&idx}, exec));
            if (js) write_jsonl(js, rows.back());
        }
    std::printf("%s index, %zu triads, %.0f km altitude, %d trials per row\n", idx.scale.name.c_str(), idx.size(),
                base.altitude_km, base.trials);
    std::fputs(format_table(rows, "Noise / tilt").c_str(), stdout);
    return kExitOk;
}

int cmd_selftest(int cases, uint64_t seed) {
    bool ok = true;
    for (const auto& c : metrics_selftest(cases, seed)) {
        std::printf("%-4s %-32s worst %.3e over %d cases\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.worst, c.cases);
        ok = ok && c.pass;
    }
    return ok ? kExitOk : kExitError;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Crater pattern identification from image ellipses"};
    app.require_subcommand(1);
    int rc = kExitOk;

    auto* syn = app.add_subcommand("synth-catalog", "Write a synthetic non-overlapping crater catalog");
    std::string syn_out;
    SynthCatalogConfig syn_cfg;
    syn->add_option("--out,-o", syn_out, "catalog CSV to write")->required();
    syn->add_option("--seed", syn_cfg.seed, "generator seed");
    syn->add_option("--local", syn_cfg.n_local, "craters 4-30 km");
    syn->add_option("--regional", syn_cfg.n_regional, "craters 25-125 km");
    syn->add_option("--global", syn_cfg.n_global, "craters > 100 km");
    syn->callback([&] { rc = cmd_synth_catalog(syn_out, syn_cfg); });

    auto* bi = app.add_subcommand("build-index", "Catalog CSV + scale config -> index file");
    std::string bi_cat, bi_cfg, bi_name = "local", bi_out;
    bi->add_option("--catalog,-c", bi_cat, "catalog CSV (native or Robbins schema)")->required();
    bi->add_option("--scale-config", bi_cfg, "key = value scale file");
    bi->add_option("--scale", bi_name, "local | regional | global");
    bi->add_option("--out,-o", bi_out, "index file to write")->required();
    bi->callback([&] { rc = cmd_build_index(bi_cat, bi_cfg, bi_name, bi_out); });

    auto* id = app.add_subcommand("identify", "Match detections against one or more indexes");
    IdentifyArgs ia;
    id->add_option("--detections,-d", ia.detections, "CSV u_c,v_c,a_px,b_px,psi_rad")->required();
    id->add_option("--camera", ia.camera, "camera key = value file")->required();
    id->add_option("--attitude", ia.attitude, "quaternion x y z w, or 9 numbers row-major T_MC")->required();
    id->add_option("--index,-i", ia.indexes, "index files in priority order")->required();
    id->add_option("--sigma-img", ia.sigma_img, "assumed rim-fit error, px");
    id->add_option("--candidates", ia.candidates, "nearest neighbors per query");
    id->add_option("--budget", ia.budget, "maximum triads to try");
    id->add_flag("--no-verify", ia.no_verify, "accept the first hit unverified (negative control)");
    id->add_option("--jsonl", ia.jsonl, "write a structured report");
    id->callback([&] { rc = cmd_identify(ia); });

    auto* sim = app.add_subcommand("simulate", "Catalog + pose config -> detections file");
    std::string sim_cfg, sim_out, sim_truth, sim_cam, sim_att;
    sim->add_option("--config", sim_cfg, "key = value pose/camera/noise file")->required();
    sim->add_option("--out,-o", sim_out, "detections CSV")->required();
    sim->add_option("--truth", sim_truth, "detection -> crater id CSV");
    sim->add_option("--camera-out", sim_cam, "camera file for identify");
    sim->add_option("--attitude-out", sim_att, "attitude file for identify");
    sim->callback([&] { rc = cmd_simulate(sim_cfg, sim_out, sim_truth, sim_cam, sim_att); });

    auto* mc = app.add_subcommand("montecarlo", "Experiment config -> table + JSONL report");
    std::string mc_cfg, mc_jsonl;
    bool mc_serial = false;
    mc->add_option("--config", mc_cfg, "experiment key = value file")->required();
    mc->add_option("--jsonl", mc_jsonl, "line-delimited report");
    mc->add_flag("--serial", mc_serial, "run trials on one thread");
    mc->callback([&] { rc = cmd_montecarlo(mc_cfg, mc_jsonl, mc_serial ? Exec::serial : Exec::parallel); });

    auto* st = app.add_subcommand("metrics-selftest", "Metric axiom suites");
    int st_cases = 10000;
    uint64_t st_seed = 7;
    st->add_option("--cases", st_cases, "random cases per axiom");
    st->add_option("--seed", st_seed, "seed");
    st->callback([&] { rc = cmd_selftest(st_cases, st_seed); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int r = app.exit(e);
        return r == 0 ? kExitOk : kExitError;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitError;
    }
    return rc;
}
