#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "craterid/exec.hpp"
#include "craterid/pipeline.hpp"
#include "craterid/synth.hpp"

namespace craterid {

struct MonteCarloConfig {
    std::string label;
    int trials = 100;
    uint64_t seed = 1;
    double altitude_km = 150.0;
    double noise_px = 0.0;
    double off_nadir_deg = 0.0;
    double fov_deg = 73.7;
    int rows = 2200;
    int cols = 2200;
    IdentifyConfig identify;
    /// gate sigma_img = max(noise_px, floor); a zero-noise gate would reject
    /// on rounding alone
    double gate_sigma_floor = 0.25;
    bool perturb_psi = false;
    double sigma_psi = 0.0;
};

enum class TrialOutcome { correct, incorrect, no_match, insufficient };
const char* outcome_name(TrialOutcome o);

struct TrialResult {
    int trial = 0;
    TrialOutcome outcome = TrialOutcome::no_match;
    int detections = 0;
    uint64_t triads = 0;
    uint64_t hypotheses = 0;
    double position_error_km = -1.0;  // < 0 when no position was produced
    std::string index_name;
    Vec3 r_true = Vec3::Zero();
    Vec3 r_est = Vec3::Zero();
};

struct MonteCarloSummary {
    MonteCarloConfig cfg;
    std::vector<TrialResult> trials;
    int correct = 0, incorrect = 0, no_match = 0, insufficient = 0;
    double median_error_km = -1.0;  // over correct matches
    double mean_error_km = -1.0;
};

TrialResult run_trial(const MonteCarloConfig& cfg, const SceneCatalog& scene,
                      const std::vector<const DescriptorIndex*>& indexes, int trial);

MonteCarloSummary run_monte_carlo(const MonteCarloConfig& cfg, const SceneCatalog& scene,
                                  const std::vector<const DescriptorIndex*>& indexes, Exec exec = Exec::parallel);

/// Correct / Incorrect / No Match / < 3 Craters plus position error.
std::string format_table(const std::vector<MonteCarloSummary>& rows, const std::string& first_column);
/// One summary record then one record per trial.
void write_jsonl(std::ostream& out, const MonteCarloSummary& s);

}  // namespace craterid
