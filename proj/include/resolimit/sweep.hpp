#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <vector>

#include "resolimit/psf.hpp"
#include "resolimit/rng.hpp"
#include "resolimit/solver.hpp"

namespace resolimit {

enum class Scenario { TwoSpike, MultiSpike };
enum class ThetaMode { Fixed, Uniform };

// Monte-Carlo sweep over the separation grid. Per-trial seeds are derived
// from (base_seed, separation index, trial index), so serial and parallel
// runs aggregate to identical results.
struct SweepSpec {
    Psf psf;
    int N = 101;
    double snr_db = 60.0;
    int trials = 200;
    std::vector<double> n_delta;  // separation grid in units of 1/N, strictly increasing

    Scenario scenario = Scenario::TwoSpike;
    ThetaMode theta_mode = ThetaMode::Fixed;
    double theta = M_PI;        // used when theta_mode == Fixed
    int S = 4;                  // total spike count for the multi-spike scenario
    double far_sep_over_N = 5.0;

    uint64_t base_seed = 42;
    double lambda_rule = 0.1;
    double gamma_star_ref = std::numeric_limits<double>::quiet_NaN();
    int threads = 0;  // 0 = all logical cores
};

struct SweepPoint {
    double n_delta = 0.0;
    int trials = 0;
    int successes = 0;
    int solver_failures = 0;  // thrown trials, counted as failures
    double rate = 0.0;
    double mean_loc_err = std::numeric_limits<double>::quiet_NaN();  // over successes
};

struct TransitionEstimate {
    bool found = false;
    bool lower_bound = false;  // rate already >= threshold at the grid minimum
    double n_delta = std::numeric_limits<double>::quiet_NaN();
};

struct SweepResult {
    std::vector<SweepPoint> points;
    TransitionEstimate transition;
    double gamma_star_ref = std::numeric_limits<double>::quiet_NaN();
};

SweepResult run_sweep(const SweepSpec& spec);

// Smallest separation where the success rate crosses 0.95. Crossings inside
// a graded cell are linearly interpolated; a bare 0 -> 1 jump has no
// statistical support for interpolation, so the upper grid point is
// returned. Rate already above threshold at the grid minimum sets
// lower_bound; no crossing at all leaves found == false.
TransitionEstimate locate_transition(const SweepResult& result);

// Columns: n_delta,trials,successes,rate,mean_loc_err,gamma_star_ref.
void write_sweep_csv(const SweepResult& result, std::ostream& os);

// Expands lo:step:hi (inclusive endpoints, tolerant of roundoff at hi).
std::vector<double> separation_range(double lo, double step, double hi);

// Truth measure for one trial; exposed so tests can pin the scenarios.
SpikeMeasure make_trial_truth(const SweepSpec& spec, double n_delta, Rng& rng);

}  // namespace resolimit
