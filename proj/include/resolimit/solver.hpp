#pragma once

#include <vector>

#include "resolimit/measure.hpp"
#include "resolimit/trigpoly.hpp"

namespace resolimit {

struct SolverConfig {
    double lambda = 0.0;        // explicit regularization; when 0, use the rule below
    double lambda_rule = 0.1;   // lambda = lambda_rule * recorded noise norm
    int max_spikes = 20;
    int grid_density = 64;      // insertion grid points per 1/N
    int refine_iters = 40;      // joint location/amplitude refinement passes
    double gap_tol = 1e-4;      // allowed sup|Q_hat| - 1 at exit
    double eps_amp = 1e-3;      // prune threshold relative to the largest amplitude
    int max_outer = 60;
    int cd_iters = 200;         // amplitude sweeps per outer iteration
    double cd_tol = 1e-12;
};

struct SolveResult {
    SpikeMeasure estimate;
    TrigPolynomial dual;  // adjoint((z - A mu)/lambda)
    double objective = 0.0;
    double gap = 0.0;     // max(0, sup|dual| - 1)
    double lambda = 0.0;
    int N = 0;
    int iterations = 0;
    bool converged = false;
    bool flagged = false;  // exited without meeting the gap tolerance
    std::vector<double> objective_trace;
};

double resolve_lambda(const Observation& obs, const SolverConfig& cfg);

SolveResult solve(const Observation& obs, const SolverConfig& cfg,
                  const SpikeMeasure* warm_start = nullptr);

struct StabilityConfig {
    double merge_radius_over_N = 0.1;    // cluster radius
    double success_radius_over_N = 0.5;  // per-spike matching tolerance
};

struct StabilityReport {
    bool success = false;
    int merged_count = 0;
    std::vector<int> matched;        // truth index -> merged cluster index, -1 if none
    std::vector<double> loc_errors;  // wrap distance per truth spike
    std::vector<double> amp_errors;  // amplitude deviation per truth spike
};

StabilityReport classify_support_stability(const SolveResult& result, const SpikeMeasure& truth,
                                           const StabilityConfig& cfg = {});

}  // namespace resolimit
