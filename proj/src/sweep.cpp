#include "resolimit/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "resolimit/parallel.hpp"

namespace resolimit {

std::vector<double> separation_range(double lo, double step, double hi) {
    if (!(step > 0.0) || !(hi >= lo))
        throw std::invalid_argument("separation range: need lo <= hi and step > 0");
    std::vector<double> out;
    const int count = static_cast<int>(std::floor((hi - lo) / step + 0.5)) + 1;
    for (int i = 0; i < count; ++i) {
        const double v = lo + i * step;
        if (v > hi + 0.25 * step) break;
        out.push_back(v);
    }
    return out;
}

SpikeMeasure make_trial_truth(const SweepSpec& spec, double n_delta, Rng& rng) {
    const double delta = n_delta / spec.N;
    if (spec.scenario == Scenario::TwoSpike) {
        double theta = spec.theta;
        if (spec.theta_mode == ThetaMode::Uniform) theta = M_PI * rng.uniform();
        return canonical_measure(delta, theta);
    }
    if (spec.S < 3) throw std::invalid_argument("sweep: multi-spike scenario needs S >= 3");
    std::vector<Spike> spikes;
    spikes.push_back({-0.5 * delta, {1.0, 0.0}});
    spikes.push_back({+0.5 * delta, {-1.0, 0.0}});
    // far cluster centered opposite the close pair, spaced far_sep apart
    const int m = spec.S - 2;
    const double far_sep = spec.far_sep_over_N / spec.N;
    const double start = 0.5 - 0.5 * far_sep * (m - 1);
    for (int j = 0; j < m; ++j) {
        const double phase = 2.0 * M_PI * rng.uniform();
        spikes.push_back({start + j * far_sep, std::polar(1.0, phase)});
    }
    return SpikeMeasure(std::move(spikes));
}

SweepResult run_sweep(const SweepSpec& spec) {
    if (spec.trials < 1) throw std::invalid_argument("sweep: trials must be >= 1");
    if (spec.n_delta.empty()) throw std::invalid_argument("sweep: empty separation grid");
    for (size_t i = 1; i < spec.n_delta.size(); ++i)
        if (!(spec.n_delta[i] > spec.n_delta[i - 1]))
            throw std::invalid_argument("sweep: separation grid must be strictly increasing");
    if (!(spec.lambda_rule > 0.0))
        throw std::invalid_argument("sweep: lambda rule factor must be positive");

    const GainVector gain = sample_gain(spec.psf, spec.N);
    const size_t n_sep = spec.n_delta.size();
    const size_t n_jobs = n_sep * static_cast<size_t>(spec.trials);

    struct TrialOutcome {
        char success = 0;
        char failed = 0;  // solver threw
        double loc_err = 0.0;
    };
    std::vector<TrialOutcome> outcomes(n_jobs);

    parallel_for(n_jobs, spec.threads, [&](size_t job) {
        const size_t si = job / static_cast<size_t>(spec.trials);
        const size_t trial = job % static_cast<size_t>(spec.trials);
        Rng rng(seed_chain(spec.base_seed, si, trial));
        TrialOutcome& out = outcomes[job];
        try {
            const SpikeMeasure truth = make_trial_truth(spec, spec.n_delta[si], rng);
            const std::vector<std::complex<double>> x = forward(truth, gain);
            Observation obs = add_noise(x, gain, spec.snr_db, rng.next_u64());
            SolverConfig cfg;
            cfg.lambda_rule = spec.lambda_rule;
            const SolveResult sol = solve(obs, cfg);
            const StabilityReport rep = classify_support_stability(sol, truth);
            if (rep.success) {
                out.success = 1;
                double acc = 0.0;
                for (double e : rep.loc_errors) acc += e;
                out.loc_err = acc / static_cast<double>(rep.loc_errors.size());
            }
        } catch (const std::exception&) {
            out.failed = 1;
        }
    });

    SweepResult result;
    result.gamma_star_ref = spec.gamma_star_ref;
    for (size_t si = 0; si < n_sep; ++si) {
        SweepPoint pt;
        pt.n_delta = spec.n_delta[si];
        pt.trials = spec.trials;
        double err_acc = 0.0;
        for (int t = 0; t < spec.trials; ++t) {
            const TrialOutcome& out = outcomes[si * static_cast<size_t>(spec.trials) +
                                               static_cast<size_t>(t)];
            if (out.success) {
                ++pt.successes;
                err_acc += out.loc_err;
            }
            if (out.failed) ++pt.solver_failures;
        }
        pt.rate = static_cast<double>(pt.successes) / spec.trials;
        if (pt.successes > 0) pt.mean_loc_err = err_acc / pt.successes;
        result.points.push_back(pt);
    }
    result.transition = locate_transition(result);
    return result;
}

TransitionEstimate locate_transition(const SweepResult& result) {
    const double threshold = 0.95;
    TransitionEstimate est;
    const auto& pts = result.points;
    size_t i = 0;
    while (i < pts.size() && pts[i].rate < threshold) ++i;
    if (i == pts.size()) return est;  // never crosses
    est.found = true;
    if (i == 0) {
        est.lower_bound = true;
        est.n_delta = pts[0].n_delta;
        return est;
    }
    const double r0 = pts[i - 1].rate, r1 = pts[i].rate;
    if (r0 <= 0.0) {
        est.n_delta = pts[i].n_delta;  // bare jump, no support for interpolation
    } else {
        const double f = (threshold - r0) / (r1 - r0);
        est.n_delta = pts[i - 1].n_delta + f * (pts[i].n_delta - pts[i - 1].n_delta);
    }
    return est;
}

namespace {

void append_double(std::string& line, double v) {
    char buf[64];
    if (std::isnan(v))
        std::snprintf(buf, sizeof buf, "nan");
    else
        std::snprintf(buf, sizeof buf, "%.6f", v);
    line += buf;
}

}  // namespace

void write_sweep_csv(const SweepResult& result, std::ostream& os) {
    os << "n_delta,trials,successes,rate,mean_loc_err,gamma_star_ref\n";
    for (const auto& pt : result.points) {
        std::string line;
        append_double(line, pt.n_delta);
        char mid[64];
        std::snprintf(mid, sizeof mid, ",%d,%d,", pt.trials, pt.successes);
        line += mid;
        append_double(line, pt.rate);
        line += ',';
        append_double(line, pt.mean_loc_err);
        line += ',';
        append_double(line, result.gamma_star_ref);
        line += '\n';
        os << line;
    }
}

}  // namespace resolimit
