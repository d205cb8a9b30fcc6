#include "resolimit/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include "resolimit/autocorr.hpp"
#include "resolimit/certificate.hpp"
#include "resolimit/json_io.hpp"
#include "resolimit/limit.hpp"
#include "resolimit/measure.hpp"
#include "resolimit/psf.hpp"
#include "resolimit/solver.hpp"
#include "resolimit/sweep.hpp"

namespace resolimit {

namespace {

using nlohmann::json;

double parse_double_field(const std::string& s, const char* field) {
    try {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument(std::string(field) + ": cannot parse '" + s + "' as a number");
    }
}

Psf parse_psf_arg(const std::string& s) {
    if (s == "sinc" || s == "ideal") return make_ideal_lowpass();
    if (s == "triangular") return make_triangular_lowpass();
    if (s == "circular") return make_circular_lowpass();
    if (s.rfind("gaussian:", 0) == 0)
        return make_truncated_gaussian(parse_double_field(s.substr(9), "--psf gaussian sigma"));
    if (s.rfind("pswf:", 0) == 0)
        return make_pswf(parse_double_field(s.substr(5), "--psf pswf tau0"));
    return psf_from_json(load_json_file(s));
}

double parse_theta(const std::string& s) {
    if (s == "pi") return M_PI;
    return parse_double_field(s, "--theta");
}

// lo:step:hi, or a single value
std::vector<double> parse_grid(const std::string& s, const char* field) {
    const size_t c1 = s.find(':');
    if (c1 == std::string::npos) return {parse_double_field(s, field)};
    const size_t c2 = s.find(':', c1 + 1);
    if (c2 == std::string::npos)
        throw std::invalid_argument(std::string(field) + ": expected lo:step:hi, got '" + s + "'");
    const double lo = parse_double_field(s.substr(0, c1), field);
    const double step = parse_double_field(s.substr(c1 + 1, c2 - c1 - 1), field);
    const double hi = parse_double_field(s.substr(c2 + 1), field);
    return separation_range(lo, step, hi);
}

std::vector<int> parse_int_list(const std::string& s, const char* field) {
    std::vector<int> out;
    size_t pos = 0;
    while (pos <= s.size()) {
        const size_t comma = std::min(s.find(',', pos), s.size());
        out.push_back(
            static_cast<int>(parse_double_field(s.substr(pos, comma - pos), field) + 0.5));
        pos = comma + 1;
    }
    if (out.empty()) throw std::invalid_argument(std::string(field) + ": empty list");
    return out;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::invalid_argument("cannot open '" + path + "' for writing");
    return os;
}

std::string sidecar_csv_path(const std::string& json_path) {
    const size_t dot = json_path.rfind('.');
    if (dot == std::string::npos || json_path.substr(dot) != ".json") return json_path + ".csv";
    return json_path.substr(0, dot) + ".csv";
}

int effective_threads(int flag_value) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("RESOLIMIT_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 0;  // resolved to all logical cores downstream
}

}  // namespace

int cli_main(int argc, char** argv) {
    CLI::App app{"stable resolution limits and dual certificates for sparse spike deconvolution"};
    app.require_subcommand(1);
    int threads_flag = 0;
    app.add_option("--threads", threads_flag, "worker threads (default: all logical cores)");

    // Every default lives in the initializer of a subcommand-specific
    // variable. Binding one variable to options of several subcommands and
    // setting defaults through the parser would leak the last registered
    // default into every other subcommand, since the assignment happens at
    // registration time, not at parse time.
    std::string psf_arg, measure_path, theta_arg = "pi";
    std::string out_psf = "psf.json", out_conv, out_report = "report.json";
    std::string out_curve = "curve.csv", out_verdict = "verdict.json";
    std::string out_verdict_multi = "verdict.json", out_result = "result.json";
    std::string out_sweep = "sweep.csv";
    std::string n_list_arg = "51,101,201", tau_grid_arg = "0:0.01:10";
    std::string sep_grid_arg = "0.8:0.05:2.0";
    int N = 101, ell = 0, trials = 200, K_max = 64, S = 4, curve_samples = 2048;
    double tau = 0.0, beta = 0.0, sep = 0.0;
    double snr_solve = std::numeric_limits<double>::infinity(), snr_sweep = 60.0;
    double lambda = 0.0, lambda_rule = 0.1, verify_tol = 1e-8, far_sep = 5.0;
    double gamma_ref = std::numeric_limits<double>::quiet_NaN();
    uint64_t seed_solve = 7, seed_sweep = 42;
    SearchConfig search;
    std::string scenario_arg = "two";

    auto* psf_cmd = app.add_subcommand("psf", "PSF catalog utilities");
    psf_cmd->require_subcommand(1);
    auto* psf_export = psf_cmd->add_subcommand("export", "write a PSF descriptor file");
    psf_export->add_option("--name", psf_arg, "catalog name or descriptor file")->required();
    psf_export->add_option("--out", out_psf, "output path");
    psf_export->callback([&] {
        const Psf p = parse_psf_arg(psf_arg);
        save_json_file(psf_to_json(p), out_psf);
        std::cout << "wrote " << out_psf << " (" << p.name << ", B=" << p.B << ")\n";
    });

    auto* ac_cmd = app.add_subcommand("autocorr", "autocorrelation of the PSF power spectrum");
    ac_cmd->require_subcommand(1);
    auto* ac_eval = ac_cmd->add_subcommand("eval", "evaluate kappa^(l)(tau)");
    ac_eval->add_option("--psf", psf_arg)->required();
    ac_eval->add_option("--l,--ell", ell, "derivative order 0..3");
    ac_eval->add_option("--tau", tau)->required();
    ac_eval->callback([&] {
        if (ell < 0 || ell > 3) throw std::invalid_argument("--l: order must be in 0..3");
        const Autocorrelation ac = build_autocorrelation(parse_psf_arg(psf_arg));
        char buf[96];
        std::snprintf(buf, sizeof buf, "kappa^(%d)(%.10g) = %.12g\n", ell, tau, ac.eval(ell, tau));
        std::cout << buf;
    });
    auto* ac_conv =
        ac_cmd->add_subcommand("convergence", "sup error of the scaled discrete autocorrelation");
    ac_conv->add_option("--psf", psf_arg)->required();
    ac_conv->add_option("--N", n_list_arg, "comma-separated sample counts");
    ac_conv->add_option("--out", out_conv, "CSV output path (default: stdout)");
    ac_conv->callback([&] {
        const Autocorrelation ac = build_autocorrelation(parse_psf_arg(psf_arg));
        const auto rows = check_convergence(ac, parse_int_list(n_list_arg, "--N"));
        std::string csv = "N,l,sup_error\n";
        char buf[80];
        for (const auto& row : rows)
            for (int l = 0; l < 4; ++l) {
                std::snprintf(buf, sizeof buf, "%d,%d,%.10e\n", row.N, l, row.sup_err[l]);
                csv += buf;
            }
        if (out_conv.empty()) {
            std::cout << csv;
        } else {
            open_out(out_conv) << csv;
            std::cout << "wrote " << out_conv << "\n";
        }
    });
    auto* ac_reg = ac_cmd->add_subcommand("regularity", "aliasing sums of the sampled kernel");
    ac_reg->add_option("--psf", psf_arg)->required();
    ac_reg->add_option("--N", N)->required();
    ac_reg->add_option("--K", K_max, "alias summation cutoff");
    ac_reg->callback([&] {
        const Autocorrelation ac = build_autocorrelation(parse_psf_arg(psf_arg));
        const RegularityReport rep = compute_regularity(ac, N, K_max);
        char buf[96];
        for (int l = 0; l < 4; ++l) {
            std::snprintf(buf, sizeof buf, "l=%d  S=%.6e  tail<=%.2e\n", l, rep.S[l],
                          rep.tail_bound[l]);
            std::cout << buf;
        }
    });

    auto* gs = app.add_subcommand("gamma-star", "stable resolution limit of a PSF");
    gs->add_option("--psf", psf_arg)->required();
    gs->add_option("--beta-min", search.beta_min);
    gs->add_option("--beta-max", search.beta_max);
    gs->add_option("--beta-step", search.beta_step);
    gs->add_option("--tol", search.bisect_tol, "bisection tolerance on beta");
    gs->add_option("--out", out_report)->capture_default_str();
    gs->callback([&] {
        search.threads = effective_threads(threads_flag);
        const GammaStarReport rep = compute_gamma_star(parse_psf_arg(psf_arg), search);
        save_json_file(gamma_report_to_json(rep), out_report);
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "gamma_star = %.5f  (gamma1 %.5f%s, gamma2 %.5f%s, gamma3 %.5f%s)\n",
                      rep.gamma_star, rep.gamma1, rep.diag1.lower_bound ? "-" : "", rep.gamma2,
                      rep.diag2.lower_bound ? "-" : "", rep.gamma3,
                      rep.diag3.lower_bound ? "-" : "");
        std::cout << buf << "wrote " << out_report << "\n";
    });

    auto* lc = app.add_subcommand("limit-cert", "limit interpolation certificate");
    lc->require_subcommand(1);
    auto* lc_eval = lc->add_subcommand("eval", "tabulate the limit certificate components");
    lc_eval->add_option("--psf", psf_arg)->required();
    lc_eval->add_option("--beta", beta)->required();
    lc_eval->add_option("--theta", theta_arg);
    lc_eval->add_option("--tau-grid", tau_grid_arg)->capture_default_str();
    lc_eval->add_option("--out", out_curve)->capture_default_str();
    lc_eval->callback([&] {
        const double theta = parse_theta(theta_arg);
        const std::vector<double> taus = parse_grid(tau_grid_arg, "--tau-grid");
        const Autocorrelation ac = build_autocorrelation(parse_psf_arg(psf_arg));
        const LimitCertificate cert = build_limit_certificate(ac, beta, theta, taus.back() + 0.1);
        auto os = open_out(out_curve);
        os << "tau,r,s,abs_QV\n";
        char buf[120];
        for (double t : taus) {
            std::snprintf(buf, sizeof buf, "%.6f,%.10e,%.10e,%.10e\n", t, cert.r(t), cert.s(t),
                          cert.modulus(t));
            os << buf;
        }
        std::cout << "wrote " << out_curve << "\n";
    });

    auto* cert_cmd = app.add_subcommand("certify", "two-spike vanishing-derivative certificate");
    cert_cmd->add_option("--psf", psf_arg)->required();
    cert_cmd->add_option("--N", N);
    cert_cmd->add_option("--sep", sep, "separation in units of 1/N")->required();
    cert_cmd->add_option("--theta", theta_arg);
    cert_cmd->add_option("--tol", verify_tol);
    cert_cmd->add_option("--out", out_verdict)->capture_default_str();
    cert_cmd->callback([&] {
        const double theta = parse_theta(theta_arg);
        if (!(sep > 0.0)) throw std::invalid_argument("--sep: must be positive");
        const double delta = sep / N;
        const GainVector gain = sample_gain(parse_psf_arg(psf_arg), N);
        const DiscreteAutocorrelation K = build_discrete_autocorrelation(gain);
        const auto [Q, sys] = build_qv_two_spikes(K, delta, theta);
        const SpikeMeasure mu = canonical_measure(delta, theta);
        const CertificateVerdict v = verify_certificate(Q, mu, verify_tol);
        json j = verdict_to_json(v);
        j["system"] = {{"C_R", sys.C_R}, {"C_S", sys.C_S}, {"residual", sys.residual}};
        save_json_file(j, out_verdict);
        char buf[120];
        std::snprintf(buf, sizeof buf, "%s  sup_off_support=%.6f\n",
                      v.nondegenerate_ok ? "non-degenerate" : "DEGENERATE", v.sup_off_support);
        std::cout << buf << "wrote " << out_verdict << "\n";
    });

    auto* certm = app.add_subcommand("certify-multi", "multi-spike interpolation certificate");
    certm->add_option("--psf", psf_arg)->required();
    certm->add_option("--N", N);
    certm->add_option("--measure", measure_path, "truth measure JSON")->required();
    certm->add_option("--tol", verify_tol);
    certm->add_option("--out", out_verdict_multi)->capture_default_str();
    certm->callback([&] {
        const SpikeMeasure mu = measure_from_json(load_json_file(measure_path));
        const GainVector gain = sample_gain(parse_psf_arg(psf_arg), N);
        const DiscreteAutocorrelation K = build_discrete_autocorrelation(gain);
        double cond = 0.0;
        const TrigPolynomial Q = build_qv_multi(K, mu, &cond);
        const CertificateVerdict v = verify_certificate(Q, mu, verify_tol);
        json j = verdict_to_json(v);
        j["gram_condition"] = cond;
        save_json_file(j, out_verdict_multi);
        char buf[140];
        std::snprintf(buf, sizeof buf, "%s  sup_off_support=%.6f  gram_condition=%.3e\n",
                      v.nondegenerate_ok ? "non-degenerate" : "DEGENERATE", v.sup_off_support,
                      cond);
        std::cout << buf << "wrote " << out_verdict_multi << "\n";
    });

    auto* solve_cmd = app.add_subcommand("solve", "sparse spike recovery on one instance");
    solve_cmd->add_option("--psf", psf_arg)->required();
    solve_cmd->add_option("--N", N);
    solve_cmd->add_option("--measure", measure_path, "truth measure JSON")->required();
    solve_cmd->add_option("--snr", snr_solve, "SNR in dB (default: noiseless)");
    solve_cmd->add_option("--seed", seed_solve);
    solve_cmd->add_option("--lambda", lambda, "absolute regularization weight");
    solve_cmd->add_option("--lambda-rule", lambda_rule, "weight as a fraction of noise norm");
    solve_cmd->add_option("--curve-samples", curve_samples);
    solve_cmd->add_option("--out", out_result)->capture_default_str();
    solve_cmd->callback([&] {
        const SpikeMeasure truth = measure_from_json(load_json_file(measure_path));
        const GainVector gain = sample_gain(parse_psf_arg(psf_arg), N);
        const Observation obs = observe(truth, gain, snr_solve, seed_solve);
        SolverConfig cfg;
        cfg.lambda = lambda;
        cfg.lambda_rule = lambda_rule;
        const SolveResult res = solve(obs, cfg);
        const StabilityReport stab = classify_support_stability(res, truth);
        json j = solve_result_to_json(res);
        j["support_stable"] = stab.success;
        save_json_file(j, out_result);
        const std::string curve = sidecar_csv_path(out_result);
        {
            auto os = open_out(curve);
            write_modulus_csv(res.dual, curve_samples, os);
        }
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "spikes=%d  dual_gap=%.3e  converged=%s  support_stable=%s\n",
                      res.estimate.S(), res.gap, res.converged ? "yes" : "no",
                      stab.success ? "yes" : "no");
        std::cout << buf << "wrote " << out_result << " and " << curve << "\n";
    });

    auto* sweep_cmd = app.add_subcommand("sweep", "Monte-Carlo success-rate sweep");
    sweep_cmd->add_option("--psf", psf_arg)->required();
    sweep_cmd->add_option("--N", N);
    sweep_cmd->add_option("--snr", snr_sweep, "SNR in dB")->capture_default_str();
    sweep_cmd->add_option("--trials", trials);
    sweep_cmd->add_option("--sep", sep_grid_arg, "separation grid lo:step:hi in units of 1/N")
        ->capture_default_str();
    sweep_cmd->add_option("--scenario", scenario_arg, "two | multi");
    sweep_cmd->add_option("--theta", theta_arg, "pi | uniform | angle in radians");
    sweep_cmd->add_option("--S", S, "total spikes for the multi scenario");
    sweep_cmd->add_option("--far-sep", far_sep, "far-cluster spacing in units of 1/N");
    sweep_cmd->add_option("--seed", seed_sweep)->capture_default_str();
    sweep_cmd->add_option("--lambda-rule", lambda_rule);
    sweep_cmd->add_option("--gamma-ref", gamma_ref, "reference resolution limit for the CSV");
    sweep_cmd->add_option("--out", out_sweep)->capture_default_str();
    sweep_cmd->callback([&] {
        SweepSpec spec;
        spec.psf = parse_psf_arg(psf_arg);
        spec.N = N;
        spec.snr_db = snr_sweep;
        spec.trials = trials;
        spec.n_delta = parse_grid(sep_grid_arg, "--sep");
        if (scenario_arg == "two") {
            spec.scenario = Scenario::TwoSpike;
        } else if (scenario_arg == "multi") {
            spec.scenario = Scenario::MultiSpike;
        } else {
            throw std::invalid_argument("--scenario: expected 'two' or 'multi'");
        }
        if (theta_arg == "uniform") {
            spec.theta_mode = ThetaMode::Uniform;
        } else {
            spec.theta_mode = ThetaMode::Fixed;
            spec.theta = parse_theta(theta_arg);
        }
        spec.S = S;
        spec.far_sep_over_N = far_sep;
        spec.base_seed = seed_sweep;
        spec.lambda_rule = lambda_rule;
        spec.gamma_star_ref = gamma_ref;
        spec.threads = effective_threads(threads_flag);
        const SweepResult result = run_sweep(spec);
        {
            auto os = open_out(out_sweep);
            write_sweep_csv(result, os);
        }
        if (result.transition.found) {
            char buf[120];
            std::snprintf(buf, sizeof buf, "transition at N*delta = %.4f%s\n",
                          result.transition.n_delta,
                          result.transition.lower_bound ? " (lower bound: grid minimum)" : "");
            std::cout << buf;
        } else {
            std::cout << "no transition on the separation grid\n";
        }
        std::cout << "wrote " << out_sweep << "\n";
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace resolimit
