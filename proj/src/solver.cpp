#include "resolimit/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

#include "resolimit/fft.hpp"

namespace resolimit {

namespace {

struct Work {
    int N = 0, n = 0;
    double lambda = 0.0;
    const std::vector<double>* g = nullptr;
    std::vector<std::complex<double>> z, r;  // data and residual z - A mu
    std::vector<double> ts;
    std::vector<std::complex<double>> cs;
    double K0 = 0.0;  // squared gain norm, the diagonal of the spike Gram
    std::vector<std::complex<double>> scratch;

    void fill_phi(double t, std::vector<std::complex<double>>& out) const {
        out.resize(g->size());
        const std::complex<double> step = std::polar(1.0, -2.0 * M_PI * t);
        std::complex<double> ph = std::polar(1.0, 2.0 * M_PI * n * t);
        for (size_t i = 0; i < g->size(); ++i) {
            out[i] = (*g)[i] * ph;
            ph *= step;
        }
    }

    double objective() const {
        double acc = 0.0;
        for (const auto& v : r) acc += std::norm(v);
        acc *= 0.5;
        for (const auto& c : cs) acc += lambda * std::abs(c);
        return acc;
    }

    TrigPolynomial residual_poly() const {
        std::vector<std::complex<double>> q(r.size());
        for (size_t i = 0; i < r.size(); ++i) q[i] = (*g)[i] * r[i] / lambda;
        return TrigPolynomial(std::move(q));
    }

    // Exact minimization over one amplitude; the penalized least squares in a
    // single complex coordinate has the closed soft-threshold solution.
    double cd_pass() {
        double max_change = 0.0;
        for (size_t s = 0; s < ts.size(); ++s) {
            fill_phi(ts[s], scratch);
            std::complex<double> a(0.0, 0.0);
            for (size_t i = 0; i < r.size(); ++i) a += std::conj(scratch[i]) * r[i];
            a += cs[s] * K0;
            std::complex<double> c_new(0.0, 0.0);
            const double amag = std::abs(a);
            if (amag > lambda) c_new = a * ((1.0 - lambda / amag) / K0);
            const std::complex<double> d = c_new - cs[s];
            if (std::abs(d) > 0.0) {
                for (size_t i = 0; i < r.size(); ++i) r[i] -= d * scratch[i];
                cs[s] = c_new;
                max_change = std::max(max_change, std::abs(d));
            }
        }
        return max_change;
    }

    void cd_run(int sweeps, double tol) {
        double scale = 1.0;
        for (const auto& c : cs) scale = std::max(scale, std::abs(c));
        for (int i = 0; i < sweeps; ++i)
            if (cd_pass() <= tol * scale) break;
    }

    // One damped Newton step on the smooth part of the objective as a
    // function of a single location.
    double newton_location_step(size_t s) {
        if (std::abs(cs[s]) == 0.0) return 0.0;
        fill_phi(ts[s], scratch);
        std::vector<std::complex<double>> rfull(r.size());
        for (size_t i = 0; i < r.size(); ++i) rfull[i] = r[i] + cs[s] * scratch[i];

        // f(t) = -Re[conj(c_s) R_s(t)] with R_s(t) = sum_k g_k rfull_k e^{i2pikt}
        auto f_at = [&](double t, double* d1, double* d2) {
            std::complex<double> v0(0.0, 0.0), v1(0.0, 0.0), v2(0.0, 0.0);
            const std::complex<double> step = std::polar(1.0, 2.0 * M_PI * t);
            std::complex<double> ph = std::polar(1.0, -2.0 * M_PI * n * t);
            for (size_t i = 0; i < rfull.size(); ++i) {
                const int k = static_cast<int>(i) - n;
                const std::complex<double> b = (*g)[i] * rfull[i] * ph;
                const std::complex<double> ik(0.0, 2.0 * M_PI * k);
                v0 += b;
                if (d1) v1 += ik * b;
                if (d2) v2 += ik * ik * b;
                ph *= step;
            }
            const std::complex<double> cc = std::conj(cs[s]);
            if (d1) *d1 = -std::real(cc * v1);
            if (d2) *d2 = -std::real(cc * v2);
            return -std::real(cc * v0);
        };
        double d1 = 0.0, d2 = 0.0;
        const double f0 = f_at(ts[s], &d1, &d2);
        double dt;
        const double cap = 0.5 / N;
        if (d2 > 0.0) dt = -d1 / d2;
        else dt = (d1 > 0.0 ? -cap : cap);
        dt = std::min(std::max(dt, -cap), cap);
        double fn = f_at(ts[s] + dt, nullptr, nullptr);
        int tries = 0;
        while (fn > f0 && tries < 10) {
            dt *= 0.5;
            fn = f_at(ts[s] + dt, nullptr, nullptr);
            ++tries;
        }
        if (fn > f0 || std::fabs(dt) < 1e-16) return 0.0;
        ts[s] = wrap_torus(ts[s] + dt);
        fill_phi(ts[s], scratch);
        for (size_t i = 0; i < r.size(); ++i) r[i] = rfull[i] - cs[s] * scratch[i];
        return std::fabs(dt);
    }

    void rebuild_residual() {
        r = z;
        for (size_t s = 0; s < ts.size(); ++s) {
            if (std::abs(cs[s]) == 0.0) continue;
            fill_phi(ts[s], scratch);
            for (size_t i = 0; i < r.size(); ++i) r[i] -= cs[s] * scratch[i];
        }
    }

    // Joint Levenberg-damped Gauss-Newton over all spike parameters at once,
    // with each amplitude in polar form (t_s, a_s, theta_s) so the penalty
    // lambda sum a_s is smooth while a_s > 0. The coordinate alternation
    // above converges only linearly once locations couple through overlapping
    // spikes; the joint step restores fast local convergence. Spikes whose
    // magnitude reaches zero are frozen at zero and skipped on the restart.
    void joint_polish(int max_iters) {
        for (int round = 0; round < 4; ++round) {
            std::vector<size_t> act;
            for (size_t s = 0; s < ts.size(); ++s)
                if (std::abs(cs[s]) > 0.0) act.push_back(s);
            if (act.empty()) return;
            const int S = static_cast<int>(act.size());
            const int P = 3 * S;
            const int M = static_cast<int>(z.size());

            Eigen::VectorXd p(P);
            for (int j = 0; j < S; ++j) {
                p[3 * j] = ts[act[static_cast<size_t>(j)]];
                p[3 * j + 1] = std::abs(cs[act[static_cast<size_t>(j)]]);
                p[3 * j + 2] = std::arg(cs[act[static_cast<size_t>(j)]]);
            }
            auto apply = [&](const Eigen::VectorXd& q) {
                for (int j = 0; j < S; ++j) {
                    ts[act[static_cast<size_t>(j)]] = wrap_torus(q[3 * j]);
                    cs[act[static_cast<size_t>(j)]] =
                        std::polar(std::max(q[3 * j + 1], 0.0), q[3 * j + 2]);
                }
                rebuild_residual();
            };

            double f_cur = objective();
            double mu = 1e-4;
            bool died = false;
            Eigen::MatrixXcd J(M, P);
            Eigen::VectorXcd rv(M);
            for (int iter = 0; iter < max_iters && !died; ++iter) {
                for (int i = 0; i < M; ++i) rv[i] = r[static_cast<size_t>(i)];
                for (int j = 0; j < S; ++j) {
                    const size_t s = act[static_cast<size_t>(j)];
                    fill_phi(ts[s], scratch);
                    const std::complex<double> c = cs[s];
                    const double a = std::abs(c);
                    const std::complex<double> u =
                        a > 0.0 ? c / a : std::complex<double>(1.0, 0.0);
                    for (int i = 0; i < M; ++i) {
                        const double k = i - n;
                        const std::complex<double> ph = scratch[static_cast<size_t>(i)];
                        const std::complex<double> dph =
                            std::complex<double>(0.0, -2.0 * M_PI * k) * ph;
                        J(i, 3 * j) = -c * dph;
                        J(i, 3 * j + 1) = -u * ph;
                        J(i, 3 * j + 2) = -std::complex<double>(0.0, 1.0) * c * ph;
                    }
                }
                Eigen::VectorXd grad = (J.adjoint() * rv).real();
                for (int j = 0; j < S; ++j) grad[3 * j + 1] += lambda;
                const Eigen::MatrixXd H = (J.adjoint() * J).real();
                const double hscale = std::max(H.trace() / P, 1e-12);

                bool accepted = false;
                for (int tries = 0; tries < 12 && !accepted; ++tries) {
                    Eigen::MatrixXd Hd = H;
                    for (int d = 0; d < P; ++d) Hd(d, d) += mu * std::max(H(d, d), hscale);
                    Eigen::VectorXd delta = Hd.ldlt().solve(-grad);
                    double tmax = 0.0;
                    for (int j = 0; j < S; ++j) tmax = std::max(tmax, std::fabs(delta[3 * j]));
                    const double cap = 0.25 / N;
                    if (tmax > cap) delta *= cap / tmax;
                    apply(p + delta);
                    const double f_new = objective();
                    if (f_new <= f_cur) {
                        accepted = true;
                        const double gain_abs = f_cur - f_new;
                        p += delta;
                        for (int j = 0; j < S; ++j)
                            if (p[3 * j + 1] <= 0.0) died = true;
                        f_cur = f_new;
                        mu = std::max(mu * 0.3, 1e-12);
                        if (delta.cwiseAbs().maxCoeff() < 1e-13 ||
                            gain_abs <= 1e-17 * std::max(1.0, f_cur))
                            iter = max_iters;  // converged
                    } else {
                        apply(p);  // restore
                        mu *= 10.0;
                        if (mu > 1e12) {
                            iter = max_iters;
                            accepted = true;  // no useful step left
                        }
                    }
                }
                if (!accepted) break;
            }
            if (!died) return;
        }
    }

    double refine(int passes, int cd_sweeps, double cd_tol) {
        double last_move = 0.0;
        for (int p = 0; p < passes; ++p) {
            last_move = 0.0;
            for (size_t s = 0; s < ts.size(); ++s)
                last_move = std::max(last_move, newton_location_step(s));
            cd_run(cd_sweeps, cd_tol);
            if (last_move < 1e-9) break;
        }
        joint_polish(30);
        return last_move;
    }

    void drop_zero_amplitudes() {
        size_t keep = 0;
        for (size_t s = 0; s < ts.size(); ++s) {
            if (std::abs(cs[s]) > 0.0) {
                ts[keep] = ts[s];
                cs[keep] = cs[s];
                ++keep;
            }
        }
        ts.resize(keep);
        cs.resize(keep);
    }

    void prune(double eps_amp) {
        double cmax = 0.0;
        for (const auto& c : cs) cmax = std::max(cmax, std::abs(c));
        if (cmax == 0.0) {
            drop_zero_amplitudes();
            return;
        }
        size_t keep = 0;
        for (size_t s = 0; s < ts.size(); ++s) {
            if (std::abs(cs[s]) >= eps_amp * cmax) {
                ts[keep] = ts[s];
                cs[keep] = cs[s];
                ++keep;
            } else {
                fill_phi(ts[s], scratch);
                for (size_t i = 0; i < r.size(); ++i) r[i] += cs[s] * scratch[i];
            }
        }
        ts.resize(keep);
        cs.resize(keep);
    }

    void merge_coincident() {
        const double tiny = 1e-12;
        for (size_t a = 0; a < ts.size(); ++a) {
            for (size_t b = a + 1; b < ts.size();) {
                if (wrap_dist(ts[a], ts[b]) < tiny) {
                    cs[a] += cs[b];
                    ts.erase(ts.begin() + static_cast<long>(b));
                    cs.erase(cs.begin() + static_cast<long>(b));
                } else {
                    ++b;
                }
            }
        }
    }
};

}  // namespace

double resolve_lambda(const Observation& obs, const SolverConfig& cfg) {
    if (cfg.lambda > 0.0) return cfg.lambda;
    if (!(cfg.lambda_rule > 0.0))
        throw std::invalid_argument("solver: lambda rule factor must be positive");
    if (!(obs.eta > 0.0))
        throw std::invalid_argument(
            "solver: lambda rule requires a recorded positive noise level");
    return cfg.lambda_rule * obs.eta;
}

SolveResult solve(const Observation& obs, const SolverConfig& cfg,
                  const SpikeMeasure* warm_start) {
    if (cfg.grid_density < 16)
        throw std::invalid_argument("solver: insertion grid density must be >= 16");
    if (cfg.max_spikes < 1 || cfg.max_outer < 1 || !(cfg.gap_tol > 0.0) ||
        !(cfg.eps_amp > 0.0 && cfg.eps_amp < 1.0))
        throw std::invalid_argument("solver: invalid configuration");
    if (obs.z.size() != static_cast<size_t>(obs.gain.N) || obs.gain.N < 1)
        throw std::invalid_argument("solver: observation does not carry a valid gain");

    Work w;
    w.N = obs.gain.N;
    w.n = obs.gain.n();
    w.g = &obs.gain.g;
    w.lambda = resolve_lambda(obs, cfg);
    w.z = obs.z;
    w.r = obs.z;
    w.K0 = obs.gain.norm_sq();
    if (!(w.K0 > 0.0)) throw std::invalid_argument("solver: zero gain vector");

    if (warm_start) {
        std::vector<std::complex<double>> phi;
        for (const auto& s : warm_start->spikes()) {
            w.ts.push_back(s.t);
            w.cs.push_back(s.c);
            w.fill_phi(s.t, phi);
            for (size_t i = 0; i < w.r.size(); ++i) w.r[i] -= s.c * phi[i];
        }
    }

    const int grid = std::max(cfg.grid_density * w.N, 256);
    SolveResult out;
    out.lambda = w.lambda;
    out.N = w.N;

    bool stalled = false;
    double prev_obj = w.objective();
    int it = 0;
    for (; it < cfg.max_outer; ++it) {
        const SupResult sup = sup_modulus(w.residual_poly(), {}, grid);
        if (sup.sup <= 1.0 + cfg.gap_tol) break;
        if (static_cast<int>(w.ts.size()) >= cfg.max_spikes) {
            stalled = true;
            break;
        }
        double nearest = 1.0;
        for (double t : w.ts) nearest = std::min(nearest, wrap_dist(t, sup.argmax));
        if (w.ts.empty() || nearest > 1e-3 / w.N) {
            w.ts.push_back(sup.argmax);
            w.cs.push_back(std::complex<double>(0.0, 0.0));
        }
        w.cd_run(cfg.cd_iters, cfg.cd_tol);
        w.refine(cfg.refine_iters, 8, cfg.cd_tol);
        out.objective_trace.push_back(w.objective());
        w.drop_zero_amplitudes();
        const double obj = out.objective_trace.back();
        if (prev_obj - obj < 1e-14 * std::max(1.0, std::fabs(obj)) && !w.ts.empty()) {
            stalled = true;
            ++it;
            break;
        }
        prev_obj = obj;
    }
    if (it >= cfg.max_outer) stalled = true;

    // Exit sequence: polish, prune the tail amplitudes, polish again so the
    // dual stays feasible (removing an eps spike shifts sup|Q| by up to
    // K0 eps / lambda if the amplitudes are not re-fit), then settle the
    // locations.
    w.cd_run(cfg.cd_iters, cfg.cd_tol);
    w.prune(cfg.eps_amp);
    w.cd_run(cfg.cd_iters, cfg.cd_tol);
    w.refine(40, 8, cfg.cd_tol);
    w.drop_zero_amplitudes();
    w.merge_coincident();
    w.drop_zero_amplitudes();

    std::vector<Spike> spikes;
    for (size_t s = 0; s < w.ts.size(); ++s) spikes.push_back({w.ts[s], w.cs[s]});
    out.estimate = SpikeMeasure(std::move(spikes));
    out.dual = w.residual_poly();
    const SupResult final_sup = sup_modulus(out.dual, {}, grid);
    out.gap = std::max(0.0, final_sup.sup - 1.0);
    out.objective = w.objective();
    out.iterations = it;
    out.converged = out.gap <= cfg.gap_tol;
    out.flagged = stalled && !out.converged;
    return out;
}

StabilityReport classify_support_stability(const SolveResult& result, const SpikeMeasure& truth,
                                           const StabilityConfig& cfg) {
    if (result.N < 1) throw std::invalid_argument("classify: result carries no grid size");
    StabilityReport rep;
    const double rho = cfg.merge_radius_over_N / result.N;

    struct Cluster {
        double t = 0.0;
        std::complex<double> c{0.0, 0.0};
    };
    std::vector<Cluster> clusters;
    {
        std::vector<Spike> sp = result.estimate.spikes();
        std::sort(sp.begin(), sp.end(), [](const Spike& a, const Spike& b) { return a.t < b.t; });
        std::vector<std::vector<Spike>> groups;
        for (const auto& s : sp) {
            if (!groups.empty() && wrap_dist(groups.back().back().t, s.t) <= rho)
                groups.back().push_back(s);
            else
                groups.push_back({s});
        }
        if (groups.size() > 1 &&
            wrap_dist(groups.back().back().t, groups.front().front().t) <= rho) {
            for (auto& s : groups.front()) groups.back().push_back(s);
            groups.erase(groups.begin());
        }
        for (const auto& grp : groups) {
            Cluster cl;
            std::complex<double> dir(0.0, 0.0);
            for (const auto& s : grp) {
                cl.c += s.c;
                dir += std::abs(s.c) * std::polar(1.0, 2.0 * M_PI * s.t);
            }
            // amplitude-weighted circular mean keeps seam-straddling clusters sane
            cl.t = wrap_torus(std::arg(dir) / (2.0 * M_PI));
            clusters.push_back(cl);
        }
    }
    rep.merged_count = static_cast<int>(clusters.size());

    const int S = truth.S();
    rep.matched.assign(static_cast<size_t>(S), -1);
    rep.loc_errors.assign(static_cast<size_t>(S), std::numeric_limits<double>::infinity());
    rep.amp_errors.assign(static_cast<size_t>(S), std::numeric_limits<double>::infinity());

    struct Pair {
        double d;
        int s, m;
    };
    std::vector<Pair> pairs;
    for (int s = 0; s < S; ++s)
        for (int m = 0; m < rep.merged_count; ++m)
            pairs.push_back({wrap_dist(truth.spike(s).t, clusters[static_cast<size_t>(m)].t), s, m});
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.d < b.d; });
    std::vector<char> used(static_cast<size_t>(rep.merged_count), 0);
    for (const auto& p : pairs) {
        if (rep.matched[static_cast<size_t>(p.s)] >= 0 || used[static_cast<size_t>(p.m)]) continue;
        rep.matched[static_cast<size_t>(p.s)] = p.m;
        used[static_cast<size_t>(p.m)] = 1;
        rep.loc_errors[static_cast<size_t>(p.s)] = p.d;
        rep.amp_errors[static_cast<size_t>(p.s)] =
            std::abs(clusters[static_cast<size_t>(p.m)].c - truth.spike(p.s).c);
    }

    const double tol = cfg.success_radius_over_N / result.N;
    bool ok = rep.merged_count == S;
    for (int s = 0; s < S && ok; ++s)
        ok = rep.loc_errors[static_cast<size_t>(s)] < tol;
    rep.success = ok;
    return rep;
}

}  // namespace resolimit
