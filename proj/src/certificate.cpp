#include "resolimit/certificate.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "resolimit/solver.hpp"

namespace resolimit {

std::pair<TrigPolynomial, VanishingDerivativeSystem> build_qv_two_spikes(
    const DiscreteAutocorrelation& K, double delta, double theta) {
    if (!(delta > 0.0) || delta > 0.5)
        throw std::invalid_argument("build_qv_two_spikes: delta must lie in (0, 1/2]");
    if (theta < 0.0 || theta > M_PI)
        throw std::invalid_argument("build_qv_two_spikes: theta must lie in [0, pi]");

    const double K0 = K.eval(0, 0.0);
    const double KD = K.eval(0, delta);
    const double K1D = K.eval(1, delta);
    const double K20 = K.eval(2, 0.0);
    const double K2D = K.eval(2, delta);

    VanishingDerivativeSystem sys;
    sys.delta = delta;
    sys.theta = theta;
    sys.M_R = {{{K0 + KD, K1D}, {K1D, -K20 + K2D}}};
    sys.M_S = {{{K0 - KD, -K1D}, {-K1D, -K20 - K2D}}};
    sys.C_R = sys.M_R[0][0] * sys.M_R[1][1] - sys.M_R[0][1] * sys.M_R[1][0];
    sys.C_S = sys.M_S[0][0] * sys.M_S[1][1] - sys.M_S[0][1] * sys.M_S[1][0];

    const double scale_R = sys.M_R[0][0] * sys.M_R[0][0] + sys.M_R[0][1] * sys.M_R[0][1] +
                           sys.M_R[1][1] * sys.M_R[1][1];
    const double scale_S = sys.M_S[0][0] * sys.M_S[0][0] + sys.M_S[0][1] * sys.M_S[0][1] +
                           sys.M_S[1][1] * sys.M_S[1][1];
    if (std::fabs(sys.C_R) <= 1e-14 * scale_R || std::fabs(sys.C_S) <= 1e-14 * scale_S)
        throw std::runtime_error(
            "build_qv_two_spikes: singular interpolation system, gain rank insufficient");

    const double ch = std::cos(0.5 * theta), sh = std::sin(0.5 * theta);
    sys.alpha_R = ch * sys.M_R[1][1] / sys.C_R;
    sys.beta_R = -ch * sys.M_R[1][0] / sys.C_R;
    sys.alpha_S = sh * sys.M_S[1][1] / sys.C_S;
    sys.beta_S = -sh * sys.M_S[1][0] / sys.C_S;

    const auto& w = K.weights();
    const int n = (K.N() - 1) / 2;
    std::vector<std::complex<double>> q(w.size());
    for (int k = -n; k <= n; ++k) {
        const double c = std::cos(M_PI * k * delta), s = std::sin(M_PI * k * delta);
        const double val = 2.0 * sys.alpha_R * c - 4.0 * M_PI * k * sys.beta_R * s +
                           2.0 * sys.alpha_S * s + 4.0 * M_PI * k * sys.beta_S * c;
        q[static_cast<size_t>(k + n)] = w[static_cast<size_t>(k + n)] * val;
    }
    TrigPolynomial Q(std::move(q));

    const std::complex<double> target = std::polar(1.0, 0.5 * theta);
    double res = 0.0;
    res = std::max(res, std::abs(Q.eval(0.5 * delta) - target));
    res = std::max(res, std::abs(Q.eval(-0.5 * delta) - std::conj(target)));
    res = std::max(res, std::abs(Q.deriv(1, 0.5 * delta)));
    res = std::max(res, std::abs(Q.deriv(1, -0.5 * delta)));
    sys.residual = res;
    return {std::move(Q), sys};
}

TrigPolynomial build_qv_multi(const DiscreteAutocorrelation& K, const SpikeMeasure& mu,
                              double* cond_out) {
    const int S = mu.S();
    if (S < 1) throw std::invalid_argument("build_qv_multi: empty measure");
    if (2 * S > K.N())
        throw std::invalid_argument("build_qv_multi: more constraints than measurements");

    // Gram matrix of the interpolation and derivative constraint vectors;
    // entries reduce to K, K', K'' at pairwise location differences.
    Eigen::MatrixXd G(2 * S, 2 * S);
    for (int i = 0; i < S; ++i) {
        const double ti = mu.spike(i).t;
        for (int j = 0; j < S; ++j) {
            const double d = ti - mu.spike(j).t;
            G(i, j) = K.eval(0, d);
            G(i, S + j) = -K.eval(1, d);
            G(S + i, j) = K.eval(1, d);
            G(S + i, S + j) = -K.eval(2, d);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("build_qv_multi: eigenvalue computation failed");
    const double emax = es.eigenvalues().cwiseAbs().maxCoeff();
    const double emin = es.eigenvalues().cwiseAbs().minCoeff();
    const double cond = (emin > 0.0) ? emax / emin : std::numeric_limits<double>::infinity();
    if (cond_out) *cond_out = cond;
    if (!(cond <= 1e12))
        throw std::runtime_error(
            "build_qv_multi: constraint Gram matrix condition number exceeds 1e12");

    Eigen::VectorXd rr = Eigen::VectorXd::Zero(2 * S), ri = Eigen::VectorXd::Zero(2 * S);
    for (int s = 0; s < S; ++s) {
        const std::complex<double> sgn = mu.spike(s).c / std::abs(mu.spike(s).c);
        rr(s) = sgn.real();
        ri(s) = sgn.imag();
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(G);
    const Eigen::VectorXd yr = ldlt.solve(rr), yi = ldlt.solve(ri);

    const auto& w = K.weights();
    const int n = (K.N() - 1) / 2;
    std::vector<std::complex<double>> q(w.size());
    for (int k = -n; k <= n; ++k) {
        std::complex<double> acc(0.0, 0.0);
        for (int s = 0; s < S; ++s) {
            const std::complex<double> y(yr(s), yi(s));
            const std::complex<double> z(yr(S + s), yi(S + s));
            const std::complex<double> phase = std::polar(1.0, -2.0 * M_PI * k * mu.spike(s).t);
            acc += (y - std::complex<double>(0.0, 2.0 * M_PI * k) * z) * phase;
        }
        q[static_cast<size_t>(k + n)] = w[static_cast<size_t>(k + n)] * acc;
    }
    return TrigPolynomial(std::move(q));
}

CertificateVerdict verify_certificate(const TrigPolynomial& Q, const SpikeMeasure& mu,
                                      double tol) {
    CertificateVerdict v;
    if (mu.empty()) throw std::invalid_argument("verify_certificate: empty measure");
    const int N = Q.N();
    const double radius = 0.25 / N;
    const double margin = 1e-6;

    double max_err = 0.0;
    for (const auto& s : mu.spikes()) {
        const std::complex<double> sgn = s.c / std::abs(s.c);
        max_err = std::max(max_err, std::abs(Q.eval(s.t) - sgn));
    }
    v.max_interp_err = max_err;
    v.interp_ok = max_err <= tol;

    std::vector<std::pair<double, double>> windows;
    for (const auto& s : mu.spikes()) windows.emplace_back(s.t, radius);
    const SupResult sup = sup_modulus(Q, windows);
    v.sup_off_support = sup.sup;
    v.sup_location = sup.argmax;

    bool windows_ok = true;
    for (const auto& s : mu.spikes()) {
        if (std::abs(Q.eval(s.t)) > 1.0 + tol) windows_ok = false;
        for (int j = -4; j <= 4 && windows_ok; ++j) {
            const double t = s.t + radius * j / 4.0;
            try {
                if (second_derivative_of_modulus(Q, t) >= 0.0) windows_ok = false;
            } catch (const std::runtime_error&) {
                windows_ok = false;  // modulus vanished, concavity not certifiable
            }
        }
    }
    v.extremal_ok = (sup.sup < 1.0 - margin) && windows_ok;

    bool all_neg = true;
    for (const auto& s : mu.spikes()) {
        double d2;
        try {
            d2 = second_derivative_of_modulus(Q, s.t);
        } catch (const std::runtime_error&) {
            d2 = std::numeric_limits<double>::quiet_NaN();
        }
        v.second_derivs.push_back(d2);
        if (!(d2 < 0.0)) all_neg = false;
    }
    v.nondegenerate_ok = all_neg && v.interp_ok && v.extremal_ok;
    return v;
}

DualVector minimal_norm_dual_approx(const Observation& obs, const GainVector& g,
                                    const std::vector<double>& lambda_seq) {
    if (lambda_seq.empty())
        throw std::invalid_argument("minimal_norm_dual_approx: empty lambda schedule");
    for (size_t i = 0; i < lambda_seq.size(); ++i) {
        if (!(lambda_seq[i] > 0.0))
            throw std::invalid_argument("minimal_norm_dual_approx: lambda must be positive");
        if (i > 0 && !(lambda_seq[i] < lambda_seq[i - 1]))
            throw std::invalid_argument("minimal_norm_dual_approx: schedule must decrease");
    }
    DualVector out;
    out.gain = g;
    Observation local = obs;
    local.gain = g;
    std::vector<std::complex<double>> prev;
    SpikeMeasure warm;
    bool have_warm = false;
    for (double lam : lambda_seq) {
        SolverConfig cfg;
        cfg.lambda = lam;
        const SolveResult res = solve(local, cfg, have_warm ? &warm : nullptr);
        warm = res.estimate;
        have_warm = true;
        const auto Ax = forward(res.estimate, g);
        std::vector<std::complex<double>> p(local.z.size());
        for (size_t i = 0; i < p.size(); ++i) p[i] = (local.z[i] - Ax[i]) / lam;
        if (!prev.empty()) {
            double dn = 0.0, nn = 0.0;
            for (size_t i = 0; i < p.size(); ++i) {
                dn += std::norm(p[i] - prev[i]);
                nn += std::norm(p[i]);
            }
            out.successive_change.push_back(std::sqrt(dn) / std::max(std::sqrt(nn), 1e-300));
        }
        out.lambdas.push_back(lam);
        prev = p;
        out.p = std::move(p);
    }
    return out;
}

}  // namespace resolimit
