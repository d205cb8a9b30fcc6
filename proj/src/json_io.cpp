#include "resolimit/json_io.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace resolimit {

using nlohmann::json;

namespace {

[[noreturn]] void bad_field(const std::string& what) {
    throw std::invalid_argument("descriptor: " + what);
}

double require_number(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number()) bad_field(std::string(key) + " must be a number");
    return j[key].get<double>();
}

double number_or(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) bad_field(std::string(key) + " must be a number");
    return j[key].get<double>();
}

}  // namespace

json psf_to_json(const Psf& psf) {
    json j;
    j["name"] = psf.name;
    j["kind"] = psf.family;
    j["B"] = psf.B;
    json params = json::object();
    if (psf.family == "gaussian") params["sigma"] = psf.sigma;
    if (psf.family == "pswf") params["tau0"] = psf.tau0;
    if (psf.amp != 1.0) params["amp"] = psf.amp;
    j["params"] = params;
    if (psf.kind == SpectrumKind::Tabulated) {
        json rows = json::array();
        for (size_t i = 0; i < psf.tab_f.size(); ++i)
            rows.push_back(json::array({psf.tab_f[i], psf.amp * psf.tab_G[i], 0.0}));
        j["spectrum"] = rows;
    }
    return j;
}

Psf psf_from_json(const json& j) {
    if (!j.is_object()) bad_field("top level must be an object");
    if (!j.contains("kind") || !j["kind"].is_string()) bad_field("kind must be a string");
    const std::string kind = j["kind"].get<std::string>();
    const double B = number_or(j, "B", 1.0);
    const json params = j.contains("params") ? j["params"] : json::object();
    if (!params.is_object()) bad_field("params must be an object");

    std::vector<double> sf, sG;
    if (j.contains("spectrum")) {
        if (!j["spectrum"].is_array()) bad_field("spectrum must be an array of [f, re, im] rows");
        for (const auto& row : j["spectrum"]) {
            if (!row.is_array() || row.size() < 2) bad_field("spectrum rows must be [f, re, im]");
            const double f = row[0].get<double>();
            const double re = row[1].get<double>();
            const double im = row.size() > 2 ? row[2].get<double>() : 0.0;
            if (std::fabs(im) > 1e-9) bad_field("complex spectra are not supported");
            sf.push_back(f);
            sG.push_back(re);
        }
    }

    Psf p;
    if (kind == "ideal" || kind == "sinc") {
        p = make_ideal_lowpass(B);
    } else if (kind == "triangular") {
        p = make_triangular_lowpass(B);
    } else if (kind == "gaussian") {
        p = make_truncated_gaussian(require_number(params, "sigma"), B);
    } else if (kind == "circular") {
        p = sf.empty() ? make_circular_lowpass(B)
                       : make_tabulated("circular", B, std::move(sf), std::move(sG), "circular");
    } else if (kind == "pswf") {
        const double tau0 = require_number(params, "tau0");
        if (sf.empty()) {
            p = make_pswf(tau0, B);
        } else {
            p = make_tabulated("pswf", B, std::move(sf), std::move(sG), "pswf");
            p.tau0 = tau0;
        }
    } else if (kind == "tabulated") {
        if (sf.empty()) bad_field("tabulated kind requires a spectrum array");
        p = make_tabulated("tabulated", B, std::move(sf), std::move(sG));
    } else {
        bad_field("unknown kind '" + kind + "'");
    }

    const double amp = number_or(params, "amp", 1.0);
    if (amp != 1.0) p = scale_amplitude(p, amp);
    if (j.contains("name")) {
        if (!j["name"].is_string()) bad_field("name must be a string");
        p.name = j["name"].get<std::string>();
    }
    return p;
}

json measure_to_json(const SpikeMeasure& mu) {
    json rows = json::array();
    for (const auto& s : mu.spikes())
        rows.push_back({{"t", s.t}, {"re", s.c.real()}, {"im", s.c.imag()}});
    return json{{"spikes", rows}};
}

SpikeMeasure measure_from_json(const json& j) {
    if (!j.is_object() || !j.contains("spikes") || !j["spikes"].is_array())
        bad_field("measure needs a spikes array");
    std::vector<Spike> spikes;
    for (const auto& row : j["spikes"]) {
        if (!row.is_object()) bad_field("spike rows must be objects");
        Spike s;
        s.t = require_number(row, "t");
        s.c = {require_number(row, "re"), number_or(row, "im", 0.0)};
        spikes.push_back(s);
    }
    return SpikeMeasure(std::move(spikes));
}

namespace {

json component_to_json(const GammaComponent& c) {
    return json{{"value", c.value},
                {"lower_bound", c.lower_bound},
                {"bisect_iters", c.bisect_iters},
                {"bracket_width", c.bracket_width},
                {"sign_changes", c.sign_changes}};
}

}  // namespace

json gamma_report_to_json(const GammaStarReport& rep) {
    return json{{"psf", rep.psf_name},
                {"B", rep.B},
                {"gamma_star", rep.gamma_star},
                {"gamma1", rep.gamma1},
                {"gamma2", rep.gamma2},
                {"gamma3", rep.gamma3},
                {"beta_range", json::array({rep.beta_min, rep.beta_max})},
                {"components",
                 json{{"gamma1", component_to_json(rep.diag1)},
                      {"gamma2", component_to_json(rep.diag2)},
                      {"gamma3", component_to_json(rep.diag3)}}}};
}

json verdict_to_json(const CertificateVerdict& v) {
    return json{{"interp_ok", v.interp_ok},
                {"extremal_ok", v.extremal_ok},
                {"nondegenerate_ok", v.nondegenerate_ok},
                {"sup_off_support", v.sup_off_support},
                {"sup_location", v.sup_location},
                {"max_interp_err", v.max_interp_err},
                {"second_derivs", v.second_derivs}};
}

json solve_result_to_json(const SolveResult& res) {
    return json{{"lambda", res.lambda},
                {"N", res.N},
                {"estimate", measure_to_json(res.estimate)},
                {"objective", res.objective},
                {"dual_gap", res.gap},
                {"iterations", res.iterations},
                {"converged", res.converged},
                {"flagged", res.flagged},
                {"objective_trace", res.objective_trace}};
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw std::invalid_argument("malformed JSON in '" + path + "': " + e.what());
    }
}

void save_json_file(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot open '" + path + "' for writing");
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed on '" + path + "'");
}

void write_modulus_csv(const TrigPolynomial& Q, int samples, std::ostream& os) {
    if (samples < 2) throw std::invalid_argument("modulus curve needs >= 2 samples");
    os << "t,abs_Q\n";
    char buf[80];
    for (int i = 0; i < samples; ++i) {
        const double t = static_cast<double>(i) / samples;
        std::snprintf(buf, sizeof buf, "%.8f,%.10f\n", t, std::abs(Q.eval(t)));
        os << buf;
    }
}

}  // namespace resolimit
