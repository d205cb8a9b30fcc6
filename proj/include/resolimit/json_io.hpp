#pragma once

#include <json.hpp>

#include <string>

#include "resolimit/certificate.hpp"
#include "resolimit/limit.hpp"
#include "resolimit/psf.hpp"
#include "resolimit/solver.hpp"

namespace resolimit {

// Descriptor layout: {"name": str, "kind": "ideal|triangular|circular|
// gaussian|pswf|tabulated", "B": float, "params": {...},
// "spectrum": [[f, re, im], ...]} with the spectrum array present for
// tabulated kinds. Malformed input throws std::invalid_argument.
nlohmann::json psf_to_json(const Psf& psf);
Psf psf_from_json(const nlohmann::json& j);

nlohmann::json measure_to_json(const SpikeMeasure& mu);
SpikeMeasure measure_from_json(const nlohmann::json& j);

nlohmann::json gamma_report_to_json(const GammaStarReport& rep);
nlohmann::json verdict_to_json(const CertificateVerdict& v);
nlohmann::json solve_result_to_json(const SolveResult& res);

nlohmann::json load_json_file(const std::string& path);
void save_json_file(const nlohmann::json& j, const std::string& path);

// t,abs_Q rows for plotting the dual polynomial.
void write_modulus_csv(const TrigPolynomial& Q, int samples, std::ostream& os);

}  // namespace resolimit
