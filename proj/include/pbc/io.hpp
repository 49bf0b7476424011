// io.hpp
//
// JSON and CSV plumbing shared by the command-line tool and the tests.
// Numbers go out with 17 significant digits; +inf is written as "inf".
#pragma once
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pbc/bounds.hpp"
#include "pbc/cgf.hpp"
#include "pbc/harness.hpp"
#include "pbc/posterior.hpp"

namespace pbc::io {

using nlohmann::json;

// Throws ConfigError carrying the parser's line/column on malformed input.
json parse_json(const std::string& text);
json read_json_file(const std::string& path);

// Non-finite values become the strings "inf", "-inf", "nan".
json number(double x);
double to_double(const json& j, const std::string& field);

// {"kind": "subgaussian", "sigma2": 0.25} and friends.
RateFunction rate_from_json(const json& j);
json rate_to_json(const RateFunction& rf);

// Accepts emp_gibbs_risk|risk, kl_div|kl, n, delta; all four are required.
BoundQuery query_from_json(const json& j);
json query_to_json(const BoundQuery& q);

json report_to_json(const BoundReport& r);

// {"n": 100, "models": [{"emp_risk", "prior", "psi": {...}, "features": {...}}]}
FiniteModelClass class_from_json(const json& j);

// {"kind": "bernoulli_ensemble", "p": [...], "coupling": "comonotone"}, etc.
Environment environment_from_json(const json& j);
json environment_to_json(const Environment& env);

std::string format_double(double x);

// One numeric column, optional header line.
std::vector<double> read_loss_csv(const std::string& path);
// Two numeric columns (loss, grad_norm2), optional header line.
std::pair<std::vector<double>, std::vector<double>> read_pairs_csv(const std::string& path);

} // namespace pbc::io
