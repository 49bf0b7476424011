#include "pbc/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pbc/errors.hpp"

namespace pbc::io {

namespace {

const json& require(const json& j, const std::string& field) {
    if (!j.is_object()) throw ConfigError("expected a JSON object holding '" + field + "'");
    const auto it = j.find(field);
    if (it == j.end()) throw ConfigError("missing field '" + field + "'");
    return *it;
}

// First key present among the aliases, or nullptr.
const json* find_any(const json& j, std::initializer_list<const char*> keys) {
    for (const char* k : keys) {
        const auto it = j.find(k);
        if (it != j.end()) return &*it;
    }
    return nullptr;
}

double field_double(const json& j, std::initializer_list<const char*> keys) {
    const json* v = find_any(j, keys);
    if (!v) throw ConfigError("missing field '" + std::string(*keys.begin()) + "'");
    return to_double(*v, *keys.begin());
}

std::vector<double> double_array(const json& j, const std::string& field) {
    if (!j.is_array()) throw ConfigError("field '" + field + "' must be an array");
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& v : j) out.push_back(to_double(v, field));
    return out;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Splits a CSV line on commas, trimming blanks.
std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    return out;
}

bool parse_cell(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

std::vector<std::vector<double>> read_columns(const std::string& path, std::size_t columns) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::vector<std::vector<double>> out(columns);
    std::string line;
    std::size_t lineno = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto cells = split(line);
        std::vector<double> row(columns);
        bool ok = cells.size() >= columns;
        for (std::size_t c = 0; ok && c < columns; ++c) ok = parse_cell(cells[c], row[c]);
        if (!ok) {
            if (first) {  // header
                first = false;
                continue;
            }
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected " +
                              std::to_string(columns) + " numeric column(s)");
        }
        first = false;
        for (std::size_t c = 0; c < columns; ++c) out[c].push_back(row[c]);
    }
    if (out[0].empty()) throw ConfigError(path + ": no data rows");
    return out;
}

} // namespace

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
}

json read_json_file(const std::string& path) { return parse_json(read_text(path)); }

json number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

double to_double(const json& j, const std::string& field) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf" || s == "+inf" || s == "Infinity") return kInf;
        if (s == "-inf") return -kInf;
    }
    throw ConfigError("field '" + field + "' must be a number");
}

RateFunction rate_from_json(const json& j) {
    const json& kind_node = require(j, "kind");
    if (!kind_node.is_string()) throw ConfigError("field 'kind' must be a string");
    std::string kind = kind_node.get<std::string>();
    if (kind.size() > 4 && kind.ends_with("_psi")) kind.resize(kind.size() - 4);

    if (kind == "bernoulli") return RateFunction::bernoulli(field_double(j, {"p"}));
    if (kind == "scaled_bernoulli")
        return RateFunction::scaled_bernoulli(field_double(j, {"p"}), field_double(j, {"B", "scale"}));
    if (kind == "subgaussian") return RateFunction::subgaussian(field_double(j, {"sigma2"}));
    if (kind == "subgamma")
        return RateFunction::subgamma(field_double(j, {"sigma2"}), field_double(j, {"c"}));
    if (kind == "l2")
        return RateFunction::l2(field_double(j, {"M", "lipschitz_m"}), field_double(j, {"theta_norm2"}));
    if (kind == "logsobolev")
        return RateFunction::logsobolev(field_double(j, {"C", "c"}), field_double(j, {"grad_norm2"}));
    if (kind == "empirical")
        return RateFunction::empirical(LossSampleSet(double_array(require(j, "samples"), "samples")));
    if (kind == "mixture") {
        const auto weights = double_array(require(j, "weights"), "weights");
        const json& members = require(j, "members");
        if (!members.is_array()) throw ConfigError("field 'members' must be an array");
        std::vector<RateFunction> rfs;
        for (const auto& m : members) rfs.push_back(rate_from_json(m));
        return RateFunction::mixture(SimplexDistribution(weights), std::move(rfs));
    }
    throw ConfigError("unknown psi kind '" + kind + "'");
}

json rate_to_json(const RateFunction& rf) {
    json j;
    j["kind"] = std::string(to_string(rf.kind()));
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, rate_params::Bernoulli>) {
                j["p"] = p.p;
            } else if constexpr (std::is_same_v<T, rate_params::ScaledBernoulli>) {
                j["p"] = p.p;
                j["B"] = p.scale;
            } else if constexpr (std::is_same_v<T, rate_params::SubGaussian>) {
                j["sigma2"] = p.sigma2;
            } else if constexpr (std::is_same_v<T, rate_params::SubGamma>) {
                j["sigma2"] = p.sigma2;
                j["c"] = p.c;
            } else if constexpr (std::is_same_v<T, rate_params::L2>) {
                j["M"] = p.lipschitz_m;
                j["theta_norm2"] = p.theta_norm2;
            } else if constexpr (std::is_same_v<T, rate_params::LogSobolev>) {
                j["C"] = p.c;
                j["grad_norm2"] = p.grad_norm2;
            } else if constexpr (std::is_same_v<T, rate_params::Empirical>) {
                const auto v = p.samples->values();
                j["samples"] = std::vector<double>(v.begin(), v.end());
            } else {
                j["weights"] = *p.weights;
                json members = json::array();
                for (const auto& m : *p.members) members.push_back(rate_to_json(m));
                j["members"] = std::move(members);
            }
        },
        rf.params());
    j["domain_sup"] = number(rf.domain_sup());
    return j;
}

BoundQuery query_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("query must be a JSON object");
    BoundQuery q;
    q.emp_gibbs_risk = field_double(j, {"emp_gibbs_risk", "risk"});
    q.kl_div = field_double(j, {"kl_div", "kl"});
    const json& n = require(j, "n");
    if (!n.is_number_integer()) throw ConfigError("field 'n' must be an integer");
    q.n = n.get<long>();
    q.delta = field_double(j, {"delta"});
    q.validate();
    return q;
}

json query_to_json(const BoundQuery& q) {
    return {{"emp_gibbs_risk", number(q.emp_gibbs_risk)},
            {"kl_div", number(q.kl_div)},
            {"n", q.n},
            {"delta", q.delta}};
}

json report_to_json(const BoundReport& r) {
    json j;
    j["kind"] = std::string(to_string(r.kind));
    j["value"] = number(r.value);
    j["lambda_star"] = r.lambda_star ? number(*r.lambda_star) : json(nullptr);
    j["complexity"] = number(r.complexity);
    j["empirical_risk"] = number(r.empirical_risk);
    j["gap"] = number(r.gap);
    return j;
}

FiniteModelClass class_from_json(const json& j) {
    const json& n = require(j, "n");
    if (!n.is_number_integer()) throw ConfigError("field 'n' must be an integer");
    const json& models = require(j, "models");
    if (!models.is_array()) throw ConfigError("field 'models' must be an array");
    std::vector<ModelEntry> entries;
    for (const auto& m : models) {
        ModelEntry e;
        e.emp_risk = field_double(m, {"emp_risk"});
        e.prior_mass = field_double(m, {"prior"});
        e.psi = m.contains("psi") ? rate_from_json(m["psi"]) : RateFunction();
        if (m.contains("features")) {
            const json& f = m["features"];
            if (f.contains("theta_norm2")) e.features.theta_norm2 = to_double(f["theta_norm2"], "theta_norm2");
            if (f.contains("grad_norm2")) e.features.grad_norm2 = to_double(f["grad_norm2"], "grad_norm2");
            if (f.contains("sigma2")) e.features.sigma2 = to_double(f["sigma2"], "sigma2");
            if (f.contains("true_risk")) e.features.true_risk = to_double(f["true_risk"], "true_risk");
        }
        entries.push_back(std::move(e));
    }
    return FiniteModelClass(std::move(entries), n.get<long>());
}

Environment environment_from_json(const json& j) {
    const json& kind_node = require(j, "kind");
    const std::string kind = kind_node.is_string() ? kind_node.get<std::string>() : "";
    Coupling coupling = Coupling::comonotone;
    if (j.contains("coupling")) {
        const std::string c = j["coupling"].is_string() ? j["coupling"].get<std::string>() : "";
        if (c == "independent")
            coupling = Coupling::independent;
        else if (c != "comonotone")
            throw ConfigError("field 'coupling' must be comonotone or independent");
    }
    if (kind == "bernoulli_ensemble")
        return Environment::bernoulli_ensemble(double_array(require(j, "p"), "p"), coupling);
    if (kind == "scaled_bernoulli_ensemble")
        return Environment::scaled_bernoulli_ensemble(double_array(require(j, "p"), "p"),
                                                      double_array(require(j, "B"), "B"), coupling);
    if (kind == "sigmoid_linear") {
        SigmoidLinearSpec s;
        const json& dim = require(j, "dimension");
        if (!dim.is_number_integer()) throw ConfigError("field 'dimension' must be an integer");
        s.dimension = dim.get<int>();
        s.radius = field_double(j, {"radius"});
        const json& weights = require(j, "weights");
        if (!weights.is_array()) throw ConfigError("field 'weights' must be an array");
        for (const auto& w : weights) s.weights.push_back(double_array(w, "weights"));
        if (j.contains("teacher")) s.teacher = double_array(j["teacher"], "teacher");
        if (j.contains("label_noise")) s.label_noise = to_double(j["label_noise"], "label_noise");
        if (j.contains("oracle_seed")) s.oracle_seed = j["oracle_seed"].get<std::uint64_t>();
        if (j.contains("oracle_samples")) s.oracle_samples = j["oracle_samples"].get<std::size_t>();
        return Environment::sigmoid_linear(std::move(s));
    }
    throw ConfigError("unknown environment kind '" + kind + "'");
}

json environment_to_json(const Environment& env) {
    json j;
    j["kind"] = std::string(to_string(env.kind()));
    if (env.kind() == EnvironmentKind::sigmoid_linear) {
        const auto& s = env.sigmoid_spec();
        j["dimension"] = s.dimension;
        j["radius"] = s.radius;
        j["weights"] = s.weights;
        j["teacher"] = s.teacher;
        j["label_noise"] = s.label_noise;
        j["oracle_seed"] = s.oracle_seed;
        j["oracle_samples"] = s.oracle_samples;
    } else {
        std::vector<double> p, b;
        for (std::size_t i = 0; i < env.num_models(); ++i) {
            const auto params = env.exact_cgf(i).params();
            if (const auto* bp = std::get_if<rate_params::Bernoulli>(&params)) {
                p.push_back(bp->p);
                b.push_back(1.0);
            } else if (const auto* sp = std::get_if<rate_params::ScaledBernoulli>(&params)) {
                p.push_back(sp->p);
                b.push_back(sp->scale);
            }
        }
        j["p"] = p;
        if (env.kind() == EnvironmentKind::scaled_bernoulli_ensemble) j["B"] = b;
        j["coupling"] = env.coupling() == Coupling::comonotone ? "comonotone" : "independent";
    }
    const auto risks = env.true_risks();
    j["true_risks"] = std::vector<double>(risks.begin(), risks.end());
    return j;
}

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::vector<double> read_loss_csv(const std::string& path) { return read_columns(path, 1)[0]; }

std::pair<std::vector<double>, std::vector<double>> read_pairs_csv(const std::string& path) {
    auto cols = read_columns(path, 2);
    return {std::move(cols[0]), std::move(cols[1])};
}

} // namespace pbc::io
