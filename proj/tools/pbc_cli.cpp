// pbc: command-line front end for bound evaluation, posterior optimization,
// CGF estimation and the Monte Carlo validation runs.
//
// Exit codes: 0 ok, 2 config/parse error, 3 domain error, 4 failed check.
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pbc/bounds.hpp"
#include "pbc/errors.hpp"
#include "pbc/harness.hpp"
#include "pbc/io.hpp"
#include "pbc/posterior.hpp"

namespace {

using pbc::io::json;
using pbc::io::number;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDomain = 3;
constexpr int kExitCheck = 4;

struct Globals {
    std::uint64_t seed = 1;
    std::string out;
    std::string format = "json";
    unsigned threads = 1;
};

// Writes `body` to `path` if given, else to stdout.
void emit(const std::string& body, const std::string& path) {
    if (path.empty()) {
        std::cout << body;
        return;
    }
    std::ofstream f(path);
    if (!f) throw pbc::ConfigError("cannot write '" + path + "'");
    f << body;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// Summary goes to --out (or stdout); the CSV table to <out>.csv when --out is
// set, or to stdout instead of the summary under --format csv.
void emit_pair(const Globals& g, const json& summary, const std::string& csv) {
    if (g.out.empty()) {
        std::cout << (g.format == "csv" ? csv : dump(summary));
        return;
    }
    emit(dump(summary), g.out + ".json");
    emit(csv, g.out + ".csv");
    std::cout << dump(summary);
}

std::string csv_row(std::initializer_list<std::string> cells) {
    std::string row;
    for (const auto& c : cells) {
        if (!row.empty()) row += ',';
        row += c;
    }
    return row + "\n";
}

std::string fmt(double x) { return pbc::io::format_double(x); }

std::string reports_csv(const std::vector<pbc::BoundReport>& reports) {
    std::string out = "kind,value,lambda_star,complexity,empirical_risk,gap\n";
    for (const auto& r : reports)
        out += csv_row({std::string(pbc::to_string(r.kind)), fmt(r.value),
                        r.lambda_star ? fmt(*r.lambda_star) : "", fmt(r.complexity),
                        fmt(r.empirical_risk), fmt(r.gap)});
    return out;
}

// --------------------------------------------------------------- bound

// Scalar parameter looked up on the config, then on its psi object.
double bound_param(const json& cfg, std::initializer_list<const char*> keys) {
    for (const json* scope : {&cfg, cfg.contains("psi") ? &cfg["psi"] : nullptr}) {
        if (!scope) continue;
        for (const char* k : keys)
            if (scope->contains(k)) return pbc::io::to_double((*scope)[k], k);
    }
    throw pbc::ConfigError("missing field '" + std::string(*keys.begin()) + "'");
}

pbc::RateFunction bound_psi(const json& cfg) {
    if (!cfg.contains("psi")) throw pbc::ConfigError("missing field 'psi'");
    return pbc::io::rate_from_json(cfg["psi"]);
}

pbc::BoundQuery bound_query(const json& cfg) {
    return pbc::io::query_from_json(cfg.contains("query") ? cfg["query"] : cfg);
}

// Evaluates one bound kind; `extra` receives kind-specific fields.
pbc::BoundReport evaluate(pbc::BoundKind kind, const pbc::BoundQuery& q, const json& cfg,
                          json& extra) {
    using pbc::BoundKind;
    switch (kind) {
        case BoundKind::pac_bayes_chernoff: return pbc::pac_bayes_chernoff(q, bound_psi(cfg));
        case BoundKind::fixed_lambda: {
            auto norm = pbc::FixedLambdaNormalization::chernoff;
            if (cfg.value("normalization", std::string("chernoff")) == "banerjee")
                norm = pbc::FixedLambdaNormalization::banerjee;
            return pbc::fixed_lambda_bound(q, bound_psi(cfg), bound_param(cfg, {"lambda"}), norm);
        }
        case BoundKind::chernoff_binary_kl: return pbc::chernoff_binary_kl(q);
        case BoundKind::subgaussian: return pbc::subgaussian_bound(q, bound_param(cfg, {"sigma2"}));
        case BoundKind::subgamma:
            return pbc::subgamma_bound(q, bound_param(cfg, {"sigma2"}), bound_param(cfg, {"c"}));
        case BoundKind::l2: {
            const auto r = pbc::l2_bound(q, bound_param(cfg, {"M", "lipschitz_m"}),
                                         bound_param(cfg, {"theta_norm2"}));
            extra["printed_gap"] = number(r.printed_gap);
            extra["agrees_with_printed"] = r.agrees_with_printed;
            return r.report;
        }
        case BoundKind::logsobolev_oracle:
            return pbc::logsobolev_oracle_bound(q, bound_param(cfg, {"C"}),
                                                bound_param(cfg, {"grad_norm2"}));
        case BoundKind::empirical_gradient:
            return pbc::empirical_gradient_bound(q, bound_param(cfg, {"C"}), bound_param(cfg, {"L"}),
                                                 bound_param(cfg, {"emp_grad_norm2", "grad_norm2"}));
        case BoundKind::mcallester: return pbc::mcallester_bound(q);
        case BoundKind::seeger: return pbc::seeger_bound(q);
        case BoundKind::alquier_oracle:
            return pbc::alquier_oracle_bound(q, bound_param(cfg, {"moment"}),
                                             bound_param(cfg, {"lambda"}));
    }
    throw pbc::ConfigError("unsupported bound kind");
}

pbc::BoundKind parse_kind(const json& node) {
    if (!node.is_string()) throw pbc::ConfigError("bound kind must be a string");
    const auto kind = pbc::parse_bound_kind(node.get<std::string>());
    if (!kind) throw pbc::ConfigError("unknown bound kind '" + node.get<std::string>() + "'");
    return *kind;
}

json resolved_bound_config(json cfg, const pbc::BoundQuery& q) {
    cfg.erase("query");
    cfg.update(pbc::io::query_to_json(q));
    for (const char* alias : {"risk", "kl"}) cfg.erase(alias);
    return cfg;
}

int cmd_bound_compute(const Globals& g, const std::string& path) {
    json cfg = pbc::io::read_json_file(path);
    const auto q = bound_query(cfg);
    const auto kind = cfg.contains("kind") ? parse_kind(cfg["kind"]) : pbc::BoundKind::pac_bayes_chernoff;
    json extra = json::object();
    const auto report = evaluate(kind, q, cfg, extra);
    json resolved = resolved_bound_config(cfg, q);
    resolved["kind"] = std::string(pbc::to_string(kind));
    json out = pbc::io::report_to_json(report);
    out.update(extra);
    if (g.format == "csv")
        emit(reports_csv({report}), g.out);
    else
        emit(dump({{"config", resolved}, {"report", out}}), g.out);
    return kExitOk;
}

int cmd_bound_compare(const Globals& g, const std::string& path, std::vector<std::string> kinds) {
    json cfg = pbc::io::read_json_file(path);
    const auto q = bound_query(cfg);
    if (kinds.empty()) {
        if (!cfg.contains("kinds")) throw pbc::ConfigError("missing field 'kinds'");
        for (const auto& k : cfg["kinds"]) kinds.push_back(k.is_string() ? k.get<std::string>() : "");
    }
    std::vector<pbc::BoundReport> reports;
    json arr = json::array();
    json names = json::array();
    for (const auto& name : kinds) {
        const auto kind = parse_kind(name);
        json extra = json::object();
        reports.push_back(evaluate(kind, q, cfg, extra));
        json r = pbc::io::report_to_json(reports.back());
        r.update(extra);
        arr.push_back(std::move(r));
        names.push_back(std::string(pbc::to_string(kind)));
    }
    json resolved = resolved_bound_config(cfg, q);
    resolved["kinds"] = names;
    if (g.format == "csv")
        emit(reports_csv(reports), g.out);
    else
        emit(dump({{"config", resolved}, {"reports", arr}}), g.out);
    return kExitOk;
}

// ----------------------------------------------------------- posterior

int cmd_posterior(const Globals& g, const std::string& path, double delta,
                  std::optional<double> fixed_lambda) {
    const auto cls = pbc::io::class_from_json(pbc::io::read_json_file(path));
    if (!(delta > 0.0 && delta < 1.0)) throw pbc::DomainError("delta", "must lie in (0, 1)");
    json out;
    json config = {{"class", path}, {"delta", delta}, {"n", cls.n()}, {"models", cls.size()}};
    std::vector<double> weights;
    if (fixed_lambda) {
        const double lambda = *fixed_lambda;
        if (!(lambda > 0.0) || lambda >= cls.domain_sup())
            throw pbc::DomainError("lambda", "must lie in (0, b)");
        const auto tilted = pbc::tilted_posterior(cls, lambda);
        const auto w = tilted.rho.weights();
        weights.assign(w.begin(), w.end());
        config["fixed_lambda"] = lambda;
        out["lambda_star"] = lambda;
        out["bound"] = number(pbc::parametric_bound(cls, tilted.rho, lambda, delta));
        out["kl"] = number(tilted.kl);
        out["map_index"] = pbc::map_index(cls, lambda);
    } else {
        const auto opt = pbc::optimize_bound(cls, delta);
        const auto w = opt.posterior.weights();
        weights.assign(w.begin(), w.end());
        config["fixed_lambda"] = nullptr;
        out["lambda_star"] = number(opt.lambda);
        out["search_lambda"] = number(opt.search_lambda);
        out["bound"] = number(opt.report.value);
        out["kl"] = number(pbc::kl_discrete(opt.posterior, cls.prior()));
        out["map_index"] = opt.map_index;
        out["report"] = pbc::io::report_to_json(opt.report);
    }
    out["weights"] = weights;
    if (g.format == "csv") {
        std::string csv = "index,weight\n";
        for (std::size_t i = 0; i < weights.size(); ++i) csv += csv_row({std::to_string(i), fmt(weights[i])});
        emit(csv, g.out);
    } else {
        json doc = {{"config", config}};
        doc.update(out);
        emit(dump(doc), g.out);
    }
    return kExitOk;
}

// ------------------------------------------------------------ validate

template <class T>
T get_or(const json& cfg, const char* key, T fallback) {
    if (!cfg.contains(key)) return fallback;
    try {
        return cfg[key].get<T>();
    } catch (const json::exception&) {
        throw pbc::ConfigError(std::string("field '") + key + "' has the wrong type");
    }
}

// Seed/threads: command-line flags win over config values.
struct RunControl {
    std::uint64_t seed;
    unsigned threads;
};

RunControl run_control(const Globals& g, const CLI::App& app, const json& cfg) {
    RunControl rc{get_or<std::uint64_t>(cfg, "seed", g.seed), get_or<unsigned>(cfg, "threads", g.threads)};
    if (app.count("--seed")) rc.seed = g.seed;
    if (app.count("--threads")) rc.threads = g.threads;
    if (rc.threads == 0) throw pbc::DomainError("threads", "must be positive");
    return rc;
}

pbc::Environment environment(const json& cfg) {
    if (!cfg.contains("environment")) throw pbc::ConfigError("missing field 'environment'");
    return pbc::io::environment_from_json(cfg["environment"]);
}

pbc::PosteriorRule rule_from_json(const json& cfg) {
    if (!cfg.contains("rule")) return pbc::PosteriorRule::prior();
    const json& r = cfg["rule"];
    const json& name = r.is_object() ? r.value("kind", json("")) : r;
    if (!name.is_string()) throw pbc::ConfigError("field 'rule' must name a posterior rule");
    const auto kind = pbc::parse_posterior_rule(name.get<std::string>());
    if (!kind) throw pbc::ConfigError("unknown posterior rule '" + name.get<std::string>() + "'");
    pbc::PosteriorRule rule;
    rule.kind = *kind;
    if (r.is_object()) {
        if (r.contains("weights")) rule.weights = r["weights"].get<std::vector<double>>();
        if (r.contains("beta")) rule.beta = pbc::io::to_double(r["beta"], "beta");
    }
    if (rule.kind == pbc::PosteriorRule::Kind::fixed && rule.weights.empty())
        throw pbc::ConfigError("missing field 'weights' for the fixed posterior rule");
    return rule;
}

int cmd_coverage(const Globals& g, const CLI::App& app, const std::string& path) {
    const json cfg = pbc::io::read_json_file(path);
    const auto env = environment(cfg);
    const auto rc = run_control(g, app, cfg);
    pbc::CoverageConfig c;
    const std::string bound = get_or<std::string>(cfg, "bound", "chernoff_kl");
    const auto b = pbc::parse_coverage_bound(bound);
    if (!b) throw pbc::ConfigError("unknown coverage bound '" + bound + "'");
    c.bound = *b;
    c.rule = rule_from_json(cfg);
    c.n = get_or<long>(cfg, "n", c.n);
    c.delta = cfg.contains("delta") ? pbc::io::to_double(cfg["delta"], "delta") : c.delta;
    c.trials = get_or<std::size_t>(cfg, "trials", c.trials);
    c.prior = get_or<std::vector<double>>(cfg, "prior", {});
    c.seed = rc.seed;
    c.threads = rc.threads;
    const auto report = pbc::run_coverage(env, c);

    json rule = {{"kind", std::string(pbc::to_string(c.rule.kind))}};
    if (!c.rule.weights.empty()) rule["weights"] = c.rule.weights;
    if (c.rule.kind == pbc::PosteriorRule::Kind::gibbs)
        rule["beta"] = c.rule.beta > 0.0 ? c.rule.beta : static_cast<double>(c.n);
    json resolved = {{"environment", pbc::io::environment_to_json(env)},
                     {"bound", std::string(pbc::to_string(c.bound))},
                     {"rule", rule},
                     {"n", c.n},
                     {"delta", c.delta},
                     {"trials", c.trials},
                     {"prior", c.prior},
                     {"seed", c.seed},
                     {"threads", c.threads}};
    json summary = {{"config", resolved},
                    {"trials", report.trials},
                    {"violations", report.violations},
                    {"violation_rate", report.violation_rate},
                    {"binomial_se", report.binomial_se},
                    {"threshold", report.threshold()},
                    {"within_slack", report.within_slack()}};
    std::string csv = "trial_id,bound,gibbs_true_risk,gibbs_emp_risk,violated\n";
    for (const auto& r : report.records)
        csv += csv_row({std::to_string(r.trial), fmt(r.bound), fmt(r.gibbs_true_risk),
                        fmt(r.gibbs_emp_risk), r.violated ? "1" : "0"});
    emit_pair(g, summary, csv);
    return report.within_slack() ? kExitOk : kExitCheck;
}

int cmd_lemma2(const Globals& g, const CLI::App& app, const std::string& path) {
    const json cfg = pbc::io::read_json_file(path);
    const auto env = environment(cfg);
    const auto rc = run_control(g, app, cfg);
    pbc::Lemma2Config c;
    c.model = get_or<std::size_t>(cfg, "model", c.model);
    c.n = get_or<long>(cfg, "n", c.n);
    c.c_grid = get_or<std::vector<double>>(cfg, "c_grid", c.c_grid);
    c.trials = get_or<std::size_t>(cfg, "trials", c.trials);
    c.seed = rc.seed;
    c.threads = rc.threads;
    const auto rows = pbc::check_lemma2(env, c);

    bool all = true;
    json jrows = json::array();
    std::string csv = "c,survival,exp_tail,se,holds\n";
    for (const auto& r : rows) {
        all = all && r.holds;
        jrows.push_back({{"c", r.c}, {"survival", r.survival}, {"exp_tail", r.exp_tail},
                         {"se", r.se}, {"holds", r.holds}});
        csv += csv_row({fmt(r.c), fmt(r.survival), fmt(r.exp_tail), fmt(r.se), r.holds ? "1" : "0"});
    }
    json resolved = {{"environment", pbc::io::environment_to_json(env)},
                     {"model", c.model},
                     {"n", c.n},
                     {"c_grid", c.c_grid},
                     {"trials", c.trials},
                     {"seed", c.seed},
                     {"threads", c.threads}};
    emit_pair(g, {{"config", resolved}, {"rows", jrows}, {"all_hold", all}}, csv);
    return all ? kExitOk : kExitCheck;
}

int cmd_expmoment(const Globals& g, const CLI::App& app, const std::string& path) {
    const json cfg = pbc::io::read_json_file(path);
    const auto env = environment(cfg);
    const auto rc = run_control(g, app, cfg);
    pbc::ExpMomentConfig c;
    c.model = get_or<std::size_t>(cfg, "model", c.model);
    c.n = get_or<long>(cfg, "n", c.n);
    c.m = get_or<long>(cfg, "m", c.m);
    c.trials = get_or<std::size_t>(cfg, "trials", c.trials);
    c.seed = rc.seed;
    c.threads = rc.threads;
    const auto r = pbc::check_exp_moment(env, c);
    json resolved = {{"environment", pbc::io::environment_to_json(env)},
                     {"model", c.model},
                     {"n", c.n},
                     {"m", c.m},
                     {"trials", c.trials},
                     {"seed", c.seed},
                     {"threads", c.threads}};
    json summary = {{"config", resolved},        {"estimate", r.estimate}, {"se", r.se},
                    {"bound", r.bound},          {"holds", r.holds},
                    {"high_variance", r.high_variance}};
    if (r.high_variance) std::cerr << "warning: m > n/3, the estimator has very high variance\n";
    const std::string csv = "estimate,se,bound,holds,high_variance\n" +
                            csv_row({fmt(r.estimate), fmt(r.se), fmt(r.bound), r.holds ? "1" : "0",
                                     r.high_variance ? "1" : "0"});
    emit_pair(g, summary, csv);
    return r.holds ? kExitOk : kExitCheck;
}

// ----------------------------------------------------------------- cgf

// "a:b:step", both ends inclusive.
std::vector<double> parse_grid(const std::string& spec) {
    std::vector<double> parts;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ':')) {
        char* end = nullptr;
        const double v = std::strtod(item.c_str(), &end);
        if (item.empty() || end != item.c_str() + item.size())
            throw pbc::ConfigError("lambda grid must look like a:b:step");
        parts.push_back(v);
    }
    if (parts.size() != 3) throw pbc::ConfigError("lambda grid must look like a:b:step");
    const double a = parts[0], b = parts[1], step = parts[2];
    if (!(step > 0.0) || !(b >= a) || !std::isfinite(b))
        throw pbc::DomainError("lambda_grid", "need a <= b and step > 0");
    if (a < 0.0) throw pbc::DomainError("lambda_grid", "lambda must be nonnegative");
    const auto count = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9)) + 1;
    std::vector<double> grid(count);
    for (std::size_t k = 0; k < count; ++k) grid[k] = a + static_cast<double>(k) * step;
    return grid;
}

int cmd_cgf_estimate(const Globals& g, const std::string& samples_path, const std::string& grid_spec) {
    const auto grid = parse_grid(grid_spec);
    const pbc::LossSampleSet samples(pbc::io::read_loss_csv(samples_path));
    const auto cgf = pbc::empirical_cgf(samples);
    std::string csv = "lambda,cgf\n";
    json points = json::array();
    for (double l : grid) {
        const double v = cgf.eval(l);
        csv += csv_row({fmt(l), fmt(v)});
        points.push_back({{"lambda", l}, {"cgf", v}});
    }
    if (g.format == "json") {
        json config = {{"samples", samples_path}, {"lambda_grid", grid_spec}, {"count", samples.size()}};
        emit(dump({{"config", config}, {"mean", samples.mean()}, {"variance", samples.variance()},
                   {"curve", points}}),
             g.out);
    } else {
        emit(csv, g.out);
    }
    return kExitOk;
}

int cmd_cgf_logsobolev(const Globals& g, const std::string& pairs_path, const std::string& grid_spec) {
    const auto grid = grid_spec.empty() ? pbc::default_logsobolev_grid() : parse_grid(grid_spec);
    const auto [losses, grads] = pbc::io::read_pairs_csv(pairs_path);
    const auto curve = pbc::logsobolev_ratio(losses, grads, grid);
    std::string csv = "lambda,cgf,ratio\n";
    json points = json::array();
    for (const auto& p : curve.points) {
        csv += csv_row({fmt(p.lambda), fmt(p.cgf), fmt(p.ratio)});
        points.push_back({{"lambda", p.lambda}, {"cgf", p.cgf}, {"ratio", number(p.ratio)}});
    }
    json config = {{"samples", pairs_path},
                   {"lambda_grid", grid_spec.empty() ? "0.05:5:0.05" : grid_spec},
                   {"count", losses.size()}};
    json summary = {{"config", config},
                    {"limit", number(curve.limit)},
                    {"empirical_c", number(curve.empirical_c)},
                    {"assumption_failed", curve.assumption_failed},
                    {"nonincreasing", curve.nonincreasing},
                    {"curve", points}};
    emit_pair(g, summary, csv);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"PAC-Bayes-Chernoff bound toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--seed", g.seed, "64-bit base seed")->capture_default_str();
    app.add_option("--out", g.out, "output path (validate/cgf logsobolev: prefix for .json/.csv)");
    app.add_option("--format", g.format, "output format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    app.add_option("--threads", g.threads, "worker threads for Monte Carlo runs")->capture_default_str();

    std::function<int()> action;

    auto* bound = app.add_subcommand("bound", "evaluate generalization bounds");
    bound->require_subcommand(1);
    std::string bound_config;
    std::vector<std::string> compare_kinds;
    auto* compute = bound->add_subcommand("compute", "one bound from a JSON config");
    compute->add_option("--config", bound_config, "query + psi JSON")->required();
    compute->callback([&] { action = [&] { return cmd_bound_compute(g, bound_config); }; });
    auto* compare = bound->add_subcommand("compare", "several bounds on the same query");
    compare->add_option("--config", bound_config, "query JSON, optionally with \"kinds\"")->required();
    compare->add_option("--kinds", compare_kinds, "bound kinds (overrides the config list)");
    compare->callback([&] { action = [&] { return cmd_bound_compare(g, bound_config, compare_kinds); }; });

    auto* posterior = app.add_subcommand("posterior", "optimal posterior for a finite class");
    posterior->require_subcommand(1);
    std::string class_path;
    double delta = 0.05;
    std::optional<double> fixed_lambda;
    auto* optimize = posterior->add_subcommand("optimize", "minimize the bound over rho (and lambda)");
    optimize->add_option("--class", class_path, "model class JSON")->required();
    optimize->add_option("--delta", delta, "confidence level")->capture_default_str();
    optimize->add_option("--fixed-lambda", fixed_lambda, "hold lambda fixed");
    optimize->callback([&] { action = [&] { return cmd_posterior(g, class_path, delta, fixed_lambda); }; });

    auto* validate = app.add_subcommand("validate", "Monte Carlo validation runs");
    validate->require_subcommand(1);
    std::string validate_config;
    for (const char* name : {"coverage", "lemma2", "expmoment"}) {
        auto* sub = validate->add_subcommand(name);
        sub->add_option("--config", validate_config, "run config JSON")->required();
        const std::string which = name;
        sub->callback([&, which] {
            action = [&, which] {
                if (which == "coverage") return cmd_coverage(g, app, validate_config);
                if (which == "lemma2") return cmd_lemma2(g, app, validate_config);
                return cmd_expmoment(g, app, validate_config);
            };
        });
    }

    auto* cgf = app.add_subcommand("cgf", "empirical CGF tools");
    cgf->require_subcommand(1);
    std::string samples_path;
    std::string grid_spec;
    auto* estimate = cgf->add_subcommand("estimate", "plug-in CGF on a lambda grid");
    estimate->add_option("--samples", samples_path, "one-column loss CSV")->required();
    estimate->add_option("--lambda-grid", grid_spec, "a:b:step")->required();
    estimate->callback([&] {
        action = [&] {
            Globals local = g;
            if (!app.count("--format")) local.format = "csv";
            return cmd_cgf_estimate(local, samples_path, grid_spec);
        };
    });
    auto* logsob = cgf->add_subcommand("logsobolev", "log-Sobolev ratio curve");
    logsob->add_option("--samples", samples_path, "two-column (loss, grad_norm2) CSV")->required();
    logsob->add_option("--lambda-grid", grid_spec, "a:b:step (default 0.05:5:0.05)");
    logsob->callback([&] { action = [&] { return cmd_cgf_logsobolev(g, samples_path, grid_spec); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        return action ? action() : kExitConfig;
    } catch (const pbc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const pbc::DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
