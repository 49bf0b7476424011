#include "pbc/harness.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <string>
#include <thread>

#include "pbc/errors.hpp"
#include "pbc/posterior.hpp"
#include "pbc/transform.hpp"

namespace pbc {

namespace {

// Runs body(k) for k in [0, count) on `threads` workers with a fixed
// strided assignment; results must be written to per-k slots.
template <class Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
    const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(count, 1));
    if (workers == 1) {
        for (std::size_t k = 0; k < count; ++k) body(k);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t k = w; k < count; k += workers) body(k);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    pool.clear();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

double sigmoid(double z) {
    return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

double dot(std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

SimplexDistribution resolve_prior(const std::vector<double>& prior, std::size_t models) {
    if (prior.empty()) return SimplexDistribution::uniform(models);
    if (prior.size() != models) throw DomainError("prior", "length differs from the model count");
    return SimplexDistribution(prior);
}

SimplexDistribution gibbs_posterior(const SimplexDistribution& pi, std::span<const double> risks,
                                    double beta) {
    std::vector<double> lw(risks.size(), -kInf);
    for (std::size_t i = 0; i < risks.size(); ++i)
        if (pi[i] > 0.0) lw[i] = std::log(pi[i]) - beta * risks[i];
    const double top = *std::max_element(lw.begin(), lw.end());
    for (double& x : lw) x = std::exp(x - top);
    return SimplexDistribution::normalized(std::move(lw));
}

void require_exact_cgf(const Environment& env) {
    if (!env.has_exact_cgf())
        throw DomainError("environment", "check needs an environment with an exact CGF");
}

void require_model(const Environment& env, std::size_t model) {
    if (model >= env.num_models()) throw DomainError("model", "index out of range");
}

} // namespace

std::string_view to_string(EnvironmentKind kind) {
    switch (kind) {
        case EnvironmentKind::bernoulli_ensemble: return "bernoulli_ensemble";
        case EnvironmentKind::scaled_bernoulli_ensemble: return "scaled_bernoulli_ensemble";
        case EnvironmentKind::sigmoid_linear: return "sigmoid_linear";
    }
    return "unknown";
}

double LossMatrix::emp_risk(std::size_t model) const {
    const auto r = row(model);
    long double acc = 0.0L;
    for (double v : r) acc += v;
    return static_cast<double>(acc / static_cast<long double>(samples_));
}

std::vector<double> LossMatrix::emp_risks() const {
    std::vector<double> out(models_);
    for (std::size_t i = 0; i < models_; ++i) out[i] = emp_risk(i);
    return out;
}

// ---------------------------------------------------------------- Environment

Environment Environment::bernoulli_ensemble(std::vector<double> p, Coupling coupling) {
    return scaled_bernoulli_ensemble(p, std::vector<double>(p.size(), 1.0), coupling);
}

Environment Environment::scaled_bernoulli_ensemble(std::vector<double> p, std::vector<double> scale,
                                                   Coupling coupling) {
    if (p.empty()) throw DomainError("p", "at least one model is required");
    if (p.size() != scale.size()) throw DomainError("B", "length differs from p");
    Environment env;
    env.kind_ = std::all_of(scale.begin(), scale.end(), [](double b) { return b == 1.0; })
                    ? EnvironmentKind::bernoulli_ensemble
                    : EnvironmentKind::scaled_bernoulli_ensemble;
    env.coupling_ = coupling;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!(p[i] >= 0.0 && p[i] <= 1.0)) throw DomainError("p", "entries must lie in [0, 1]");
        if (!(scale[i] > 0.0) || !std::isfinite(scale[i]))
            throw DomainError("B", "entries must be positive and finite");
        env.true_risk_.push_back(p[i] * scale[i]);
    }
    env.true_risk_se_.assign(p.size(), 0.0);
    env.p_ = std::move(p);
    env.scale_ = std::move(scale);
    return env;
}

Environment Environment::sigmoid_linear(SigmoidLinearSpec spec) {
    if (spec.dimension < 1) throw DomainError("dimension", "must be positive");
    if (!(spec.radius > 0.0)) throw DomainError("radius", "must be positive");
    if (spec.weights.empty()) throw DomainError("weights", "at least one model is required");
    for (const auto& w : spec.weights)
        if (w.size() != static_cast<std::size_t>(spec.dimension))
            throw DomainError("weights", "weight vector length differs from dimension");
    if (spec.teacher.empty()) {
        spec.teacher.assign(spec.dimension, 0.0);
        spec.teacher[0] = 1.0;
    }
    if (spec.teacher.size() != static_cast<std::size_t>(spec.dimension))
        throw DomainError("teacher", "length differs from dimension");
    if (!(spec.label_noise >= 0.0 && spec.label_noise <= 0.5))
        throw DomainError("label_noise", "must lie in [0, 0.5]");
    if (spec.oracle_samples < 2) throw DomainError("oracle_samples", "must be at least 2");

    Environment env;
    env.kind_ = EnvironmentKind::sigmoid_linear;
    env.sigmoid_ = std::move(spec);
    const auto& s = *env.sigmoid_;
    const std::size_t models = s.weights.size();

    // Frozen oracle run for the true risks.
    CounterRng rng(s.oracle_seed, 0, streams::oracle);
    std::vector<long double> sum(models, 0.0L);
    std::vector<long double> sum_sq(models, 0.0L);
    for (std::size_t k = 0; k < s.oracle_samples; ++k) {
        const LabeledPoint pt = env.sample_point(rng);
        for (std::size_t i = 0; i < models; ++i) {
            const double l = env.loss(i, pt);
            sum[i] += l;
            sum_sq[i] += static_cast<long double>(l) * l;
        }
    }
    const auto count = static_cast<long double>(s.oracle_samples);
    for (std::size_t i = 0; i < models; ++i) {
        const long double mean = sum[i] / count;
        const long double var = std::max(0.0L, sum_sq[i] / count - mean * mean);
        env.true_risk_.push_back(static_cast<double>(mean));
        env.true_risk_se_.push_back(static_cast<double>(std::sqrt(var / (count - 1.0L))));
    }
    return env;
}

RateFunction Environment::exact_cgf(std::size_t model) const {
    require_exact_cgf(*this);
    require_model(*this, model);
    if (scale_[model] == 1.0) return RateFunction::bernoulli(p_[model]);
    return RateFunction::scaled_bernoulli(p_[model], scale_[model]);
}

double Environment::sigma2_proxy(std::size_t model) const {
    require_model(*this, model);
    if (kind_ == EnvironmentKind::sigmoid_linear) return 0.25;
    return scale_[model] * scale_[model] / 4.0;
}

double Environment::loss_upper_bound() const {
    if (kind_ == EnvironmentKind::sigmoid_linear) return 1.0;
    return *std::max_element(scale_.begin(), scale_.end());
}

bool Environment::zero_one_loss() const { return kind_ == EnvironmentKind::bernoulli_ensemble; }

const SigmoidLinearSpec& Environment::sigmoid_spec() const {
    if (!sigmoid_) throw DomainError("environment", "not a sigmoid_linear environment");
    return *sigmoid_;
}

double Environment::parameter_lipschitz() const {
    const double r = sigmoid_spec().radius;
    return r * r / 16.0;
}

double Environment::theta_norm2(std::size_t model) const {
    require_model(*this, model);
    const auto& w = sigmoid_spec().weights[model];
    return dot(w, w);
}

double Environment::input_lipschitz(std::size_t model) const { return theta_norm2(model) / 16.0; }

RateFunction Environment::l2_psi(std::size_t model) const {
    return RateFunction::l2(parameter_lipschitz(), theta_norm2(model));
}

LabeledPoint Environment::sample_point(CounterRng& rng) const {
    const auto& s = sigmoid_spec();
    LabeledPoint pt;
    pt.x.resize(s.dimension);
    double norm2 = 0.0;
    do {
        norm2 = 0.0;
        for (double& v : pt.x) {
            v = rng.normal();
            norm2 += v * v;
        }
    } while (norm2 == 0.0);
    const double radius = s.radius * std::pow(rng.uniform(), 1.0 / s.dimension);
    const double scale = radius / std::sqrt(norm2);
    for (double& v : pt.x) v *= scale;
    pt.y = dot(s.teacher, pt.x) >= 0.0 ? 1.0 : -1.0;
    if (rng.uniform() < s.label_noise) pt.y = -pt.y;
    return pt;
}

double Environment::loss(std::size_t model, const LabeledPoint& pt) const {
    return sigmoid(-pt.y * dot(sigmoid_spec().weights[model], pt.x));
}

double Environment::input_grad_norm2(std::size_t model, const LabeledPoint& pt) const {
    const double l = loss(model, pt);
    const double slope = l * (1.0 - l);
    return slope * slope * theta_norm2(model);
}

double Environment::param_grad_norm2(std::size_t model, const LabeledPoint& pt) const {
    const double l = loss(model, pt);
    const double slope = l * (1.0 - l);
    return slope * slope * dot(pt.x, pt.x);
}

std::vector<double> Environment::comonotone_column(double u) const {
    require_exact_cgf(*this);
    std::vector<double> column(p_.size());
    for (std::size_t i = 0; i < p_.size(); ++i) column[i] = u < p_[i] ? scale_[i] : 0.0;
    return column;
}

LossMatrix Environment::draw_dataset(long n, std::uint64_t seed, std::uint64_t trial) const {
    if (n < 2) throw DomainError("n", "must be at least 2");
    const std::size_t samples = static_cast<std::size_t>(n);
    LossMatrix out(num_models(), samples);
    CounterRng rng(seed, trial, streams::dataset);
    if (kind_ == EnvironmentKind::sigmoid_linear) {
        for (std::size_t j = 0; j < samples; ++j) {
            const LabeledPoint pt = sample_point(rng);
            for (std::size_t i = 0; i < num_models(); ++i) out.at(i, j) = loss(i, pt);
        }
        return out;
    }
    for (std::size_t j = 0; j < samples; ++j) {
        if (coupling_ == Coupling::comonotone) {
            const double u = rng.uniform();
            for (std::size_t i = 0; i < p_.size(); ++i) out.at(i, j) = u < p_[i] ? scale_[i] : 0.0;
        } else {
            for (std::size_t i = 0; i < p_.size(); ++i)
                out.at(i, j) = rng.uniform() < p_[i] ? scale_[i] : 0.0;
        }
    }
    return out;
}

// ------------------------------------------------------------------ coverage

std::string_view to_string(CoverageBound bound) {
    switch (bound) {
        case CoverageBound::chernoff_kl: return "chernoff_kl";
        case CoverageBound::subgaussian: return "subgaussian";
        case CoverageBound::l2: return "l2";
        case CoverageBound::exact_cgf: return "exact_cgf";
        case CoverageBound::mcallester: return "mcallester";
        case CoverageBound::seeger: return "seeger";
    }
    return "unknown";
}

std::optional<CoverageBound> parse_coverage_bound(std::string_view name) {
    for (auto b : {CoverageBound::chernoff_kl, CoverageBound::subgaussian, CoverageBound::l2,
                   CoverageBound::exact_cgf, CoverageBound::mcallester, CoverageBound::seeger})
        if (to_string(b) == name) return b;
    if (name == "chernoff_binary_kl") return CoverageBound::chernoff_kl;
    return std::nullopt;
}

std::string_view to_string(PosteriorRule::Kind kind) {
    switch (kind) {
        case PosteriorRule::Kind::prior: return "prior";
        case PosteriorRule::Kind::fixed: return "fixed";
        case PosteriorRule::Kind::gibbs: return "gibbs";
        case PosteriorRule::Kind::optimal: return "optimal";
    }
    return "unknown";
}

std::optional<PosteriorRule::Kind> parse_posterior_rule(std::string_view name) {
    for (auto k : {PosteriorRule::Kind::prior, PosteriorRule::Kind::fixed, PosteriorRule::Kind::gibbs,
                   PosteriorRule::Kind::optimal})
        if (to_string(k) == name) return k;
    if (name == "prop9") return PosteriorRule::Kind::optimal;
    return std::nullopt;
}

CoverageReport run_coverage(const Environment& env, const CoverageConfig& config) {
    if (config.n < 2) throw DomainError("n", "must be at least 2");
    if (!(config.delta > 0.0 && config.delta < 1.0)) throw DomainError("delta", "must lie in (0, 1)");
    if (config.trials == 0) throw DomainError("trials", "must be positive");
    switch (config.bound) {
        case CoverageBound::chernoff_kl:
            if (!env.zero_one_loss()) throw DomainError("bound", "binary-kl bound needs a 0-1 loss");
            break;
        case CoverageBound::mcallester:
        case CoverageBound::seeger:
            if (env.loss_upper_bound() > 1.0) throw DomainError("bound", "bound needs losses in [0, 1]");
            break;
        case CoverageBound::l2:
            if (env.kind() != EnvironmentKind::sigmoid_linear)
                throw DomainError("bound", "l2 bound needs the sigmoid_linear environment");
            break;
        case CoverageBound::exact_cgf:
            require_exact_cgf(env);
            break;
        case CoverageBound::subgaussian:
            break;
    }

    const std::size_t models = env.num_models();
    const SimplexDistribution pi = resolve_prior(config.prior, models);
    std::optional<SimplexDistribution> fixed_rho;
    if (config.rule.kind == PosteriorRule::Kind::fixed)
        fixed_rho = SimplexDistribution(config.rule.weights);
    if (fixed_rho && fixed_rho->size() != models)
        throw DomainError("weights", "fixed posterior length differs from the model count");

    // Per-model psi used by the bound (and by the optimal posterior rule).
    std::vector<RateFunction> psi(models);
    std::vector<double> sigma2(models), theta2(models);
    for (std::size_t i = 0; i < models; ++i) {
        sigma2[i] = env.sigma2_proxy(i);
        switch (config.bound) {
            case CoverageBound::l2:
                theta2[i] = env.theta_norm2(i);
                psi[i] = env.l2_psi(i);
                break;
            case CoverageBound::exact_cgf: psi[i] = env.exact_cgf(i); break;
            default: psi[i] = RateFunction::subgaussian(sigma2[i]); break;
        }
    }
    const double beta = config.rule.beta > 0.0 ? config.rule.beta : static_cast<double>(config.n);
    const bool oracle_slack = env.kind() == EnvironmentKind::sigmoid_linear;

    std::vector<TrialRecord> records(config.trials);
    parallel_for(config.trials, config.threads, [&](std::size_t k) {
        const LossMatrix data = env.draw_dataset(config.n, config.seed, k);
        const std::vector<double> risks = data.emp_risks();
        SimplexDistribution rho = pi;
        switch (config.rule.kind) {
            case PosteriorRule::Kind::prior: break;
            case PosteriorRule::Kind::fixed: rho = *fixed_rho; break;
            case PosteriorRule::Kind::gibbs: rho = gibbs_posterior(pi, risks, beta); break;
            case PosteriorRule::Kind::optimal: {
                std::vector<ModelEntry> entries(models);
                for (std::size_t i = 0; i < models; ++i)
                    entries[i] = ModelEntry{risks[i], pi[i], psi[i], {}};
                rho = optimize_bound(FiniteModelClass(std::move(entries), config.n), config.delta)
                          .posterior;
                break;
            }
        }
        const BoundQuery q{rho.expectation(risks), kl_discrete(rho, pi), config.n, config.delta};
        double value = 0.0;
        switch (config.bound) {
            case CoverageBound::chernoff_kl: value = chernoff_binary_kl(q).value; break;
            case CoverageBound::subgaussian: value = subgaussian_bound(q, rho.expectation(sigma2)).value; break;
            case CoverageBound::l2:
                value = l2_bound(q, env.parameter_lipschitz(), rho.expectation(theta2)).report.value;
                break;
            case CoverageBound::exact_cgf: value = pac_bayes_chernoff(q, expected_rate(rho, psi)).value; break;
            case CoverageBound::mcallester: value = mcallester_bound(q).value; break;
            case CoverageBound::seeger: value = seeger_bound(q).value; break;
        }
        TrialRecord& r = records[k];
        r.trial = k;
        r.bound = value;
        r.gibbs_emp_risk = q.emp_gibbs_risk;
        r.gibbs_true_risk = rho.expectation(env.true_risks());
        const double slack = oracle_slack ? 3.0 * rho.expectation(env.true_risk_se()) : 0.0;
        r.violated = r.gibbs_true_risk > value + slack;
    });

    CoverageReport report;
    report.trials = config.trials;
    report.delta = config.delta;
    for (const auto& r : records) report.violations += r.violated ? 1 : 0;
    report.violation_rate = static_cast<double>(report.violations) / static_cast<double>(report.trials);
    report.binomial_se =
        std::sqrt(config.delta * (1.0 - config.delta) / static_cast<double>(report.trials));
    if (config.keep_records) report.records = std::move(records);
    return report;
}

// --------------------------------------------------------------- tail checks

namespace {

// n Λ*(gen) or m Λ*(gen) per trial for one model.
std::vector<double> scaled_rate_samples(const Environment& env, std::size_t model, long n,
                                        double multiplier, std::size_t trials, std::uint64_t seed,
                                        unsigned threads) {
    require_exact_cgf(env);
    require_model(env, model);
    const RateFunction cgf = env.exact_cgf(model);
    const double true_risk = env.true_risks()[model];
    std::vector<double> out(trials);
    parallel_for(trials, threads, [&](std::size_t k) {
        const LossMatrix data = env.draw_dataset(n, seed, k);
        const double gen = true_risk - data.emp_risk(model);
        out[k] = multiplier * legendre(cgf, gen);
    });
    return out;
}

} // namespace

std::vector<Lemma2Row> check_lemma2(const Environment& env, const Lemma2Config& config) {
    if (config.trials == 0) throw DomainError("trials", "must be positive");
    for (double c : config.c_grid)
        if (!(c >= 0.0)) throw DomainError("c_grid", "entries must be nonnegative");
    const std::vector<double> values =
        scaled_rate_samples(env, config.model, config.n, static_cast<double>(config.n),
                            config.trials, config.seed, config.threads);
    const double trials = static_cast<double>(config.trials);
    std::vector<Lemma2Row> rows;
    for (double c : config.c_grid) {
        Lemma2Row row;
        row.c = c;
        const auto hits = std::count_if(values.begin(), values.end(), [c](double v) { return v >= c; });
        row.survival = static_cast<double>(hits) / trials;
        row.exp_tail = std::exp(-c);
        row.se = std::sqrt(row.exp_tail * (1.0 - row.exp_tail) / trials);
        row.holds = row.survival <= row.exp_tail + 3.0 * row.se;
        rows.push_back(row);
    }
    return rows;
}

ExpMomentResult check_exp_moment(const Environment& env, const ExpMomentConfig& config) {
    if (config.n < 2) throw DomainError("n", "must be at least 2");
    if (config.m < 0) throw DomainError("m", "must be nonnegative");
    if (config.m >= config.n)
        throw DomainError("m", "must be smaller than n (the dominating Pareto has no finite mean)");
    if (config.trials < 2) throw DomainError("trials", "at least two trials are required");
    ExpMomentResult out;
    const double n = static_cast<double>(config.n);
    const double m = static_cast<double>(config.m);
    out.bound = n / (n - m);
    out.high_variance = 3 * config.m > config.n;
    if (config.m == 0) {
        out.estimate = 1.0;
        out.se = 0.0;
        out.holds = true;
        return out;
    }
    std::vector<double> values = scaled_rate_samples(env, config.model, config.n, m, config.trials,
                                                     config.seed, config.threads);
    long double sum = 0.0L;
    for (double& v : values) {
        v = std::exp(v);
        sum += v;
    }
    const long double mean = sum / static_cast<long double>(values.size());
    long double ss = 0.0L;
    for (double v : values) ss += (v - mean) * (v - mean);
    const long double var = ss / static_cast<long double>(values.size() - 1);
    out.estimate = static_cast<double>(mean);
    out.se = static_cast<double>(std::sqrt(var / static_cast<long double>(values.size())));
    out.holds = out.estimate <= out.bound + 3.0 * out.se;
    return out;
}

OracleMoment estimate_exponential_moment_oracle(const Environment& env,
                                                const SimplexDistribution& pi, long n,
                                                double lambda, std::size_t trials,
                                                std::uint64_t seed, unsigned threads) {
    if (pi.size() != env.num_models()) throw DomainError("pi", "length differs from the model count");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("lambda", "must be nonnegative");
    if (n < 2) throw DomainError("n", "must be at least 2");
    if (trials < 2) throw DomainError("trials", "at least two trials are required");
    OracleMoment out;
    if (env.has_exact_cgf()) {
        double exact = 0.0;
        for (std::size_t i = 0; i < pi.size(); ++i)
            if (pi[i] > 0.0) exact += pi[i] * std::exp(static_cast<double>(n) * env.exact_cgf(i).eval(lambda));
        out.exact = exact;
    }
    if (lambda == 0.0) {
        out.estimate = 1.0;
        return out;
    }
    std::vector<double> cdf(pi.size());
    std::partial_sum(pi.weights().begin(), pi.weights().end(), cdf.begin());
    std::vector<double> values(trials);
    parallel_for(trials, threads, [&](std::size_t k) {
        CounterRng pick(seed, k, streams::model_draw);
        const double u = pick.uniform() * cdf.back();
        std::size_t i = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        i = std::min(i, pi.size() - 1);
        while (pi[i] == 0.0 && i > 0) --i;
        const LossMatrix data = env.draw_dataset(n, seed, k);
        const double gen = env.true_risks()[i] - data.emp_risk(i);
        values[k] = std::exp(lambda * static_cast<double>(n) * gen);
    });
    long double sum = 0.0L;
    for (double v : values) sum += v;
    const long double mean = sum / static_cast<long double>(trials);
    long double ss = 0.0L;
    for (double v : values) ss += (v - mean) * (v - mean);
    out.estimate = static_cast<double>(mean);
    out.se = static_cast<double>(
        std::sqrt(ss / static_cast<long double>(trials - 1) / static_cast<long double>(trials)));
    return out;
}

BoundReport alquier_oracle_bound(const BoundQuery& q, double moment, double lambda) {
    q.validate();
    if (!(moment > 0.0)) throw DomainError("moment", "must be positive");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("lambda", "must be positive");
    BoundReport r;
    r.kind = BoundKind::alquier_oracle;
    r.empirical_risk = q.emp_gibbs_risk;
    r.complexity = q.kl_div + std::log(moment / q.delta);
    r.gap = r.complexity / (lambda * static_cast<double>(q.n));
    r.value = q.emp_gibbs_risk + r.gap;
    r.lambda_star = lambda;
    return r;
}

// ----------------------------------------------------------- log-Sobolev

std::vector<double> default_logsobolev_grid() {
    std::vector<double> grid;
    for (int k = 1; k <= 100; ++k) grid.push_back(0.05 * k);
    return grid;
}

LogSobolevCurve logsobolev_ratio(std::span<const double> losses,
                                 std::span<const double> grad_norm2,
                                 std::span<const double> lambda_grid) {
    if (losses.size() != grad_norm2.size())
        throw DomainError("samples", "loss and gradient columns differ in length");
    for (double g : grad_norm2)
        if (!std::isfinite(g) || g < 0.0) throw DomainError("grad_norm2", "must be finite and nonnegative");
    for (double l : lambda_grid)
        if (!(l > 0.0) || !std::isfinite(l)) throw DomainError("lambda_grid", "entries must be positive");
    const LossSampleSet samples(std::vector<double>(losses.begin(), losses.end()));
    const RateFunction cgf = empirical_cgf(samples);
    long double gsum = 0.0L;
    for (double g : grad_norm2) gsum += g;
    const double mean_grad = static_cast<double>(gsum / static_cast<long double>(grad_norm2.size()));

    LogSobolevCurve out;
    const bool flat = samples.zero_variance();
    if (mean_grad == 0.0 && !flat) {
        out.assumption_failed = true;
        out.limit = kInf;
        out.empirical_c = kInf;
    } else {
        out.limit = flat ? 0.0 : samples.variance() / mean_grad;
        out.empirical_c = out.limit;
    }
    double previous = kInf;
    for (double lambda : lambda_grid) {
        LogSobolevPoint p;
        p.lambda = lambda;
        p.cgf = cgf.eval(lambda);
        if (flat)
            p.ratio = 0.0;
        else if (mean_grad == 0.0)
            p.ratio = kInf;
        else
            p.ratio = p.cgf / (0.5 * lambda * lambda * mean_grad);
        if (p.ratio > previous * (1.0 + 1e-12)) out.nonincreasing = false;
        previous = p.ratio;
        if (!out.assumption_failed) out.empirical_c = std::max(out.empirical_c, p.ratio);
        out.points.push_back(p);
    }
    return out;
}

} // namespace pbc
