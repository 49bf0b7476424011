#include "pbc/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pbc/errors.hpp"
#include "pbc/transform.hpp"

namespace pbc {

namespace {

constexpr double kLambdaFloor = 1e-6;
constexpr double kLambdaCap = 1e6;
constexpr int kGridPerDecade = 20;
constexpr double kRelativeImprovement = 1e-10;
constexpr int kMaxGoldenIterations = 200;

SimplexDistribution prior_masses(std::span<const ModelEntry> models) {
    std::vector<double> w;
    w.reserve(models.size());
    for (const auto& m : models) w.push_back(m.prior_mass);
    try {
        return SimplexDistribution(std::move(w));
    } catch (const DomainError& e) {
        throw DomainError("prior", e.what());
    }
}

void check_lambda(const FiniteModelClass& cls, double lambda) {
    if (std::isnan(lambda) || lambda <= 0.0 || lambda >= cls.domain_sup())
        throw DomainError("lambda", "must lie in (0, b_min)");
}

// ln pi_i - (n-1)(lambda emp_risk_i + psi_i(lambda)); -inf for zero prior.
std::vector<double> log_weights(const FiniteModelClass& cls, double lambda) {
    const double scale = static_cast<double>(cls.n() - 1);
    std::vector<double> lw;
    lw.reserve(cls.size());
    for (const auto& m : cls.models()) {
        if (m.prior_mass == 0.0) {
            lw.push_back(-kInf);
            continue;
        }
        lw.push_back(std::log(m.prior_mass) - scale * (lambda * m.emp_risk + m.psi.eval(lambda)));
    }
    return lw;
}

} // namespace

FiniteModelClass::FiniteModelClass(std::vector<ModelEntry> models, long n)
    : models_(std::move(models)), n_(n), prior_(prior_masses(models_)), domain_sup_(kInf) {
    if (n_ < 2) throw DomainError("n", "must be at least 2");
    for (std::size_t i = 0; i < models_.size(); ++i) {
        const double r = models_[i].emp_risk;
        if (!std::isfinite(r) || r < 0.0)
            throw DomainError("emp_risk", "model " + std::to_string(i) + " has invalid empirical risk");
        domain_sup_ = std::min(domain_sup_, models_[i].psi.domain_sup());
    }
}

std::vector<double> FiniteModelClass::emp_risks() const {
    std::vector<double> out;
    out.reserve(models_.size());
    for (const auto& m : models_) out.push_back(m.emp_risk);
    return out;
}

std::vector<RateFunction> FiniteModelClass::psis() const {
    std::vector<RateFunction> out;
    out.reserve(models_.size());
    for (const auto& m : models_) out.push_back(m.psi);
    return out;
}

double kl_discrete(const SimplexDistribution& rho, const SimplexDistribution& pi) {
    if (rho.size() != pi.size()) throw DomainError("rho", "length differs from prior");
    double acc = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) {
        if (rho[i] == 0.0) continue;
        if (pi[i] == 0.0) return kInf;
        acc += rho[i] * std::log(rho[i] / pi[i]);
    }
    return std::max(0.0, acc);
}

TiltedPosterior tilted_posterior(const FiniteModelClass& cls, double lambda) {
    check_lambda(cls, lambda);
    const std::vector<double> lw = log_weights(cls, lambda);
    const double top = *std::max_element(lw.begin(), lw.end());
    if (!std::isfinite(top)) throw DomainError("prior", "no model carries positive finite mass");
    double z = 0.0;
    std::vector<double> w(lw.size());
    for (std::size_t i = 0; i < lw.size(); ++i) {
        w[i] = std::exp(lw[i] - top);
        z += w[i];
    }
    for (double& x : w) x /= z;
    TiltedPosterior out{SimplexDistribution::normalized(std::move(w)), 0.0, top + std::log(z)};

    // KL(rho*|pi) = sum rho_i (lw_i - ln pi_i) - ln Z.
    const double scale = static_cast<double>(cls.n() - 1);
    double energy = 0.0;
    const auto models = cls.models();
    for (std::size_t i = 0; i < models.size(); ++i) {
        if (out.rho[i] == 0.0) continue;
        energy += out.rho[i] * scale * (lambda * models[i].emp_risk + models[i].psi.eval(lambda));
    }
    out.kl = std::max(0.0, -energy - out.log_partition);
    return out;
}

SimplexDistribution optimal_posterior(const FiniteModelClass& cls, double lambda) {
    return tilted_posterior(cls, lambda).rho;
}

std::size_t map_index(const FiniteModelClass& cls, double lambda) {
    check_lambda(cls, lambda);
    const std::vector<double> lw = log_weights(cls, lambda);
    const double scale = lambda * static_cast<double>(cls.n() - 1);
    std::size_t best = 0;
    double best_objective = kInf;
    for (std::size_t i = 0; i < lw.size(); ++i) {
        const double objective = -lw[i] / scale;
        if (objective < best_objective) {
            best_objective = objective;
            best = i;
        }
    }
    return best;
}

double parametric_bound(const FiniteModelClass& cls, const SimplexDistribution& rho, double lambda,
                        double delta) {
    const BoundQuery q{rho.expectation(cls.emp_risks()), kl_discrete(rho, cls.prior()), cls.n(),
                       delta};
    return fixed_lambda_bound(q, expected_rate(rho, cls.psis()), lambda).value;
}

OptimizedPosterior optimize_bound(const FiniteModelClass& cls, double delta) {
    if (cls.size() == 0) throw DomainError("models", "empty model class");
    if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta", "must lie in (0, 1)");

    OptimizedPosterior out;
    const auto objective = [&](double log_lambda) {
        const double lambda = std::exp(log_lambda);
        const TiltedPosterior tp = tilted_posterior(cls, lambda);
        const BoundQuery q{tp.rho.expectation(cls.emp_risks()), tp.kl, cls.n(), delta};
        const double value = fixed_lambda_bound(q, expected_rate(tp.rho, cls.psis()), lambda).value;
        out.trace.push_back({lambda, value});
        return value;
    };

    const double b_min = cls.domain_sup();
    const double lambda_hi = std::min(kLambdaCap, std::isfinite(b_min) ? b_min - kBoundaryMargin * b_min : kInf);
    const double log_hi = std::log(lambda_hi);
    const double log_lo = std::log(std::min(kLambdaFloor, lambda_hi * 1e-6));
    const int points = std::max(
        3, static_cast<int>(std::ceil((log_hi - log_lo) / std::log(10.0) * kGridPerDecade)) + 1);
    std::vector<double> grid(points);
    std::vector<double> values(points);
    for (int k = 0; k < points; ++k) {
        grid[k] = log_lo + (log_hi - log_lo) * k / (points - 1);
        values[k] = objective(grid[k]);
    }
    const auto best_it = std::min_element(values.begin(), values.end());
    const int best = static_cast<int>(best_it - values.begin());
    double best_x = grid[best];
    double best_value = values[best];

    // Golden-section refinement between the neighbours of the best grid point.
    double a = grid[std::max(0, best - 1)];
    double b = grid[std::min(points - 1, best + 1)];
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = objective(c);
    double fd = objective(d);
    for (int it = 0; it < kMaxGoldenIterations; ++it) {
        const double previous = best_value;
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d);
        }
        if (fc < best_value) { best_value = fc; best_x = c; }
        if (fd < best_value) { best_value = fd; best_x = d; }
        const bool tiny_bracket = (b - a) <= 1e-12 * std::max(1.0, std::abs(a));
        const bool stalled = previous - best_value <= kRelativeImprovement * std::abs(best_value) &&
                             (b - a) <= 1e-6;
        if (tiny_bracket || stalled) break;
    }

    out.search_lambda = std::exp(best_x);
    const TiltedPosterior tp = tilted_posterior(cls, out.search_lambda);
    out.posterior = tp.rho;
    const BoundQuery q{tp.rho.expectation(cls.emp_risks()), tp.kl, cls.n(), delta};
    out.report = pac_bayes_chernoff(q, expected_rate(tp.rho, cls.psis()));
    if (!(out.report.value <= best_value)) {
        // Numerical corner (e.g. boundary domain): keep the searched point.
        out.report = fixed_lambda_bound(q, expected_rate(tp.rho, cls.psis()), out.search_lambda);
        out.report.kind = BoundKind::pac_bayes_chernoff;
    }
    out.lambda = out.report.lambda_star.value_or(out.search_lambda);
    out.map_index = map_index(cls, out.search_lambda);
    return out;
}

} // namespace pbc
