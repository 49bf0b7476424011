#include "pbc/cgf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pbc/errors.hpp"

namespace pbc {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_nonnegative(double x, const char* field) {
    if (!std::isfinite(x) || x < 0.0) throw DomainError(field, "must be finite and nonnegative");
}

void require_probability(double p, const char* field) {
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) throw DomainError(field, "must lie in [0, 1]");
}

// lambda p + ln(1 - p + p e^{-lambda}), written with expm1/log1p so the
// value stays accurate as lambda -> 0.
double bernoulli_cgf(double p, double lambda) {
    return lambda * p + std::log1p(p * std::expm1(-lambda));
}

double bernoulli_cgf_deriv(double p, double lambda) {
    const double em = std::expm1(-lambda);  // e^{-lambda} - 1 in (-1, 0]
    return p * (1.0 - p) * (-em) / (1.0 + p * em);
}

// Shift below which the centered expm1/log1p evaluation is used.
constexpr double kCenteredShift = 0.5;

double empirical_cgf_value(const LossSampleSet& s, double lambda) {
    if (s.zero_variance()) return 0.0;
    const auto values = s.values();
    const double mean = s.mean();
    const double shift = lambda * (mean - s.min());
    const double m = static_cast<double>(values.size());
    if (shift <= kCenteredShift) {
        long double acc = 0.0L;
        for (double v : values) acc += std::expm1(-lambda * (v - mean));
        return std::log1p(static_cast<double>(acc / m));
    }
    long double acc = 0.0L;
    for (double v : values) acc += std::exp(-lambda * (v - s.min()));
    return shift + std::log(static_cast<double>(acc / m));
}

double empirical_cgf_deriv(const LossSampleSet& s, double lambda) {
    if (s.zero_variance()) return 0.0;
    const double mean = s.mean();
    long double num = 0.0L;
    long double den = 0.0L;
    for (double v : s.values()) {
        const double w = std::exp(-lambda * (v - s.min()));
        num += (mean - v) * w;
        den += w;
    }
    return static_cast<double>(num / den);
}

} // namespace

std::string_view to_string(RateKind kind) {
    switch (kind) {
        case RateKind::bernoulli: return "bernoulli";
        case RateKind::scaled_bernoulli: return "scaled_bernoulli";
        case RateKind::subgaussian: return "subgaussian";
        case RateKind::subgamma: return "subgamma";
        case RateKind::l2: return "l2";
        case RateKind::logsobolev: return "logsobolev";
        case RateKind::empirical: return "empirical";
        case RateKind::mixture: return "mixture";
    }
    return "unknown";
}

LossSampleSet::LossSampleSet(std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() < 2) throw DomainError("samples", "at least two loss values are required");
    long double sum = 0.0L;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        const double v = values_[i];
        if (!std::isfinite(v) || v < 0.0)
            throw DomainError("samples", "value " + std::to_string(i) + " is negative or not finite");
        sum += v;
    }
    const auto [lo, hi] = std::minmax_element(values_.begin(), values_.end());
    min_ = *lo;
    max_ = *hi;
    mean_ = static_cast<double>(sum / static_cast<long double>(values_.size()));
    if (min_ == max_) {
        mean_ = min_;
        return;
    }
    long double ss = 0.0L;
    for (double v : values_) ss += static_cast<long double>(v - mean_) * (v - mean_);
    variance_ = static_cast<double>(ss / static_cast<long double>(values_.size()));
}

RateFunction::RateFunction() : RateFunction(rate_params::SubGaussian{0.0}, kInf) {}

RateFunction::RateFunction(Params params, double domain_sup)
    : params_(std::move(params)), domain_sup_(domain_sup) {}

RateFunction RateFunction::bernoulli(double p) {
    require_probability(p, "p");
    return RateFunction(rate_params::Bernoulli{p}, kInf);
}

RateFunction RateFunction::scaled_bernoulli(double p, double scale) {
    require_probability(p, "p");
    require_nonnegative(scale, "B");
    return RateFunction(rate_params::ScaledBernoulli{p, scale}, kInf);
}

RateFunction RateFunction::subgaussian(double sigma2) {
    require_nonnegative(sigma2, "sigma2");
    return RateFunction(rate_params::SubGaussian{sigma2}, kInf);
}

RateFunction RateFunction::subgamma(double sigma2, double c) {
    require_nonnegative(sigma2, "sigma2");
    require_nonnegative(c, "c");
    return RateFunction(rate_params::SubGamma{sigma2, c}, c > 0.0 ? 1.0 / c : kInf);
}

RateFunction RateFunction::l2(double lipschitz_m, double theta_norm2) {
    require_nonnegative(lipschitz_m, "M");
    require_nonnegative(theta_norm2, "theta_norm2");
    return RateFunction(rate_params::L2{lipschitz_m, theta_norm2}, kInf);
}

RateFunction RateFunction::logsobolev(double c, double grad_norm2) {
    require_nonnegative(c, "C");
    require_nonnegative(grad_norm2, "grad_norm2");
    return RateFunction(rate_params::LogSobolev{c, grad_norm2}, kInf);
}

RateFunction RateFunction::empirical(LossSampleSet samples) {
    return RateFunction(
        rate_params::Empirical{std::make_shared<const LossSampleSet>(std::move(samples))}, kInf);
}

RateFunction RateFunction::mixture(const SimplexDistribution& weights,
                                   std::vector<RateFunction> members) {
    if (weights.size() != members.size())
        throw DomainError("weights", "length does not match the number of members");
    double b = kInf;
    for (std::size_t i = 0; i < members.size(); ++i)
        if (weights[i] > 0.0) b = std::min(b, members[i].domain_sup());
    auto w = std::make_shared<const std::vector<double>>(weights.weights().begin(),
                                                         weights.weights().end());
    auto m = std::make_shared<const std::vector<RateFunction>>(std::move(members));
    return RateFunction(rate_params::Mixture{std::move(w), std::move(m)}, b);
}

RateKind RateFunction::kind() const noexcept {
    return static_cast<RateKind>(params_.index());
}

void RateFunction::check_domain(double lambda) const {
    if (std::isnan(lambda) || lambda < 0.0 || lambda >= domain_sup_)
        throw DomainError("lambda", "value " + std::to_string(lambda) + " outside [0, " +
                                        std::to_string(domain_sup_) + ")");
}

double RateFunction::eval(double lambda) const {
    check_domain(lambda);
    return eval_unchecked(lambda);
}

double RateFunction::derivative(double lambda) const {
    check_domain(lambda);
    if (lambda == 0.0) return 0.0;
    return derivative_unchecked(lambda);
}

double RateFunction::eval_unchecked(double lambda) const {
    return std::visit(
        Overloaded{
            [&](const rate_params::Bernoulli& b) { return bernoulli_cgf(b.p, lambda); },
            [&](const rate_params::ScaledBernoulli& b) {
                return bernoulli_cgf(b.p, lambda * b.scale);
            },
            [&](const rate_params::SubGaussian& g) { return 0.5 * lambda * lambda * g.sigma2; },
            [&](const rate_params::SubGamma& g) {
                return lambda * lambda * g.sigma2 / (2.0 * (1.0 - g.c * lambda));
            },
            [&](const rate_params::L2& l) {
                return 2.0 * l.lipschitz_m * lambda * lambda * l.theta_norm2;
            },
            [&](const rate_params::LogSobolev& l) {
                return 0.5 * l.c * lambda * lambda * l.grad_norm2;
            },
            [&](const rate_params::Empirical& e) { return empirical_cgf_value(*e.samples, lambda); },
            [&](const rate_params::Mixture& m) {
                double acc = 0.0;
                for (std::size_t i = 0; i < m.members->size(); ++i)
                    if ((*m.weights)[i] > 0.0)
                        acc += (*m.weights)[i] * (*m.members)[i].eval_unchecked(lambda);
                return acc;
            },
        },
        params_);
}

double RateFunction::derivative_unchecked(double lambda) const {
    return std::visit(
        Overloaded{
            [&](const rate_params::Bernoulli& b) { return bernoulli_cgf_deriv(b.p, lambda); },
            [&](const rate_params::ScaledBernoulli& b) {
                return b.scale * bernoulli_cgf_deriv(b.p, lambda * b.scale);
            },
            [&](const rate_params::SubGaussian& g) { return lambda * g.sigma2; },
            [&](const rate_params::SubGamma& g) {
                const double u = 1.0 - g.c * lambda;
                return g.sigma2 * lambda * (2.0 - g.c * lambda) / (2.0 * u * u);
            },
            [&](const rate_params::L2& l) { return 4.0 * l.lipschitz_m * lambda * l.theta_norm2; },
            [&](const rate_params::LogSobolev& l) { return l.c * lambda * l.grad_norm2; },
            [&](const rate_params::Empirical& e) { return empirical_cgf_deriv(*e.samples, lambda); },
            [&](const rate_params::Mixture& m) {
                double acc = 0.0;
                for (std::size_t i = 0; i < m.members->size(); ++i)
                    if ((*m.weights)[i] > 0.0)
                        acc += (*m.weights)[i] * (*m.members)[i].derivative_unchecked(lambda);
                return acc;
            },
        },
        params_);
}

double RateFunction::slope_limit() const {
    const auto quadratic = [](double coeff) { return coeff > 0.0 ? kInf : 0.0; };
    return std::visit(
        Overloaded{
            [&](const rate_params::Bernoulli& b) { return b.p * (1.0 - b.p) > 0.0 ? b.p : 0.0; },
            [&](const rate_params::ScaledBernoulli& b) {
                return b.p * (1.0 - b.p) * b.scale > 0.0 ? b.scale * b.p : 0.0;
            },
            [&](const rate_params::SubGaussian& g) { return quadratic(g.sigma2); },
            [&](const rate_params::SubGamma& g) { return quadratic(g.sigma2); },
            [&](const rate_params::L2& l) { return quadratic(l.lipschitz_m * l.theta_norm2); },
            [&](const rate_params::LogSobolev& l) { return quadratic(l.c * l.grad_norm2); },
            [&](const rate_params::Empirical& e) {
                return e.samples->zero_variance() ? 0.0 : e.samples->mean() - e.samples->min();
            },
            [&](const rate_params::Mixture& m) {
                double acc = 0.0;
                for (std::size_t i = 0; i < m.members->size(); ++i) {
                    const double w = (*m.weights)[i];
                    if (w <= 0.0) continue;
                    const RateFunction& member = (*m.members)[i];
                    const double slope = member.domain_sup() == domain_sup_
                                             ? member.slope_limit()
                                             : member.derivative_unchecked(domain_sup_);
                    acc += w * slope;
                }
                return acc;
            },
        },
        params_);
}

RateFunction expected_rate(const SimplexDistribution& weights, std::vector<RateFunction> members) {
    return RateFunction::mixture(weights, std::move(members));
}

RateFunction empirical_cgf(const LossSampleSet& samples) {
    return RateFunction::empirical(samples);
}

} // namespace pbc
