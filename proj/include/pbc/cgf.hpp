// cgf.hpp
//
// Cumulant generating functions of centered losses and their convex upper
// bounds psi. Every RateFunction f satisfies f(0) = f'(0) = 0, is convex on
// its domain [0, b), and is immutable once built.
#pragma once
#include <cstddef>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pbc/simplex.hpp"

namespace pbc {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class RateKind {
    bernoulli,
    scaled_bernoulli,
    subgaussian,
    subgamma,
    l2,
    logsobolev,
    empirical,
    mixture,
};

std::string_view to_string(RateKind kind);

// Nonnegative loss values, at least two of them.
class LossSampleSet {
public:
    explicit LossSampleSet(std::vector<double> values);

    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double mean() const noexcept { return mean_; }
    // Plug-in (1/M) variance.
    double variance() const noexcept { return variance_; }
    bool zero_variance() const noexcept { return min_ == max_; }
    double min() const noexcept { return min_; }
    double max() const noexcept { return max_; }

private:
    std::vector<double> values_;
    double mean_ = 0.0;
    double variance_ = 0.0;
    double min_ = 0.0;
    double max_ = 0.0;
};

class RateFunction;

namespace rate_params {
struct Bernoulli { double p; };
struct ScaledBernoulli { double p; double scale; };
struct SubGaussian { double sigma2; };
struct SubGamma { double sigma2; double c; };
struct L2 { double lipschitz_m; double theta_norm2; };
struct LogSobolev { double c; double grad_norm2; };
struct Empirical { std::shared_ptr<const LossSampleSet> samples; };
struct Mixture {
    std::shared_ptr<const std::vector<double>> weights;
    std::shared_ptr<const std::vector<RateFunction>> members;
};
} // namespace rate_params

class RateFunction {
public:
    using Params = std::variant<rate_params::Bernoulli, rate_params::ScaledBernoulli,
                                rate_params::SubGaussian, rate_params::SubGamma, rate_params::L2,
                                rate_params::LogSobolev, rate_params::Empirical,
                                rate_params::Mixture>;

    // The identically-zero rate (constant loss).
    RateFunction();

    // Exact CGF of a {0,1} loss with mean p.
    static RateFunction bernoulli(double p);
    // Exact CGF of a {0,B} loss with P(loss = B) = p.
    static RateFunction scaled_bernoulli(double p, double scale);
    // lambda^2 sigma2 / 2.
    static RateFunction subgaussian(double sigma2);
    // lambda^2 sigma2 / (2 (1 - c lambda)) on [0, 1/c); c = 0 is sub-Gaussian.
    static RateFunction subgamma(double sigma2, double c);
    // 2 M lambda^2 |theta|^2 (parameter-Lipschitz loss, zero-variance origin).
    static RateFunction l2(double lipschitz_m, double theta_norm2);
    // (C/2) lambda^2 E|grad_x loss|^2.
    static RateFunction logsobolev(double c, double grad_norm2);
    static RateFunction empirical(LossSampleSet samples);
    // Weighted average of members; domain is the smallest domain among
    // members with positive weight.
    static RateFunction mixture(const SimplexDistribution& weights,
                                std::vector<RateFunction> members);

    RateKind kind() const noexcept;
    const Params& params() const noexcept { return params_; }

    // Supremum b of the domain [0, b); +inf for most kinds.
    double domain_sup() const noexcept { return domain_sup_; }

    double operator()(double lambda) const { return eval(lambda); }
    double eval(double lambda) const;
    double derivative(double lambda) const;

    // lim f'(lambda) as lambda -> b from below (possibly +inf).
    double slope_limit() const;

    // True when f' vanishes on the whole domain, i.e. f == 0.
    bool is_zero() const { return slope_limit() == 0.0; }

private:
    RateFunction(Params params, double domain_sup);
    void check_domain(double lambda) const;
    double eval_unchecked(double lambda) const;
    double derivative_unchecked(double lambda) const;

    Params params_;
    double domain_sup_ = kInf;
};

// E_rho[f_theta(lambda)] as a RateFunction.
RateFunction expected_rate(const SimplexDistribution& weights, std::vector<RateFunction> members);

// Plug-in CGF lambda * mean(l) + ln mean(exp(-lambda l)).
RateFunction empirical_cgf(const LossSampleSet& samples);

} // namespace pbc
