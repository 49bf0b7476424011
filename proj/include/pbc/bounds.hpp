// bounds.hpp
//
// Generalization-bound evaluators. Each takes the empirical Gibbs risk, the
// KL divergence of posterior to prior, the sample size and the confidence
// level, plus whatever description of the CGF the bound needs.
#pragma once
#include <optional>
#include <string>
#include <string_view>

#include "pbc/cgf.hpp"
#include "pbc/transform.hpp"

namespace pbc {

struct BoundQuery {
    double emp_gibbs_risk = 0.0;  // E_rho[empirical risk]
    double kl_div = 0.0;          // KL(rho | pi), nats, may be +inf
    long n = 2;
    double delta = 0.05;

    // Throws DomainError naming the offending field.
    void validate() const;
};

enum class BoundKind {
    pac_bayes_chernoff,
    fixed_lambda,
    chernoff_binary_kl,
    subgaussian,
    subgamma,
    l2,
    logsobolev_oracle,
    empirical_gradient,
    mcallester,
    seeger,
    alquier_oracle,
};

std::string_view to_string(BoundKind kind);
std::optional<BoundKind> parse_bound_kind(std::string_view name);

enum class ComplexityVariant {
    log_n_over_delta,      // (KL + ln(n/delta)) / (n - 1)
    log_2n_over_delta,     // (KL + ln(2n/delta)) / (n - 1)
};

enum class FixedLambdaNormalization {
    banerjee,  // (KL + ln(1/delta)) / (lambda n)
    chernoff,  // (KL + ln(n/delta)) / (lambda (n - 1))
};

struct BoundReport {
    BoundKind kind = BoundKind::pac_bayes_chernoff;
    double value = 0.0;
    // Optimal (or supplied) lambda; +inf sentinel when no finite optimizer
    // exists, empty when the bound has no lambda.
    std::optional<double> lambda_star;
    // The argument fed to the inverse transform (or the kl radius).
    double complexity = 0.0;
    double empirical_risk = 0.0;
    double gap = 0.0;
};

double complexity(const BoundQuery& q,
                  ComplexityVariant variant = ComplexityVariant::log_n_over_delta);

// E_rho[emp risk] + inf_lambda { (KL + ln(n/delta)) / (lambda (n-1)) + f(lambda)/lambda }.
BoundReport pac_bayes_chernoff(const BoundQuery& q, const RateFunction& expected_rate);

// The same objective at a fixed lambda, under either normalization.
BoundReport fixed_lambda_bound(const BoundQuery& q, const RateFunction& rate, double lambda,
                               FixedLambdaNormalization normalization =
                                   FixedLambdaNormalization::chernoff);

// kl-inverse of the empirical Gibbs risk at radius (KL + ln(n/delta)) / (n-1).
BoundReport chernoff_binary_kl(const BoundQuery& q);

BoundReport subgaussian_bound(const BoundQuery& q, double expected_sigma2);
BoundReport subgamma_bound(const BoundQuery& q, double sigma2, double c);

// Bound under psi(theta, lambda) = 2 M lambda^2 |theta|^2. The value comes
// from inverting that psi exactly; the shorter closed form
// sqrt(2 M E|theta|^2 s) is reported alongside for comparison.
struct L2BoundResult {
    BoundReport report;
    double printed_gap = 0.0;
    bool agrees_with_printed = true;
};
L2BoundResult l2_bound(const BoundQuery& q, double lipschitz_m, double expected_theta_norm2);

BoundReport logsobolev_oracle_bound(const BoundQuery& q, double c, double expected_grad_norm2);

// High-probability upper bound on E_rho[E|grad_x loss|^2] from its empirical
// counterpart, for losses whose squared input gradient is bounded by L.
double gradient_concentration(double emp_grad_norm2, double lipschitz_l, double kl_div, long n,
                              double delta2);

// Fully empirical gradient bound; complexity uses ln(2n/delta).
BoundReport empirical_gradient_bound(const BoundQuery& q, double c, double lipschitz_l,
                                     double expected_emp_grad_norm2);

BoundReport mcallester_bound(const BoundQuery& q);
BoundReport seeger_bound(const BoundQuery& q);

} // namespace pbc
