#include "pbc/bounds.hpp"

#include <array>
#include <cmath>
#include <utility>

#include "pbc/errors.hpp"

namespace pbc {

namespace {

constexpr std::array<std::pair<BoundKind, std::string_view>, 11> kKindNames{{
    {BoundKind::pac_bayes_chernoff, "pac_bayes_chernoff"},
    {BoundKind::fixed_lambda, "fixed_lambda"},
    {BoundKind::chernoff_binary_kl, "chernoff_kl"},
    {BoundKind::subgaussian, "subgaussian"},
    {BoundKind::subgamma, "subgamma"},
    {BoundKind::l2, "l2"},
    {BoundKind::logsobolev_oracle, "logsobolev_oracle"},
    {BoundKind::empirical_gradient, "empirical_gradient"},
    {BoundKind::mcallester, "mcallester"},
    {BoundKind::seeger, "seeger"},
    {BoundKind::alquier_oracle, "alquier_oracle"},
}};

void require_nonnegative(double x, const char* field) {
    if (!std::isfinite(x) || x < 0.0) throw DomainError(field, "must be finite and nonnegative");
}

BoundReport make_report(BoundKind kind, const BoundQuery& q, double complexity_s, double gap) {
    BoundReport r;
    r.kind = kind;
    r.complexity = complexity_s;
    r.empirical_risk = q.emp_gibbs_risk;
    r.gap = gap;
    r.value = q.emp_gibbs_risk + gap;
    return r;
}

// Report for bounds stated as a kl-inverse: value is the inverse itself.
BoundReport kl_inverse_report(BoundKind kind, const BoundQuery& q, double radius) {
    if (q.emp_gibbs_risk > 1.0) throw DomainError("emp_gibbs_risk", "must lie in [0, 1]");
    BoundReport r;
    r.kind = kind;
    r.complexity = radius;
    r.empirical_risk = q.emp_gibbs_risk;
    r.value = std::isinf(radius) ? kInf : binary_kl_upper_inverse(q.emp_gibbs_risk, radius);
    r.gap = r.value - q.emp_gibbs_risk;
    return r;
}

// (KL + ln(2 sqrt(n)/delta)), shared by the two bounded-loss baselines.
double baseline_numerator(const BoundQuery& q) {
    return q.kl_div + std::log(2.0 * std::sqrt(static_cast<double>(q.n)) / q.delta);
}

} // namespace

void BoundQuery::validate() const {
    if (!std::isfinite(emp_gibbs_risk) || emp_gibbs_risk < 0.0)
        throw DomainError("emp_gibbs_risk", "must be finite and nonnegative");
    if (std::isnan(kl_div) || kl_div < 0.0) throw DomainError("kl_div", "must be nonnegative");
    if (n < 2) throw DomainError("n", "must be at least 2");
    if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta", "must lie in (0, 1)");
}

std::string_view to_string(BoundKind kind) {
    for (const auto& [k, name] : kKindNames)
        if (k == kind) return name;
    return "unknown";
}

std::optional<BoundKind> parse_bound_kind(std::string_view name) {
    for (const auto& [k, n] : kKindNames)
        if (n == name) return k;
    if (name == "chernoff_binary_kl" || name == "binary_kl") return BoundKind::chernoff_binary_kl;
    if (name == "logsobolev") return BoundKind::logsobolev_oracle;
    return std::nullopt;
}

double complexity(const BoundQuery& q, ComplexityVariant variant) {
    q.validate();
    if (std::isinf(q.kl_div)) return kInf;
    const double n = static_cast<double>(q.n);
    const double confidence = variant == ComplexityVariant::log_n_over_delta
                                  ? std::log(n / q.delta)
                                  : std::log(2.0 * n / q.delta);
    return (q.kl_div + confidence) / (n - 1.0);
}

BoundReport pac_bayes_chernoff(const BoundQuery& q, const RateFunction& expected_rate) {
    const double s = complexity(q);
    if (std::isinf(s)) return make_report(BoundKind::pac_bayes_chernoff, q, s, kInf);
    const InversionResult inv = inverse_rate(expected_rate, s);
    BoundReport r = make_report(BoundKind::pac_bayes_chernoff, q, s, inv.gap);
    r.lambda_star = inv.lambda_star;
    return r;
}

BoundReport fixed_lambda_bound(const BoundQuery& q, const RateFunction& rate, double lambda,
                               FixedLambdaNormalization normalization) {
    q.validate();
    if (std::isnan(lambda) || lambda <= 0.0 || lambda >= rate.domain_sup())
        throw DomainError("lambda", "must lie in (0, b)");
    double s = 0.0;
    if (normalization == FixedLambdaNormalization::chernoff) {
        s = complexity(q);
    } else {
        s = std::isinf(q.kl_div) ? kInf
                                 : (q.kl_div + std::log(1.0 / q.delta)) / static_cast<double>(q.n);
    }
    BoundReport r = make_report(BoundKind::fixed_lambda, q, s, (s + rate.eval(lambda)) / lambda);
    r.lambda_star = lambda;
    return r;
}

BoundReport chernoff_binary_kl(const BoundQuery& q) {
    return kl_inverse_report(BoundKind::chernoff_binary_kl, q, complexity(q));
}

BoundReport subgaussian_bound(const BoundQuery& q, double expected_sigma2) {
    require_nonnegative(expected_sigma2, "expected_sigma2");
    const double s = complexity(q);
    BoundReport r = make_report(BoundKind::subgaussian, q, s, std::sqrt(2.0 * expected_sigma2 * s));
    if (std::isfinite(s)) r.lambda_star = expected_sigma2 > 0.0 ? std::sqrt(2.0 * s / expected_sigma2) : kInf;
    return r;
}

BoundReport subgamma_bound(const BoundQuery& q, double sigma2, double c) {
    require_nonnegative(sigma2, "sigma2");
    require_nonnegative(c, "c");
    const double s = complexity(q);
    BoundReport r = make_report(BoundKind::subgamma, q, s, std::sqrt(2.0 * sigma2 * s) + c * s);
    if (std::isfinite(s)) r.lambda_star = inverse_rate(RateFunction::subgamma(sigma2, c), s).lambda_star;
    return r;
}

L2BoundResult l2_bound(const BoundQuery& q, double lipschitz_m, double expected_theta_norm2) {
    require_nonnegative(lipschitz_m, "M");
    require_nonnegative(expected_theta_norm2, "expected_theta_norm2");
    const double s = complexity(q);
    L2BoundResult out;
    out.printed_gap = std::sqrt(2.0 * lipschitz_m * expected_theta_norm2 * s);
    if (std::isinf(s)) {
        out.report = make_report(BoundKind::l2, q, s, kInf);
        out.agrees_with_printed = true;
        return out;
    }
    const InversionResult inv = inverse_rate(RateFunction::l2(lipschitz_m, expected_theta_norm2), s);
    out.report = make_report(BoundKind::l2, q, s, inv.gap);
    out.report.lambda_star = inv.lambda_star;
    out.agrees_with_printed =
        std::abs(inv.gap - out.printed_gap) <= 1e-8 * std::max(1.0, inv.gap);
    return out;
}

BoundReport logsobolev_oracle_bound(const BoundQuery& q, double c, double expected_grad_norm2) {
    require_nonnegative(c, "C");
    require_nonnegative(expected_grad_norm2, "expected_grad_norm2");
    const double s = complexity(q);
    const double scale = c * expected_grad_norm2;
    BoundReport r = make_report(BoundKind::logsobolev_oracle, q, s, std::sqrt(2.0 * scale * s));
    if (std::isfinite(s)) r.lambda_star = scale > 0.0 ? std::sqrt(2.0 * s / scale) : kInf;
    return r;
}

double gradient_concentration(double emp_grad_norm2, double lipschitz_l, double kl_div, long n,
                              double delta2) {
    require_nonnegative(emp_grad_norm2, "emp_grad_norm2");
    require_nonnegative(lipschitz_l, "L");
    if (std::isnan(kl_div) || kl_div < 0.0) throw DomainError("kl_div", "must be nonnegative");
    if (n < 2) throw DomainError("n", "must be at least 2");
    if (!(delta2 > 0.0 && delta2 < 1.0)) throw DomainError("delta2", "must lie in (0, 1)");
    if (std::isinf(kl_div)) return kInf;
    const double nd = static_cast<double>(n);
    const double radius = (kl_div + std::log(std::sqrt(nd) / delta2)) / (nd - 1.0);
    return emp_grad_norm2 + lipschitz_l / std::sqrt(2.0) * std::sqrt(radius);
}

BoundReport empirical_gradient_bound(const BoundQuery& q, double c, double lipschitz_l,
                                     double expected_emp_grad_norm2) {
    require_nonnegative(c, "C");
    require_nonnegative(lipschitz_l, "L");
    require_nonnegative(expected_emp_grad_norm2, "expected_emp_grad_norm2");
    const double k = complexity(q, ComplexityVariant::log_2n_over_delta);
    const double inner = 2.0 * c * expected_emp_grad_norm2 * k +
                         std::sqrt(2.0) * c * lipschitz_l * std::pow(k, 1.5);
    return make_report(BoundKind::empirical_gradient, q, k, std::sqrt(inner));
}

BoundReport mcallester_bound(const BoundQuery& q) {
    q.validate();
    const double radius = baseline_numerator(q) / (2.0 * static_cast<double>(q.n));
    return make_report(BoundKind::mcallester, q, radius, std::sqrt(radius));
}

BoundReport seeger_bound(const BoundQuery& q) {
    q.validate();
    return kl_inverse_report(BoundKind::seeger, q, baseline_numerator(q) / static_cast<double>(q.n));
}

} // namespace pbc
