#include <catch_amalgamated.hpp>

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "pbc/bounds.hpp"
#include "pbc/errors.hpp"

using Catch::Approx;
using pbc::BoundQuery;
using pbc::DomainError;
using pbc::RateFunction;
using pbc::kInf;

namespace {

constexpr double kComplexityKl05 = 0.081108527903952504;
constexpr double kComplexityKl0 = 0.076108527903952504;
constexpr double kSubgGap = 0.20138089271819274;
constexpr double kChernoffKl = 0.25451955762711895;
constexpr double kBanerjee = 0.53995732273553991;
constexpr double kLogSobolevOracle = 0.79886221041893134;
constexpr double kGradConcentration = 1.6958151703444336;
constexpr double kEmpGradK = 0.083039999709551958;
constexpr double kEmpGradGap = 0.054903996017779504;
constexpr double kMcAllesterGap = 0.17308183826022853;
constexpr double kSeegerRadius = 0.05991464547107982;
constexpr double kSeegerValue = 0.23378373754881157;
constexpr double kL2BruteForce = 2.0;

bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

// KL that makes complexity(q) exactly s for the given n, delta.
BoundQuery query_with_complexity(double risk, double s, long n, double delta) {
    return {risk, s * static_cast<double>(n - 1) - std::log(static_cast<double>(n) / delta), n, delta};
}

} // namespace

TEST_CASE("complexity examples") {
    CHECK(std::abs(pbc::complexity({0.1, 0.5, 101, 0.05}) - kComplexityKl05) < 1e-15);
    CHECK(std::abs(pbc::complexity({0.1, 0.0, 101, 0.05}) - kComplexityKl0) < 1e-15);
    CHECK(pbc::complexity({0.1, kInf, 101, 0.05}) == kInf);
    CHECK(pbc::complexity({0.1, 0.0, 101, 0.05}, pbc::ComplexityVariant::log_2n_over_delta) ==
          Approx(std::log(4040.0) / 100.0));
}

TEST_CASE("query validation names the field") {
    const auto field_of = [](BoundQuery q) {
        try {
            q.validate();
        } catch (const DomainError& e) {
            return e.field();
        }
        return std::string();
    };
    CHECK(field_of({0.1, 0.5, 1, 0.05}) == "n");
    CHECK(field_of({0.1, 0.5, 10, 0.0}) == "delta");
    CHECK(field_of({0.1, 0.5, 10, 1.0}) == "delta");
    CHECK(field_of({-0.1, 0.5, 10, 0.05}) == "emp_gibbs_risk");
    CHECK(field_of({0.1, -0.5, 10, 0.05}) == "kl_div");
    CHECK(field_of({0.1, 0.5, 10, 0.05}).empty());
}

TEST_CASE("pac_bayes_chernoff examples") {
    const auto r = pbc::pac_bayes_chernoff({0.1, 0.5, 101, 0.05}, RateFunction::subgaussian(0.25));
    CHECK(rel_close(r.gap, kSubgGap, 1e-8));
    CHECK(rel_close(r.value, 0.1 + kSubgGap, 1e-8));
    CHECK(r.empirical_risk == 0.1);
    CHECK(r.complexity == Approx(kComplexityKl05));
    const auto z = pbc::pac_bayes_chernoff({0.2, 0.0, 50, 0.05}, RateFunction());
    CHECK(z.value == 0.2);
    CHECK(z.lambda_star.value() == kInf);
}

TEST_CASE("fixed lambda, Banerjee normalization") {
    const auto r = pbc::fixed_lambda_bound({0.0, 1.0, 100, 0.05}, RateFunction::subgaussian(1.0), 1.0,
                                           pbc::FixedLambdaNormalization::banerjee);
    CHECK(std::abs(r.value - kBanerjee) < 1e-14);
    CHECK_THROWS_AS(pbc::fixed_lambda_bound({0.0, 1.0, 100, 0.05}, RateFunction::subgamma(1.0, 1.0), 1.0),
                    DomainError);
    CHECK_THROWS_AS(pbc::fixed_lambda_bound({0.0, 1.0, 100, 0.05}, RateFunction::subgaussian(1.0), 0.0),
                    DomainError);
}

TEST_CASE("chernoff binary kl") {
    CHECK(std::abs(pbc::chernoff_binary_kl({0.1, 0.0, 101, 0.05}).value - kChernoffKl) < 1e-10);
    // Zero empirical risk: closed form.
    const BoundQuery q{0.0, 0.3, 101, 0.05};
    CHECK(pbc::chernoff_binary_kl(q).value == Approx(-std::expm1(-pbc::complexity(q))).epsilon(1e-14));
    CHECK_THROWS_AS(pbc::chernoff_binary_kl({1.5, 0.0, 101, 0.05}), DomainError);
}

TEST_CASE("closed-form bounds") {
    CHECK(rel_close(pbc::subgaussian_bound({0.1, 0.5, 101, 0.05}, 0.25).value, 0.1 + kSubgGap, 1e-14));
    CHECK(pbc::subgaussian_bound({0.1, 0.5, 101, 0.05}, 0.0).value == 0.1);
    const auto q = query_with_complexity(0.0, 0.5, 101, 0.05);
    CHECK(pbc::subgamma_bound(q, 1.0, 0.5).gap == Approx(1.25).epsilon(1e-12));
    CHECK(pbc::logsobolev_oracle_bound({0.65, 1.0, 10001, 0.05}, 0.01, 839.0).value ==
          Approx(kLogSobolevOracle).epsilon(1e-14));
    CHECK(pbc::logsobolev_oracle_bound({0.65, 1.0, 10001, 0.05}, 0.01, 0.0).value == 0.65);
    CHECK_THROWS_AS(pbc::subgaussian_bound({0.1, 0.5, 101, 0.05}, -1.0), DomainError);
}

TEST_CASE("l2 bound reports the solver value and the printed form") {
    const auto q = query_with_complexity(0.0, 0.5, 101, 0.05);
    const auto r = pbc::l2_bound(q, 1.0, 1.0);
    CHECK(r.report.gap == Approx(kL2BruteForce).epsilon(1e-9));
    CHECK(r.printed_gap == Approx(1.0).epsilon(1e-12));
    CHECK_FALSE(r.agrees_with_printed);
    const auto zero = pbc::l2_bound({0.3, 0.5, 101, 0.05}, 1.0, 0.0);
    CHECK(zero.report.value == 0.3);
    CHECK(zero.agrees_with_printed);
}

TEST_CASE("gradient bounds") {
    CHECK(pbc::gradient_concentration(1.0, 4.0, 0.0, 100, 0.025) == Approx(kGradConcentration).epsilon(1e-14));
    CHECK(pbc::gradient_concentration(1.0, 0.0, 0.0, 100, 0.025) == 1.0);
    CHECK(pbc::gradient_concentration(0.0, 4.0, 0.0, 100, 0.025) == Approx(kGradConcentration - 1.0).epsilon(1e-13));
    CHECK(pbc::gradient_concentration(1.0, 4.0, kInf, 100, 0.025) == kInf);
    CHECK_THROWS_AS(pbc::gradient_concentration(1.0, 4.0, 0.0, 100, 0.0), DomainError);
    const auto r = pbc::empirical_gradient_bound({0.2, 0.0, 101, 0.05}, 0.01, 4.0, 1.0);
    CHECK(r.complexity == Approx(kEmpGradK).epsilon(1e-14));
    CHECK(r.gap == Approx(kEmpGradGap).epsilon(1e-13));
    CHECK(pbc::empirical_gradient_bound({0.2, 0.0, 101, 0.05}, 0.0, 4.0, 1.0).value == 0.2);
}

TEST_CASE("baselines") {
    CHECK(pbc::mcallester_bound({0.0, 0.0, 100, 0.05}).gap == Approx(kMcAllesterGap).epsilon(1e-14));
    CHECK(pbc::mcallester_bound({0.0, kInf, 100, 0.05}).value == kInf);
    double prev = kInf;
    for (long n = 10; n < 100000; n *= 2) {
        const double g = pbc::mcallester_bound({0.0, 0.0, n, 0.05}).gap;
        CHECK(g < prev);
        prev = g;
    }
    const auto s = pbc::seeger_bound({0.1, 0.0, 100, 0.05});
    CHECK(s.complexity == Approx(kSeegerRadius).epsilon(1e-14));
    CHECK(std::abs(s.value - kSeegerValue) < 1e-10);
    CHECK(pbc::seeger_bound({0.0, 0.0, 100, 0.05}).value == Approx(-std::expm1(-kSeegerRadius)).epsilon(1e-14));
}

TEST_CASE("bound kind names round-trip") {
    for (auto k : {pbc::BoundKind::pac_bayes_chernoff, pbc::BoundKind::fixed_lambda, pbc::BoundKind::chernoff_binary_kl,
                   pbc::BoundKind::subgaussian, pbc::BoundKind::subgamma, pbc::BoundKind::l2,
                   pbc::BoundKind::logsobolev_oracle, pbc::BoundKind::empirical_gradient, pbc::BoundKind::mcallester,
                   pbc::BoundKind::seeger, pbc::BoundKind::alquier_oracle})
        CHECK(pbc::parse_bound_kind(pbc::to_string(k)) == k);
    CHECK(pbc::parse_bound_kind("chernoff_binary_kl") == pbc::BoundKind::chernoff_binary_kl);
    CHECK_FALSE(pbc::parse_bound_kind("nope").has_value());
}

TEST_CASE("optimized bound dominates every fixed lambda") {
    std::mt19937_64 gen(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 50; ++t) {
        const BoundQuery q{u(gen), 3.0 * u(gen), 20 + static_cast<long>(2000 * u(gen)), 0.01 + 0.2 * u(gen)};
        const std::vector<RateFunction> rfs{RateFunction::subgaussian(0.05 + u(gen)),
                                            RateFunction::subgamma(0.05 + u(gen), 0.1 + u(gen)),
                                            RateFunction::bernoulli(0.05 + 0.9 * u(gen))};
        for (const auto& rf : rfs) {
            const double best = pbc::pac_bayes_chernoff(q, rf).value;
            for (int k = 0; k < 20; ++k) {
                const double hi = std::isfinite(rf.domain_sup()) ? rf.domain_sup() : 50.0;
                const double lambda = hi * (1e-3 + 0.998 * u(gen));
                CHECK(best <= pbc::fixed_lambda_bound(q, rf, lambda).value + 1e-12);
            }
        }
    }
}

TEST_CASE("closed forms agree with the numeric optimizer") {
    std::mt19937_64 gen(29);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 1000; ++t) {
        const BoundQuery q{u(gen), 5.0 * u(gen), 10 + static_cast<long>(5000 * u(gen)), 0.01 + 0.3 * u(gen)};
        const double sigma2 = 0.01 + 2 * u(gen), c = 0.01 + u(gen), m = 0.01 + u(gen), th = 0.01 + 4 * u(gen);
        CHECK(rel_close(pbc::subgaussian_bound(q, sigma2).value,
                        pbc::pac_bayes_chernoff(q, RateFunction::subgaussian(sigma2)).value, 1e-8));
        CHECK(rel_close(pbc::subgamma_bound(q, sigma2, c).value,
                        pbc::pac_bayes_chernoff(q, RateFunction::subgamma(sigma2, c)).value, 1e-8));
        CHECK(rel_close(pbc::l2_bound(q, m, th).report.value,
                        pbc::pac_bayes_chernoff(q, RateFunction::l2(m, th)).value, 1e-8));
        CHECK(rel_close(pbc::logsobolev_oracle_bound(q, c, th).value,
                        pbc::pac_bayes_chernoff(q, RateFunction::logsobolev(c, th)).value, 1e-8));
    }
}

TEST_CASE("Pinsker consistency of the kl inverse") {
    std::mt19937_64 gen(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 1000; ++t) {
        const double a = u(gen), s = 2.0 * u(gen) * u(gen);
        CHECK(pbc::binary_kl_upper_inverse(a, s) <= a + std::sqrt(s / 2.0) + 1e-12);
    }
}

TEST_CASE("gap monotonicity and infinite KL") {
    using Eval = std::function<pbc::BoundReport(const BoundQuery&)>;
    const std::vector<Eval> evals{
        [](const BoundQuery& q) { return pbc::pac_bayes_chernoff(q, RateFunction::bernoulli(0.3)); },
        [](const BoundQuery& q) { return pbc::chernoff_binary_kl(q); },
        [](const BoundQuery& q) { return pbc::subgaussian_bound(q, 0.25); },
        [](const BoundQuery& q) { return pbc::subgamma_bound(q, 0.25, 0.5); },
        [](const BoundQuery& q) { return pbc::l2_bound(q, 0.5, 2.0).report; },
        [](const BoundQuery& q) { return pbc::logsobolev_oracle_bound(q, 0.01, 839.0); },
        [](const BoundQuery& q) { return pbc::empirical_gradient_bound(q, 0.01, 4.0, 1.0); },
        [](const BoundQuery& q) { return pbc::mcallester_bound(q); },
        [](const BoundQuery& q) { return pbc::seeger_bound(q); },
    };
    for (std::size_t e = 0; e < evals.size(); ++e) {
        INFO("evaluator " << e);
        const auto& f = evals[e];
        CHECK(f({0.1, kInf, 100, 0.05}).value == kInf);
        double prev = -1.0;
        for (double kl : {0.0, 0.1, 0.5, 1.0, 3.0, 10.0}) {
            const double g = f({0.1, kl, 100, 0.05}).gap;
            CHECK(g >= prev - 1e-12);
            prev = g;
        }
        prev = -1.0;
        for (double delta : {0.5, 0.2, 0.1, 0.05, 0.01, 0.001}) {
            const double g = f({0.1, 0.5, 100, delta}).gap;
            CHECK(g >= prev - 1e-12);
            prev = g;
        }
        prev = kInf;
        for (long n : {3L, 5L, 10L, 30L, 100L, 1000L, 100000L}) {
            const double g = f({0.1, 0.5, n, 0.05}).gap;
            CHECK(g <= prev + 1e-12);
            prev = g;
        }
    }
}
