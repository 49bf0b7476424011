#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "pbc/cgf.hpp"
#include "pbc/errors.hpp"
#include "pbc/transform.hpp"

using Catch::Approx;
using pbc::DomainError;
using pbc::RateFunction;

namespace {

constexpr double kLegendreGrid = 0.082282878504571194;  // brute-force grid, step 1e-4
constexpr double kKl0305 = 0.082282878505051846;
constexpr double kS = 0.081108527903952504;              // (0.5 + ln(101/0.05)) / 100
constexpr double kSubgGap = 0.20138089271819274;
constexpr double kSubgLambda = 0.80552357087277094;
constexpr double kKl0103 = 0.1163217565860045;
constexpr double kKlInv01005 = 0.22007860110692462;

bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

} // namespace

TEST_CASE("legendre examples") {
    CHECK(pbc::legendre(RateFunction::subgaussian(2.0), 1.0) == Approx(0.25).epsilon(1e-12));
    const double v = pbc::legendre(RateFunction::bernoulli(0.5), 0.2);
    CHECK(std::abs(v - kKl0305) < 1e-12);
    CHECK(std::abs(v - kLegendreGrid) < 1e-9);
    CHECK(pbc::legendre(RateFunction::bernoulli(0.3), 0.0) == 0.0);
    CHECK(pbc::legendre(RateFunction::subgamma(1.0, 0.5), -1.0) == 0.0);
    CHECK_THROWS_AS(pbc::legendre(RateFunction::subgaussian(1.0), std::nan("")), DomainError);
}

TEST_CASE("legendre beyond the slope limit is infinite, at the limit it is finite") {
    const auto b = RateFunction::bernoulli(0.3);
    CHECK(pbc::legendre(b, 0.31) == pbc::kInf);
    // kl(0, 0.3) = -ln 0.7.
    CHECK(pbc::legendre(b, 0.3) == Approx(-std::log(0.7)).epsilon(1e-8));
    CHECK(pbc::legendre(RateFunction(), 0.1) == pbc::kInf);
}

TEST_CASE("legendre of bernoulli is a binary kl") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(0.02, 0.98);
    for (int t = 0; t < 300; ++t) {
        const double p = u(gen);
        const double a = p * u(gen);
        CHECK(std::abs(pbc::legendre(RateFunction::bernoulli(p), a) - pbc::binary_kl(p - a, p)) < 1e-8);
    }
}

TEST_CASE("inverse_rate examples") {
    auto r = pbc::inverse_rate(RateFunction::subgaussian(0.25), 0.08);
    CHECK(r.gap == Approx(0.2).epsilon(1e-10));
    CHECK(r.lambda_star == Approx(0.8).epsilon(1e-8));
    CHECK(pbc::inverse_rate(RateFunction::subgamma(1.0, 0.5), 0.5).gap == Approx(1.25).epsilon(1e-10));
    r = pbc::inverse_rate(RateFunction::subgaussian(0.25), kS);
    CHECK(rel_close(r.gap, kSubgGap, 1e-8));
    CHECK(rel_close(r.lambda_star, kSubgLambda, 1e-6));
    CHECK(std::abs(r.residual) <= 1e-10);
}

TEST_CASE("inverse_rate degenerate cases") {
    const auto zero = pbc::inverse_rate(RateFunction(), 0.7);
    CHECK(zero.gap == 0.0);
    CHECK(zero.lambda_star == pbc::kInf);
    const auto flat = pbc::inverse_rate(pbc::empirical_cgf(pbc::LossSampleSet({0.4, 0.4})), 2.0);
    CHECK(flat.gap == 0.0);
    const auto s0 = pbc::inverse_rate(RateFunction::subgaussian(1.0), 0.0);
    CHECK(s0.gap == 0.0);
    CHECK_THROWS_AS(pbc::inverse_rate(RateFunction::subgaussian(1.0), -1e-3), DomainError);
}

TEST_CASE("inverse_rate of a bounded-slope rate saturates at the slope") {
    // Huge s: (s + f)/lambda decreases towards the mean p as lambda grows.
    const auto r = pbc::inverse_rate(RateFunction::bernoulli(0.3), 50.0);
    CHECK(r.gap <= 0.3 + 1e-12);
    CHECK(r.gap > 0.29);
}

TEST_CASE("inverse_rate certificate: gap equals the objective at lambda*") {
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> u(0.01, 2.0);
    for (int t = 0; t < 200; ++t) {
        const std::vector<RateFunction> rfs{RateFunction::subgaussian(u(gen)), RateFunction::subgamma(u(gen), u(gen)),
                                            RateFunction::bernoulli(0.5 * u(gen)),
                                            pbc::empirical_cgf(pbc::LossSampleSet({0.0, u(gen), u(gen), 2.5}))};
        const double s = 0.2 * u(gen);
        for (const auto& rf : rfs) {
            const auto r = pbc::inverse_rate(rf, s);
            REQUIRE(r.gap >= 0.0);
            if (std::isfinite(r.lambda_star)) {
                CHECK(std::abs(r.residual) <= 1e-10 * std::max(1.0, s));
                CHECK(rel_close(r.gap, (s + rf.eval(r.lambda_star)) / r.lambda_star, 1e-12));
            }
        }
    }
}

TEST_CASE("inverse_rate is nondecreasing in s") {
    for (const auto& rf : {RateFunction::subgamma(0.5, 1.0), RateFunction::bernoulli(0.2),
                           pbc::empirical_cgf(pbc::LossSampleSet({0.0, 0.1, 3.0}))}) {
        double prev = 0.0;
        for (int k = 0; k < 100; ++k) {
            const double g = pbc::inverse_rate(rf, 0.02 * k).gap;
            CHECK(g >= prev - 1e-12);
            prev = g;
        }
    }
}

TEST_CASE("legendre / inverse_rate round trip") {
    std::mt19937_64 gen(13);
    std::uniform_real_distribution<double> u(0.05, 0.9);
    for (int t = 0; t < 200; ++t) {
        const double p = u(gen);
        const std::vector<RateFunction> rfs{RateFunction::bernoulli(p), RateFunction::subgaussian(u(gen)),
                                            RateFunction::subgamma(u(gen), u(gen))};
        for (const auto& rf : rfs) {
            const double sup = std::isfinite(rf.slope_limit()) ? rf.slope_limit() : 5.0;
            const double a = 0.9 * sup * u(gen);
            const double s = pbc::legendre(rf, a);
            CHECK(rel_close(pbc::inverse_rate(rf, s).gap, a, 1e-7));
        }
    }
}

TEST_CASE("closed forms on random tuples") {
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> u(1e-3, 10.0);
    for (int t = 0; t < 1000; ++t) {
        const double sigma2 = u(gen), c = u(gen), s = u(gen);
        CHECK(rel_close(pbc::inverse_rate(RateFunction::subgaussian(sigma2), s).gap, std::sqrt(2 * sigma2 * s), 1e-8));
        CHECK(rel_close(pbc::inverse_rate(RateFunction::subgamma(sigma2, c), s).gap,
                        std::sqrt(2 * sigma2 * s) + c * s, 1e-8));
    }
}

TEST_CASE("binary kl examples and errors") {
    CHECK(pbc::binary_kl(0.3, 0.3) == 0.0);
    CHECK(std::abs(pbc::binary_kl(0.1, 0.3) - kKl0103) < 1e-14);
    CHECK(pbc::binary_kl(0.0, 0.5) == Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(pbc::binary_kl(0.5, 1.0) == pbc::kInf);
    CHECK(pbc::binary_kl(0.0, 0.0) == 0.0);
    CHECK(pbc::binary_kl(1.0, 1.0) == 0.0);
    CHECK_THROWS_AS(pbc::binary_kl(-0.1, 0.5), DomainError);
    CHECK_THROWS_AS(pbc::binary_kl(0.1, 1.5), DomainError);
}

TEST_CASE("binary kl upper inverse") {
    CHECK(pbc::binary_kl_upper_inverse(0.1, 0.0) == 0.1);
    const double b = pbc::binary_kl_upper_inverse(0.1, 0.05);
    CHECK(std::abs(b - kKlInv01005) < 1e-10);
    CHECK(std::abs(pbc::binary_kl(0.1, b) - 0.05) < 1e-8);
    CHECK(pbc::binary_kl_upper_inverse(0.0, std::log(2.0)) == Approx(0.5).epsilon(1e-14));
    CHECK(pbc::binary_kl_upper_inverse(0.2, pbc::kInf) == 1.0);
    CHECK_THROWS_AS(pbc::binary_kl_upper_inverse(0.2, -0.1), DomainError);
    CHECK_THROWS_AS(pbc::binary_kl_upper_inverse(1.2, 0.1), DomainError);

    std::mt19937_64 gen(19);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 500; ++t) {
        const double a = 0.95 * u(gen);
        const double target = a + (0.999 - a) * u(gen);
        const double back = pbc::binary_kl_upper_inverse(a, pbc::binary_kl(a, target));
        CHECK(std::abs(back - target) < 1e-8);
    }
}
