#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "pbc/errors.hpp"
#include "pbc/harness.hpp"
#include "pbc/rng.hpp"

using Catch::Approx;
using pbc::CounterRng;
using pbc::CoverageBound;
using pbc::CoverageConfig;
using pbc::DomainError;
using pbc::Environment;
using pbc::PosteriorRule;
using pbc::SimplexDistribution;

namespace {

constexpr double kOracleMomentExact = 1.0125731812214795;  // e^{10 ln cosh 0.05}

pbc::SigmoidLinearSpec small_sigmoid() {
    pbc::SigmoidLinearSpec s;
    s.dimension = 3;
    s.radius = 2.0;
    s.weights = {{1.0, 0.0, 0.0}, {2.0, -1.0, 0.5}, {0.0, 0.0, 0.0}, {-1.0, 1.0, 3.0}};
    s.oracle_samples = 200'000;
    return s;
}

} // namespace

TEST_CASE("Philox4x32-10 known-answer vectors") {
    using P = pbc::Philox4x32;
    CHECK(P::generate({0, 0, 0, 0}, {0, 0}) == P::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(P::generate({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
          P::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(P::generate({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
          P::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("counter rng is addressable and stream-separated") {
    CounterRng a(5, 3, pbc::streams::dataset), b(5, 3, pbc::streams::dataset), c(5, 3, pbc::streams::oracle),
        d(5, 4, pbc::streams::dataset);
    std::vector<std::uint64_t> va, vb, vc, vd;
    for (int k = 0; k < 16; ++k) {
        va.push_back(a.next_u64());
        vb.push_back(b.next_u64());
        vc.push_back(c.next_u64());
        vd.push_back(d.next_u64());
    }
    CHECK(va == vb);
    CHECK(va != vc);
    CHECK(va != vd);
    CounterRng u(1, 0, 0);
    for (int k = 0; k < 10000; ++k) {
        const double x = u.uniform();
        REQUIRE(x >= 0.0);
        REQUIRE(x < 1.0);
        const double y = u.uniform_open0();
        REQUIRE(y > 0.0);
        REQUIRE(y <= 1.0);
    }
}

TEST_CASE("draw_dataset basics") {
    const auto zero = Environment::bernoulli_ensemble({0.0, 0.0});
    const auto m = zero.draw_dataset(50, 1);
    for (std::size_t i = 0; i < 2; ++i)
        for (double v : m.row(i)) CHECK(v == 0.0);

    const auto env = Environment::bernoulli_ensemble({0.2, 0.7});
    CHECK(env.comonotone_column(0.5) == std::vector<double>{0.0, 1.0});

    const auto again = env.draw_dataset(100, 9, 4);
    const auto same = pbc::draw_dataset(env, 100, 9, 4);
    for (std::size_t j = 0; j < 100; ++j) CHECK(again.at(1, j) == same.at(1, j));
    // Comonotone: a loss on the low-p model implies a loss on the high-p one.
    for (std::size_t j = 0; j < 100; ++j) CHECK(again.at(0, j) <= again.at(1, j));

    CHECK_THROWS_AS(env.draw_dataset(1, 1), DomainError);
    CHECK_THROWS_AS(Environment::bernoulli_ensemble({1.2}), DomainError);
    CHECK_THROWS_AS(Environment::scaled_bernoulli_ensemble({0.3}, {0.0}), DomainError);
    CHECK_THROWS_AS(Environment::scaled_bernoulli_ensemble({0.3}, {1.0, 2.0}), DomainError);
}

TEST_CASE("large-sample mean is binomially concentrated") {
    const auto env = Environment::bernoulli_ensemble({0.3});
    const double mean = env.draw_dataset(1'000'000, 77).emp_risk(0);
    CHECK(std::abs(mean - 0.3) <= 3.0 * std::sqrt(0.21 / 1e6));
}

TEST_CASE("comonotone marginals match direct binomial sampling (two-sample KS, alpha 0.01)") {
    const auto env = Environment::bernoulli_ensemble({0.1, 0.35, 0.6});
    const long n = 40;
    const std::size_t trials = 10'000;
    std::mt19937_64 gen(99);
    for (std::size_t model = 0; model < 3; ++model) {
        std::binomial_distribution<int> binom(n, env.true_risks()[model]);
        std::vector<double> a(trials), b(trials);
        for (std::size_t t = 0; t < trials; ++t) {
            a[t] = env.draw_dataset(n, 5, t).emp_risk(model);
            b[t] = binom(gen) / static_cast<double>(n);
        }
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        double d = 0.0;
        for (int k = 0; k <= n; ++k) {
            const double x = k / static_cast<double>(n) + 1e-12;
            const double fa = std::upper_bound(a.begin(), a.end(), x) - a.begin();
            const double fb = std::upper_bound(b.begin(), b.end(), x) - b.begin();
            d = std::max(d, std::abs(fa - fb) / trials);
        }
        CHECK(d <= 1.628 * std::sqrt(2.0 / trials));
    }
}

TEST_CASE("sigmoid environment constants hold on sampled points") {
    const auto env = Environment::sigmoid_linear(small_sigmoid());
    CHECK(env.parameter_lipschitz() == Approx(0.25));
    CounterRng rng(3, 0, pbc::streams::dataset);
    double max_ratio = 0.0;
    for (int k = 0; k < 100'000; ++k) {
        const auto pt = env.sample_point(rng);
        double norm2 = 0.0;
        for (double v : pt.x) norm2 += v * v;
        REQUIRE(norm2 <= 4.0 + 1e-12);
        for (std::size_t i = 0; i < env.num_models(); ++i) {
            REQUIRE(env.input_grad_norm2(i, pt) <= env.input_lipschitz(i) + 1e-15);
            REQUIRE(env.param_grad_norm2(i, pt) <= env.parameter_lipschitz() + 1e-15);
            const double l = env.loss(i, pt);
            REQUIRE(l > 0.0);
            REQUIRE(l < 1.0);
            if (env.input_lipschitz(i) > 0) max_ratio = std::max(max_ratio, env.input_grad_norm2(i, pt) / env.input_lipschitz(i));
        }
    }
    CHECK(max_ratio > 0.5);
    // The zero-weight model has loss exactly 1/2 everywhere.
    CHECK(env.true_risks()[2] == 0.5);
    CHECK(env.true_risk_se()[2] == 0.0);
    for (double se : env.true_risk_se()) CHECK(se < 1e-3);
    CHECK_FALSE(env.has_exact_cgf());
    CHECK_THROWS_AS(env.exact_cgf(0), DomainError);
    CHECK(env.sigma2_proxy(0) == 0.25);
}

TEST_CASE("sigmoid environment validation") {
    auto s = small_sigmoid();
    s.weights.push_back({1.0});
    CHECK_THROWS_AS(Environment::sigmoid_linear(s), DomainError);
    s = small_sigmoid();
    s.radius = 0.0;
    CHECK_THROWS_AS(Environment::sigmoid_linear(s), DomainError);
}

TEST_CASE("coverage: chernoff kl on a bernoulli ensemble with the prior") {
    std::vector<double> p;
    for (int i = 0; i < 10; ++i) p.push_back(0.05 + 0.09 * i);
    const auto env = Environment::bernoulli_ensemble(p);
    CoverageConfig c;
    c.bound = CoverageBound::chernoff_kl;
    c.rule = PosteriorRule::prior();
    const auto r = pbc::run_coverage(env, c);
    CHECK(r.trials == 2000);
    CHECK(r.records.size() == 2000);
    CHECK(r.violation_rate == Approx(static_cast<double>(r.violations) / 2000));
    CHECK(r.threshold() == Approx(0.05 + 3 * std::sqrt(0.05 * 0.95 / 2000)));
    CHECK(r.within_slack());
}

TEST_CASE("coverage edge cases") {
    const auto env = Environment::bernoulli_ensemble({0.3, 0.5});
    CoverageConfig c;
    c.trials = 1;
    const auto one = pbc::run_coverage(env, c);
    CHECK((one.violation_rate == 0.0 || one.violation_rate == 1.0));

    c.trials = 500;
    c.delta = 0.5;
    c.rule = PosteriorRule::gibbs();
    CHECK(pbc::run_coverage(env, c).within_slack());

    c.delta = 0.05;
    c.rule = PosteriorRule::fixed({0.5, 0.5, 0.0});
    CHECK_THROWS_AS(pbc::run_coverage(env, c), DomainError);
    c.rule = PosteriorRule::prior();
    c.prior = {0.9, 0.2};
    CHECK_THROWS_AS(pbc::run_coverage(env, c), DomainError);
}

TEST_CASE("coverage rejects mismatched bound and environment") {
    CoverageConfig c;
    c.trials = 10;
    const auto scaled = Environment::scaled_bernoulli_ensemble({0.3}, {2.0});
    const auto bern = Environment::bernoulli_ensemble({0.3});
    const auto field_of = [&](const Environment& env, CoverageBound b) {
        c.bound = b;
        try {
            pbc::run_coverage(env, c);
        } catch (const DomainError& e) {
            return e.field();
        }
        return std::string();
    };
    CHECK(field_of(scaled, CoverageBound::chernoff_kl) == "bound");
    CHECK(field_of(scaled, CoverageBound::mcallester) == "bound");
    CHECK(field_of(scaled, CoverageBound::seeger) == "bound");
    CHECK(field_of(bern, CoverageBound::l2) == "bound");
    CHECK(field_of(Environment::sigmoid_linear(small_sigmoid()), CoverageBound::exact_cgf) == "environment");
    CHECK(field_of(scaled, CoverageBound::subgaussian).empty());
    CHECK(field_of(scaled, CoverageBound::exact_cgf).empty());
}

TEST_CASE("coverage counts do not depend on the thread count") {
    const auto env = Environment::scaled_bernoulli_ensemble({0.2, 0.4, 0.6}, {1.0, 2.0, 0.5});
    CoverageConfig c;
    c.bound = CoverageBound::subgaussian;
    c.rule = PosteriorRule::optimal();
    c.trials = 400;
    c.delta = 0.3;
    c.threads = 1;
    const auto a = pbc::run_coverage(env, c);
    c.threads = 4;
    const auto b = pbc::run_coverage(env, c);
    CHECK(a.violations == b.violations);
    for (std::size_t t = 0; t < a.records.size(); ++t) {
        REQUIRE(a.records[t].bound == b.records[t].bound);
        REQUIRE(a.records[t].gibbs_true_risk == b.records[t].gibbs_true_risk);
    }
}

TEST_CASE("rule and bound names") {
    CHECK(pbc::parse_posterior_rule("prop9") == PosteriorRule::Kind::optimal);
    CHECK(pbc::parse_posterior_rule("gibbs") == PosteriorRule::Kind::gibbs);
    CHECK_FALSE(pbc::parse_posterior_rule("map").has_value());
    CHECK(pbc::parse_coverage_bound("chernoff_binary_kl") == CoverageBound::chernoff_kl);
    CHECK(pbc::parse_coverage_bound(pbc::to_string(CoverageBound::exact_cgf)) == CoverageBound::exact_cgf);
}

TEST_CASE("exponential tail table") {
    const auto env = Environment::bernoulli_ensemble({0.5});
    pbc::Lemma2Config c;
    c.c_grid = {0.0, 2.0, 20.0};
    c.trials = 20'000;
    const auto rows = pbc::check_lemma2(env, c);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].c == 0.0);
    CHECK(rows[0].survival == 1.0);
    CHECK(rows[0].exp_tail == 1.0);
    CHECK(rows[1].holds);
    CHECK(rows[2].survival == 0.0);
    c.c_grid = {-1.0};
    CHECK_THROWS_AS(pbc::check_lemma2(env, c), DomainError);
    c.c_grid = {1.0};
    CHECK_THROWS_AS(pbc::check_lemma2(Environment::sigmoid_linear(small_sigmoid()), c), DomainError);
}

TEST_CASE("exponential moment check") {
    const auto env = Environment::bernoulli_ensemble({0.3});
    pbc::ExpMomentConfig c;
    c.m = 0;
    auto r = pbc::check_exp_moment(env, c);
    CHECK(r.estimate == 1.0);
    CHECK(r.bound == 1.0);
    c.m = 60;
    CHECK_THROWS_AS(pbc::check_exp_moment(env, c), DomainError);
    c.m = 59;
    c.trials = 2000;
    r = pbc::check_exp_moment(env, c);
    CHECK(r.high_variance);
    CHECK(r.bound == Approx(60.0));
    c.m = 10;
    r = pbc::check_exp_moment(env, c);
    CHECK_FALSE(r.high_variance);
    CHECK(r.holds);
}

TEST_CASE("oracle exponential moment") {
    const auto env = Environment::bernoulli_ensemble({0.5});
    const auto pi = SimplexDistribution::uniform(1);
    const auto zero = pbc::estimate_exponential_moment_oracle(env, pi, 10, 0.0, 100, 1);
    CHECK(zero.estimate == 1.0);
    const auto m = pbc::estimate_exponential_moment_oracle(env, pi, 10, 0.1, 200'000, 2);
    REQUIRE(m.exact.has_value());
    CHECK(*m.exact == Approx(kOracleMomentExact).epsilon(1e-13));
    CHECK(std::abs(m.estimate - *m.exact) <= 3.0 * m.se);

    const auto two = Environment::bernoulli_ensemble({0.5, 0.1});
    const auto point = pbc::estimate_exponential_moment_oracle(two, SimplexDistribution::point_mass(2, 0), 10, 0.1,
                                                               1000, 2);
    CHECK(*point.exact == Approx(kOracleMomentExact).epsilon(1e-13));
    CHECK_THROWS_AS(pbc::estimate_exponential_moment_oracle(env, pi, 10, -1.0, 10, 1), DomainError);

    const auto b = pbc::alquier_oracle_bound({0.1, 0.5, 100, 0.05}, 2.0, 0.5);
    CHECK(b.value == Approx(0.1 + (0.5 + std::log(2.0 / 0.05)) / 50.0));
}

TEST_CASE("log-Sobolev ratio") {
    const std::vector<double> grid = pbc::default_logsobolev_grid();
    CHECK(grid.size() == 100);
    CHECK(grid.front() == Approx(0.05));
    CHECK(grid.back() == Approx(5.0));

    const std::vector<double> flat{0.7, 0.7, 0.7};
    const std::vector<double> g{1.0, 2.0, 3.0};
    const auto c0 = pbc::logsobolev_ratio(flat, g, grid);
    CHECK(c0.empirical_c == 0.0);
    CHECK(c0.limit == 0.0);
    for (const auto& p : c0.points) CHECK(p.ratio == 0.0);

    const std::vector<double> losses{0.0, 1.0, 3.0, 0.5};
    const std::vector<double> zero{0.0, 0.0, 0.0, 0.0};
    const auto failed = pbc::logsobolev_ratio(losses, zero, grid);
    CHECK(failed.assumption_failed);
    CHECK(failed.limit == pbc::kInf);

    const std::vector<double> grads{1.0, 2.0, 3.0, 4.0};
    const auto curve = pbc::logsobolev_ratio(losses, grads, grid);
    const auto cgf = pbc::empirical_cgf(pbc::LossSampleSet(losses));
    for (const auto& p : curve.points)
        CHECK(p.ratio == Approx(cgf.eval(p.lambda) / (0.5 * p.lambda * p.lambda * 2.5)).epsilon(1e-13));
    CHECK(curve.limit == Approx(pbc::LossSampleSet(losses).variance() / 2.5));
    CHECK(curve.empirical_c >= curve.points.back().ratio);
    CHECK(curve.empirical_c >= curve.limit);

    CHECK_THROWS_AS(pbc::logsobolev_ratio(losses, g, grid), DomainError);
    CHECK_THROWS_AS(pbc::logsobolev_ratio(losses, zero, std::vector<double>{0.0}), DomainError);
}
