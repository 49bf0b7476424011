// harness.hpp
//
// Synthetic environments with analytically (or oracle-) known risks and the
// Monte Carlo checks built on them: bound coverage, the exponential tail of
// n Λ*(gen), the exponential-moment bound n/(n-m), the log-Sobolev ratio and
// the oracle exponential moment f_{π,ν}(λ).
#pragma once
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pbc/bounds.hpp"
#include "pbc/cgf.hpp"
#include "pbc/rng.hpp"
#include "pbc/simplex.hpp"

namespace pbc {

enum class Coupling { comonotone, independent };
enum class EnvironmentKind { bernoulli_ensemble, scaled_bernoulli_ensemble, sigmoid_linear };

std::string_view to_string(EnvironmentKind kind);

struct SigmoidLinearSpec {
    int dimension = 2;
    double radius = 1.0;
    std::vector<std::vector<double>> weights;  // one vector per model
    std::vector<double> teacher;               // labels are sign(teacher . x)
    double label_noise = 0.1;
    std::uint64_t oracle_seed = 20240917;
    std::size_t oracle_samples = 1'000'000;
};

// Losses of every model on one dataset, row-major (model, sample).
class LossMatrix {
public:
    LossMatrix(std::size_t models, std::size_t samples)
        : models_(models), samples_(samples), data_(models * samples, 0.0) {}

    std::size_t models() const noexcept { return models_; }
    std::size_t samples() const noexcept { return samples_; }
    double& at(std::size_t model, std::size_t j) { return data_[model * samples_ + j]; }
    double at(std::size_t model, std::size_t j) const { return data_[model * samples_ + j]; }
    std::span<const double> row(std::size_t model) const {
        return {data_.data() + model * samples_, samples_};
    }
    double emp_risk(std::size_t model) const;
    std::vector<double> emp_risks() const;

private:
    std::size_t models_;
    std::size_t samples_;
    std::vector<double> data_;
};

struct LabeledPoint {
    std::vector<double> x;
    double y = 1.0;
};

class Environment {
public:
    static Environment bernoulli_ensemble(std::vector<double> p,
                                          Coupling coupling = Coupling::comonotone);
    static Environment scaled_bernoulli_ensemble(std::vector<double> p, std::vector<double> scale,
                                                 Coupling coupling = Coupling::comonotone);
    static Environment sigmoid_linear(SigmoidLinearSpec spec);

    EnvironmentKind kind() const noexcept { return kind_; }
    Coupling coupling() const noexcept { return coupling_; }
    std::size_t num_models() const noexcept { return true_risk_.size(); }

    std::span<const double> true_risks() const noexcept { return true_risk_; }
    // Standard error of each true risk (0 when analytic).
    std::span<const double> true_risk_se() const noexcept { return true_risk_se_; }

    bool has_exact_cgf() const noexcept { return kind_ != EnvironmentKind::sigmoid_linear; }
    RateFunction exact_cgf(std::size_t model) const;
    // Sub-Gaussian variance proxy from boundedness: range^2 / 4.
    double sigma2_proxy(std::size_t model) const;
    double loss_upper_bound() const;
    bool zero_one_loss() const;

    // sigmoid_linear only.
    const SigmoidLinearSpec& sigmoid_spec() const;
    double parameter_lipschitz() const;               // M = R^2 / 16
    double input_lipschitz(std::size_t model) const;  // L_i = |theta_i|^2 / 16
    double theta_norm2(std::size_t model) const;
    RateFunction l2_psi(std::size_t model) const;
    LabeledPoint sample_point(CounterRng& rng) const;
    double loss(std::size_t model, const LabeledPoint& pt) const;
    double input_grad_norm2(std::size_t model, const LabeledPoint& pt) const;
    double param_grad_norm2(std::size_t model, const LabeledPoint& pt) const;

    // Comonotone column of losses for a shared uniform u.
    std::vector<double> comonotone_column(double u) const;

    // Deterministic in (seed, trial).
    LossMatrix draw_dataset(long n, std::uint64_t seed, std::uint64_t trial = 0) const;

private:
    Environment() = default;

    EnvironmentKind kind_ = EnvironmentKind::bernoulli_ensemble;
    Coupling coupling_ = Coupling::comonotone;
    std::vector<double> p_;
    std::vector<double> scale_;
    std::optional<SigmoidLinearSpec> sigmoid_;
    std::vector<double> true_risk_;
    std::vector<double> true_risk_se_;
};

inline LossMatrix draw_dataset(const Environment& env, long n, std::uint64_t seed,
                               std::uint64_t trial = 0) {
    return env.draw_dataset(n, seed, trial);
}

// ----------------------------------------------------------------- coverage

enum class CoverageBound { chernoff_kl, subgaussian, l2, exact_cgf, mcallester, seeger };

std::string_view to_string(CoverageBound bound);
std::optional<CoverageBound> parse_coverage_bound(std::string_view name);

struct PosteriorRule {
    enum class Kind { prior, fixed, gibbs, optimal };
    Kind kind = Kind::prior;
    std::vector<double> weights;  // fixed
    double beta = 0.0;            // gibbs inverse temperature; 0 means n

    static PosteriorRule prior() { return {}; }
    static PosteriorRule fixed(std::vector<double> w) { return {Kind::fixed, std::move(w), 0.0}; }
    static PosteriorRule gibbs(double beta = 0.0) { return {Kind::gibbs, {}, beta}; }
    static PosteriorRule optimal() { return {Kind::optimal, {}, 0.0}; }
};

std::string_view to_string(PosteriorRule::Kind kind);
std::optional<PosteriorRule::Kind> parse_posterior_rule(std::string_view name);

struct CoverageConfig {
    CoverageBound bound = CoverageBound::chernoff_kl;
    PosteriorRule rule;
    long n = 100;
    double delta = 0.05;
    std::size_t trials = 2000;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    bool keep_records = true;
    // Uniform when empty.
    std::vector<double> prior;
};

struct TrialRecord {
    std::size_t trial = 0;
    double bound = 0.0;
    double gibbs_true_risk = 0.0;
    double gibbs_emp_risk = 0.0;
    bool violated = false;
};

struct CoverageReport {
    std::size_t trials = 0;
    std::size_t violations = 0;
    double violation_rate = 0.0;
    // sqrt(delta (1 - delta) / trials): the binomial SE at the nominal level.
    double binomial_se = 0.0;
    double delta = 0.0;
    std::vector<TrialRecord> records;

    double threshold() const { return delta + 3.0 * binomial_se; }
    bool within_slack() const { return violation_rate <= threshold(); }
};

CoverageReport run_coverage(const Environment& env, const CoverageConfig& config);

// ------------------------------------------------------------ tail checks

struct Lemma2Row {
    double c = 0.0;
    double survival = 0.0;
    double exp_tail = 0.0;  // e^{-c}
    double se = 0.0;        // binomial SE at e^{-c}
    bool holds = true;      // survival <= e^{-c} + 3 se
};

struct Lemma2Config {
    std::size_t model = 0;
    long n = 50;
    std::vector<double> c_grid{0.25, 0.5, 1.0, 2.0, 3.0};
    std::size_t trials = 100'000;
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

std::vector<Lemma2Row> check_lemma2(const Environment& env, const Lemma2Config& config);

struct ExpMomentConfig {
    std::size_t model = 0;
    long n = 60;
    long m = 20;
    std::size_t trials = 100'000;
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

struct ExpMomentResult {
    double estimate = 0.0;
    double se = 0.0;
    double bound = 1.0;  // n / (n - m)
    bool holds = true;   // estimate <= bound + 3 se
    bool high_variance = false;  // m > n / 3
};

ExpMomentResult check_exp_moment(const Environment& env, const ExpMomentConfig& config);

struct OracleMoment {
    double estimate = 0.0;
    double se = 0.0;
    std::optional<double> exact;
};

// Monte Carlo estimate of E_pi E_{nu^n}[exp(lambda n (L - emp risk))].
OracleMoment estimate_exponential_moment_oracle(const Environment& env,
                                                const SimplexDistribution& pi, long n,
                                                double lambda, std::size_t trials,
                                                std::uint64_t seed, unsigned threads = 1);

// E_rho[emp risk] + (KL + ln(f / delta)) / (lambda n), with f an oracle moment.
BoundReport alquier_oracle_bound(const BoundQuery& q, double moment, double lambda);

// ---------------------------------------------------------- log-Sobolev

struct LogSobolevPoint {
    double lambda = 0.0;
    double cgf = 0.0;
    double ratio = 0.0;
};

struct LogSobolevCurve {
    std::vector<LogSobolevPoint> points;
    double limit = 0.0;        // variance(loss) / mean(grad_norm2)
    double empirical_c = 0.0;  // sup over the grid (and the limit)
    bool assumption_failed = false;
    bool nonincreasing = true;
};

std::vector<double> default_logsobolev_grid();

LogSobolevCurve logsobolev_ratio(std::span<const double> losses,
                                 std::span<const double> grad_norm2,
                                 std::span<const double> lambda_grid);

} // namespace pbc
