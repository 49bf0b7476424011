// posterior.hpp
//
// Finite model classes, discrete KL divergence and the posterior that
// minimizes the model-dependent PAC-Bayes-Chernoff bound at fixed lambda:
//
//   rho*(i) ∝ pi(i) exp{-(n-1) (lambda emp_risk(i) + psi_i(lambda))}.
#pragma once
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "pbc/bounds.hpp"
#include "pbc/cgf.hpp"
#include "pbc/simplex.hpp"

namespace pbc {

struct ModelFeatures {
    std::optional<double> theta_norm2;
    std::optional<double> grad_norm2;
    std::optional<double> sigma2;
    std::optional<double> true_risk;
};

struct ModelEntry {
    double emp_risk = 0.0;
    double prior_mass = 0.0;
    RateFunction psi;
    ModelFeatures features;
};

class FiniteModelClass {
public:
    FiniteModelClass(std::vector<ModelEntry> models, long n);

    std::span<const ModelEntry> models() const noexcept { return models_; }
    std::size_t size() const noexcept { return models_.size(); }
    long n() const noexcept { return n_; }
    const SimplexDistribution& prior() const noexcept { return prior_; }
    // Smallest psi domain sup across models.
    double domain_sup() const noexcept { return domain_sup_; }

    std::vector<double> emp_risks() const;
    std::vector<RateFunction> psis() const;

private:
    std::vector<ModelEntry> models_;
    long n_;
    SimplexDistribution prior_;
    double domain_sup_;
};

// sum rho_i ln(rho_i / pi_i); +inf if rho puts mass where pi has none.
double kl_discrete(const SimplexDistribution& rho, const SimplexDistribution& pi);

struct TiltedPosterior {
    SimplexDistribution rho;
    // KL(rho | pi) = -(n-1) E_rho[lambda emp_risk + psi] - ln Z.
    double kl = 0.0;
    double log_partition = 0.0;
};

TiltedPosterior tilted_posterior(const FiniteModelClass& cls, double lambda);
SimplexDistribution optimal_posterior(const FiniteModelClass& cls, double lambda);

// argmin_i { emp_risk_i + psi_i(lambda)/lambda - ln pi_i / (lambda (n-1)) },
// lowest index on ties.
std::size_t map_index(const FiniteModelClass& cls, double lambda);

// Fixed-lambda bound (Chernoff normalization) for an arbitrary rho.
double parametric_bound(const FiniteModelClass& cls, const SimplexDistribution& rho, double lambda,
                        double delta);

struct LambdaEvaluation {
    double lambda;
    double value;
};

struct OptimizedPosterior {
    SimplexDistribution posterior;
    // Lambda at which rho* was formed by the outer search.
    double search_lambda = 0.0;
    // Optimal lambda for the final rho (the report's lambda_star).
    double lambda = 0.0;
    BoundReport report;
    std::size_t map_index = 0;
    std::vector<LambdaEvaluation> trace;
};

// Minimizes the bound jointly: exact rho*(lambda) inside, golden-section over
// log lambda outside; the final report re-optimizes lambda for the chosen rho.
OptimizedPosterior optimize_bound(const FiniteModelClass& cls, double delta);

} // namespace pbc
