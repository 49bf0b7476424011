// simplex.hpp
#pragma once
#include <cstddef>
#include <span>
#include <vector>

namespace pbc {

// Probability vector over a finite model class. Used for both the prior and
// the posterior. Entries are nonnegative and sum to 1 within 1e-12.
class SimplexDistribution {
public:
    static constexpr double kSumTolerance = 1e-12;

    SimplexDistribution() = default;
    explicit SimplexDistribution(std::vector<double> weights);

    // Normalizes nonnegative masses; throws if all are zero.
    static SimplexDistribution normalized(std::vector<double> masses);
    static SimplexDistribution uniform(std::size_t size);
    static SimplexDistribution point_mass(std::size_t size, std::size_t index);

    std::span<const double> weights() const noexcept { return weights_; }
    double operator[](std::size_t i) const { return weights_[i]; }
    std::size_t size() const noexcept { return weights_.size(); }

    // Sum of weights[i] * values[i]; skips zero weights so that infinite
    // values on unsupported entries do not produce NaN.
    double expectation(std::span<const double> values) const;

private:
    std::vector<double> weights_;
};

} // namespace pbc
