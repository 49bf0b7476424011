#include "pbc/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "pbc/errors.hpp"

namespace pbc {

SimplexDistribution::SimplexDistribution(std::vector<double> weights)
    : weights_(std::move(weights)) {
    if (weights_.empty()) throw DomainError("weights", "empty probability vector");
    double sum = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        const double w = weights_[i];
        if (!std::isfinite(w) || w < 0.0)
            throw DomainError("weights", "entry " + std::to_string(i) + " is negative or not finite");
        sum += w;
    }
    if (std::abs(sum - 1.0) > kSumTolerance)
        throw DomainError("weights", "entries sum to " + std::to_string(sum) + ", not 1");
}

SimplexDistribution SimplexDistribution::normalized(std::vector<double> masses) {
    double total = 0.0;
    for (double m : masses) {
        if (!std::isfinite(m) || m < 0.0) throw DomainError("weights", "negative or non-finite mass");
        total += m;
    }
    if (!(total > 0.0)) throw DomainError("weights", "all masses are zero");
    for (double& m : masses) m /= total;
    // Absorb the rounding residue into the largest entry.
    const double residue = 1.0 - std::accumulate(masses.begin(), masses.end(), 0.0);
    if (residue != 0.0) {
        auto it = std::max_element(masses.begin(), masses.end());
        *it = std::max(0.0, *it + residue);
    }
    return SimplexDistribution(std::move(masses));
}

SimplexDistribution SimplexDistribution::uniform(std::size_t size) {
    return normalized(std::vector<double>(size, 1.0));
}

SimplexDistribution SimplexDistribution::point_mass(std::size_t size, std::size_t index) {
    std::vector<double> w(size, 0.0);
    w.at(index) = 1.0;
    return SimplexDistribution(std::move(w));
}

double SimplexDistribution::expectation(std::span<const double> values) const {
    if (values.size() != weights_.size())
        throw DomainError("values", "length does not match the distribution");
    double acc = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i)
        if (weights_[i] > 0.0) acc += weights_[i] * values[i];
    return acc;
}

} // namespace pbc
