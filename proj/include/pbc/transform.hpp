// transform.hpp
//
// Legendre (Cramér) transforms of rate functions restricted to lambda >= 0,
// their generalized inverses, and the binary-kl divergence.
#pragma once
#include <cstddef>

#include "pbc/cgf.hpp"

namespace pbc {

struct InversionResult {
    // inf over lambda in (0, b) of (s + f(lambda)) / lambda.
    double gap = 0.0;
    // Minimizer; +inf when the infimum is only approached as lambda -> inf
    // (for instance the identically-zero rate), 0 when s == 0.
    double lambda_star = kInf;
    // lambda f'(lambda) - f(lambda) - s at lambda_star (0 for the sentinels).
    double residual = 0.0;
    std::size_t iterations = 0;
    // Minimizer pinned at the boundary margin b - eps_b of a finite domain.
    bool at_boundary = false;
};

// Fraction of a finite domain sup kept as a margin: eps_b = 2^-30 b.
inline constexpr double kBoundaryMargin = 0x1p-30;

// Largest lambda evaluated on a finite domain [0, b).
double domain_limit(const RateFunction& rf);

// sup over lambda in [0, b) of lambda a - f(lambda); 0 for a <= 0, +inf when
// a exceeds the limiting slope on an unbounded domain.
double legendre(const RateFunction& rf, double a);

// inf over lambda in (0, b) of (s + f(lambda)) / lambda, solved through the
// stationarity condition lambda f'(lambda) - f(lambda) = s.
InversionResult inverse_rate(const RateFunction& rf, double s);

// Binary relative entropy kl(a || b) with 0 ln 0 = 0; +inf when b is 0 or 1
// and a differs from it.
double binary_kl(double a, double b);

// Largest b in [a, 1) with kl(a || b) <= s.
double binary_kl_upper_inverse(double a, double s);

} // namespace pbc
