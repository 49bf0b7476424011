#include "pbc/transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pbc/errors.hpp"

namespace pbc {

namespace {

constexpr double kInitialLambda = 1e-6;
constexpr double kLambdaCeiling = 1e300;
constexpr int kMaxExpansions = 1100;
constexpr int kMaxBisections = 400;
constexpr double kConvergedTol = 1e-14;

bool converged(double lo, double hi) {
    const double mid = lo + 0.5 * (hi - lo);
    return mid <= lo || mid >= hi;
}

} // namespace

double domain_limit(const RateFunction& rf) {
    const double b = rf.domain_sup();
    return std::isfinite(b) ? b - kBoundaryMargin * b : kInf;
}

double legendre(const RateFunction& rf, double a) {
    if (std::isnan(a)) throw DomainError("a", "NaN argument");
    if (a <= 0.0) return 0.0;
    const double lambda_max = domain_limit(rf);
    const bool unbounded = !std::isfinite(lambda_max);
    const auto objective = [&](double lambda) { return lambda * a - rf.eval(lambda); };

    double slope = kInf;
    if (unbounded) {
        slope = rf.slope_limit();
        if (a > slope) return kInf;
    }

    double lo = 0.0;
    double hi = std::min(kInitialLambda, lambda_max);
    double previous = 0.0;
    for (int k = 0; k < kMaxExpansions; ++k) {
        if (rf.derivative(hi) >= a) break;
        if (hi >= lambda_max) return std::max(0.0, objective(hi));
        if (unbounded && a == slope) {
            // Objective increases to a finite limit; follow it until it settles.
            const double current = objective(hi);
            if (k > 0 && current - previous <= kConvergedTol * std::max(1.0, std::abs(current)))
                return std::max(0.0, current);
            previous = current;
        }
        lo = hi;
        hi = std::min(2.0 * hi, lambda_max);
        if (hi > kLambdaCeiling) return std::max(0.0, objective(lo));
    }

    for (int k = 0; k < kMaxBisections && !converged(lo, hi); ++k) {
        const double mid = lo + 0.5 * (hi - lo);
        if (rf.derivative(mid) >= a)
            hi = mid;
        else
            lo = mid;
    }
    return std::max({0.0, objective(lo), objective(hi)});
}

InversionResult inverse_rate(const RateFunction& rf, double s) {
    if (std::isnan(s) || s < 0.0) throw DomainError("s", "must be nonnegative");
    InversionResult out;
    if (std::isinf(s)) {
        out.gap = kInf;
        out.lambda_star = 0.0;
        return out;
    }
    if (s == 0.0) {
        out.gap = 0.0;
        out.lambda_star = 0.0;
        return out;
    }
    const double lambda_max = domain_limit(rf);
    const bool unbounded = !std::isfinite(lambda_max);
    if (rf.is_zero()) {
        if (unbounded) {
            out.gap = 0.0;
            out.lambda_star = kInf;
        } else {
            out.gap = s / lambda_max;
            out.lambda_star = lambda_max;
            out.residual = -s;
            out.at_boundary = true;
        }
        return out;
    }

    const auto stationarity = [&](double lambda) {
        return lambda * rf.derivative(lambda) - rf.eval(lambda) - s;
    };
    const auto gap_at = [&](double lambda) { return (s + rf.eval(lambda)) / lambda; };
    const double slope = unbounded ? rf.slope_limit() : kInf;

    double lo = 0.0;
    double hi = std::min(kInitialLambda, lambda_max);
    double h_hi = stationarity(hi);
    double h_prev = -s;
    std::size_t iterations = 0;
    while (h_hi <= 0.0) {
        ++iterations;
        if (hi >= lambda_max) {
            out.gap = gap_at(hi);
            out.lambda_star = hi;
            out.residual = h_hi;
            out.iterations = iterations;
            out.at_boundary = true;
            return out;
        }
        // With a bounded slope, h increases to a finite limit; once it has
        // settled below zero the infimum is the limiting slope at infinity.
        const bool settled = std::isfinite(slope) && iterations > 1 &&
                             h_hi - h_prev <= kConvergedTol * std::max(1.0, s);
        if (settled || hi > kLambdaCeiling || iterations > kMaxExpansions) {
            out.gap = slope;
            out.lambda_star = kInf;
            out.residual = 0.0;
            out.iterations = iterations;
            return out;
        }
        lo = hi;
        h_prev = h_hi;
        hi = std::min(2.0 * hi, lambda_max);
        h_hi = stationarity(hi);
    }

    for (int k = 0; k < kMaxBisections && !converged(lo, hi); ++k) {
        ++iterations;
        const double mid = lo + 0.5 * (hi - lo);
        if (stationarity(mid) > 0.0)
            hi = mid;
        else
            lo = mid;
    }
    double best = hi;
    double residual = stationarity(hi);
    if (lo > 0.0) {
        const double r_lo = stationarity(lo);
        if (std::abs(r_lo) < std::abs(residual)) {
            best = lo;
            residual = r_lo;
        }
    }
    out.lambda_star = best;
    out.gap = gap_at(best);
    out.residual = residual;
    out.iterations = iterations;
    return out;
}

double binary_kl(double a, double b) {
    if (!(a >= 0.0 && a <= 1.0)) throw DomainError("a", "must lie in [0, 1]");
    if (!(b >= 0.0 && b <= 1.0)) throw DomainError("b", "must lie in [0, 1]");
    double head = 0.0;
    if (a > 0.0) head = b == 0.0 ? kInf : a * std::log(a / b);
    double tail = 0.0;
    if (a < 1.0) tail = b == 1.0 ? kInf : (1.0 - a) * std::log((1.0 - a) / (1.0 - b));
    return std::max(0.0, head + tail);
}

double binary_kl_upper_inverse(double a, double s) {
    if (!(a >= 0.0 && a <= 1.0)) throw DomainError("a", "must lie in [0, 1]");
    if (std::isnan(s) || s < 0.0) throw DomainError("s", "must be nonnegative");
    if (s == 0.0 || a == 1.0) return a;
    if (std::isinf(s)) return 1.0;
    if (a == 0.0) return -std::expm1(-s);
    double lo = a;
    double hi = 1.0;
    for (int k = 0; k < kMaxBisections && !converged(lo, hi); ++k) {
        const double mid = lo + 0.5 * (hi - lo);
        if (binary_kl(a, mid) <= s)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

} // namespace pbc
