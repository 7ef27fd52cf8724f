#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>

namespace avpb {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Compensated accumulator. Used where acceptance tolerances are tighter than
// what a plain running sum over ~10^4 terms guarantees.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double x) {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
    void reset() { sum = carry = 0.0; }
};

inline double log_sum_exp(std::span<const double> xs) {
    double m = -kInf;
    for (double x : xs) m = std::max(m, x);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : xs) s += std::exp(x - m);
    return m + std::log(s);
}

inline double log_factorial(double n) { return std::lgamma(n + 1.0); }

}  // namespace avpb
