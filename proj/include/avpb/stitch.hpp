#pragma once

#include <cstdint>

namespace avpb::stitch {

// zeta(2) = sum_j j^-2 = pi^2/6
inline constexpr double kZeta2 = 1.6449340668482264;

// Largest power of two <= t. Throws std::domain_error for t = 0.
std::uint64_t eta(std::uint64_t t);

// k^2 * zeta(2) for real k >= 1. The error budget spent on the k-th
// geometric epoch; the reciprocals sum to less than 1.
double ell(double k);

// ln(ell(log2(2t))): the iterated-logarithm overhead of stitching epochs
// together. Strictly below 2*ln(ln(2t)) + 1.3 for every t >= 1.
double il(std::uint64_t t);

// sum_{l=0}^{k} C(k,l) (l/k)^l (1-l/k)^(k-l), with 0^0 = 1. Evaluated in the
// log domain per summand so k up to 10^6 cannot overflow. Brackets:
// sqrt(k) <= xi(k) <= 2*sqrt(k).
double xi(std::uint64_t k);

// xi(2^j), cached after first evaluation (thread-safe); j <= 40.
double xi_pow2(unsigned j);

}  // namespace avpb::stitch
