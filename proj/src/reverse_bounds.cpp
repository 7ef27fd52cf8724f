#include "avpb/reverse_bounds.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "avpb/numeric.hpp"
#include "avpb/stitch.hpp"

namespace avpb {

namespace {

double check_delta(double delta) {
    if (!(delta > 0.0 && delta < 1.0))
        throw std::domain_error("reverse bound: delta must lie in (0,1)");
    return std::log(1.0 / delta);
}

double log_xi_eta(std::uint64_t t) {
    const auto e = stitch::eta(t);
    const unsigned j = static_cast<unsigned>(std::bit_width(e) - 1);
    return std::log(stitch::xi_pow2(j));
}

}  // namespace

double convex_phi_rhs_stitched(const ConvexPhiSpec& spec, std::uint64_t t, double kl,
                               double delta) {
    const double log_inv_delta = check_delta(delta);
    if (!(kl >= 0.0)) throw std::domain_error("convex_phi_rhs_stitched: kl must be >= 0");
    const auto e = stitch::eta(t);
    const double lambda = spec.lambda_at(e);
    if (!(lambda > 0.0))
        throw std::invalid_argument("convex_phi_rhs_stitched: lambda at eta(t) must be positive");
    return (spec.log_mgf(lambda, e) + kl + log_inv_delta + stitch::il(t)) / lambda;
}

double convex_phi_rhs_target(const ConvexPhiSpec& spec, std::uint64_t n, std::uint64_t t,
                             double kl, double delta) {
    const double log_inv_delta = check_delta(delta);
    if (n == 0) throw std::domain_error("convex_phi_rhs_target: n must be >= 1");
    if (t < n) throw std::invalid_argument("convex_phi_rhs_target: requires t >= n");
    if (!(kl >= 0.0)) throw std::domain_error("convex_phi_rhs_target: kl must be >= 0");
    const double lambda = spec.lambda_at(n);
    if (!(lambda > 0.0))
        throw std::invalid_argument("convex_phi_rhs_target: lambda at n must be positive");
    return (spec.log_mgf(lambda, n) + kl + log_inv_delta) / lambda;
}

double seeger_rhs(std::uint64_t t, double kl, double delta) {
    const double log_inv_delta = check_delta(delta);
    if (!(kl >= 0.0)) throw std::domain_error("seeger_rhs: kl must be >= 0");
    const auto e = stitch::eta(t);
    return (log_xi_eta(t) + kl + log_inv_delta + stitch::il(t)) / static_cast<double>(e);
}

double seeger_rhs_target(std::uint64_t n, double kl, double delta) {
    const double log_inv_delta = check_delta(delta);
    if (n == 0) throw std::domain_error("seeger_rhs_target: n must be >= 1");
    if (!(kl >= 0.0)) throw std::domain_error("seeger_rhs_target: kl must be >= 0");
    return (std::log(stitch::xi(n)) + kl + log_inv_delta) / static_cast<double>(n);
}

double mcallester_raw(std::uint64_t t, double kl, double delta, double r_hat) {
    const double log_inv_delta = check_delta(delta);
    if (!(r_hat >= 0.0 && r_hat <= 1.0))
        throw std::domain_error("mcallester: r_hat outside [0,1]");
    if (!(kl >= 0.0)) throw std::domain_error("mcallester: kl must be >= 0");
    const double e = static_cast<double>(stitch::eta(t));
    const double num = kl + std::log(2.0 * std::sqrt(e)) + log_inv_delta + stitch::il(t);
    return r_hat + std::sqrt(num / (2.0 * e));
}

double mcallester_bound(std::uint64_t t, double kl, double delta, double r_hat) {
    return std::min(1.0, mcallester_raw(t, kl, delta, r_hat));
}

double mcallester_raw_target(std::uint64_t n, double kl, double delta, double r_hat) {
    const double log_inv_delta = check_delta(delta);
    if (n == 0) throw std::domain_error("mcallester_target: n must be >= 1");
    if (!(r_hat >= 0.0 && r_hat <= 1.0))
        throw std::domain_error("mcallester: r_hat outside [0,1]");
    if (!(kl >= 0.0)) throw std::domain_error("mcallester: kl must be >= 0");
    const double nd = static_cast<double>(n);
    return r_hat + std::sqrt((kl + std::log(2.0 * nd) + log_inv_delta) / (2.0 * nd));
}

double mcallester_bound_target(std::uint64_t n, double kl, double delta, double r_hat) {
    return std::min(1.0, mcallester_raw_target(n, kl, delta, r_hat));
}

double thiemann_bound(std::uint64_t t, double kl, double delta, double lambda, double r_hat) {
    const double log_inv_delta = check_delta(delta);
    if (!(lambda > 0.0 && lambda < 2.0))
        throw std::domain_error("thiemann_bound: lambda must lie in (0,2)");
    if (!(kl >= 0.0)) throw std::domain_error("thiemann_bound: kl must be >= 0");
    const double e = static_cast<double>(stitch::eta(t));
    const double num = kl + std::log(2.0 * std::sqrt(e)) + log_inv_delta + stitch::il(t);
    const double half = 1.0 - lambda / 2.0;
    return r_hat / half + num / (e * half * lambda);
}

double thiemann_bound_min(std::uint64_t t, double kl, double delta, double r_hat) {
    double best = kInf;
    for (int k = 1; k <= 199; ++k)
        best = std::min(best, thiemann_bound(t, kl, delta, 0.01 * k, r_hat));
    return best;
}

double ipm_rhs_stitched(const ConvexPhiSpec& spec, std::uint64_t t, double gamma, double delta) {
    if (!(gamma >= 0.0)) throw std::domain_error("ipm_rhs_stitched: gamma must be >= 0");
    return convex_phi_rhs_stitched(spec, t, gamma, delta);
}

double ipm_rhs_target(const ConvexPhiSpec& spec, std::uint64_t n, std::uint64_t t, double gamma,
                      double delta) {
    if (!(gamma >= 0.0)) throw std::domain_error("ipm_rhs_target: gamma must be >= 0");
    return convex_phi_rhs_target(spec, n, t, gamma, delta);
}

double renyi_convex_rhs(std::uint64_t t, double alpha, double d_alpha,
                        const std::function<double(std::uint64_t)>& log_moment, double delta) {
    const double log_inv_delta = check_delta(delta);
    if (!(alpha > 1.0)) throw std::domain_error("renyi_convex_rhs: alpha must be > 1");
    if (!(d_alpha >= 0.0)) throw std::domain_error("renyi_convex_rhs: d_alpha must be >= 0");
    const auto e = stitch::eta(t);
    return (alpha - 1.0) / alpha * (d_alpha + log_moment(e) + log_inv_delta + stitch::il(t));
}

double phi_quadratic(double x, double y) { return 2.0 * (x - y) * (x - y); }

double phi_catoni(double x, double y, double c) {
    if (!(c > 0.0)) throw std::domain_error("phi_catoni: c must be positive");
    return -c * x - std::log(1.0 - y * (1.0 - std::exp(-c)));
}

}  // namespace avpb
