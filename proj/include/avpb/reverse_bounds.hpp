#pragma once

#include <cstdint>
#include <functional>

namespace avpb {

// Reverse-submartingale (stitched) bound family. These are closed-form
// queries: the data enter only through caller-supplied oracles and summary
// statistics, and validity additionally requires the caller's scenario to be
// i.i.d. / exchangeable with stationary losses.
//
// `log_mgf(lambda, t)` must return ln E_rho E_D exp(lambda * phi(Rhat_t, R));
// `lambda_at(j)` the positive weight used on the epoch anchored at j. The
// oracles are expectations under the true data law, not estimates.
struct ConvexPhiSpec {
    std::function<double(double, double)> phi;
    std::function<double(double, std::uint64_t)> log_mgf;
    std::function<double(std::uint64_t)> lambda_at;
};

// [ log_mgf(l, eta(t)) + kl + ln(1/delta) + IL_t ] / l with l = lambda_at(eta(t)).
// Valid simultaneously over all t >= 1 with probability >= 1 - delta.
double convex_phi_rhs_stitched(const ConvexPhiSpec& spec, std::uint64_t t, double kl,
                               double delta);

// [ log_mgf(l, n) + kl + ln(1/delta) ] / l with l = lambda_at(n); constant in
// t and valid for all t >= n. Throws if t < n.
double convex_phi_rhs_target(const ConvexPhiSpec& spec, std::uint64_t n, std::uint64_t t,
                             double kl, double delta);

// Bound on E_rho klsf(Rhat_t || R) for [0,1] i.i.d. losses:
//   (kl + ln xi(eta(t)) + ln(1/delta) + IL_t) / eta(t)
// Combine with kl_inv_upper(E_rho Rhat_t, rhs) for a risk upper bound.
double seeger_rhs(std::uint64_t t, double kl, double delta);
double seeger_rhs_target(std::uint64_t n, double kl, double delta);

// r_hat + sqrt((kl + ln(2 sqrt(eta(t))/delta) + IL_t) / (2 eta(t))).
// `mcallester_bound` clips to 1 (risk scale); `_raw` does not.
double mcallester_raw(std::uint64_t t, double kl, double delta, double r_hat);
double mcallester_bound(std::uint64_t t, double kl, double delta, double r_hat);
double mcallester_raw_target(std::uint64_t n, double kl, double delta, double r_hat);
double mcallester_bound_target(std::uint64_t n, double kl, double delta, double r_hat);

// r_hat/(1-lambda/2) + (kl + ln(2 sqrt(eta(t))/delta) + IL_t)/(eta(t) (1-lambda/2) lambda),
// valid simultaneously over lambda in (0,2). `_min` scans the 199-point grid
// 0.01, 0.02, ..., 1.99.
double thiemann_bound(std::uint64_t t, double kl, double delta, double lambda, double r_hat);
double thiemann_bound_min(std::uint64_t t, double kl, double delta, double r_hat);

// Same shape as the convex-phi forms with the divergence replaced by an
// integral probability metric value gamma >= 0 supplied by the caller (e.g.
// a scaled total-variation distance matching the declared function class).
double ipm_rhs_stitched(const ConvexPhiSpec& spec, std::uint64_t t, double gamma, double delta);
double ipm_rhs_target(const ConvexPhiSpec& spec, std::uint64_t n, std::uint64_t t, double gamma,
                      double delta);

// ((alpha-1)/alpha) * (d_alpha + log_moment(eta(t)) + ln(1/delta) + IL_t):
// a bound on ln E_rho phi(Rhat_t, R), where log_moment(j) must return
// ln E_{nu,D}[ phi_j^{alpha/(alpha-1)} ]. Requires alpha > 1.
double renyi_convex_rhs(std::uint64_t t, double alpha, double d_alpha,
                        const std::function<double(std::uint64_t)>& log_moment, double delta);

// Convex comparison functions commonly plugged into the templates.
double phi_quadratic(double x, double y);         // 2 (x - y)^2
double phi_catoni(double x, double y, double c);  // -c x - ln(1 - y (1 - e^-c))

}  // namespace avpb
