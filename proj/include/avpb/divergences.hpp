#pragma once

#include "avpb/distributions.hpp"

namespace avpb {

// Binary relative entropy p*ln(p/q) + (1-p)*ln((1-p)/(1-q)), with the usual
// limit conventions: 0*ln(0/q) = 0; +inf when (q=0, p>0) or (q=1, p<1).
// Throws std::domain_error if p or q lies outside [0,1].
double klsf(double p, double q);

// Largest q in [p_hat, 1] with klsf(p_hat||q) <= c, found by bisection
// (absolute tolerance 1e-10, at most 200 iterations). klsf(p_hat||.) is
// increasing on [p_hat, 1], so the returned value always satisfies the
// constraint. Returns 1 only when p_hat = 1 or c = +inf.
double kl_inv_upper(double p_hat, double c);

double kl_divergence(const FiniteMixture& rho, const FiniteMixture& nu);
double kl_divergence(const DiagonalGaussian& rho, const DiagonalGaussian& nu);
// Throws std::invalid_argument on mixed-family input.
double kl_divergence(const Distribution& rho, const Distribution& nu);

// (1/(alpha-1)) * ln sum_i rho_i^alpha nu_i^(1-alpha); requires alpha > 1.
// +inf when rho puts mass where nu does not.
double renyi_divergence(const FiniteMixture& rho, const FiniteMixture& nu, double alpha);

// (1/2) sum_i |rho_i - nu_i|, in [0,1].
double tv_distance(const FiniteMixture& rho, const FiniteMixture& nu);

}  // namespace avpb
