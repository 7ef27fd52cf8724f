#include "avpb/divergences.hpp"

#include <cmath>
#include <stdexcept>

#include "avpb/numeric.hpp"

namespace avpb {

double klsf(double p, double q) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("klsf: p outside [0,1]");
    if (!(q >= 0.0 && q <= 1.0)) throw std::domain_error("klsf: q outside [0,1]");
    double acc = 0.0;
    if (p > 0.0) {
        if (q == 0.0) return kInf;
        acc += p * std::log(p / q);
    }
    if (p < 1.0) {
        if (q == 1.0) return kInf;
        acc += (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
    }
    return acc < 0.0 ? 0.0 : acc;  // rounding can leave a tiny negative near p == q
}

double kl_inv_upper(double p_hat, double c) {
    if (!(p_hat >= 0.0 && p_hat <= 1.0)) throw std::domain_error("kl_inv_upper: p_hat outside [0,1]");
    if (!(c >= 0.0)) throw std::domain_error("kl_inv_upper: c must be nonnegative");
    if (p_hat >= 1.0 || std::isinf(c)) return 1.0;
    if (c == 0.0) return p_hat;  // klsf(p_hat||q) > 0 for every q > p_hat
    double lo = p_hat, hi = 1.0;
    for (int it = 0; it < 200 && (hi - lo) > 1e-10; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (klsf(p_hat, mid) <= c)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

double kl_divergence(const FiniteMixture& rho, const FiniteMixture& nu) {
    if (rho.support_size() != nu.support_size())
        throw std::invalid_argument("kl_divergence: support size mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < rho.support_size(); ++i) {
        if (rho[i] == 0.0) continue;  // 0 * ln 0 = 0
        if (nu[i] == 0.0) return kInf;
        acc += rho[i] * std::log(rho[i] / nu[i]);
    }
    return acc < 0.0 ? 0.0 : acc;
}

double kl_divergence(const DiagonalGaussian& rho, const DiagonalGaussian& nu) {
    if (rho.dim() != nu.dim()) throw std::invalid_argument("kl_divergence: dimension mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < rho.dim(); ++i) {
        const double vr = rho.variance()[i], vn = nu.variance()[i];
        const double dm = rho.mean()[i] - nu.mean()[i];
        acc += 0.5 * (std::log(vn / vr) + (vr + dm * dm) / vn - 1.0);
    }
    return acc < 0.0 ? 0.0 : acc;
}

double kl_divergence(const Distribution& rho, const Distribution& nu) {
    if (rho.index() != nu.index())
        throw std::invalid_argument("kl_divergence: mixed-family input");
    if (std::holds_alternative<FiniteMixture>(rho))
        return kl_divergence(std::get<FiniteMixture>(rho), std::get<FiniteMixture>(nu));
    return kl_divergence(std::get<DiagonalGaussian>(rho), std::get<DiagonalGaussian>(nu));
}

double renyi_divergence(const FiniteMixture& rho, const FiniteMixture& nu, double alpha) {
    if (!(alpha > 1.0)) throw std::domain_error("renyi_divergence: requires alpha > 1");
    if (rho.support_size() != nu.support_size())
        throw std::invalid_argument("renyi_divergence: support size mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < rho.support_size(); ++i) {
        if (rho[i] == 0.0) continue;
        if (nu[i] == 0.0) return kInf;
        sum += std::exp(alpha * std::log(rho[i]) + (1.0 - alpha) * std::log(nu[i]));
    }
    const double d = std::log(sum) / (alpha - 1.0);
    return d < 0.0 ? 0.0 : d;
}

double tv_distance(const FiniteMixture& rho, const FiniteMixture& nu) {
    if (rho.support_size() != nu.support_size())
        throw std::invalid_argument("tv_distance: support size mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < rho.support_size(); ++i) acc += std::abs(rho[i] - nu[i]);
    return 0.5 * acc;
}

}  // namespace avpb
