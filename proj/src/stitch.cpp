#include "avpb/stitch.hpp"

#include <array>
#include <vector>
#include <bit>
#include <cmath>
#include <mutex>
#include <stdexcept>

#include "avpb/numeric.hpp"

namespace avpb::stitch {

std::uint64_t eta(std::uint64_t t) {
    if (t == 0) throw std::domain_error("eta: t must be >= 1");
    return std::bit_floor(t);
}

double ell(double k) {
    if (!(k >= 1.0)) throw std::domain_error("ell: k must be >= 1");
    return k * k * kZeta2;
}

double il(std::uint64_t t) {
    if (t == 0) throw std::domain_error("il: t must be >= 1");
    return std::log(ell(std::log2(2.0 * static_cast<double>(t))));
}

double xi(std::uint64_t k) {
    if (k == 0) throw std::domain_error("xi: k must be >= 1");
    const double kd = static_cast<double>(k);
    // Prefix tables: lnv[i] = ln i, lf[i] = ln i! (compensated prefix sum).
    std::vector<double> lnv(k + 1, 0.0), lf(k + 1, 0.0);
    KahanSum run;
    for (std::uint64_t i = 1; i <= k; ++i) {
        lnv[i] = std::log(static_cast<double>(i));
        run.add(lnv[i]);
        lf[i] = run.value();
    }
    const double k_ln_k = kd * lnv[k];
    KahanSum s;
    s.add(2.0);  // l = 0 and l = k contribute exactly 1 each (0^0 = 1)
    // Summand is symmetric under l <-> k-l.
    for (std::uint64_t l = 1; 2 * l < k; ++l) {
        const std::uint64_t m = k - l;
        const double lt = lf[k] - lf[l] - lf[m] + static_cast<double>(l) * lnv[l] +
                          static_cast<double>(m) * lnv[m] - k_ln_k;
        s.add(2.0 * std::exp(lt));
    }
    if (k % 2 == 0 && k >= 2) {
        const std::uint64_t h = k / 2;
        const double lt = lf[k] - 2.0 * lf[h] + kd * (lnv[h] - lnv[k]);
        s.add(std::exp(lt));
    }
    return s.value();
}

double xi_pow2(unsigned j) {
    if (j > 40) throw std::domain_error("xi_pow2: exponent too large");
    static std::array<double, 41> cache{};
    static std::array<std::once_flag, 41> flags;
    std::call_once(flags[j], [j] { cache[j] = xi(std::uint64_t{1} << j); });
    return cache[j];
}

}  // namespace avpb::stitch
