#include "avpb/distributions.hpp"

#include <cmath>
#include <stdexcept>

namespace avpb {

FiniteMixture::FiniteMixture(std::vector<double> weights) : weights_(std::move(weights)) {
    if (weights_.empty()) throw std::invalid_argument("FiniteMixture: empty support");
    double sum = 0.0;
    for (double w : weights_) {
        if (!(w >= 0.0)) throw std::invalid_argument("FiniteMixture: negative or NaN weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("FiniteMixture: weights must sum to 1 within 1e-12");
}

FiniteMixture FiniteMixture::uniform(std::size_t support_size) {
    if (support_size == 0) throw std::invalid_argument("FiniteMixture: empty support");
    return FiniteMixture(std::vector<double>(support_size, 1.0 / static_cast<double>(support_size)));
}

FiniteMixture FiniteMixture::point_mass(std::size_t support_size, std::size_t index) {
    if (index >= support_size) throw std::invalid_argument("FiniteMixture: point mass out of range");
    std::vector<double> w(support_size, 0.0);
    w[index] = 1.0;
    return FiniteMixture(std::move(w));
}

double FiniteMixture::expect(std::span<const double> values) const {
    if (values.size() != weights_.size())
        throw std::invalid_argument("FiniteMixture::expect: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) s += weights_[i] * values[i];
    return s;
}

DiagonalGaussian::DiagonalGaussian(std::vector<double> mean, std::vector<double> variance)
    : mean_(std::move(mean)), variance_(std::move(variance)) {
    if (mean_.size() != variance_.size())
        throw std::invalid_argument("DiagonalGaussian: mean/variance length mismatch");
    if (mean_.empty()) throw std::invalid_argument("DiagonalGaussian: empty");
    for (double v : variance_)
        if (!(v > 0.0)) throw std::invalid_argument("DiagonalGaussian: variance must be positive");
    for (double m : mean_)
        if (!std::isfinite(m)) throw std::invalid_argument("DiagonalGaussian: nonfinite mean");
}

}  // namespace avpb
