#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

namespace avpb {

// Probability distribution on a finite parameter set {0, ..., K-1}.
// Weights must be nonnegative and sum to 1 within 1e-12.
class FiniteMixture {
  public:
    explicit FiniteMixture(std::vector<double> weights);
    static FiniteMixture uniform(std::size_t support_size);
    static FiniteMixture point_mass(std::size_t support_size, std::size_t index);

    std::size_t support_size() const { return weights_.size(); }
    const std::vector<double>& weights() const { return weights_; }
    double operator[](std::size_t i) const { return weights_[i]; }

    // E_{theta~rho}[values[theta]]
    double expect(std::span<const double> values) const;

  private:
    std::vector<double> weights_;
};

// Product of independent 1-d Gaussians; a standard prior/posterior family for
// continuous parameter spaces.
class DiagonalGaussian {
  public:
    DiagonalGaussian(std::vector<double> mean, std::vector<double> variance);

    std::size_t dim() const { return mean_.size(); }
    const std::vector<double>& mean() const { return mean_; }
    const std::vector<double>& variance() const { return variance_; }

  private:
    std::vector<double> mean_;
    std::vector<double> variance_;
};

using Distribution = std::variant<FiniteMixture, DiagonalGaussian>;

}  // namespace avpb
