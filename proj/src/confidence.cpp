#include "avpb/confidence.hpp"

#include <cmath>
#include <stdexcept>

namespace avpb {

namespace {
double check_delta(double delta) {
    if (!(delta > 0.0 && delta < 1.0))
        throw std::domain_error("confidence sequence: delta must lie in (0,1)");
    return delta;
}
}  // namespace

ConfidenceSequence subgaussian_cs_from_sums(double weighted_loss_sum, double cum_lambda,
                                            double cum_lambda_sq, std::uint64_t t, double sigma,
                                            double kl, double delta) {
    check_delta(delta);
    if (!(sigma > 0.0)) throw std::domain_error("subgaussian_cs: sigma must be positive");
    if (!(kl >= 0.0)) throw std::domain_error("subgaussian_cs: kl must be >= 0");
    if (!(cum_lambda > 0.0))
        throw std::invalid_argument("subgaussian_cs: cumulative lambda weight is zero");
    ConfidenceSequence cs;
    cs.t = t;
    cs.center = weighted_loss_sum / cum_lambda;
    cs.width = (std::log(2.0 / delta) + kl + sigma * sigma / 2.0 * cum_lambda_sq) / cum_lambda;
    return cs;
}

ConfidenceSequence subgaussian_cs(double weighted_loss_sum, const LambdaSchedule& schedule,
                                  std::uint64_t t, double sigma, double kl, double delta) {
    return subgaussian_cs_from_sums(weighted_loss_sum, schedule.cum(t), schedule.cum_sq(t), t,
                                    sigma, kl, delta);
}

double stitched_cs_width(std::uint64_t t, double kl, double delta) {
    check_delta(delta);
    if (t == 0) throw std::domain_error("stitched_cs_width: t must be >= 1");
    if (!(kl >= 0.0)) throw std::domain_error("stitched_cs_width: kl must be >= 0");
    const double td = static_cast<double>(t);
    const double base = std::log(6.3 / delta);
    const double lead = base + 1.4 * std::log(std::log2(2.0 * td));
    const double tail = base + 1.4 * std::log(std::log2(td + 1.0));
    return 2.0 * std::sqrt(lead / td) + kl / std::sqrt(tail * td);
}

LambdaSchedule default_lambda_schedule(double delta, double sigma, std::uint64_t /*horizon_hint*/) {
    check_delta(delta);
    if (!(sigma > 0.0))
        throw std::domain_error("default_lambda_schedule: sigma must be positive");
    return LambdaSchedule::sqrt_log(std::sqrt(2.0 * std::log(2.0 / delta)) / sigma);
}

}  // namespace avpb
