#pragma once

#include <cstdint>

#include "avpb/lambda_schedule.hpp"

namespace avpb {

// A time-indexed interval center +- width containing E_rho mu(theta) for all
// t simultaneously with probability >= 1 - delta. The interval is for one
// fixed (rho, nu) pair: kl is frozen per query, and the guarantee does not
// hold simultaneously across posteriors.
struct ConfidenceSequence {
    double center = 0.0;
    double width = 0.0;
    std::uint64_t t = 0;
    double lo() const { return center - width; }
    double hi() const { return center + width; }
};

// center = weighted_loss_sum / cum_lambda,
// width  = (ln(2/delta) + kl + (sigma^2/2) * cum_lambda_sq) / cum_lambda.
// weighted_loss_sum is the running sum of lambda_i * E_rho f(Z_i, theta).
ConfidenceSequence subgaussian_cs_from_sums(double weighted_loss_sum, double cum_lambda,
                                            double cum_lambda_sq, std::uint64_t t, double sigma,
                                            double kl, double delta);

// Convenience form taking the schedule; prefix sums are recomputed from it.
ConfidenceSequence subgaussian_cs(double weighted_loss_sum, const LambdaSchedule& schedule,
                                  std::uint64_t t, double sigma, double kl, double delta);

// Width of the iterated-logarithm-rate sequence for 1-subGaussian losses
// (pre-scale by 1/sigma otherwise):
//   2*sqrt((ln(6.3/delta) + 1.4 ln log2(2t)) / t)
//     + kl / sqrt((ln(6.3/delta) + 1.4 ln log2(t+1)) * t)
double stitched_cs_width(std::uint64_t t, double kl, double delta);

// sqrt_log schedule lambda_t = sqrt(2 ln(2/delta)) / (sigma sqrt(t ln(t+1))),
// capped at its t=1 value. Drives the subGaussian width to zero at a
// sqrt(log(t)/t) rate. horizon_hint is advisory and does not change values.
LambdaSchedule default_lambda_schedule(double delta, double sigma, std::uint64_t horizon_hint);

}  // namespace avpb
